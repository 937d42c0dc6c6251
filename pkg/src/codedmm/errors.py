"""Exception types shared across the package."""


class CodedmmError(Exception):
    """Base class for all package-specific errors."""


class PartitionError(CodedmmError):
    """Matrix dimensions are not divisible by the requested partition count."""


class InfeasibleCodeError(CodedmmError):
    """The (scheme, partitions) pair cannot run on the given cluster size."""


class NotEnoughResultsError(CodedmmError):
    """The set of returned worker results is not decodable."""


class IllConditionedError(CodedmmError):
    """A decode system's condition number exceeds the safe limit."""


class NoFeasibleCodeError(CodedmmError):
    """No candidate satisfies the selection constraints.

    Carries ``reasons``, a mapping from candidate description to the first
    violated constraint, so callers can report why the search came up empty.
    """

    def __init__(self, message, reasons=None):
        super().__init__(message)
        self.reasons = dict(reasons or {})
