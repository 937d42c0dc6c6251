"""Constrained code selection by exhaustive enumeration.

Every (scheme, partition count) pair is scored with the analytic models and
filtered against four constraint families: scheme feasibility at the cluster
size, master storage, worker storage, and the binomial success probability.
The surviving candidate with the smallest planning time wins. The search
space is at most about 5N pairs, so exhaustive enumeration is cheap and the
returned objective is the feasible minimum by construction.

run_iterations repeats the selection round after round, drawing the
straggling rate uniformly from a configured support each time, optionally
validating the chosen code with the Monte Carlo engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import AnalysisRow, analysis_row
from .codes import CodeChoice, Scheme, feasibility_issue
from .errors import NoFeasibleCodeError
from .simulation import run_experiment

# fixed tie-break order after time, worker storage, and threshold
SCHEME_PRIORITY = {
    Scheme.MDS: 0,
    Scheme.POLYNOMIAL: 1,
    Scheme.MATDOT: 2,
    Scheme.PRODUCT: 3,
    Scheme.REPETITION: 4,
}


@dataclass(frozen=True)
class SelectionConstraints:
    """Inputs to one selection: cluster, dims, and the constraint thresholds."""

    worker_count: int
    dims: tuple  # (K, L)
    survival_probability: float
    storage_threshold_master: float | None = None
    storage_threshold_worker: float | None = None
    success_threshold: float = 0.0

    def __post_init__(self):
        if self.worker_count < 2:
            raise ValueError(f"need at least 2 workers, got {self.worker_count}")
        k_dim, l_dim = self.dims
        if k_dim <= 0 or l_dim <= 0:
            raise ValueError(f"matrix dims must be positive, got {self.dims}")
        if not 0 <= self.survival_probability <= 1:
            raise ValueError(
                f"survival probability {self.survival_probability} outside [0, 1]"
            )
        if not 0 <= self.success_threshold <= 1:
            raise ValueError(
                f"success threshold {self.success_threshold} outside [0, 1]"
            )
        for name in ("storage_threshold_master", "storage_threshold_worker"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class SelectionResult:
    """The winning candidate and the size of the feasible set it beat."""

    choice: CodeChoice
    objective_time: float
    row: AnalysisRow
    feasible_set_size: int


@dataclass(frozen=True)
class IterationTrace:
    """One round of the iterative selection loop."""

    iteration: int
    lam: float
    result: SelectionResult | None
    simulated_mean: float | None = None
    error: str | None = None


def _survey(constraints, lam):
    """Score every pair; returns (accepted (choice, row) list, exclusions)."""
    n = constraints.worker_count
    k_dim, l_dim = constraints.dims
    accepted = []
    excluded = {}
    for scheme in Scheme:
        for p in range(2, n + 1):
            choice = CodeChoice(scheme, p)
            label = f"{scheme.value} p={p}"
            issue = feasibility_issue(choice, n)
            if issue is not None:
                excluded[label] = issue
                continue
            row = analysis_row(
                choice, n, k_dim, l_dim, constraints.survival_probability, lam
            )
            thr_m = constraints.storage_threshold_master
            if thr_m is not None and row.storage_master > thr_m:
                excluded[label] = (
                    f"master storage {row.storage_master:.6g} exceeds {thr_m:.6g}"
                )
                continue
            thr_w = constraints.storage_threshold_worker
            if thr_w is not None and row.storage_worker > thr_w:
                excluded[label] = (
                    f"worker storage {row.storage_worker:.6g} exceeds {thr_w:.6g}"
                )
                continue
            if row.success_probability < constraints.success_threshold:
                excluded[label] = (
                    f"success probability {row.success_probability:.6f} below "
                    f"{constraints.success_threshold:.6f}"
                )
                continue
            accepted.append((choice, row))
    return accepted, excluded


def enumerate_candidates(constraints, lam=None):
    """All constraint-satisfying (choice, row) pairs; rows carry times iff
    a straggling rate is given."""
    return _survey(constraints, lam)[0]


def candidate_exclusions(constraints, lam=None):
    """Why each rejected (scheme, p) pair was excluded."""
    return _survey(constraints, lam)[1]


def candidate_rank(choice, row):
    """Total order on scored candidates: time, worker storage, threshold,
    then a fixed scheme order. Lower tuples win."""
    return (
        row.expected_time,
        row.storage_worker,
        row.recovery_threshold,
        SCHEME_PRIORITY[choice.scheme],
    )


def select(constraints, lam, schemes=None):
    """Pick the feasible candidate with the smallest planning time.

    Ties break toward lighter worker storage, then smaller recovery
    threshold, then a fixed scheme order. schemes, when given, restricts
    the search to that subset.
    """
    if lam <= 0:
        raise ValueError(f"straggling rate must be positive, got {lam}")
    allowed = None if schemes is None else set(schemes)
    accepted, excluded = _survey(constraints, lam)
    pool = [
        (choice, row)
        for choice, row in accepted
        if allowed is None or choice.scheme in allowed
    ]
    if not pool:
        reasons = {
            label: why
            for label, why in excluded.items()
            if allowed is None or label.split(" ")[0] in {s.value for s in allowed}
        }
        raise NoFeasibleCodeError(
            f"no feasible code at N={constraints.worker_count}", reasons
        )
    best_choice, best_row = min(pool, key=lambda pair: candidate_rank(*pair))
    return SelectionResult(
        choice=best_choice,
        objective_time=best_row.expected_time,
        row=best_row,
        feasible_set_size=len(pool),
    )


def _round_seed(seed_sequence):
    words = seed_sequence.generate_state(2, np.uint64)
    return int(words[0]) | int(words[1]) << 64


def run_iterations(
    constraints,
    lam_support,
    rounds,
    master_seed=0,
    simulate=False,
    trials=2000,
    schemes=None,
):
    """Repeated per-round selection with a uniformly drawn straggling rate.

    Each round derives its own random substreams from (master_seed, round),
    so traces are reproducible and independent of execution order. Rounds
    without any feasible code record the error and the run continues.
    """
    support = [float(v) for v in lam_support]
    if not support:
        raise ValueError("straggling-rate support must be non-empty")
    if any(not (math.isfinite(v) and v > 0) for v in support):
        raise ValueError(f"straggling rates must be positive, got {support}")
    if rounds < 1:
        raise ValueError(f"need at least one round, got {rounds}")

    traces = []
    for iteration in range(rounds):
        lam_stream, sim_stream = np.random.SeedSequence(
            (master_seed, iteration)
        ).spawn(2)
        lam = support[np.random.default_rng(lam_stream).integers(len(support))]
        result = None
        error = None
        simulated_mean = None
        try:
            result = select(constraints, lam, schemes)
        except NoFeasibleCodeError as exc:
            error = str(exc)
        if simulate and result is not None:
            stats = run_experiment(
                result.choice,
                constraints.worker_count,
                lam,
                constraints.survival_probability,
                trials,
                _round_seed(sim_stream),
            )
            simulated_mean = stats.mean_completion
        traces.append(IterationTrace(iteration, lam, result, simulated_mean, error))
    return traces
