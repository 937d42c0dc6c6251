"""Coded distributed matrix multiplication laboratory.

Encode/decode five erasure-coding schemes for distributed A^T B, evaluate
their analytic delay/storage/reliability models, pick the best code under
constraints, and validate everything with a seeded Monte Carlo simulator.
"""

from .analytic import (
    AnalysisRow,
    analysis_row,
    build_comparison_table,
    code_success_probability,
    computing_load,
    computing_time,
    exact_expected_time,
    storage_master,
    storage_worker,
    success_probability,
)
from .codes import (
    CodeChoice,
    CodedTaskSet,
    Scheme,
    decodable,
    decode,
    encode,
    feasibility_issue,
    feasible,
    recovery_threshold,
    worker_output,
)
from .delays import (
    DelayModel,
    expected_kth_order_statistic,
    sample_delay,
    subtask_delay_model,
)
from .errors import (
    CodedmmError,
    IllConditionedError,
    InfeasibleCodeError,
    NoFeasibleCodeError,
    NotEnoughResultsError,
    PartitionError,
)
from .selector import (
    IterationTrace,
    SelectionConstraints,
    SelectionResult,
    candidate_exclusions,
    candidate_rank,
    enumerate_candidates,
    run_iterations,
    select,
)
from .simulation import (
    ExperimentStats,
    RoundOutcome,
    empirical_vs_analytic,
    run_experiment,
    simulate_round,
)

__all__ = [
    "AnalysisRow",
    "CodeChoice",
    "CodedTaskSet",
    "CodedmmError",
    "DelayModel",
    "ExperimentStats",
    "IllConditionedError",
    "InfeasibleCodeError",
    "IterationTrace",
    "NoFeasibleCodeError",
    "NotEnoughResultsError",
    "PartitionError",
    "RoundOutcome",
    "Scheme",
    "SelectionConstraints",
    "SelectionResult",
    "analysis_row",
    "build_comparison_table",
    "candidate_exclusions",
    "candidate_rank",
    "code_success_probability",
    "computing_load",
    "computing_time",
    "decodable",
    "decode",
    "empirical_vs_analytic",
    "encode",
    "enumerate_candidates",
    "exact_expected_time",
    "expected_kth_order_statistic",
    "feasibility_issue",
    "feasible",
    "recovery_threshold",
    "run_experiment",
    "run_iterations",
    "sample_delay",
    "select",
    "simulate_round",
    "storage_master",
    "storage_worker",
    "subtask_delay_model",
    "success_probability",
    "worker_output",
]
