"""Seeded Monte Carlo simulator for one master/worker multiplication round.

Each round draws, per worker, a survival coin (the worker fails outright
with probability 1 - phi) and a shifted-exponential delay. The round
completes at the earliest instant the set of finished workers is decodable
under the scheme's rule; if even the full survivor set cannot decode, the
round is undecodable.

No matrices are multiplied here. The simulator consumes delays and the
decodability predicate only, so experiments can use production-scale matrix
dimensions without paying for the arithmetic.

Every trial reads a fixed 2N-wide slice of a Philox stream (N survival
draws, then N delay draws), which makes results reproducible and
independent of chunking or execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import computing_time, exact_expected_time
from .codes import (
    Scheme,
    decodable,
    decodable_pattern_table,
    feasibility_issue,
    grid_side,
    recovery_threshold,
)
from .delays import (
    delay_from_uniform,
    scale_parameter,
    subtask_delay_model,
    trial_rng,
    trial_uniforms,
)
from .errors import InfeasibleCodeError

DEFAULT_CHUNK = 32768


@dataclass(frozen=True)
class RoundOutcome:
    """One simulated round; per_worker holds a delay or None for a failure."""

    per_worker: tuple
    completion_time: float | None
    decodable: bool
    completed_at_decode: frozenset


@dataclass(frozen=True)
class ExperimentStats:
    """Aggregates over seeded trials; means cover decodable trials only."""

    trials: int
    decodable_trials: int
    mean_completion: float
    undecodable_fraction: float
    p50: float
    p95: float


def _require_feasible(choice, n):
    issue = feasibility_issue(choice, n)
    if issue is not None:
        raise InfeasibleCodeError(
            f"{choice.scheme.value} with p={choice.partitions} at N={n}: {issue}"
        )


def simulate_round(choice, n, lam, phi, rng):
    """Simulate one round, drawing exactly 2n uniforms from rng."""
    _require_feasible(choice, n)
    model = subtask_delay_model(scale_parameter(choice), lam)
    u = rng.random(2 * n)
    survive = u[:n] < phi
    delays = delay_from_uniform(model, u[n:])
    per_worker = tuple(
        float(delays[w]) if survive[w] else None for w in range(n)
    )

    alive = np.flatnonzero(survive)
    order = alive[np.argsort(delays[alive], kind="stable")]
    if not decodable(choice, n, order):
        return RoundOutcome(per_worker, None, False, frozenset())

    # minimal decodable prefix of the completion order, by binary search
    # (adding workers never breaks decodability)
    lo, hi = 1, len(order)
    while lo < hi:
        mid = (lo + hi) // 2
        if decodable(choice, n, order[:mid]):
            hi = mid
        else:
            lo = mid + 1
    completion = float(delays[order[lo - 1]])
    finished = frozenset(int(w) for w in alive if delays[w] <= completion)
    return RoundOutcome(per_worker, completion, True, finished)


def _threshold_completions(delays_eff, k):
    ordered = np.sort(delays_eff, axis=1)
    return ordered[:, k - 1]


def _repetition_completions(delays_eff, p):
    trials, n = delays_eff.shape
    groups = delays_eff.reshape(trials, p, n // p)
    return groups.min(axis=2).max(axis=1)


def _product_completions(delays_eff, p, s):
    """Earliest decodable instant per trial on the s x s grid.

    Walks each trial's completion order once, building prefix bitmasks and
    consulting the exhaustive decodability table.
    """
    table = decodable_pattern_table(s, p)
    grid = delays_eff[:, : s * s]
    order = np.argsort(grid, axis=1, kind="stable")
    sorted_delays = np.take_along_axis(grid, order, axis=1)
    bits = np.where(np.isfinite(sorted_delays), np.uint32(1) << order.astype(np.uint32), 0)
    masks = np.bitwise_or.accumulate(bits.astype(np.uint32), axis=1)
    ok = table[masks]
    first = ok.argmax(axis=1)  # index of the first decodable prefix
    completions = np.take_along_axis(sorted_delays, first[:, None], axis=1)[:, 0]
    return np.where(ok.any(axis=1), completions, np.inf)


def run_experiment(choice, n, lam, phi, trials, master_seed, chunk_size=DEFAULT_CHUNK):
    """Aggregate seeded trials; deterministic for a fixed master_seed.

    chunk_size only bounds memory: every chunking produces byte-identical
    statistics because each trial owns a fixed slice of the random stream.
    """
    _require_feasible(choice, n)
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    p = choice.partitions
    scheme = choice.scheme
    model = subtask_delay_model(scale_parameter(choice), lam)
    k = recovery_threshold(choice, n)

    completions = []
    for start in range(0, trials, chunk_size):
        count = min(chunk_size, trials - start)
        u = trial_uniforms(master_seed, count, 2 * n, first_trial=start)
        survive = u[:, :n] < phi
        delays = delay_from_uniform(model, u[:, n:])
        delays_eff = np.where(survive, delays, np.inf)
        if scheme is Scheme.REPETITION:
            chunk = _repetition_completions(delays_eff, p)
        elif scheme is Scheme.PRODUCT:
            chunk = _product_completions(delays_eff, p, grid_side(n))
        else:
            chunk = _threshold_completions(delays_eff, k)
        completions.append(chunk)

    all_completions = np.concatenate(completions)
    good = all_completions[np.isfinite(all_completions)]
    bad = int(all_completions.size - good.size)
    if good.size:
        mean = float(good.mean())
        p50, p95 = (float(v) for v in np.percentile(good, [50, 95]))
    else:
        mean = p50 = p95 = math.nan
    return ExperimentStats(
        trials=trials,
        decodable_trials=int(good.size),
        mean_completion=mean,
        undecodable_fraction=bad / trials,
        p50=p50,
        p95=p95,
    )


def round_rng(master_seed, trial, n):
    """Generator positioned so simulate_round replays the given trial."""
    return trial_rng(master_seed, trial, 2 * n)


@dataclass(frozen=True)
class ValidationReport:
    """Simulated mean vs the exact and log-approximated expectations."""

    simulated_mean: float
    exact_time: float
    approx_time: float
    sim_vs_exact: float
    approx_vs_exact: float


def empirical_vs_analytic(choice, n, lam, phi=1.0, trials=100_000, master_seed=0):
    """Run an experiment and report relative gaps to both analytic forms."""
    stats = run_experiment(choice, n, lam, phi, trials, master_seed)
    exact = exact_expected_time(choice, n, lam)
    approx = computing_time(choice, n, lam)
    return ValidationReport(
        simulated_mean=stats.mean_completion,
        exact_time=exact,
        approx_time=approx,
        sim_vs_exact=abs(stats.mean_completion - exact) / exact,
        approx_vs_exact=abs(approx - exact) / exact,
    )
