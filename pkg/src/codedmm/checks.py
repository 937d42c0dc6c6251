"""Self-verification battery behind the `verify` subcommand.

Each check re-derives a model prediction through an independent route
(brute force, closed form, Monte Carlo) and reports a machine-readable
verdict. Monte Carlo checks degrade to "inconclusive" instead of failing
when the trial budget is too small for their tolerance, so verdicts stay
stable across seeds. One reference cell is reported as expected
discrepancy: the published table prints 0.63 for the grid code at N=9
while the binomial tail with k=6 over nine workers is 12800/19683, a gap
of about 0.02 that no survival probability of exactly 2/3 can close.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    build_comparison_table,
    computing_time,
    exact_expected_time,
    success_probability,
)
from .codes import CodeChoice, Scheme, decodable, decode, encode, worker_output
from .selector import SelectionConstraints, enumerate_candidates, select
from .simulation import run_experiment

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
KNOWN_DISCREPANCY = "known-discrepancy"

# Monte Carlo checks refuse to fail below this many trials
MC_TRIAL_FLOOR = 2000

# published comparison-table success probabilities at phi = 2/3, p = 2
REFERENCE_RHO = {
    (Scheme.PRODUCT, 9): 0.63,
    (Scheme.POLYNOMIAL, 6): 0.67,
    (Scheme.POLYNOMIAL, 7): 0.82,
    (Scheme.POLYNOMIAL, 8): 0.91,
    (Scheme.POLYNOMIAL, 9): 0.96,
    (Scheme.MATDOT, 6): 0.89,
    (Scheme.MATDOT, 7): 0.95,
    (Scheme.MATDOT, 8): 0.98,
    (Scheme.MATDOT, 9): 0.99,
    (Scheme.MDS, 6): 0.98,
    (Scheme.MDS, 7): 0.99,
    (Scheme.MDS, 8): 0.99,
    (Scheme.MDS, 9): 0.99,
}
KNOWN_RHO_DISCREPANCIES = {(Scheme.PRODUCT, 9)}
REFERENCE_RHO_TOL = 0.015

# reference N/A layout: (scheme, N) cells with no entry at p = 2
REFERENCE_NA = {
    (Scheme.PRODUCT, 6),
    (Scheme.PRODUCT, 7),
    (Scheme.PRODUCT, 8),
    (Scheme.REPETITION, 7),
    (Scheme.REPETITION, 9),
}


def _derived_seed(master_seed, tag):
    """Stable 128-bit stream key for one check's Monte Carlo draw."""
    words = np.random.SeedSequence((master_seed, tag)).generate_state(2, np.uint64)
    return int(words[0]) | int(words[1]) << 64


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    measured: float | None
    tolerance: float | None
    detail: str

    def as_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _round_trip_cases():
    # one representative cluster per scheme, small enough to stay instant
    return [
        (CodeChoice(Scheme.REPETITION, 2), 6),
        (CodeChoice(Scheme.MDS, 2), 6),
        (CodeChoice(Scheme.POLYNOMIAL, 2), 6),
        (CodeChoice(Scheme.MATDOT, 2), 6),
        (CodeChoice(Scheme.PRODUCT, 2), 9),
    ]


def check_decode_round_trip(master_seed=0):
    """Encode, drop to a minimal survivor set, decode, compare to A^T B."""
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, 101)))
    worst = 0.0
    for choice, n in _round_trip_cases():
        a = rng.standard_normal((6, 4))
        b = rng.standard_normal((6, 4))
        tasks = encode(a, b, choice, n)
        survivors = _minimal_survivors(choice, n)
        results = [(w, worker_output(tasks, w)) for w in survivors]
        c_hat = decode(tasks, results)
        truth = a.T @ b
        err = np.linalg.norm(c_hat - truth) / np.linalg.norm(truth)
        worst = max(worst, float(err))
    status = PASS if worst <= 1e-6 else FAIL
    return CheckResult(
        name="decode-round-trip",
        status=status,
        measured=worst,
        tolerance=1e-6,
        detail="worst relative error across one minimal survivor set per scheme",
    )


def _minimal_survivors(choice, n):
    """A decodable survivor set that loses every non-essential worker."""
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            if decodable(choice, n, subset):
                return subset
    raise AssertionError("full worker set must be decodable")


def check_product_brute_force():
    """All 512 survivor patterns of the 3x3 grid against the threshold."""
    choice = CodeChoice(Scheme.PRODUCT, 2)
    n = 9
    sizes_ok = True
    missing_five = False
    for mask in range(2**9):
        pattern = [w for w in range(9) if mask >> w & 1]
        ok = decodable(choice, n, pattern)
        if len(pattern) >= 6 and not ok:
            sizes_ok = False
        if len(pattern) == 5 and not ok:
            missing_five = True
    status = PASS if sizes_ok and missing_five else FAIL
    return CheckResult(
        name="grid-code-brute-force",
        status=status,
        measured=float(sizes_ok and missing_five),
        tolerance=None,
        detail="every size>=6 pattern decodes and some size-5 pattern does not",
    )


def check_order_statistic(trials, master_seed):
    """Simulated mean completion vs the exact order-statistic expectation."""
    choice = CodeChoice(Scheme.MDS, 2)
    n, lam = 10, 2.0
    stats = run_experiment(choice, n, lam, 1.0, trials, _derived_seed(master_seed, 103))
    exact = exact_expected_time(choice, n, lam)
    gap = abs(stats.mean_completion - exact) / exact
    if trials < MC_TRIAL_FLOOR:
        status = INCONCLUSIVE
        detail = f"trial budget {trials} below {MC_TRIAL_FLOOR}, confidence too wide"
    else:
        status = PASS if gap <= 0.01 else FAIL
        detail = f"mds p=2 N=10 lam=2, {trials} trials vs exact {exact:.6f}"
    return CheckResult(
        name="order-statistic-agreement",
        status=status,
        measured=float(gap),
        tolerance=0.01,
        detail=detail,
    )


def check_failure_model(trials, master_seed):
    """Empirical undecodable fraction vs the exact binomial complement."""
    choice = CodeChoice(Scheme.MDS, 2)
    n, phi = 6, 2 / 3
    stats = run_experiment(choice, n, 1.0, phi, trials, _derived_seed(master_seed, 104))
    expect = 1.0 - success_probability(2, n, phi)
    sigma = math.sqrt(expect * (1.0 - expect) / trials)
    gap = abs(stats.undecodable_fraction - expect)
    if trials < MC_TRIAL_FLOOR:
        status = INCONCLUSIVE
        detail = f"trial budget {trials} below {MC_TRIAL_FLOOR}, confidence too wide"
    else:
        status = PASS if gap <= 3 * sigma else FAIL
        detail = f"mds k=2 N=6 phi=2/3: expect {expect:.6f}, 3 sigma band"
    return CheckResult(
        name="failure-model-agreement",
        status=status,
        measured=float(gap),
        tolerance=3 * sigma,
        detail=detail,
    )


def check_log_approximation():
    """Planning-time log form vs exact harmonic form, N >= 15, k <= 0.6N."""
    cases = [
        (CodeChoice(Scheme.MDS, 2), 15),
        (CodeChoice(Scheme.MDS, 3), 20),
        (CodeChoice(Scheme.POLYNOMIAL, 2), 15),
        (CodeChoice(Scheme.POLYNOMIAL, 3), 20),
        (CodeChoice(Scheme.MATDOT, 3), 20),
    ]
    worst = 0.0
    for choice, n in cases:
        for lam in (0.5, 1.0, 5.0):
            approx = computing_time(choice, n, lam)
            exact = exact_expected_time(choice, n, lam)
            worst = max(worst, abs(approx - exact) / exact)
    status = PASS if worst <= 0.10 else FAIL
    return CheckResult(
        name="log-approximation-error",
        status=status,
        measured=float(worst),
        tolerance=0.10,
        detail="max relative gap over threshold codes with N>=15, k<=0.6N",
    )


def check_selection_envelope():
    """The selected time equals the feasible minimum at every cluster size."""
    worst = 0.0
    for n in range(6, 21):
        constraints = SelectionConstraints(
            worker_count=n, dims=(2000, 5000), survival_probability=0.95
        )
        result = select(constraints, lam=5.0)
        floor = min(
            row.expected_time
            for _, row in enumerate_candidates(constraints, lam=5.0)
        )
        worst = max(worst, abs(result.objective_time - floor))
    status = PASS if worst == 0.0 else FAIL
    return CheckResult(
        name="selection-envelope",
        status=status,
        measured=worst,
        tolerance=0.0,
        detail="objective vs independent minimum over enumerated candidates",
    )


def _reference_rows():
    rows = build_comparison_table([6, 7, 8, 9], 2000, 2000, 2 / 3, p=2)
    return {(row.choice.scheme, row.cluster_size): row for row in rows}


def check_table_reference():
    """Model success probabilities vs the published table, expected gap aside."""
    rows = _reference_rows()
    worst = 0.0
    bad = []
    for cell, printed in REFERENCE_RHO.items():
        if cell in KNOWN_RHO_DISCREPANCIES:
            continue
        gap = abs(rows[cell].success_probability - printed)
        worst = max(worst, gap)
        if gap > REFERENCE_RHO_TOL:
            bad.append(cell)
    status = PASS if not bad else FAIL
    return CheckResult(
        name="table-success-reference",
        status=status,
        measured=float(worst),
        tolerance=REFERENCE_RHO_TOL,
        detail="12 published cells at phi=2/3, expected-discrepancy cell excluded",
    )


def check_table_known_cell():
    """The one published cell the binomial tail cannot reach."""
    rows = _reference_rows()
    cell = (Scheme.PRODUCT, 9)
    gap = abs(rows[cell].success_probability - REFERENCE_RHO[cell])
    status = KNOWN_DISCREPANCY if gap > REFERENCE_RHO_TOL else PASS
    return CheckResult(
        name="table-grid-cell-reference",
        status=status,
        measured=float(gap),
        tolerance=REFERENCE_RHO_TOL,
        detail=(
            "published 0.63 vs binomial tail 12800/19683; every published cell "
            "matches a survival probability of 0.66 truncated to two decimals"
        ),
    )


def check_table_na_placement():
    """Infeasible cells sit exactly where the published table prints none."""
    rows = _reference_rows()
    na = {cell for cell, row in rows.items() if not row.feasible}
    status = PASS if na == REFERENCE_NA else FAIL
    return CheckResult(
        name="table-na-placement",
        status=status,
        measured=float(na == REFERENCE_NA),
        tolerance=None,
        detail=f"infeasible cells {sorted((s.value, n) for s, n in na)}",
    )


def run_checks(trials=100_000, master_seed=0):
    """The full battery; Monte Carlo budget and seed come from the caller."""
    return [
        check_decode_round_trip(master_seed),
        check_product_brute_force(),
        check_order_statistic(trials, master_seed),
        check_failure_model(trials, master_seed),
        check_log_approximation(),
        check_selection_envelope(),
        check_table_reference(),
        check_table_known_cell(),
        check_table_na_placement(),
    ]


def summarize(results):
    counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0, KNOWN_DISCREPANCY: 0}
    for result in results:
        counts[result.status] += 1
    return counts
