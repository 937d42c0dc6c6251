"""Closed-form delay, storage, load, and reliability models per scheme.

Two delay figures are exposed. computing_time is the planning value used by
the code selector: a log-form approximation of the expected completion time,
with the product code handled by its two asymptotic regimes. When the
recovery threshold equals the cluster size the log argument degenerates, so
the exact harmonic form is substituted. exact_expected_time is the exact
expectation of the completion time under the shifted-exponential delay
model, available in closed form for every scheme (the product code via the
enumerated spectrum of undecodable completion patterns).

Storage counts matrix entries held at the master or at one worker, and the
computing load counts scalar multiplications at one worker. Both follow the
convention that B has the same column count K as A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codes import (
    CodeChoice,
    Scheme,
    feasibility_issue,
    grid_side,
    is_square,
    recovery_threshold,
    undecodable_size_counts,
)
from .delays import (
    expected_kth_order_statistic,
    harmonic,
    scale_parameter,
    subtask_delay_model,
)
from .errors import InfeasibleCodeError


def _require_feasible(choice, n):
    issue = feasibility_issue(choice, n)
    if issue is not None:
        raise InfeasibleCodeError(
            f"{choice.scheme.value} with p={choice.partitions} at N={n}: {issue}"
        )


def active_workers(choice, n):
    """Workers that actually receive payloads: the grid for product codes."""
    if choice.scheme is Scheme.PRODUCT:
        return grid_side(n) ** 2
    return n


@dataclass(frozen=True)
class ProductRegimeParams:
    """Regime selection inputs for the product-code time formulas."""

    regime: int  # 1 or 2
    tau: int  # 2(s - p), even
    delta: float  # N'/p^2 - 1
    c_threshold: float  # c_{tau/2 + 1}


def product_regime_params(p, n):
    """Classify a product code into its fast (1) or redundant (2) regime."""
    s = grid_side(n)
    tau = 2 * (s - p)
    half = 1 + tau // 2
    c = half + math.sqrt(half * math.log(half))
    delta = s * s / p**2 - 1
    # the regime-1 approximation is accurate once p is a large fraction of
    # the grid side; 0.8 is the working cut, compared without floats
    regime = 1 if 5 * p >= 4 * s else 2
    return ProductRegimeParams(regime, tau, delta, c)


def product_time_regime1(p, n, lam):
    """Expected-time approximation when p is close to the grid side."""
    params = product_regime_params(p, n)
    s = grid_side(n)
    return (1 + math.log(s / params.c_threshold) / lam) / p**2


def product_time_lower(p, delta, lam):
    """Regime-2 lower bound on the expected product-code time."""
    if delta <= 0:
        raise ValueError(f"regime-2 bounds need delta > 0, got {delta}")
    return (1 + math.log((1 + delta) / delta) / lam) / p**2


def product_time_upper(p, delta, lam):
    """Regime-2 upper bound; the conservative planning value."""
    if delta <= 0:
        raise ValueError(f"regime-2 bounds need delta > 0, got {delta}")
    root = math.sqrt(1 + delta)
    return (1 + 2 * math.log((1 + delta + root) / delta) / lam) / p**2


def computing_time(choice, n, lam):
    """Planning estimate of the expected completion time (time units)."""
    _require_feasible(choice, n)
    if lam <= 0:
        raise ValueError(f"straggling rate must be positive, got {lam}")
    p = choice.partitions
    scheme = choice.scheme
    if scheme is Scheme.REPETITION:
        return (1 + p * math.log(p) / (n * lam)) / p
    if scheme is Scheme.PRODUCT:
        params = product_regime_params(p, n)
        if params.regime == 1:
            return product_time_regime1(p, n, lam)
        return product_time_upper(p, params.delta, lam)
    k = recovery_threshold(choice, n)
    if k == n:
        # ln(N/(N-k)) degenerates; fall back to the exact harmonic form
        return exact_expected_time(choice, n, lam)
    alpha = scale_parameter(choice)
    return (1 + math.log(n / (n - k)) / lam) / alpha


def exact_expected_time(choice, n, lam):
    """Exact expected completion time under the delay model, all workers up.

    Threshold schemes are k-th order statistics. Repetition completes when
    the slowest block's fastest replica finishes, which is a maximum of p
    independent exponentials of rate N lam above the shift. Product codes
    average the order-statistic gaps against the enumerated count of
    undecodable patterns per size.
    """
    _require_feasible(choice, n)
    if lam <= 0:
        raise ValueError(f"straggling rate must be positive, got {lam}")
    p = choice.partitions
    scheme = choice.scheme
    alpha = scale_parameter(choice)
    if scheme is Scheme.REPETITION:
        return 1 / p + harmonic(p) / (n * lam)
    if scheme is Scheme.PRODUCT:
        s = grid_side(n)
        grid = s * s
        undecodable = undecodable_size_counts(s, p)
        total = math.fsum(
            undecodable[m]
            * math.factorial(m)
            * math.factorial(grid - m - 1)
            / math.factorial(grid)
            for m in range(grid)
        )
        return 1 / alpha + total / (alpha * lam)
    k = recovery_threshold(choice, n)
    return expected_kth_order_statistic(subtask_delay_model(alpha, lam), n, k)


def storage_master(choice, n, k_dim, l_dim):
    """Matrix entries the master holds: inputs, coded blocks, and results."""
    _require_feasible(choice, n)
    p = choice.partitions
    scheme = choice.scheme
    n_eff = active_workers(choice, n)
    k = recovery_threshold(choice, n)
    base = 2 * k_dim * l_dim + k_dim**2
    if scheme is Scheme.REPETITION:
        return k * k_dim**2 / p + base
    if scheme is Scheme.MDS:
        return (n - k) * k_dim * l_dim / p + k * k_dim**2 / p + base
    if scheme is Scheme.POLYNOMIAL:
        return 2 * n * k_dim * l_dim / p + k * k_dim**2 / p**2 + base
    if scheme is Scheme.MATDOT:
        return 2 * n * k_dim * l_dim / p + k * k_dim**2 + base
    return 2 * (n_eff - k) * k_dim * l_dim / p + k * k_dim**2 / p**2 + base


def storage_worker(choice, k_dim, l_dim):
    """Matrix entries one worker holds: its payload pair plus its output."""
    p = choice.partitions
    scheme = choice.scheme
    if scheme in (Scheme.REPETITION, Scheme.MDS):
        return k_dim * l_dim / p + k_dim * l_dim + k_dim**2 / p
    if scheme in (Scheme.POLYNOMIAL, Scheme.PRODUCT):
        return 2 * k_dim * l_dim / p + k_dim**2 / p**2
    return 2 * k_dim * l_dim / p + k_dim**2


def computing_load(choice, k_dim, l_dim):
    """Scalar multiplications one worker performs."""
    scheme = choice.scheme
    p = choice.partitions
    if scheme in (Scheme.POLYNOMIAL, Scheme.PRODUCT):
        return l_dim * (k_dim / p) ** 2
    if scheme is Scheme.MATDOT:
        return l_dim / p * k_dim**2
    return l_dim * k_dim**2 / p


def success_probability(k, n, phi):
    """P(at least k of n workers survive), each surviving with probability phi."""
    if not 1 <= k <= n:
        raise ValueError(f"threshold k={k} outside 1..{n}")
    if not 0 <= phi <= 1:
        raise ValueError(f"survival probability {phi} outside [0, 1]")
    return math.fsum(
        math.comb(n, i) * phi**i * (1 - phi) ** (n - i) for i in range(k, n + 1)
    )


def code_success_probability(choice, n, phi):
    """Binomial survival proxy for the scheme on the active worker set."""
    k = recovery_threshold(choice, n)
    return success_probability(k, active_workers(choice, n), phi)


@dataclass(frozen=True)
class AnalysisRow:
    """One (scheme, N) cell of the comparison table; None marks N/A."""

    choice: CodeChoice
    cluster_size: int
    feasible: bool
    recovery_threshold: int | None
    computing_load: float | None
    storage_master: float | None
    storage_worker: float | None
    success_probability: float | None
    expected_time: float | None
    issue: str | None = None


def analysis_row(choice, n, k_dim, l_dim, phi, lam=None):
    """Evaluate every model for one candidate; expected_time needs lam."""
    issue = feasibility_issue(choice, n)
    if issue is not None:
        return AnalysisRow(choice, n, False, None, None, None, None, None, None, issue)
    return AnalysisRow(
        choice=choice,
        cluster_size=n,
        feasible=True,
        recovery_threshold=recovery_threshold(choice, n),
        computing_load=computing_load(choice, k_dim, l_dim),
        storage_master=storage_master(choice, n, k_dim, l_dim),
        storage_worker=storage_worker(choice, k_dim, l_dim),
        success_probability=code_success_probability(choice, n, phi),
        expected_time=None if lam is None else computing_time(choice, n, lam),
    )


TABLE_SCHEME_ORDER = (
    Scheme.PRODUCT,
    Scheme.POLYNOMIAL,
    Scheme.MATDOT,
    Scheme.MDS,
    Scheme.REPETITION,
)


def build_comparison_table(n_values, k_dim, l_dim, phi, p=2, lam=None):
    """One AnalysisRow per (scheme, N), scheme-major, fixed partition count.

    Product rows are restricted to exact-square N here: the reference layout
    lists the product code only where the whole cluster forms the grid, even
    though a smaller embedded grid would be feasible.
    """
    rows = []
    for scheme in TABLE_SCHEME_ORDER:
        for n in n_values:
            choice = CodeChoice(scheme, p)
            if scheme is Scheme.PRODUCT and not is_square(n):
                rows.append(
                    AnalysisRow(
                        choice, n, False, None, None, None, None, None, None,
                        issue=f"N={n} is not a square grid",
                    )
                )
                continue
            rows.append(analysis_row(choice, n, k_dim, l_dim, phi, lam))
    return rows
