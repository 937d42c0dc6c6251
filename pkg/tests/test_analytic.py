"""Closed-form model tests: times, storage, load, success probability."""

import math
from fractions import Fraction

import pytest

from codedmm.analytic import (
    AnalysisRow,
    TABLE_SCHEME_ORDER,
    active_workers,
    analysis_row,
    build_comparison_table,
    code_success_probability,
    computing_load,
    computing_time,
    exact_expected_time,
    product_regime_params,
    product_time_lower,
    product_time_upper,
    storage_master,
    storage_worker,
    success_probability,
)
from codedmm.codes import CodeChoice, Scheme, feasible, recovery_threshold
from codedmm.delays import harmonic
from codedmm.errors import InfeasibleCodeError


def choice(scheme, p):
    return CodeChoice(scheme, p)


# ------------------------------------------------------------ computing time


def test_computing_time_mds_frozen():
    t = computing_time(choice(Scheme.MDS, 2), 3, 1.0)
    assert t == pytest.approx(1.0493061443340549, rel=1e-12)


def test_computing_time_polynomial_frozen():
    t = computing_time(choice(Scheme.POLYNOMIAL, 2), 8, 1.0)
    assert t == pytest.approx(0.42328679513998635, rel=1e-12)


def test_computing_time_repetition_formula():
    # (1/p)(1 + p ln p / (N lam))
    t = computing_time(choice(Scheme.REPETITION, 3), 9, 2.0)
    assert t == pytest.approx((1 + 3 * math.log(3) / 18) / 3, rel=1e-12)


def test_computing_time_matdot_uses_single_partition_scale():
    t = computing_time(choice(Scheme.MATDOT, 2), 10, 1.0)
    assert t == pytest.approx((1 + math.log(10 / 7)) / 2, rel=1e-12)


def test_degenerate_threshold_falls_back_to_harmonic_form():
    # k = N makes ln(N/(N-k)) blow up; the exact form takes over
    for scheme, p, n, alpha in [
        (Scheme.MDS, 6, 6, 6),
        (Scheme.MATDOT, 3, 5, 3),
        (Scheme.POLYNOMIAL, 3, 9, 9),
    ]:
        t = computing_time(choice(scheme, p), n, 2.0)
        expect = (1 + harmonic(n) / 2.0) / alpha
        assert t == pytest.approx(expect, rel=1e-12)
        assert t == pytest.approx(exact_expected_time(choice(scheme, p), n, 2.0))


def test_product_regime_classification():
    params = product_regime_params(3, 9)
    assert params.regime == 1 and params.tau == 0
    assert params.c_threshold == pytest.approx(1.0)
    params = product_regime_params(2, 9)
    assert params.regime == 2
    assert params.delta == pytest.approx(1.25)
    params = product_regime_params(4, 25)
    assert params.regime == 1 and params.tau == 2
    assert params.c_threshold == pytest.approx(2 + math.sqrt(2 * math.log(2)))


def test_product_time_regime1_full_grid():
    # p equal to the grid side: c = 1, T = (1/p^2)(1 + ln s / lam)
    for lam in (0.5, 1.0, 5.0):
        t = computing_time(choice(Scheme.PRODUCT, 3), 9, lam)
        assert t == pytest.approx((1 + math.log(3) / lam) / 9, rel=1e-12)


def test_product_time_regime2_frozen():
    # p=2 on a 3x3 grid: delta = 1.25 and the upper bound reduces to
    # (1/4)(1 + 2 ln 3 / lam)
    t = computing_time(choice(Scheme.PRODUCT, 2), 9, 1.0)
    assert t == pytest.approx((1 + 2 * math.log(3)) / 4, rel=1e-12)
    assert t == pytest.approx(0.7993061443340549, rel=1e-12)


def test_product_regime2_bounds_at_unit_delta():
    lower = product_time_lower(2, 1.0, 1.0)
    upper = product_time_upper(2, 1.0, 1.0)
    assert lower == pytest.approx((1 + math.log(2)) / 4, rel=1e-12)
    assert upper == pytest.approx((1 + 2 * math.log(2 + math.sqrt(2))) / 4, rel=1e-12)


def test_product_regime2_bound_ordering():
    for delta in (0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 25.0):
        for lam in (0.2, 1.0, 4.0):
            assert product_time_lower(2, delta, lam) <= product_time_upper(
                2, delta, lam
            )


def test_computing_time_decreasing_in_straggling_rate():
    cases = [
        (Scheme.REPETITION, 2, 6),
        (Scheme.MDS, 3, 9),
        (Scheme.POLYNOMIAL, 2, 8),
        (Scheme.MATDOT, 3, 9),
        (Scheme.PRODUCT, 2, 9),
        (Scheme.PRODUCT, 3, 9),
    ]
    lams = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
    for scheme, p, n in cases:
        times = [computing_time(choice(scheme, p), n, lam) for lam in lams]
        assert all(a > b for a, b in zip(times, times[1:]))


def test_computing_time_rejects_infeasible_and_bad_rate():
    with pytest.raises(InfeasibleCodeError):
        computing_time(choice(Scheme.POLYNOMIAL, 3), 8, 1.0)
    with pytest.raises(ValueError):
        computing_time(choice(Scheme.MDS, 2), 6, 0.0)


# ------------------------------------------------------- exact expectations


def test_exact_expected_time_mds_frozen():
    t = exact_expected_time(choice(Scheme.MDS, 2), 3, 1.0)
    assert t == pytest.approx(11 / 12, rel=1e-12)
    assert t == pytest.approx(0.9166666666666666, rel=1e-12)


def test_exact_expected_time_repetition_max_of_mins():
    # p independent groups, each finishing at 1/p + Exp(N lam)
    t = exact_expected_time(choice(Scheme.REPETITION, 2), 6, 1.0)
    assert t == pytest.approx(0.5 + harmonic(2) / 6, rel=1e-12)
    t = exact_expected_time(choice(Scheme.REPETITION, 4), 8, 0.5)
    assert t == pytest.approx(0.25 + harmonic(4) / 4, rel=1e-12)


def test_exact_expected_time_product_full_partition_telescopes():
    # p = s needs the whole grid, so the expectation is the maximum of
    # s^2 shifted exponentials
    for lam in (0.5, 2.0):
        t = exact_expected_time(choice(Scheme.PRODUCT, 3), 9, lam)
        assert t == pytest.approx((1 + harmonic(9) / lam) / 9, rel=1e-12)


def test_exact_expected_time_product_matches_independent_sum():
    # independent evaluation of the stopping-time identity with exact
    # fractions over the brute-forced undecodable counts
    from codedmm.codes import undecodable_size_counts

    counts = undecodable_size_counts(3, 2)
    grid = 9
    lam = 1.0
    tail = sum(
        Fraction(counts[m])
        * Fraction(
            math.factorial(m) * math.factorial(grid - m - 1), math.factorial(grid)
        )
        for m in range(grid)
    )
    expect = Fraction(1, 4) + Fraction(1, 4) * tail
    t = exact_expected_time(choice(Scheme.PRODUCT, 2), 9, lam)
    assert t == pytest.approx(float(expect), rel=1e-12)


def test_log_approximation_within_ten_percent():
    # Corollary-style gap: for N >= 15 and k <= 0.6N the log form tracks
    # the harmonic form within 10%
    for n in (15, 20):
        for scheme in (Scheme.MDS, Scheme.POLYNOMIAL, Scheme.MATDOT):
            for p in range(2, n + 1):
                c = choice(scheme, p)
                if not feasible(c, n):
                    continue
                if recovery_threshold(c, n) > 0.6 * n:
                    continue
                for lam in (0.5, 1.0, 5.0):
                    approx = computing_time(c, n, lam)
                    exact = exact_expected_time(c, n, lam)
                    assert abs(approx - exact) / exact <= 0.10


# ------------------------------------------------------------------ storage


def test_storage_master_frozen_examples():
    assert storage_master(choice(Scheme.MDS, 2), 3, 4, 4) == pytest.approx(72)
    assert storage_master(choice(Scheme.MATDOT, 2), 3, 4, 4) == pytest.approx(144)


def test_storage_master_includes_base_inputs_and_result():
    for scheme in Scheme:
        n = 9 if scheme is Scheme.PRODUCT else 8
        c = choice(scheme, 2)
        assert storage_master(c, n, 10, 14) >= 2 * 10 * 14 + 100


def test_storage_worker_frozen_forms():
    k_dim = 12
    assert storage_worker(choice(Scheme.POLYNOMIAL, 2), k_dim, k_dim) == (
        pytest.approx(k_dim**2 + k_dim**2 / 4)
    )
    assert storage_worker(choice(Scheme.PRODUCT, 2), k_dim, k_dim) == (
        pytest.approx(k_dim**2 + k_dim**2 / 4)
    )
    assert storage_worker(choice(Scheme.MDS, 2), k_dim, k_dim) == (
        pytest.approx(2 * k_dim**2)
    )
    assert storage_worker(choice(Scheme.MATDOT, 2), k_dim, k_dim) == (
        pytest.approx(2 * k_dim**2)
    )
    assert storage_worker(choice(Scheme.REPETITION, 2), k_dim, k_dim) == (
        pytest.approx(2 * k_dim**2)
    )


def test_storage_worker_strictly_decreasing_in_p():
    for scheme in Scheme:
        values = [storage_worker(choice(scheme, p), 24, 36) for p in range(2, 7)]
        assert all(a > b for a, b in zip(values, values[1:]))


def test_polynomial_worker_storage_below_matdot():
    for p in range(2, 8):
        poly = storage_worker(choice(Scheme.POLYNOMIAL, p), 20, 20)
        matdot = storage_worker(choice(Scheme.MATDOT, p), 20, 20)
        assert poly < matdot


# ------------------------------------------------------------ computing load


def test_computing_load_frozen_forms():
    k_dim = 10
    assert computing_load(choice(Scheme.PRODUCT, 2), k_dim, k_dim) == (
        pytest.approx(k_dim**3 / 4)
    )
    assert computing_load(choice(Scheme.POLYNOMIAL, 2), k_dim, k_dim) == (
        pytest.approx(k_dim**3 / 4)
    )
    for scheme in (Scheme.MATDOT, Scheme.MDS, Scheme.REPETITION):
        assert computing_load(choice(scheme, 2), k_dim, k_dim) == (
            pytest.approx(k_dim**3 / 2)
        )


def test_total_coded_work_never_below_uncoded():
    # k workers each doing gamma multiplications is at least the K^2 L of
    # one uncoded multiplication
    k_dim, l_dim = 12, 18
    for scheme in Scheme:
        for n in range(4, 17):
            for p in range(2, n + 1):
                c = choice(scheme, p)
                if not feasible(c, n):
                    continue
                if scheme in (Scheme.POLYNOMIAL, Scheme.PRODUCT) and k_dim % p:
                    continue
                if scheme is Scheme.MATDOT and l_dim % p:
                    continue
                total = recovery_threshold(c, n) * computing_load(c, k_dim, l_dim)
                assert total >= k_dim**2 * l_dim * (1 - 1e-12)


# ------------------------------------------------------- success probability


def test_success_probability_frozen_values():
    assert success_probability(2, 6, 2 / 3) == pytest.approx(716 / 729, rel=1e-12)
    assert success_probability(4, 6, 2 / 3) == pytest.approx(496 / 729, rel=1e-12)
    assert success_probability(6, 6, 1.0) == 1.0
    assert success_probability(1, 5, 0.0) == 0.0


def test_success_probability_matches_exact_fractions():
    for k in range(1, 7):
        for n in range(k, 9):
            exact = sum(
                Fraction(math.comb(n, i)) * Fraction(2, 3) ** i * Fraction(1, 3) ** (n - i)
                for i in range(k, n + 1)
            )
            assert success_probability(k, n, 2 / 3) == pytest.approx(
                float(exact), rel=1e-10
            )


def test_success_probability_monotonicity():
    values = [success_probability(k, 10, 0.7) for k in range(1, 11)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    in_phi = [success_probability(4, 10, phi) for phi in (0.2, 0.4, 0.6, 0.8, 1.0)]
    assert all(a <= b for a, b in zip(in_phi, in_phi[1:]))


def test_code_success_probability_uses_grid_for_product():
    # product at N=10 runs on the 3x3 grid, so rho is over 9 workers
    c = choice(Scheme.PRODUCT, 2)
    assert active_workers(c, 10) == 9
    assert code_success_probability(c, 10, 0.9) == pytest.approx(
        success_probability(6, 9, 0.9)
    )


# ------------------------------------------------------------------- table


def test_comparison_table_structure_and_na_placement():
    rows = build_comparison_table([6, 7, 8, 9], 2000, 2000, 2 / 3)
    assert len(rows) == 20
    by_key = {(r.choice.scheme, r.cluster_size): r for r in rows}
    # scheme-major ordering
    assert [r.choice.scheme for r in rows[:4]] == [Scheme.PRODUCT] * 4
    assert rows[0].cluster_size == 6 and rows[3].cluster_size == 9

    for n in (6, 7, 8):
        assert not by_key[(Scheme.PRODUCT, n)].feasible
    product_nine = by_key[(Scheme.PRODUCT, 9)]
    assert product_nine.feasible and product_nine.recovery_threshold == 6
    for n in (7, 9):
        assert not by_key[(Scheme.REPETITION, n)].feasible
    assert by_key[(Scheme.REPETITION, 6)].recovery_threshold == 4
    assert by_key[(Scheme.REPETITION, 8)].recovery_threshold == 5

    k_cube = 2000**3
    for n in (6, 7, 8, 9):
        assert by_key[(Scheme.POLYNOMIAL, n)].recovery_threshold == 4
        assert by_key[(Scheme.POLYNOMIAL, n)].computing_load == pytest.approx(
            k_cube / 4
        )
        assert by_key[(Scheme.MATDOT, n)].recovery_threshold == 3
        assert by_key[(Scheme.MDS, n)].recovery_threshold == 2
        assert by_key[(Scheme.MDS, n)].computing_load == pytest.approx(k_cube / 2)

    assert product_nine.computing_load == pytest.approx(k_cube / 4)
    assert product_nine.storage_worker == pytest.approx(2000**2 * 1.25)
    assert product_nine.success_probability == pytest.approx(12800 / 19683)
    assert by_key[(Scheme.MDS, 6)].success_probability == pytest.approx(716 / 729)


def test_analysis_row_reports_issue_for_infeasible():
    row = analysis_row(CodeChoice(Scheme.REPETITION, 2), 7, 100, 100, 0.9)
    assert not row.feasible
    assert "divide" in row.issue
    assert row.success_probability is None


def test_analysis_row_expected_time_optional():
    c = CodeChoice(Scheme.MDS, 2)
    without = analysis_row(c, 6, 100, 100, 0.9)
    assert without.expected_time is None
    with_lam = analysis_row(c, 6, 100, 100, 0.9, lam=1.0)
    assert with_lam.expected_time == pytest.approx(computing_time(c, 6, 1.0))


def test_table_scheme_order_is_fixed():
    assert TABLE_SCHEME_ORDER == (
        Scheme.PRODUCT,
        Scheme.POLYNOMIAL,
        Scheme.MATDOT,
        Scheme.MDS,
        Scheme.REPETITION,
    )
