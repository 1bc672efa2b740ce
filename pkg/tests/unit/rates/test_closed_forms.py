"""
Unit tests for the closed-form capacity and bound evaluators.
Reference values are recomputed with mpmath where they are not exact.
"""
import math

import mpmath
import numpy as np
import pytest
from app.channel.model import NetworkSpec, awgn_route, bec_route, bsc_route
from app.core.exceptions import InfeasibleSpecError, SpecMismatchError
from app.rates.closed_forms import (
    binary_attack_table,
    cap_independent_jammer_gaussian,
    cap_memoryless_erasure,
    cap_memoryless_gaussian,
    cap_memoryless_replacement,
    low_foreseer_erasure,
    low_foreseer_replacement,
    up_foreseer_erasure,
    up_foreseer_replacement,
)

mpmath.mp.dps = 40


def h(p) -> float:
    p = mpmath.mpf(p)
    if p in (0, 1):
        return mpmath.mpf(0)
    return -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)


def bsc(n_r, n_a, N, D):
    return NetworkSpec.identical(n_r, n_a, bsc_route(N, D))


def bec(n_r, n_a, N, D):
    return NetworkSpec.identical(n_r, n_a, bec_route(N, D))


def awgn(n_r, n_a, N, D, P):
    return NetworkSpec.identical(n_r, n_a, awgn_route(N, D, P))


# ==================== HAPPY PATH TESTS ====================

@pytest.mark.parametrize(
    "spec, expected",
    [
        (bsc(1, 1, 0.1, 0.0), 0.531004),
        (bsc(1, 1, 0.1, 0.1), 0.319929),
        (bsc(2, 1, 0.1, 0.1), 0.850933),
    ],
)
def test_cap_memoryless_replacement_examples(spec, expected):
    """Test: Plain BSC capacity, the single attacked route and two routes with one adversary."""
    assert cap_memoryless_replacement(spec).overall == pytest.approx(expected, abs=1e-6)


def test_cap_memoryless_replacement_folds_large_budgets():
    """Test: D > 1/2 behaves like 1 - D."""
    assert cap_memoryless_replacement(bsc(1, 1, 0.1, 0.8)).overall == pytest.approx(
        cap_memoryless_replacement(bsc(1, 1, 0.1, 0.2)).overall, abs=1e-12
    )


def test_cap_memoryless_replacement_identical_route_closed_form():
    """Test: n_r - (n_r - n_a) H(N) - n_a H(N * D) for identical routes."""
    N, D = 0.07, 0.12
    for n_r in range(1, 5):
        for n_a in range(n_r + 1):
            expected = n_r - (n_r - n_a) * h(N) - n_a * h(N * (1 - D) + D * (1 - N))
            report = cap_memoryless_replacement(bsc(n_r, n_a, N, D))
            assert report.overall == pytest.approx(float(expected), abs=1e-12)
            assert report.argmin.count("1") == n_a


@pytest.mark.parametrize(
    "N, D, expected",
    [(0.0, 0.0, 1.0), (0.1, 0.1, 0.0), (0.0, 0.1, 0.278072)],
)
def test_low_foreseer_replacement_examples(N, D, expected):
    """Test: Clean channel, the clamped table value and the N = 0 boundary."""
    assert low_foreseer_replacement(bsc(1, 1, N, D)).overall == pytest.approx(expected, abs=1e-6)


def test_low_foreseer_replacement_warns_past_quarter_budget():
    """Test: D > 0.25 is evaluated but flagged."""
    report = low_foreseer_replacement(bsc(1, 1, 0.0, 0.3))
    assert report.warnings and "0.25" in report.warnings[0]


@pytest.mark.parametrize(
    "N, D, n_r, expected",
    [(0.0, 0.0, 3, 3.0), (0.1, 0.1, 1, 0.062007), (0.0, 0.5, 1, 0.0)],
)
def test_up_foreseer_replacement_examples(N, D, n_r, expected):
    """Test: Clean routes, the table value and the exhausted budget."""
    assert up_foreseer_replacement(bsc(n_r, 1, N, D)).overall == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize(
    "n_r, n_a, N, D, expected",
    [(2, 2, 0.0, 0.0, 2.0), (1, 1, 0.1, 0.1, 0.81), (3, 1, 0.2, 0.5, 2.0)],
)
def test_cap_memoryless_erasure_examples(n_r, n_a, N, D, expected):
    """Test: (1 - N)(n_r - n_a D) for identical routes."""
    assert cap_memoryless_erasure(bec(n_r, n_a, N, D)).overall == pytest.approx(expected, abs=1e-12)


def test_low_foreseer_erasure_values():
    """Test: BEC capacity at D = 0, 0.3414 at N = D = 0.1, and the entropy variant below it by D(1 - N)."""
    assert low_foreseer_erasure(bec(2, 1, 0.2, 0.0)).overall == pytest.approx(1.6, abs=1e-12)
    N, D = 0.1, 0.1
    n_bar = N * (1 - D) + D
    expected = 1 - N - n_bar * h(D / n_bar) - h(D) + D
    closed = low_foreseer_erasure(bec(1, 1, N, D)).overall
    assert closed == pytest.approx(float(expected), abs=1e-12)
    assert closed == pytest.approx(0.3414, abs=1e-4)
    entropy = low_foreseer_erasure(bec(1, 1, N, D), variant="entropy").overall
    assert closed - entropy == pytest.approx(D * (1 - N), abs=1e-12)


def test_low_foreseer_erasure_at_noiseless_boundary():
    """Test: At N = 0 the summand is 1 + D - H(D) (regression value)."""
    value = low_foreseer_erasure(bec(1, 1, 0.0, 0.1)).overall
    assert value == pytest.approx(float(1 + mpmath.mpf("0.1") - h(0.1)), abs=1e-12)


def test_up_foreseer_erasure_values():
    """Test: 0.8030 at N = D = 0.1, 1 on a clean route, and the cap by the memoryless capacity."""
    N, D = 0.1, 0.1
    expected = h((1 - D) * (1 - N)) + (1 - D) * (1 - N - h(N)) - h(D / 2)
    report = up_foreseer_erasure(bec(1, 1, N, D))
    assert report.overall == pytest.approx(float(expected), abs=1e-12)
    assert report.overall == pytest.approx(0.8030, abs=1e-4)
    assert up_foreseer_erasure(bec(1, 1, 0.0, 0.0)).overall == pytest.approx(1.0, abs=1e-12)

    capped = up_foreseer_erasure(bec(1, 1, 0.0, 0.05))
    assert capped.overall == pytest.approx(0.95, abs=1e-12)
    assert capped.raw_overall > capped.overall
    assert up_foreseer_erasure(bec(1, 1, 0.0, 0.05), tighten=False).overall == pytest.approx(capped.raw_overall)


def test_up_foreseer_erasure_noise_only_regression():
    """Test: At D = 0 the raw summand is H(1 - N) + 1 - N - H(N) = 1 - N."""
    assert up_foreseer_erasure(bec(1, 1, 0.3, 0.0), tighten=False).overall == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize(
    "n_r, n_a, N, D, P, expected",
    [(2, 1, 0.1, 0.0, 1.0, math.log2(11.0)), (1, 1, 0.1, 0.1, 1.0, 0.5 * math.log2(5.0))],
)
def test_cap_memoryless_gaussian_examples(n_r, n_a, N, D, P, expected):
    """Test: Plain AWGN capacity at D = 0 and the single attacked route."""
    assert cap_memoryless_gaussian(awgn(n_r, n_a, N, D, P)).overall == pytest.approx(expected, abs=1e-12)


def test_cap_memoryless_gaussian_single_route_identity(rng):
    """Test: One attacked route gives 1/2 log2(1 + (P - 2D)/(D + N)) for random feasible triples."""
    for _ in range(100):
        P = rng.uniform(0.5, 10.0)
        D = rng.uniform(0.0, 0.45 * P)
        N = rng.uniform(0.01, 5.0)
        value = cap_memoryless_gaussian(awgn(1, 1, N, D, P)).overall
        assert abs(value - 0.5 * math.log2(1 + (P - 2 * D) / (D + N))) < 1e-12


def test_cap_memoryless_gaussian_identical_route_form():
    """Test: n_r theta(1 + P/N) - n_a theta(1 + D(P + 2N)/(N(P - D + N)))."""
    N, D, P = 0.3, 0.4, 2.0
    theta = lambda x: 0.5 * math.log2(x)  # noqa: E731
    expected = 3 * theta(1 + P / N) - 2 * theta(1 + D * (P + 2 * N) / (N * (P - D + N)))
    assert cap_memoryless_gaussian(awgn(3, 2, N, D, P)).overall == pytest.approx(expected, abs=1e-12)


def test_codeword_aware_jamming_costs_more_than_independent_jamming():
    """Test: The memoryless adversary hurts more than an independent jammer of the same power."""
    spec = awgn(2, 1, 0.2, 0.3, 1.5)
    assert cap_memoryless_gaussian(spec).overall < cap_independent_jammer_gaussian(spec).overall


def test_binary_attack_table_reference_values():
    """Test: The six binary values at N = D = 0.1."""
    table = binary_attack_table(0.1, 0.1)
    assert table.replacement.capacity == pytest.approx(0.319929, abs=1e-4)
    assert table.replacement.lower == pytest.approx(0.0, abs=1e-12)
    assert table.replacement.upper == pytest.approx(0.062007, abs=1e-4)
    assert table.erasure.capacity == pytest.approx(0.81, abs=1e-4)
    assert table.erasure.lower == pytest.approx(0.3414, abs=1e-4)
    assert table.erasure.upper == pytest.approx(0.8030, abs=1e-4)
    assert [row["attack"] for row in table.rows()] == ["replacement", "erasure"]


def test_binary_attack_table_without_adversary_budget():
    """Test: At D = 0 the replacement trio is 1 - H(N) and the erasure trio is 1 - N."""
    table = binary_attack_table(0.2, 0.0)
    for value in (table.replacement.capacity, table.replacement.lower, table.replacement.upper):
        assert value == pytest.approx(float(1 - h(0.2)), abs=1e-12)
    for value in (table.erasure.capacity, table.erasure.lower, table.erasure.upper):
        assert value == pytest.approx(0.8, abs=1e-12)


def test_bounds_are_ordered_on_the_grid():
    """Test: lower <= upper <= capacity for both families on N in [0, 0.5], D in [0, 0.25]."""
    violations = []
    for N in np.arange(0.0, 0.5001, 0.05):
        for D in np.arange(0.0, 0.2501, 0.05):
            t = binary_attack_table(round(N, 2), round(D, 2))
            for row in (t.replacement, t.erasure):
                if not (row.lower <= row.upper + 1e-9 and row.upper <= row.capacity + 1e-9):
                    violations.append((N, D, row))
    assert violations == []


def non_increasing(values: list[float]) -> bool:
    return all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize(
    "evaluate, family, noise_grid, budget_grid",
    [
        (cap_memoryless_replacement, bsc, np.arange(0.0, 0.5001, 0.05), np.arange(0.0, 0.5001, 0.05)),
        (low_foreseer_replacement, bsc, np.arange(0.0, 0.5001, 0.05), np.arange(0.0, 0.2501, 0.05)),
        (up_foreseer_replacement, bsc, np.arange(0.0, 0.5001, 0.05), np.arange(0.0, 0.5001, 0.05)),
        (cap_memoryless_erasure, bec, np.arange(0.0, 0.5001, 0.05), np.arange(0.0, 0.5001, 0.05)),
        (low_foreseer_erasure, bec, np.arange(0.0, 0.5001, 0.05), np.arange(0.0, 0.2501, 0.05)),
        (up_foreseer_erasure, bec, np.arange(0.0, 0.5001, 0.05), np.arange(0.0, 0.2501, 0.05)),
        (cap_memoryless_gaussian, lambda n_r, n_a, N, D: awgn(n_r, n_a, N, D, 1.0), np.arange(0.05, 0.5001, 0.05), np.arange(0.0, 0.5001, 0.05)),
    ],
)
def test_rates_are_non_increasing_in_budget_noise_and_adversaries(evaluate, family, noise_grid, budget_grid):
    """Test: Every formula never grows with D, N or n_a."""
    noise_grid = [round(float(N), 2) for N in noise_grid]
    budget_grid = [round(float(D), 2) for D in budget_grid]
    for N in noise_grid:
        assert non_increasing([evaluate(family(1, 1, N, D)).overall for D in budget_grid])
    for D in budget_grid:
        assert non_increasing([evaluate(family(1, 1, N, D)).overall for N in noise_grid])
    N, D = noise_grid[2], budget_grid[-2]
    assert non_increasing([evaluate(family(4, n_a, N, D)).overall for n_a in range(5)])


def test_report_csv_rows_are_long_format():
    """Test: One summand row per route and one total per placement."""
    report = cap_memoryless_replacement(bsc(2, 1, 0.1, 0.1))
    rows = report.csv_rows()
    assert len(rows) == 3 * 3
    totals = [r for r in rows if r["term"] == "total"]
    assert [r["placement"] for r in totals] == ["00", "01", "10"]
    assert report.to_csv().splitlines()[0] == "evaluator,csi,placement,route,term,value,overall"

# ==================== UNHAPPY PATH TESTS ====================

def test_replacement_formulas_reject_erasure_networks(bec_single):
    """Test: A BEC network is a spec/formula mismatch."""
    with pytest.raises(SpecMismatchError, match="bsc"):
        cap_memoryless_replacement(bec_single)


def test_replacement_formulas_reject_non_binary_routes():
    """Test: Ternary symmetric routes are outside the binary closed forms."""
    with pytest.raises(SpecMismatchError, match="binary"):
        cap_memoryless_replacement(NetworkSpec.identical(1, 1, bsc_route(0.1, 0.1, q=3)))


def test_foreseer_replacement_rejects_budget_above_half():
    """Test: D > 0.5 is refused by the foreseer replacement bounds."""
    with pytest.raises(InfeasibleSpecError):
        low_foreseer_replacement(bsc(1, 1, 0.1, 0.6))
    with pytest.raises(InfeasibleSpecError):
        up_foreseer_replacement(bsc(1, 1, 0.1, 0.6))


def test_gaussian_rejects_power_not_above_budget():
    """Test: P <= D is infeasible and the message names the constraint."""
    with pytest.raises(InfeasibleSpecError, match="P > D"):
        cap_memoryless_gaussian(awgn(1, 1, 0.1, 1.0, 1.0))


def test_low_foreseer_erasure_rejects_unknown_variant(bec_single):
    """Test: Only the closed and entropy summands exist."""
    with pytest.raises(ValueError, match="unknown variant"):
        low_foreseer_erasure(bec_single, variant="other")


def test_binary_attack_table_rejects_out_of_range():
    """Test: N and D must lie in [0, 0.5]."""
    with pytest.raises(InfeasibleSpecError):
        binary_attack_table(0.6, 0.1)
