"""
Unit tests for the numerical minimax solver.
"""
import numpy as np
import pytest
from app.channel.model import REPLACEMENT, NetworkSpec, awgn_route, bec_route, bsc_route
from app.core.exceptions import SearchSpaceError, SolverError, SpecMismatchError
from app.info.distributions import Pmf
from app.info.primitives import binary_entropy, star
from app.rates.closed_forms import cap_memoryless_erasure, cap_memoryless_replacement
from app.rates.minimax import cap_memoryless_general, grid_inner_inf_mi, inner_inf_mi, input_grid
from app.rates.report import CsiMode

# ==================== HAPPY PATH TESTS ====================

def test_inner_infimum_for_replacement_is_bsc_cascade():
    """Test: Uniform input through BSC(0.1) under a 0.1 flip budget leaves 1 - H(0.18)."""
    route = bsc_route(0.1, 0.1)
    result = inner_inf_mi(route.transition(), Pmf.uniform(2), route.measure, 0.1)
    assert result.value == pytest.approx(1 - binary_entropy(0.18), abs=1e-6)


def test_inner_minimiser_composes_to_starred_channel():
    """Test: The minimising law cascaded with BSC(N) is BSC(N * D)."""
    route = bsc_route(0.1, 0.1)
    result = inner_inf_mi(route.transition(), Pmf.uniform(2), route.measure, 0.1)
    end_to_end = result.law.compose(route.transition()).array
    assert end_to_end[0, 1] == pytest.approx(star(0.1, 0.1), abs=1e-6)
    assert end_to_end[1, 0] == pytest.approx(star(0.1, 0.1), abs=1e-6)


def test_inner_infimum_for_erasure_route():
    """Test: Uniform input, BEC(0.1) and erasure budget 0.1 give (1 - D)(1 - N) = 0.81."""
    route = bec_route(0.1, 0.1)
    result = inner_inf_mi(route.transition(), Pmf.uniform(2), route.measure, 0.1)
    assert result.value == pytest.approx(0.81, abs=1e-6)
    assert result.law.array.shape == (2, 3)


def test_inner_infimum_zero_budget_is_channel_information():
    """Test: With D = 0 the adversary must forward, so the value is I(X;Y) of the route."""
    route = bsc_route(0.2, 0.0)
    result = inner_inf_mi(route.transition(), Pmf.bernoulli(0.3), route.measure, 0.0)
    p, N = 0.3, 0.2
    expected = binary_entropy(p * (1 - N) + (1 - p) * N) - binary_entropy(N)
    assert result.value == pytest.approx(expected, abs=1e-9)


def test_solver_agrees_with_grid_oracle(rng):
    """Test: Solver and dense grid agree on random binary problems."""
    for _ in range(10):
        N, D, p = rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.3), rng.uniform(0.1, 0.9)
        route = bsc_route(float(N), float(D))
        pmf = Pmf.bernoulli(float(p))
        solved = inner_inf_mi(route.transition(), pmf, route.measure, float(D), grid_check=False)
        oracle = grid_inner_inf_mi(route.transition(), pmf, route.measure, float(D), resolution=401)
        assert solved.value <= oracle.value + 1e-6
        assert solved.value == pytest.approx(oracle.value, abs=5e-3)


def test_input_grid_sizes():
    """Test: Binary grids are regular; larger alphabets stay within the resolution."""
    binary = input_grid(2, 11)
    assert len(binary) == 11
    assert binary[5].probs == pytest.approx((0.5, 0.5))
    ternary = input_grid(3, 21)
    assert 1 < len(ternary) <= 21
    assert all(abs(sum(p.probs) - 1) < 1e-12 for p in ternary)


def test_general_solver_reproduces_replacement_capacity(bsc_single):
    """Test: cap_memoryless_general matches the binary closed form at N = D = 0.1."""
    report = cap_memoryless_general(bsc_single, resolution=21)
    assert report.overall == pytest.approx(cap_memoryless_replacement(bsc_single).overall, abs=1e-4)
    assert report.evaluator == "cap_memoryless_general"
    assert report.input_pmfs[0] == pytest.approx([0.5, 0.5], abs=1e-3)


def test_general_solver_reports_both_orders(bsc_single):
    """Test: The alternate order is reported and sup-min never exceeds min-sup."""
    no_csi = cap_memoryless_general(bsc_single, csi=CsiMode.NONE, resolution=21)
    tx_csi = cap_memoryless_general(bsc_single, csi="tx", resolution=21)
    assert no_csi.csi is CsiMode.NONE and tx_csi.csi is CsiMode.TX
    assert no_csi.alternate_order_value == pytest.approx(tx_csi.overall, abs=1e-9)
    assert no_csi.overall <= tx_csi.overall + 1e-9


@pytest.mark.parametrize(
    "make_route, closed_form",
    [(bsc_route, cap_memoryless_replacement), (bec_route, cap_memoryless_erasure)],
    ids=["replacement", "erasure"],
)
@pytest.mark.parametrize("N", [0.0, 0.1, 0.2])
@pytest.mark.parametrize("D", [0.0, 0.1, 0.2])
def test_both_csi_orders_agree_with_closed_form(make_route, closed_form, N, D):
    """Test: Without and with Tx CSI the solver gives the same rate, and both match the closed form."""
    spec = NetworkSpec.identical(2, 1, make_route(N, D))
    no_csi = cap_memoryless_general(spec, csi=CsiMode.NONE, resolution=11)
    tx_csi = cap_memoryless_general(spec, csi=CsiMode.TX, resolution=11)
    expected = closed_form(spec).overall
    assert no_csi.overall == pytest.approx(tx_csi.overall, abs=1e-6)
    assert no_csi.overall == pytest.approx(expected, abs=2e-3)
    assert tx_csi.overall == pytest.approx(expected, abs=2e-3)


def test_general_solver_reproduces_erasure_capacity():
    """Test: Two BEC routes, one adversary, match (1 - N)(n_r - n_a D)."""
    spec = NetworkSpec.identical(2, 1, bec_route(0.1, 0.2))
    report = cap_memoryless_general(spec, resolution=11)
    assert report.overall == pytest.approx(cap_memoryless_erasure(spec).overall, abs=1e-4)


@pytest.mark.slow
def test_general_solver_on_replacement_grid():
    """Test: Closed-form agreement within 1e-4 on a 6x6 grid of (N, D)."""
    for N in np.linspace(0.0, 0.25, 6):
        for D in np.linspace(0.0, 0.25, 6):
            spec = NetworkSpec.identical(1, 1, bsc_route(float(N), float(D)))
            general = cap_memoryless_general(spec, resolution=101).overall
            assert general == pytest.approx(cap_memoryless_replacement(spec).overall, abs=1e-4)


def test_general_solver_handles_ternary_routes():
    """Test: A noiseless ternary route without adversaries reaches log2 3 at the uniform input."""
    spec = NetworkSpec.identical(1, 0, bsc_route(0.0, 0.0, q=3))
    report = cap_memoryless_general(spec, resolution=28)
    assert report.overall == pytest.approx(np.log2(3), abs=1e-6)

# ==================== UNHAPPY PATH TESTS ====================

def test_general_solver_rejects_gaussian_routes():
    """Test: Continuous routes are a mismatch for the discrete solver."""
    spec = NetworkSpec.identical(1, 1, awgn_route(0.1, 0.1, 1.0))
    with pytest.raises(SpecMismatchError):
        cap_memoryless_general(spec, resolution=5)


def test_general_solver_rejects_large_alphabets():
    """Test: Alphabets above the configured maximum are refused."""
    spec = NetworkSpec.identical(1, 1, bsc_route(0.1, 0.1, q=6))
    with pytest.raises(SearchSpaceError):
        cap_memoryless_general(spec, resolution=3)


def test_general_solver_rejects_tiny_resolution(bsc_single):
    """Test: Fewer than two grid points is a solver error."""
    with pytest.raises(SolverError):
        cap_memoryless_general(bsc_single, resolution=1)


def test_inner_infimum_rejects_negative_budget():
    """Test: D < 0 is invalid."""
    route = bsc_route(0.1, 0.0)
    with pytest.raises(ValueError):
        inner_inf_mi(route.transition(), Pmf.uniform(2), REPLACEMENT, -0.1)


def test_grid_oracle_is_binary_only():
    """Test: The grid oracle refuses ternary inputs."""
    route = bsc_route(0.1, 0.1, q=3)
    with pytest.raises(SearchSpaceError):
        grid_inner_inf_mi(route.transition(), Pmf.uniform(3), route.measure, 0.1)
