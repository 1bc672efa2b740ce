"""
Unit tests for the foreseer bound objectives.
"""
import mpmath
import pytest
from app.channel.model import NetworkSpec, PlacementVector, awgn_route, bec_route, bsc_route
from app.core.exceptions import AlphabetMismatchError, BudgetViolationError, SpecMismatchError
from app.info.distributions import CondPmf, Pmf
from app.rates.closed_forms import low_foreseer_erasure, low_foreseer_replacement, up_foreseer_replacement
from app.rates.foreseer import ball_distance, foreseer_bound_objective, foreseer_upper_objective

mpmath.mp.dps = 30

ATTACKED = PlacementVector.parse("1")


def mp_entropy(*probs) -> float:
    return float(-sum(mpmath.mpf(p) * mpmath.log(p, 2) for p in probs if p > 0))


# ==================== HAPPY PATH TESTS ====================

def test_ball_distance_per_attack():
    """Test: 2 s D for replacement, s D for erasure."""
    assert ball_distance(bsc_route(0.1, 0.1), 1) == pytest.approx(0.2)
    assert ball_distance(bsc_route(0.1, 0.1), 0) == 0.0
    assert ball_distance(bec_route(0.1, 0.1), 1) == pytest.approx(0.1)


def test_lower_objective_with_forwarding_adversary_matches_replacement_bound():
    """Test: V = X and X_a = X reproduce the binary replacement summand 1 - H(N) - H(2D)."""
    spec = NetworkSpec.identical(1, 1, bsc_route(0.0, 0.1))
    result = foreseer_bound_objective(spec, ATTACKED, Pmf.uniform(2))
    assert result.value == pytest.approx(low_foreseer_replacement(spec).overall, abs=1e-12)
    assert result.value == pytest.approx(0.278072, abs=1e-6)


def test_lower_objective_with_erasing_adversary_matches_entropy_variant(bec_single):
    """Test: Erasing each symbol w.p. D reproduces the entropy-form erasure summand."""
    law = CondPmf.from_array([[0.9, 0.0, 0.1], [0.0, 0.9, 0.1]])
    result = foreseer_bound_objective(bec_single, ATTACKED, Pmf.uniform(2), adversary=law)
    expected = low_foreseer_erasure(bec_single, variant="entropy").overall
    assert result.value == pytest.approx(expected, abs=1e-12)


def test_lower_objective_on_ternary_route():
    """Test: q = 3, N = 0.2, D = 0.05 against an mpmath evaluation."""
    spec = NetworkSpec.identical(1, 1, bsc_route(0.2, 0.05, q=3))
    result = foreseer_bound_objective(spec, ATTACKED, Pmf.uniform(3))
    h_x_given_y = mp_entropy(0.8, 0.1, 0.1)
    penalty = mp_entropy(0.9, 0.05, 0.05)
    expected = float(mpmath.log(3, 2)) - h_x_given_y - penalty
    assert result.value == pytest.approx(expected, abs=1e-12)
    assert result.value > 0


def test_lower_objective_uses_auxiliary_entropy():
    """Test: A constant auxiliary V zeroes H(V) and clamps the summand."""
    spec = NetworkSpec.identical(1, 1, bsc_route(0.0, 0.25))
    constant = CondPmf.from_array([[1.0, 0.0], [1.0, 0.0]])
    result = foreseer_bound_objective(spec, ATTACKED, Pmf.bernoulli(0.2), aux=constant)
    assert result.value == 0.0


def test_unattacked_routes_forward_input():
    """Test: Placement 00 gives sum_j I(X;Y) - 0 penalty for both objectives."""
    spec = NetworkSpec.identical(2, 1, bsc_route(0.1, 0.1))
    clean = PlacementVector.parse("00")
    lower = foreseer_bound_objective(spec, clean, Pmf.uniform(2))
    upper = foreseer_upper_objective(spec, clean, Pmf.uniform(2))
    assert lower.terms == pytest.approx((0.531004, 0.531004), abs=1e-6)
    assert upper.value == pytest.approx(lower.value, abs=1e-12)


def test_upper_objective_matches_replacement_upper_bound(bsc_single):
    """Test: Forwarding adversary gives 1 - H(N) - H(D) = 0.062007."""
    result = foreseer_upper_objective(bsc_single, ATTACKED, Pmf.uniform(2))
    assert result.value == pytest.approx(up_foreseer_replacement(bsc_single).overall, abs=1e-12)


def test_objectives_accept_per_route_laws():
    """Test: Sequences of input laws are consumed route by route."""
    spec = NetworkSpec.identical(2, 1, bsc_route(0.0, 0.1))
    result = foreseer_upper_objective(spec, PlacementVector.parse("01"), [Pmf.uniform(2), Pmf.bernoulli(0.0)])
    assert result.terms[0] == pytest.approx(1.0)
    assert result.terms[1] == 0.0

# ==================== UNHAPPY PATH TESTS ====================

def test_auxiliary_law_outside_ball_is_rejected(bsc_single):
    """Test: E[d(V, X)] above d_j raises BudgetViolationError."""
    aux = CondPmf.from_array([[0.7, 0.3], [0.3, 0.7]])
    with pytest.raises(BudgetViolationError):
        foreseer_bound_objective(bsc_single, ATTACKED, Pmf.uniform(2), aux=aux)


def test_objectives_reject_gaussian_routes():
    """Test: AWGN networks are not covered."""
    spec = NetworkSpec.identical(1, 1, awgn_route(0.1, 0.1, 1.0))
    with pytest.raises(SpecMismatchError):
        foreseer_upper_objective(spec, ATTACKED, Pmf.uniform(2))


def test_objectives_reject_wrong_input_alphabet(bsc_single):
    """Test: A ternary input law on a binary route is an alphabet mismatch."""
    with pytest.raises(AlphabetMismatchError):
        foreseer_bound_objective(bsc_single, ATTACKED, Pmf.uniform(3))


def test_objectives_reject_wrong_number_of_laws():
    """Test: One input law per route is required when a sequence is given."""
    spec = NetworkSpec.identical(2, 1, bsc_route(0.1, 0.1))
    with pytest.raises(AlphabetMismatchError, match="one input law per route"):
        foreseer_upper_objective(spec, PlacementVector.parse("01"), [Pmf.uniform(2)])
