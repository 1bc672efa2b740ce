"""
Unit tests for the worst-case memoryless laws and the strategies that apply them.
"""
import numpy as np
import pytest
from app.adversary.base import AdversaryStrategy, AttackContext, IdentityStrategy
from app.adversary.memoryless import (
    MemorylessGaussianStrategy,
    MemorylessLawStrategy,
    worst_case_law,
    worst_memoryless_erasure,
    worst_memoryless_gaussian,
    worst_memoryless_replacement,
)
from app.channel.model import awgn_route, bec_route, bsc_route
from app.channel.noise import block_distortion
from app.core.exceptions import BudgetViolationError, InfeasibleSpecError
from app.info.distributions import CondPmf
from app.info.primitives import star


class OverspendingStrategy(AdversaryStrategy):
    """Flips every symbol regardless of the budget."""

    @property
    def name(self) -> str:
        return "overspend"

    def attack(self, block, context, rng):
        return 1 - np.asarray(block)


# ==================== HAPPY PATH TESTS ====================

def test_worst_replacement_law_at_uniform_input_is_bsc():
    """Test: For P = 1/2 the law is BSC(D) and cascades with BSC(N) into BSC(N * D)."""
    law = worst_memoryless_replacement(0.1, 0.1)
    assert law.array == pytest.approx(np.array([[0.9, 0.1], [0.1, 0.9]]))
    cascade = law.compose(bsc_route(0.1, 0.0).transition())
    assert cascade.array[0, 1] == pytest.approx(star(0.1, 0.1))


def test_worst_replacement_law_spends_exact_budget(rng):
    """Test: E[d(X, X_a)] equals min(D, 1 - D) for any admissible input law."""
    for _ in range(50):
        D = rng.uniform(0.0, 0.45)
        P = rng.uniform(D, 1.0 - D)
        law = worst_memoryless_replacement(0.05, D, P).array
        spent = (1 - P) * law[0, 1] + P * law[1, 0]
        assert spent == pytest.approx(D, abs=1e-12)


def test_worst_replacement_law_without_budget_is_identity():
    """Test: D = 0 forwards."""
    assert worst_memoryless_replacement(0.2, 0.0) == CondPmf.identity(2)


def test_worst_erasure_law_erases_with_probability_d():
    """Test: Each symbol is kept w.p. 1 - D or erased, never substituted."""
    law = worst_memoryless_erasure(0.2).array
    assert law.tolist() == pytest.approx([[0.8, 0.0, 0.2], [0.0, 0.8, 0.2]])


def test_worst_gaussian_law_moments():
    """Test: E[(X_a - X)^2] = D and Var(X_a) = P - D."""
    P, D = 2.0, 0.5
    law = worst_memoryless_gaussian(P, D)
    assert (1 - law.gain) ** 2 * P + law.variance == pytest.approx(D)
    assert law.gain**2 * P + law.variance == pytest.approx(P - D)


def test_law_strategy_stays_within_hard_budget(rng):
    """Test: Every attacked block keeps at most floor(nD) changes and the rate approaches D."""
    route = bsc_route(0.1, 0.1)
    strategy = MemorylessLawStrategy(route, worst_case_law(route))
    rates = []
    for _ in range(100):
        block = rng.integers(0, 2, size=1000)
        attacked = strategy.strike(block, True, None, rng)
        rates.append(block_distortion(block, attacked, route.measure, route.q))
        assert rates[-1] <= 0.1 + 1e-12
    assert np.mean(rates) == pytest.approx(0.1, abs=0.01)


def test_erasure_strategy_only_erases(rng):
    """Test: Outputs are either the input symbol or the sentinel."""
    route = bec_route(0.1, 0.3)
    strategy = MemorylessLawStrategy(route, worst_case_law(route))
    block = rng.integers(0, 2, size=500)
    attacked = strategy.strike(block, True, None, rng)
    assert np.all((attacked == block) | (attacked == 2))
    assert np.mean(attacked == 2) <= 0.3


def test_gaussian_strategy_scales_into_budget(rng):
    """Test: Block squared error never exceeds D."""
    route = awgn_route(0.1, 0.2, 1.0)
    strategy = MemorylessGaussianStrategy(route)
    for _ in range(200):
        block = rng.normal(0.0, 1.0, size=50)
        attacked = strategy.strike(block, True, None, rng)
        assert np.mean((attacked - block) ** 2) <= 0.2


def test_unattacked_route_forwards_block(rng):
    """Test: strike() with attacked=False returns an equal copy."""
    route = bsc_route(0.1, 0.1)
    strategy = MemorylessLawStrategy(route, worst_case_law(route))
    block = rng.integers(0, 2, size=20)
    forwarded = strategy.strike(block, False, None, rng)
    assert np.array_equal(forwarded, block)
    assert forwarded is not block


def test_identity_strategy_and_description():
    """Test: The identity strategy forwards and describes its budget."""
    strategy = IdentityStrategy(bsc_route(0.1, 0.2))
    block = np.array([0, 1, 1])
    assert np.array_equal(strategy.attack(block, AttackContext(), np.random.default_rng(0)), block)
    assert strategy.describe() == {"kind": "identity", "D": 0.2}

# ==================== UNHAPPY PATH TESTS ====================

def test_strike_rejects_over_budget_attacks(rng):
    """Test: A strategy that exceeds D raises BudgetViolationError."""
    strategy = OverspendingStrategy(bsc_route(0.1, 0.1))
    with pytest.raises(BudgetViolationError, match="overspend"):
        strategy.strike(np.zeros(10, dtype=np.int64), True, None, rng)


def test_replacement_law_rejects_input_law_outside_range():
    """Test: P must lie in [N', 1 - N']."""
    with pytest.raises(InfeasibleSpecError):
        worst_memoryless_replacement(0.1, 0.2, 0.1)


def test_gaussian_law_needs_power_above_budget():
    """Test: P <= D is infeasible."""
    with pytest.raises(InfeasibleSpecError, match="P > D"):
        worst_memoryless_gaussian(1.0, 1.0)


def test_law_strategy_rejects_wrong_shape_and_substitutions():
    """Test: Laws must fit the route and may not substitute on erasure routes."""
    with pytest.raises(InfeasibleSpecError, match="2x3"):
        MemorylessLawStrategy(bec_route(0.1, 0.1), CondPmf.identity(2))
    substituting = CondPmf.from_array([[0.5, 0.5, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(InfeasibleSpecError, match="infinite distortion"):
        MemorylessLawStrategy(bec_route(0.1, 0.1), substituting)


def test_gaussian_strategy_needs_awgn_route():
    """Test: A BSC route cannot carry a Gaussian adversary."""
    with pytest.raises(InfeasibleSpecError):
        MemorylessGaussianStrategy(bsc_route(0.1, 0.1))


def test_worst_case_law_is_undefined_for_ternary_replacement():
    """Test: No closed-form worst law for q > 2 replacement routes."""
    with pytest.raises(InfeasibleSpecError):
        worst_case_law(bsc_route(0.1, 0.1, q=3))
