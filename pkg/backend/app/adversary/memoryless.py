"""
Worst-case memoryless adversaries and the strategies that apply them symbol by symbol.

The laws come from backward test channels: the adversary output X_a is chosen so
that X looks like X_a passed through a channel of "noise" N' = D, which makes the
cascade with the route noise as bad as the budget allows.
"""
import math
from typing import NamedTuple

import numpy as np

from app.adversary.base import AdversaryStrategy, AttackContext
from app.channel.model import ChannelKind, DistortionKind, RouteSpec
from app.channel.noise import hard_budget
from app.core.exceptions import InfeasibleSpecError
from app.info.distributions import CondPmf


def worst_memoryless_replacement(N: float, D: float, P: float = 0.5) -> CondPmf:
    """
    Forward law p(x_a|x) of the backward BSC pair Y -> X_a -> X on binary inputs with Pr(X=1) = P.

    With N' = min(D, 1-D) and Pr(X_a=1) = a = (P - N')/(1 - 2N'):
    p(1|0) = a N' / (1 - P) and p(0|1) = (1 - a) N' / P.
    """
    if not 0.0 <= N <= 1.0:
        raise InfeasibleSpecError(f"N must lie in [0, 1], got {N}")
    if not 0.0 <= D <= 1.0:
        raise InfeasibleSpecError(f"D must lie in [0, 1], got {D}")
    n_prime = min(D, 1.0 - D)
    if n_prime == 0.0:
        return CondPmf.identity(2)
    if not n_prime <= P <= 1.0 - n_prime:
        raise InfeasibleSpecError(f"the worst replacement law needs N' <= P <= 1 - N' (N'={n_prime}, P={P})")
    a = 0.5 if n_prime == 0.5 else (P - n_prime) / (1.0 - 2.0 * n_prime)
    up = a * n_prime / (1.0 - P)
    down = (1.0 - a) * n_prime / P
    return CondPmf.from_array([[1.0 - up, up], [down, 1.0 - down]])


def worst_memoryless_erasure(D: float, q: int = 2) -> CondPmf:
    """Erase each symbol independently with probability D; never substitute."""
    if not 0.0 <= D <= 1.0:
        raise InfeasibleSpecError(f"D must lie in [0, 1], got {D}")
    law = np.zeros((q, q + 1))
    law[np.arange(q), np.arange(q)] = 1.0 - D
    law[:, q] = D
    return CondPmf.from_array(law)


class GaussianLaw(NamedTuple):
    gain: float
    variance: float


def worst_memoryless_gaussian(P: float, D: float) -> GaussianLaw:
    """
    Forward law X_a | X = x ~ Normal(a x, v) of the backward model X = X_a + Z', Z' ~ N(0, D).

    a = 1 - D/P and v = D(P - D)/P, so E[(X_a - X)^2] = D and Var(X_a) = P - D.
    """
    if D < 0:
        raise InfeasibleSpecError(f"D must be non-negative, got {D}")
    if P <= D:
        raise InfeasibleSpecError(f"the backward Gaussian test channel needs P > D (P={P}, D={D})")
    return GaussianLaw(gain=1.0 - D / P, variance=D * (P - D) / P)


class MemorylessLawStrategy(AdversaryStrategy):
    """
    Draws each output symbol from p(x_a|x), then reverts randomly chosen surplus
    modifications so at most floor(nD) symbols differ from the block.
    """

    def __init__(self, route: RouteSpec, law: CondPmf):
        super().__init__(route)
        cost = route.measure.matrix(route.q, route.adversary_alphabet)
        if law.n_inputs != route.q or law.n_outputs != route.adversary_alphabet:
            raise InfeasibleSpecError(
                f"law must be {route.q}x{route.adversary_alphabet} for this route, got {law.n_inputs}x{law.n_outputs}"
            )
        if np.any((law.array > 0) & np.isinf(cost)):
            raise InfeasibleSpecError("law puts mass on outputs with infinite distortion")
        self.law = law
        self._cumulative = np.cumsum(law.array, axis=1)
        self._cumulative[:, -1] = 1.0

    @property
    def name(self) -> str:
        return "memoryless_law"

    def describe(self) -> dict:
        return {**super().describe(), "law": [list(row) for row in self.law.rows]}

    def attack(self, block: np.ndarray, context: AttackContext, rng: np.random.Generator) -> np.ndarray:
        block = np.asarray(block, dtype=np.int64)
        draws = rng.random(block.shape)
        modified = (draws[:, None] > self._cumulative[block]).sum(axis=1)
        changed = np.flatnonzero(modified != block)
        surplus = changed.size - hard_budget(block.size, self.budget)
        if surplus > 0:
            revert = rng.choice(changed, size=surplus, replace=False)
            modified[revert] = block[revert]
        return modified


class MemorylessGaussianStrategy(AdversaryStrategy):
    """
    X_a = a X + Normal(0, v) per symbol. When a block's squared error exceeds D the
    perturbation is scaled down to meet it exactly.
    """

    def __init__(self, route: RouteSpec, law: GaussianLaw | None = None):
        super().__init__(route)
        if route.kind is not ChannelKind.AWGN:
            raise InfeasibleSpecError("Gaussian strategies need an AWGN route")
        self.law = law or worst_memoryless_gaussian(route.power, route.distortion_limit)

    @property
    def name(self) -> str:
        return "memoryless_gaussian"

    def describe(self) -> dict:
        return {**super().describe(), "gain": self.law.gain, "variance": self.law.variance}

    def attack(self, block: np.ndarray, context: AttackContext, rng: np.random.Generator) -> np.ndarray:
        block = np.asarray(block, dtype=float)
        perturbation = (self.law.gain - 1.0) * block + rng.normal(0.0, math.sqrt(self.law.variance), size=block.shape)
        spent = float(np.mean(perturbation**2)) if block.size else 0.0
        if spent > self.budget:
            perturbation *= math.sqrt(self.budget / spent) * (1.0 - 1e-12)
        return block + perturbation


def worst_case_law(route: RouteSpec, input_p: float = 0.5) -> CondPmf:
    """Worst memoryless law for a binary replacement or erasure route."""
    kind = route.measure.kind
    if kind is DistortionKind.REPLACEMENT and route.q == 2:
        return worst_memoryless_replacement(route.noise, route.distortion_limit, input_p)
    if kind is DistortionKind.ERASURE:
        return worst_memoryless_erasure(min(route.distortion_limit, 1.0), route.q)
    raise InfeasibleSpecError(f"no closed-form worst law for {route.kind.value} routes with q={route.q}")
