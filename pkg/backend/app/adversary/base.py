"""
Abstract base class for all adversary strategies.
Each strategy has a name, a route whose budget it respects, and an attack method.
"""
from abc import ABC, abstractmethod

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.channel.model import RouteSpec
from app.channel.noise import check_budget
from app.core.exceptions import BudgetViolationError


class AttackContext(BaseModel):
    """What a foreseer may look at besides the block: the codebook and the sent index."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    codebook: np.ndarray | None = None
    sent_index: int | None = None


class AdversaryStrategy(ABC):
    """Interface that all adversaries implement."""

    def __init__(self, route: RouteSpec):
        self.route = route

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique identifier for the strategy kind."""
        pass

    @property
    def budget(self) -> float:
        return self.route.distortion_limit

    def describe(self) -> dict:
        return {"kind": self.name, "D": self.budget}

    @abstractmethod
    def attack(self, block: np.ndarray, context: AttackContext, rng: np.random.Generator) -> np.ndarray:
        """
        Return the modified block. Implementations must stay within the route's
        distortion limit; strike() verifies it.
        """
        pass

    def strike(
        self, block: np.ndarray, attacked: bool, context: AttackContext | None, rng: np.random.Generator
    ) -> np.ndarray:
        """Apply the attack when the route is attacked, forward the block untouched otherwise."""
        block = np.asarray(block)
        if not attacked:
            return block.copy()
        modified = self.attack(block, context or AttackContext(), rng)
        if not check_budget(block, modified, self.route.measure, self.budget, self.route.q):
            raise BudgetViolationError(f"{self.name} exceeded D={self.budget} on a block of length {block.size}")
        return modified


class IdentityStrategy(AdversaryStrategy):
    """Forwards every block unchanged."""

    @property
    def name(self) -> str:
        return "identity"

    def attack(self, block: np.ndarray, context: AttackContext, rng: np.random.Generator) -> np.ndarray:
        return np.asarray(block).copy()
