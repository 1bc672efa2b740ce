"""
Builds adversary strategies from run-config descriptors.
"""
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field

from app.adversary.base import AdversaryStrategy, IdentityStrategy
from app.adversary.foreseer import AttackMode, ForeseerStrategy
from app.adversary.memoryless import MemorylessGaussianStrategy, MemorylessLawStrategy, worst_case_law
from app.channel.model import ChannelKind, RouteSpec
from app.core.exceptions import ConfigurationError
from app.info.distributions import CondPmf


class StrategyKind(StrEnum):
    IDENTITY = "identity"
    MEMORYLESS = "memoryless"
    FORESEER = "foreseer"


class StrategyDescriptor(BaseModel):
    """
    One route's adversary. ``memoryless`` uses ``law`` when given and the route's
    worst-case law otherwise (``input_p`` is Pr(X=1) for the replacement law).
    """

    model_config = ConfigDict(frozen=True)

    route: int = Field(ge=0)
    kind: StrategyKind = StrategyKind.MEMORYLESS
    mode: AttackMode = AttackMode.GREEDY
    law: tuple[tuple[float, ...], ...] | None = None
    input_p: float = Field(default=0.5, ge=0.0, le=1.0)
    random_positions: bool = True


def build_strategy(descriptor: StrategyDescriptor | None, route: RouteSpec) -> AdversaryStrategy:
    """Strategy for one route; routes without a descriptor get the worst memoryless adversary."""
    kind = descriptor.kind if descriptor else StrategyKind.MEMORYLESS
    if kind is StrategyKind.IDENTITY:
        return IdentityStrategy(route)
    if kind is StrategyKind.FORESEER:
        return ForeseerStrategy(route, descriptor.mode, descriptor.random_positions)
    if route.kind is ChannelKind.AWGN:
        return MemorylessGaussianStrategy(route)
    if descriptor and descriptor.law is not None:
        return MemorylessLawStrategy(route, CondPmf(rows=descriptor.law))
    return MemorylessLawStrategy(route, worst_case_law(route, descriptor.input_p if descriptor else 0.5))


def build_strategies(descriptors: list[StrategyDescriptor], routes: tuple[RouteSpec, ...]) -> list[AdversaryStrategy]:
    by_route = {}
    for descriptor in descriptors:
        if descriptor.route >= len(routes):
            raise ConfigurationError(f"strategy refers to route {descriptor.route}, network has {len(routes)} routes")
        if descriptor.route in by_route:
            raise ConfigurationError(f"route {descriptor.route} has more than one strategy")
        by_route[descriptor.route] = descriptor
    return [build_strategy(by_route.get(j), route) for j, route in enumerate(routes)]
