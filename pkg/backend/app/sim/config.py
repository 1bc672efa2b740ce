"""
Everything one Monte Carlo run needs: network, per-route codes and adversaries,
the placements to sweep, block length, trial count and master seed.
"""
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.adversary.base import AdversaryStrategy
from app.channel.model import NetworkSpec, PlacementVector
from app.channel.placements import enumerate_placements
from app.codes.linear import LinearCode


class TrialConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    network: NetworkSpec
    codes: tuple[LinearCode | None, ...]
    strategies: tuple[AdversaryStrategy, ...]
    placements: tuple[PlacementVector, ...] | None = None
    n: int = Field(ge=1)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0)
    keep_traces: bool = False

    @model_validator(mode="after")
    def _consistent(self) -> "TrialConfig":
        n_r = self.network.n_r
        if len(self.codes) != n_r or len(self.strategies) != n_r:
            raise ValueError(f"need one code and one strategy per route ({n_r}), got {len(self.codes)} and {len(self.strategies)}")
        for j, (route, code, strategy) in enumerate(zip(self.network.routes, self.codes, self.strategies)):
            if route.discrete:
                if code is None:
                    raise ValueError(f"route {j} is discrete and needs a code")
                if code.q != route.q:
                    raise ValueError(f"route {j}: code alphabet {code.q} does not match route alphabet {route.q}")
                if code.n != self.n:
                    raise ValueError(f"route {j}: code length {code.n} differs from block length {self.n}")
            elif code is not None:
                raise ValueError(f"route {j} is Gaussian and takes no code")
            if strategy.route != route:
                raise ValueError(f"route {j}: strategy was built for a different route")
        for placement in self.placements or ():
            self.network.check_placement(placement)
        return self

    def resolved_placements(self) -> list[PlacementVector]:
        """Requested placements, or every placement of weight <= n_a when none were given."""
        if self.placements is not None:
            return list(self.placements)
        return enumerate_placements(self.network.n_r, self.network.n_a)
