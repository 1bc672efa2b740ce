"""
One block transmission over every route: encode, attack, add noise, decode.
"""
import math

import numpy as np
from pydantic import BaseModel

from app.adversary.base import AttackContext
from app.channel.model import PlacementVector
from app.channel.noise import apply_noise, block_distortion
from app.codes.decoding import erasure_decode, nearest_codewords
from app.sim.config import TrialConfig
from app.sim.stats import joint_counts


class RouteOutcome(BaseModel):
    route: int
    attacked: bool
    sent: int | None = None
    decoded: int | None = None
    error: bool = False
    ambiguous: bool = False
    distortion: float
    budget: float
    joint: list[list[int]] | None = None
    trace: dict | None = None

    @property
    def within_budget(self) -> bool:
        return self.distortion <= self.budget + 1e-12


class TrialOutcome(BaseModel):
    placement: str
    routes: list[RouteOutcome]

    @property
    def block_error(self) -> bool:
        return any(r.error for r in self.routes)


def trial_rng(seed: int, placement_index: int, trial_index: int) -> np.random.Generator:
    """Stream for one trial; depends only on the three indices, not on scheduling."""
    return np.random.default_rng([seed, placement_index, trial_index])


def _decode(route, code, received: np.ndarray) -> tuple[int | None, bool]:
    """Minimum-distance decode; blocks carrying erasures are solved on their kept symbols."""
    if not (received == route.erasure_symbol).any():
        return int(nearest_codewords(received, code.codebook)[0]), False
    result = erasure_decode(received, code, route.erasure_symbol)
    return result.index, not result.unique


def run_trial(config: TrialConfig, placement: PlacementVector, rng: np.random.Generator) -> TrialOutcome:
    """
    Send an independent uniformly drawn message on every route.

    Discrete routes record sent and decoded message indices; an ambiguous erasure
    decode counts as an error. Gaussian routes carry Normal(0, P) symbols and only
    report distortion.
    """
    outcomes = []
    for j, (route, code, strategy) in enumerate(zip(config.network.routes, config.codes, config.strategies)):
        attacked = bool(placement[j])
        if not route.discrete:
            x = rng.normal(0.0, math.sqrt(route.power), size=config.n)
            x_a = strategy.strike(x, attacked, None, rng)
            y = apply_noise(route, x_a, rng)
            outcomes.append(
                RouteOutcome(
                    route=j,
                    attacked=attacked,
                    distortion=block_distortion(x, x_a, route.measure),
                    budget=route.distortion_limit,
                    trace={"x": x.tolist(), "x_a": x_a.tolist(), "y": y.tolist()} if config.keep_traces else None,
                )
            )
            continue

        sent = int(rng.integers(code.size))
        x = code.encode_index(sent)
        context = AttackContext(codebook=code.codebook, sent_index=sent)
        x_a = strategy.strike(x, attacked, context, rng)
        y = apply_noise(route, x_a, rng)
        decoded, ambiguous = _decode(route, code, y)
        outcomes.append(
            RouteOutcome(
                route=j,
                attacked=attacked,
                sent=sent,
                decoded=decoded,
                error=decoded != sent,
                ambiguous=ambiguous,
                distortion=block_distortion(x, x_a, route.measure, route.q),
                budget=route.distortion_limit,
                joint=joint_counts(x, y, route.q, route.transition_matrix().shape[1]).tolist(),
                trace={"x": x.tolist(), "x_a": x_a.tolist(), "y": y.tolist()} if config.keep_traces else None,
            )
        )
    return TrialOutcome(placement=placement.label, routes=outcomes)
