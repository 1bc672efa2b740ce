"""
Long i.i.d. symbol streams through one adversary and one route channel.

Used to check a memoryless adversary against its theoretical rate: the plug-in
mutual information between the sent and received streams should approach the
capacity value, and no block may exceed the distortion budget.
"""
import math

import numpy as np
import structlog
from pydantic import BaseModel

from app.adversary.base import AdversaryStrategy
from app.channel.noise import apply_noise, block_distortion
from app.core.exceptions import InfeasibleSpecError
from app.info.distributions import Pmf
from app.sim.stats import joint_counts, mi_from_counts

logger = structlog.get_logger(__name__)


class StreamStats(BaseModel):
    samples: int
    blocks: int
    mutual_information: float | None
    mean_distortion: float
    max_block_distortion: float
    budget: float
    adversary_power: float | None = None

    @property
    def within_budget(self) -> bool:
        return self.max_block_distortion <= self.budget + 1e-12


def symbol_stream_experiment(
    strategy: AdversaryStrategy,
    samples: int,
    rng: np.random.Generator,
    *,
    input_pmf: Pmf | None = None,
    block_length: int = 10_000,
) -> StreamStats:
    """
    Draw ``samples`` symbols (uniform unless ``input_pmf`` is given; Normal(0, P)
    on Gaussian routes), attack them block by block and pass them through the
    route channel. Gaussian streams report Var(X_a) instead of mutual information.
    """
    route = strategy.route
    if samples < 1 or block_length < 1:
        raise InfeasibleSpecError("samples and block_length must be positive")
    if route.discrete:
        pmf = input_pmf or Pmf.uniform(route.q)
        if pmf.size != route.q:
            raise InfeasibleSpecError(f"input law has {pmf.size} symbols, route alphabet is {route.q}")
        x = rng.choice(route.q, size=samples, p=pmf.array)
    else:
        x = rng.normal(0.0, math.sqrt(route.power), size=samples)

    x_a = np.empty_like(x)
    distortions = []
    for start in range(0, samples, block_length):
        block = x[start : start + block_length]
        x_a[start : start + block_length] = strategy.strike(block, True, None, rng)
        distortions.append(block_distortion(block, x_a[start : start + block_length], route.measure, route.q))
    y = apply_noise(route, x_a, rng)

    mi = None
    power = None
    if route.discrete:
        mi = mi_from_counts(joint_counts(x, y, route.q, route.transition_matrix().shape[1]))
    else:
        power = float(np.var(x_a))
    weights = np.diff(np.append(np.arange(0, samples, block_length), samples))
    stats = StreamStats(
        samples=samples,
        blocks=len(distortions),
        mutual_information=mi,
        mean_distortion=float(np.average(distortions, weights=weights)),
        max_block_distortion=float(max(distortions)),
        budget=strategy.budget,
        adversary_power=power,
    )
    logger.info("stream_experiment_done", strategy=strategy.name, samples=samples, mi=mi, max_distortion=stats.max_block_distortion)
    return stats
