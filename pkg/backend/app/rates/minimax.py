"""
Numerical minimax solver for memoryless adversaries on small discrete alphabets.

The inner problem minimises I(X;Y) over adversary laws p(x_a|x) inside the
distortion polytope. I(X;Y) is convex in the law for a fixed input, so a
multi-start SLSQP run from feasible points converges to the global infimum;
binary cases are cross-checked on a dense grid. The outer problem searches input
laws on a grid (plus bounded scalar refinement for binary inputs) and reduces over
placements in either order.
"""
import itertools
import math
from collections.abc import Callable
from typing import NamedTuple

import numpy as np
import structlog
from scipy.optimize import minimize, minimize_scalar
from scipy.special import rel_entr

from app.channel.model import DistortionMeasure, NetworkSpec, RouteSpec
from app.channel.placements import enumerate_placements
from app.core.config import settings
from app.core.exceptions import SearchSpaceError, SolverError, SpecMismatchError
from app.info.distributions import CondPmf, Pmf
from app.info.primitives import mutual_information_array
from app.rates.report import CsiMode, PlacementValue, RateReport

logger = structlog.get_logger(__name__)

LN2 = math.log(2.0)
CONSTRAINT_SLACK = 1e-12
GRID_IMPROVEMENT = 1e-9
EPS = 1e-15


class InnerInfimum(NamedTuple):
    value: float
    law: CondPmf


def _mi_from_law(p: np.ndarray, law: np.ndarray, channel: np.ndarray) -> float:
    return mutual_information_array(p[:, None] * (law @ channel))


def _mi_and_gradient(z: np.ndarray, ctx: "_InnerProblem") -> tuple[float, np.ndarray]:
    law = ctx.unpack(z)
    end_to_end = law @ ctx.channel
    py = ctx.p @ end_to_end
    safe = np.clip(end_to_end, EPS, None)
    log_ratio = np.log2(safe / np.clip(py, EPS, None))
    value = float((ctx.p[:, None] * end_to_end * log_ratio).sum())
    # dI/dT(x,y) = p(x) log2(T(x,y)/p(y)); chain through T = Q W
    grad_law = (ctx.p[:, None] * log_ratio) @ ctx.channel.T
    return value, grad_law[ctx.mask]


class _InnerProblem:
    """Flattened decision vector over the admissible entries of p(x_a|x)."""

    def __init__(self, p: np.ndarray, channel: np.ndarray, cost: np.ndarray, budget: float):
        self.p = p
        self.channel = channel
        self.cost = cost
        self.budget = budget
        allowed = np.isfinite(cost)
        if budget <= 0.0:
            allowed &= cost <= 0.0
        self.mask = allowed
        self.finite_cost = np.where(allowed, cost, 0.0)
        # zero-cost column with the smallest index in each row
        zero = np.where(allowed & (self.finite_cost <= 0.0), 1.0, 0.0)
        if not zero.any(axis=1).all():
            raise SolverError("every input symbol needs a zero-distortion adversary output")
        self.identity = np.zeros_like(cost)
        self.identity[np.arange(cost.shape[0]), zero.argmax(axis=1)] = 1.0

    def unpack(self, z: np.ndarray) -> np.ndarray:
        law = np.zeros(self.cost.shape)
        law[self.mask] = z
        return law

    def expected_cost(self, law: np.ndarray) -> float:
        return float((self.p[:, None] * law * self.finite_cost).sum())

    def make_feasible(self, law: np.ndarray) -> np.ndarray:
        """Mix a row-stochastic law with the zero-cost law until the budget holds."""
        law = np.where(self.mask, np.clip(law, 0.0, None), 0.0)
        sums = law.sum(axis=1, keepdims=True)
        law = np.where(sums > 0, law / np.where(sums > 0, sums, 1.0), self.identity)
        cost = self.expected_cost(law)
        if cost > self.budget:
            t = self.budget / cost
            law = (1.0 - t) * self.identity + t * law
        return law

    def starts(self, n_random: int, rng: np.random.Generator) -> list[np.ndarray]:
        spread = np.where(self.mask, 1.0, 0.0)
        candidates = [self.identity, spread]
        for _ in range(n_random):
            candidates.append(np.where(self.mask, rng.random(self.cost.shape), 0.0))
        return [self.make_feasible(c) for c in candidates]

    def constraints(self) -> list[dict]:
        rows = self.mask.shape[0]
        cost_flat = (self.p[:, None] * self.finite_cost)[self.mask]
        row_of = np.nonzero(self.mask)[0]
        constraints = [
            {
                "type": "ineq",
                "fun": lambda z: self.budget - float(cost_flat @ z),
                "jac": lambda z: -cost_flat,
            }
        ]
        for x in range(rows):
            selector = (row_of == x).astype(float)
            constraints.append(
                {
                    "type": "eq",
                    "fun": lambda z, s=selector: float(s @ z) - 1.0,
                    "jac": lambda z, s=selector: s,
                }
            )
        return constraints


def _grid_binary(p: np.ndarray, channel: np.ndarray, cost: np.ndarray, budget: float, resolution: int):
    """Dense grid over the two moved-mass parameters of a binary-input law; None when the law has more freedom."""
    others = []
    for x in range(2):
        movable = [a for a in range(cost.shape[1]) if a != x and np.isfinite(cost[x, a])]
        if len(movable) != 1 or cost[x, x] != 0.0:
            return None
        others.append(movable[0])
    grid = np.linspace(0.0, 1.0, resolution)
    rows = []
    for x in range(2):
        rows.append((1.0 - grid)[:, None] * channel[x] + grid[:, None] * channel[others[x]])
    t0 = rows[0][:, None, :]
    t1 = rows[1][None, :, :]
    py = p[0] * t0 + p[1] * t1
    mi = np.zeros((resolution, resolution))
    for weight, rows_x in zip(p, (t0, t1)):
        if weight > 0:
            mi = mi + weight * rel_entr(rows_x, py).sum(axis=-1)
    mi = mi / LN2
    spend = p[0] * grid[:, None] * cost[0, others[0]] + p[1] * grid[None, :] * cost[1, others[1]]
    mi = np.where(spend <= budget + CONSTRAINT_SLACK, mi, np.inf)
    i, j = np.unravel_index(np.argmin(mi), mi.shape)
    law = np.zeros(cost.shape)
    law[0, 0], law[0, others[0]] = 1.0 - grid[i], grid[i]
    law[1, 1], law[1, others[1]] = 1.0 - grid[j], grid[j]
    return max(0.0, float(mi[i, j])), law


def _check_sizes(n_inputs: int, n_outputs: int) -> None:
    if n_inputs > settings.max_alphabet or n_outputs > settings.max_alphabet + 1:
        raise SearchSpaceError(
            f"the minimax solver supports input alphabets up to {settings.max_alphabet}, got {n_inputs}x{n_outputs}"
        )


def grid_inner_inf_mi(
    channel: CondPmf, input_pmf: Pmf, measure: DistortionMeasure, D: float, resolution: int | None = None
) -> InnerInfimum:
    """Dense-grid infimum for binary inputs whose adversary can move mass to exactly one other symbol."""
    resolution = resolution or settings.solver_check_resolution
    if input_pmf.size != 2:
        raise SearchSpaceError("the grid oracle covers binary inputs only")
    cost = measure.matrix(2, channel.n_inputs)
    found = _grid_binary(input_pmf.array, channel.array, cost, D, resolution)
    if found is None:
        raise SearchSpaceError("the grid oracle needs one admissible alternative symbol per input")
    value, law = found
    return InnerInfimum(value, CondPmf.from_array(law))


def inner_inf_mi(
    channel: CondPmf,
    input_pmf: Pmf,
    measure: DistortionMeasure,
    D: float,
    *,
    starts: int | None = None,
    seed: int | None = None,
    grid_check: bool | None = None,
) -> InnerInfimum:
    """
    Minimise I(X;Y) over adversary laws p(x_a|x) with E[d(X, X_a)] <= D.

    Returns the infimum in bits together with the minimising law.
    """
    if D < 0:
        raise ValueError(f"distortion budget must be non-negative, got {D}")
    _check_sizes(input_pmf.size, channel.n_inputs)
    starts = settings.solver_starts if starts is None else starts
    seed = settings.solver_seed if seed is None else seed
    grid_check = settings.solver_grid_check if grid_check is None else grid_check

    p = input_pmf.array
    W = channel.array
    problem = _InnerProblem(p, W, measure.matrix(input_pmf.size, channel.n_inputs), D)

    best_value = _mi_from_law(p, problem.identity, W)
    best_law = problem.identity
    if problem.mask.sum() > problem.mask.shape[0]:
        rng = np.random.default_rng(seed)
        for start in problem.starts(starts, rng):
            result = minimize(
                _mi_and_gradient,
                start[problem.mask],
                args=(problem,),
                jac=True,
                method="SLSQP",
                bounds=[(0.0, 1.0)] * int(problem.mask.sum()),
                constraints=problem.constraints(),
                options={"maxiter": 500, "ftol": 1e-14},
            )
            law = problem.make_feasible(problem.unpack(result.x))
            value = _mi_from_law(p, law, W)
            if value < best_value:
                best_value, best_law = value, law

    if grid_check and input_pmf.size == 2 and D > 0:
        found = _grid_binary(p, W, problem.cost, D, settings.solver_check_resolution)
        if found is not None and found[0] < best_value - GRID_IMPROVEMENT:
            logger.debug("inner_grid_improved", solver=best_value, grid=found[0])
            best_value, best_law = found

    return InnerInfimum(best_value, CondPmf.from_array(best_law))


# ---- Outer search over input laws ----


def input_grid(q: int, resolution: int) -> list[Pmf]:
    """Input laws on a regular simplex grid; for q = 2 this is p = 0, 1/(r-1), ..., 1."""
    if resolution < 2:
        raise SolverError(f"grid resolution must be at least 2, got {resolution}")
    if q == 2:
        return [Pmf.bernoulli(float(t)) for t in np.linspace(0.0, 1.0, resolution)]
    steps = resolution - 1
    while steps > 1 and math.comb(steps + q - 1, q - 1) > resolution:
        steps -= 1
    points = [c for c in itertools.product(range(steps + 1), repeat=q - 1) if sum(c) <= steps]
    return [Pmf.from_array([*(c / steps for c in combo), 1.0 - sum(combo) / steps]) for combo in points]


def _route_channel(route: RouteSpec) -> tuple[CondPmf, DistortionMeasure, int]:
    if not route.discrete:
        raise SpecMismatchError("the minimax solver needs discrete routes; Gaussian routes use cap_memoryless_gaussian.")
    return route.transition(), route.measure, route.q


class _RouteTable:
    """Inner infimum of one route over the input grid, for s = 0 and s = 1."""

    def __init__(self, route: RouteSpec, resolution: int):
        self.route = route
        self.channel, self.measure, self.q = _route_channel(route)
        self.grid = input_grid(self.q, resolution)
        self.values = np.array([[self.value(pmf, bit) for bit in (0, 1)] for pmf in self.grid])

    def inner(self, pmf: Pmf, bit: int) -> InnerInfimum:
        return inner_inf_mi(self.channel, pmf, self.measure, bit * self.route.distortion_limit)

    def value(self, pmf: Pmf, bit: int) -> float:
        return self.inner(pmf, bit).value


def _refine_binary(objective: Callable[[float], float], centre: float, width: float) -> tuple[float, float]:
    """Bounded scalar maximisation around a grid point; returns (p, value)."""
    lo, hi = max(0.0, centre - width), min(1.0, centre + width)
    result = minimize_scalar(lambda t: -objective(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-7})
    return float(result.x), float(-result.fun)


def cap_memoryless_general(
    spec: NetworkSpec, csi: CsiMode | str = CsiMode.NONE, resolution: int | None = None
) -> RateReport:
    """
    Memoryless capacity by grid search over input laws and numerical inner infima.

    No CSI: sup over input laws of min over placements. Tx CSI: min over placements
    of the per-placement sup. The other order is reported in ``alternate_order_value``.
    """
    csi = CsiMode(csi)
    resolution = resolution or settings.grid_resolution
    if resolution < 2:
        raise SolverError(f"grid resolution must be at least 2, got {resolution}")
    placements = enumerate_placements(spec.n_r, spec.n_a)

    tables: dict[RouteSpec, _RouteTable] = {}
    for route in spec.routes:
        if route not in tables:
            tables[route] = _RouteTable(route, resolution)
    per_route = [tables[r] for r in spec.routes]
    logger.info("minimax_tables_ready", routes=spec.n_r, distinct=len(tables), resolution=resolution)

    no_csi = _sup_min(spec, per_route, placements, resolution)
    tx_csi = _min_sup(spec, per_route, placements, resolution)
    chosen, other = (no_csi, tx_csi) if csi is CsiMode.NONE else (tx_csi, no_csi)
    return chosen.model_copy(update={"alternate_order_value": other.overall})


def _placement_value(terms: list[float], label: str) -> PlacementValue:
    return PlacementValue(placement=label, value=float(sum(terms)), terms=tuple(float(t) for t in terms))


def _laws_at(per_route: list[_RouteTable], pmfs: list[Pmf], bits: tuple[int, ...]) -> list[list[list[float]]]:
    return [table.inner(pmf, bit).law.array.tolist() for table, pmf, bit in zip(per_route, pmfs, bits)]


def _sup_min(spec: NetworkSpec, per_route: list[_RouteTable], placements, resolution: int) -> RateReport:
    bits = np.array([p.bits for p in placements])

    def worst(indices: tuple[int, ...]) -> float:
        terms = np.array([per_route[j].values[g] for j, g in enumerate(indices)])
        return float(terms[np.arange(spec.n_r), bits].sum(axis=1).min())

    sizes = [len(t.grid) for t in per_route]
    shared = len(set(sizes)) == 1 and len({t.q for t in per_route}) == 1
    if shared:
        candidates = [(g,) * spec.n_r for g in range(sizes[0])]
        best = max(candidates, key=worst)
    else:
        best = tuple(0 for _ in per_route)
    best = _coordinate_ascent(best, sizes, worst)
    best_value = worst(best)
    pmfs = [per_route[j].grid[g] for j, g in enumerate(best)]

    if all(t.q == 2 for t in per_route) and shared and len(set(best)) == 1:
        step = 1.0 / (resolution - 1)

        def shared_objective(t: float) -> float:
            pmf = Pmf.bernoulli(t)
            distinct: dict[int, tuple[float, float]] = {}
            for table in per_route:
                if id(table) not in distinct:
                    distinct[id(table)] = (table.value(pmf, 0), table.value(pmf, 1))
            terms = np.array([distinct[id(table)] for table in per_route])
            return float(terms[np.arange(spec.n_r), bits].sum(axis=1).min())

        t, value = _refine_binary(shared_objective, pmfs[0].probs[1], step)
        if value > best_value:
            pmfs = [Pmf.bernoulli(t)] * spec.n_r
            best_value = value

    values = [
        _placement_value([table.value(pmf, bit) for table, pmf, bit in zip(per_route, pmfs, placement.bits)], placement.label)
        for placement in placements
    ]
    worst_entry = min(values, key=lambda v: v.value)
    logger.info("minimax_no_csi", value=worst_entry.value, argmin=worst_entry.placement)
    return RateReport(
        evaluator="cap_memoryless_general",
        description="Memoryless capacity, numerical sup_p min_s sum_j inf I(X;Y)",
        csi=CsiMode.NONE,
        placements=values,
        overall=worst_entry.value,
        argmin=worst_entry.placement,
        input_pmfs=[list(p.probs) for p in pmfs],
        adversary_laws=_laws_at(per_route, pmfs, placements[values.index(worst_entry)].bits),
    )


def _coordinate_ascent(start: tuple[int, ...], sizes: list[int], objective) -> tuple[int, ...]:
    current = list(start)
    value = objective(tuple(current))
    improved = True
    while improved:
        improved = False
        for j, size in enumerate(sizes):
            for g in range(size):
                trial = current.copy()
                trial[j] = g
                candidate = objective(tuple(trial))
                if candidate > value + GRID_IMPROVEMENT:
                    current, value, improved = trial, candidate, True
    return tuple(current)


def _min_sup(spec: NetworkSpec, per_route: list[_RouteTable], placements, resolution: int) -> RateReport:
    step = 1.0 / (resolution - 1)
    best_inputs: dict[tuple[int, int], tuple[Pmf, float]] = {}
    for j, table in enumerate(per_route):
        for bit in (0, 1):
            g = int(np.argmax(table.values[:, bit]))
            pmf, value = table.grid[g], float(table.values[g, bit])
            if table.q == 2:
                t, refined = _refine_binary(lambda t: table.value(Pmf.bernoulli(t), bit), pmf.probs[1], step)
                if refined > value:
                    pmf, value = Pmf.bernoulli(t), refined
            best_inputs[(j, bit)] = (pmf, value)

    values = [
        _placement_value([best_inputs[(j, bit)][1] for j, bit in enumerate(placement.bits)], placement.label)
        for placement in placements
    ]
    worst_entry = min(values, key=lambda v: v.value)
    worst_bits = placements[values.index(worst_entry)].bits
    pmfs = [best_inputs[(j, bit)][0] for j, bit in enumerate(worst_bits)]
    logger.info("minimax_tx_csi", value=worst_entry.value, argmin=worst_entry.placement)
    return RateReport(
        evaluator="cap_memoryless_general",
        description="Memoryless capacity, numerical min_s sup_p sum_j inf I(X;Y)",
        csi=CsiMode.TX,
        placements=values,
        overall=worst_entry.value,
        argmin=worst_entry.placement,
        input_pmfs=[list(p.probs) for p in pmfs],
        adversary_laws=_laws_at(per_route, pmfs, worst_bits),
    )
