"""
Closed-form capacities and bounds for binary replacement, binary erasure and Gaussian routes.

Every evaluator enumerates the adversary placements, sums one term per route and
reports the worst placement. Foreseer bounds clamp each route term at zero before
summing.
"""
import math
from collections.abc import Callable

import structlog
from pydantic import BaseModel

from app.channel.model import ChannelKind, NetworkSpec, RouteSpec, bec_route, bsc_route
from app.channel.placements import enumerate_placements
from app.core.exceptions import InfeasibleSpecError, SpecMismatchError
from app.info.primitives import binary_entropy, star
from app.rates.report import PlacementValue, RateReport, reduce_placements

logger = structlog.get_logger(__name__)

RouteTerm = Callable[[RouteSpec, int], float]

LOWER_REPLACEMENT_WARN_D = 0.25


def _positive(x: float) -> float:
    return max(0.0, x)


def _require_kind(spec: NetworkSpec, kind: ChannelKind, evaluator: str, *, binary: bool = True) -> None:
    if not spec.all_of(kind):
        found = ", ".join(sorted(k.value for k in spec.kinds()))
        raise SpecMismatchError(f"{evaluator} needs every route to be {kind.value}, got {found}.")
    if binary and any(r.q != 2 for r in spec.routes):
        raise SpecMismatchError(f"{evaluator} is defined for binary alphabets only.")


def _require_unit_budget(spec: NetworkSpec, evaluator: str, limit: float = 1.0) -> None:
    for j, route in enumerate(spec.routes):
        if route.distortion_limit > limit:
            raise InfeasibleSpecError(f"{evaluator} needs D <= {limit} on every route; route {j} has D={route.distortion_limit}")


def _placement_values(spec: NetworkSpec, term: RouteTerm) -> list[PlacementValue]:
    values = []
    for placement in enumerate_placements(spec.n_r, spec.n_a):
        terms = tuple(float(term(route, bit)) for route, bit in zip(spec.routes, placement.bits))
        values.append(PlacementValue(placement=placement.label, value=sum(terms), terms=terms))
    return values


def _report(spec: NetworkSpec, evaluator: str, description: str, term: RouteTerm, **extra) -> RateReport:
    report = reduce_placements(evaluator, description, _placement_values(spec, term), **extra)
    logger.debug("rate_evaluated", evaluator=evaluator, overall=report.overall, argmin=report.argmin)
    return report


# ---- Binary replacement ----


def _replacement_capacity_term(route: RouteSpec, bit: int) -> float:
    d_tilde = min(route.distortion_limit, 1.0 - route.distortion_limit)
    # H(N * N') grows towards 1 as N' approaches 1/2, so the inner max sits at N' = s * D~
    return 1.0 - binary_entropy(star(route.noise, bit * d_tilde))


def cap_memoryless_replacement(spec: NetworkSpec) -> RateReport:
    name = "cap_memoryless_replacement"
    _require_kind(spec, ChannelKind.BSC, name)
    _require_unit_budget(spec, name)
    return _report(
        spec,
        name,
        "Memoryless capacity, binary replacement: sum_j 1 - H(N_j * s_j min(D_j, 1-D_j))",
        _replacement_capacity_term,
    )


def _check_foreseer_replacement(spec: NetworkSpec, evaluator: str) -> list[str]:
    _require_kind(spec, ChannelKind.BSC, evaluator)
    _require_unit_budget(spec, evaluator, limit=0.5)
    warnings = []
    for j, route in enumerate(spec.routes):
        if route.distortion_limit > LOWER_REPLACEMENT_WARN_D and spec.n_a > 0:
            message = f"route {j}: D={route.distortion_limit} > 0.25, H(2D) is past its peak and the lower bound is not monotone in D"
            logger.warning("foreseer_bound_out_of_range", route=j, D=route.distortion_limit)
            warnings.append(message)
    return warnings


def low_foreseer_replacement(spec: NetworkSpec) -> RateReport:
    name = "low_foreseer_replacement"
    warnings = _check_foreseer_replacement(spec, name)

    def term(route: RouteSpec, bit: int) -> float:
        return _positive(1.0 - binary_entropy(route.noise) - binary_entropy(2.0 * bit * route.distortion_limit))

    return _report(
        spec,
        name,
        "Foreseer lower bound, binary replacement: sum_j [1 - H(N_j) - H(2 s_j D_j)]^+",
        term,
        warnings=warnings,
    )


def up_foreseer_replacement(spec: NetworkSpec) -> RateReport:
    name = "up_foreseer_replacement"
    _require_kind(spec, ChannelKind.BSC, name)
    _require_unit_budget(spec, name, limit=0.5)

    def term(route: RouteSpec, bit: int) -> float:
        return _positive(1.0 - binary_entropy(route.noise) - binary_entropy(bit * route.distortion_limit))

    return _report(
        spec,
        name,
        "Foreseer upper bound, binary replacement: sum_j [1 - H(N_j) - H(s_j D_j)]^+",
        term,
    )


# ---- Binary erasure ----


def _erasure_capacity_term(route: RouteSpec, bit: int) -> float:
    return (1.0 - bit * route.distortion_limit) * (1.0 - route.noise)


def cap_memoryless_erasure(spec: NetworkSpec) -> RateReport:
    name = "cap_memoryless_erasure"
    _require_kind(spec, ChannelKind.BEC, name)
    _require_unit_budget(spec, name)
    return _report(
        spec,
        name,
        "Memoryless capacity, binary erasure: sum_j (1 - s_j D_j)(1 - N_j)",
        _erasure_capacity_term,
    )


def _erased_mixture_entropy(n_bar: float, n_prime: float) -> float:
    """N~ H(N'/N~), with the 0/0 case taken as 0."""
    if n_bar <= 0.0:
        return 0.0
    return n_bar * binary_entropy(min(1.0, n_prime / n_bar))


def low_foreseer_erasure(spec: NetworkSpec, variant: str = "closed") -> RateReport:
    """
    Foreseer lower bound for erasing attacks.

    ``variant="closed"`` uses the per-route summand that sums to the identical-route
    expression n_r(1-N) - n_a[N~ H(D/N~) + H(D) - D]; ``variant="entropy"`` uses
    1 - N(1-N') - N~ H(N'/N~) - H(N'), which is smaller by D(1-N) per attacked route.
    """
    name = "low_foreseer_erasure"
    if variant not in ("closed", "entropy"):
        raise ValueError(f"unknown variant {variant!r}; use 'closed' or 'entropy'")
    _require_kind(spec, ChannelKind.BEC, name)
    _require_unit_budget(spec, name)

    def term(route: RouteSpec, bit: int) -> float:
        n, n_prime = route.noise, bit * route.distortion_limit
        n_bar = n * (1.0 - n_prime) + n_prime
        if variant == "entropy":
            value = 1.0 - n * (1.0 - n_prime) - _erased_mixture_entropy(n_bar, n_prime) - binary_entropy(n_prime)
        else:
            value = 1.0 - n - _erased_mixture_entropy(n_bar, n_prime) - binary_entropy(n_prime) + n_prime
        return _positive(value)

    return _report(
        spec,
        name,
        f"Foreseer lower bound, binary erasure ({variant} summand), N~ = N(1-s D) + s D",
        term,
    )


def _erasure_upper_raw(route: RouteSpec, bit: int) -> float:
    n, n_prime = route.noise, bit * route.distortion_limit
    kept = (1.0 - n_prime) * (1.0 - n)
    return _positive(binary_entropy(kept) + (1.0 - n_prime) * (1.0 - n - binary_entropy(n)) - binary_entropy(n_prime / 2.0))


def up_foreseer_erasure(spec: NetworkSpec, tighten: bool = True) -> RateReport:
    """
    Foreseer upper bound for erasing attacks.

    The raw summand can exceed the memoryless capacity when N is small. A foreseer
    can always behave memorylessly, so with ``tighten`` each route term is capped by
    (1 - s D)(1 - N); ``raw_overall`` keeps the uncapped value.
    """
    name = "up_foreseer_erasure"
    _require_kind(spec, ChannelKind.BEC, name)
    _require_unit_budget(spec, name)
    raw = reduce_placements(name, "raw", _placement_values(spec, _erasure_upper_raw))
    if not tighten:
        term = _erasure_upper_raw
    else:

        def term(route: RouteSpec, bit: int) -> float:
            return min(_erasure_upper_raw(route, bit), _erasure_capacity_term(route, bit))

    return _report(
        spec,
        name,
        "Foreseer upper bound, binary erasure: sum_j [H((1-N')(1-N)) + (1-N')(1-N-H(N)) - H(N'/2)]^+, N' = s_j D_j",
        term,
        raw_overall=raw.overall,
    )


# ---- Gaussian ----


def _theta(x: float) -> float:
    return 0.5 * math.log2(x)


def _require_gaussian(spec: NetworkSpec, evaluator: str) -> None:
    _require_kind(spec, ChannelKind.AWGN, evaluator, binary=False)
    if spec.n_a == 0:
        return
    for j, route in enumerate(spec.routes):
        if route.power <= route.distortion_limit:
            raise InfeasibleSpecError(
                f"{evaluator} requires P > D on every attackable route; route {j} has P={route.power}, D={route.distortion_limit}"
            )


def cap_memoryless_gaussian(spec: NetworkSpec) -> RateReport:
    name = "cap_memoryless_gaussian"
    _require_gaussian(spec, name)

    def term(route: RouteSpec, bit: int) -> float:
        attack = bit * route.distortion_limit
        return _theta((route.power - attack + route.noise) / (attack + route.noise))

    return _report(
        spec,
        name,
        "Memoryless capacity, Gaussian: sum_j 1/2 log2((P_j - s_j D_j + N_j) / (s_j D_j + N_j))",
        term,
    )


def cap_independent_jammer_gaussian(spec: NetworkSpec) -> RateReport:
    """Rate against a jammer that adds independent Gaussian noise of power D."""
    name = "cap_independent_jammer_gaussian"
    _require_kind(spec, ChannelKind.AWGN, name, binary=False)

    def term(route: RouteSpec, bit: int) -> float:
        return _theta(1.0 + route.power / (bit * route.distortion_limit + route.noise))

    return _report(
        spec,
        name,
        "Independent Gaussian jammer: sum_j 1/2 log2(1 + P_j / (s_j D_j + N_j))",
        term,
    )


# ---- Binary attack table ----


class AttackRow(BaseModel):
    capacity: float
    lower: float
    upper: float


class AttackTable(BaseModel):
    """Single-route rates for binary replacement and erasing attacks."""

    N: float
    D: float
    replacement: AttackRow
    erasure: AttackRow

    def rows(self) -> list[dict]:
        return [
            {"attack": attack, "capacity": row.capacity, "lower": row.lower, "upper": row.upper}
            for attack, row in (("replacement", self.replacement), ("erasure", self.erasure))
        ]


def binary_attack_table(N: float, D: float) -> AttackTable:
    """Memoryless capacity and foreseer bounds for one attacked binary route."""
    if not (0.0 <= N <= 0.5 and 0.0 <= D <= 0.5):
        raise InfeasibleSpecError(f"the binary attack table needs N, D in [0, 0.5], got N={N}, D={D}")
    bsc = NetworkSpec.identical(1, 1, bsc_route(N, D))
    bec = NetworkSpec.identical(1, 1, bec_route(N, D))
    return AttackTable(
        N=N,
        D=D,
        replacement=AttackRow(
            capacity=cap_memoryless_replacement(bsc).overall,
            lower=low_foreseer_replacement(bsc).overall,
            upper=up_foreseer_replacement(bsc).overall,
        ),
        erasure=AttackRow(
            capacity=cap_memoryless_erasure(bec).overall,
            lower=low_foreseer_erasure(bec).overall,
            upper=up_foreseer_erasure(bec).overall,
        ),
    )
