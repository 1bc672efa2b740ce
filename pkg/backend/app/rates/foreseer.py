"""
Foreseer bound objectives evaluated for a supplied input law, auxiliary law and adversary family.

Neither function searches over all codeword-aware adversaries; they evaluate the
bound expressions for the distributions they are given.
"""
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from app.channel.model import DistortionKind, NetworkSpec, PlacementVector, RouteSpec
from app.core.exceptions import AlphabetMismatchError, BudgetViolationError, SpecMismatchError
from app.info.distributions import CondPmf, JointPmf, Pmf
from app.info.primitives import conditional_entropy, entropy, mutual_information_array, q_ary_entropy

BUDGET_SLACK = 1e-12


class BoundObjective(NamedTuple):
    value: float
    terms: tuple[float, ...]


def ball_distance(route: RouteSpec, bit: int) -> float:
    """Relative ball radius d_j: 2 s D for replacement attacks, s D for erasing attacks."""
    kind = route.measure.kind
    if kind is DistortionKind.REPLACEMENT:
        return 2.0 * bit * route.distortion_limit
    if kind is DistortionKind.ERASURE:
        return bit * route.distortion_limit
    raise SpecMismatchError("foreseer bounds are defined for replacement and erasing attacks only.")


def _ball_penalty(d: float, q: int) -> float:
    """H_q(d) / log_q 2, i.e. the q-ary entropy expressed in bits."""
    return q_ary_entropy(min(d, 1.0), q) * np.log2(q)


def _per_route(values, n_r: int, what: str) -> list:
    if values is None or isinstance(values, (Pmf, CondPmf)):
        return [values] * n_r
    values = list(values)
    if len(values) != n_r:
        raise AlphabetMismatchError(f"expected one {what} per route ({n_r}), got {len(values)}")
    return values


def _adversary_output(route: RouteSpec, law: CondPmf | None, bit: int, q: int) -> np.ndarray:
    size = route.adversary_alphabet
    if law is None or bit == 0:
        identity = np.zeros((q, size))
        identity[np.arange(q), np.arange(q)] = 1.0
        return identity
    if law.n_inputs != q or law.n_outputs != size:
        raise AlphabetMismatchError(f"adversary law must be {q}x{size}, got {law.n_inputs}x{law.n_outputs}")
    return law.array


def _check_network(spec: NetworkSpec, placement: PlacementVector) -> None:
    spec.check_placement(placement)
    for route in spec.routes:
        if not route.discrete:
            raise SpecMismatchError("foreseer objectives need discrete routes.")


def foreseer_bound_objective(
    spec: NetworkSpec,
    placement: PlacementVector,
    input_pmf: Pmf | Sequence[Pmf],
    aux: CondPmf | Sequence[CondPmf] | None = None,
    adversary: CondPmf | Sequence[CondPmf] | None = None,
) -> BoundObjective:
    """
    Lower-bound objective sum_j [H(V) - H(X_a|Y) - H_q(d_j) log2 q]^+ for one placement.

    ``aux`` is p(v|x) (identity when omitted, i.e. V = X) and must keep
    E[d_H(V, X)] <= d_j. ``adversary`` is the law p(x_a|x) used on attacked routes;
    unattacked routes forward X unchanged.
    """
    _check_network(spec, placement)
    inputs = _per_route(input_pmf, spec.n_r, "input law")
    auxes = _per_route(aux, spec.n_r, "auxiliary law")
    laws = _per_route(adversary, spec.n_r, "adversary law")

    terms = []
    for j, (route, bit) in enumerate(zip(spec.routes, placement.bits)):
        p = inputs[j]
        q = p.size
        if q != route.q:
            raise AlphabetMismatchError(f"route {j} uses q={route.q}, input law has {q} symbols")
        d = ball_distance(route, bit)

        v_given_x = np.eye(q) if auxes[j] is None else auxes[j].array
        if v_given_x.shape != (q, q):
            raise AlphabetMismatchError(f"auxiliary law on route {j} must be {q}x{q}")
        mismatch = float((p.array[:, None] * v_given_x * (1.0 - np.eye(q))).sum())
        if mismatch > d + BUDGET_SLACK:
            raise BudgetViolationError(f"route {j}: E[d(V, X)] = {mismatch:.6g} exceeds d_j = {d:.6g}")
        h_v = entropy(Pmf.from_array(p.array @ v_given_x))

        x_a = p.array @ _adversary_output(route, laws[j], bit, q)
        joint = JointPmf.from_array(x_a[:, None] * route.transition_matrix())
        h_xa_given_y = conditional_entropy(joint)

        terms.append(max(0.0, h_v - h_xa_given_y - _ball_penalty(d, q)))
    return BoundObjective(float(sum(terms)), tuple(terms))


def foreseer_upper_objective(
    spec: NetworkSpec,
    placement: PlacementVector,
    input_pmf: Pmf | Sequence[Pmf],
    adversary: CondPmf | Sequence[CondPmf] | None = None,
) -> BoundObjective:
    """Upper-bound objective sum_j [I(X_a;Y) - H_q(d_j/2) log2 q]^+ for one placement."""
    _check_network(spec, placement)
    inputs = _per_route(input_pmf, spec.n_r, "input law")
    laws = _per_route(adversary, spec.n_r, "adversary law")

    terms = []
    for j, (route, bit) in enumerate(zip(spec.routes, placement.bits)):
        p = inputs[j]
        q = p.size
        if q != route.q:
            raise AlphabetMismatchError(f"route {j} uses q={route.q}, input law has {q} symbols")
        x_a = p.array @ _adversary_output(route, laws[j], bit, q)
        information = mutual_information_array(x_a[:, None] * route.transition_matrix())
        penalty = _ball_penalty(ball_distance(route, bit) / 2.0, q)
        terms.append(max(0.0, information - penalty))
    return BoundObjective(float(sum(terms)), tuple(terms))
