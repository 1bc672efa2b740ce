"""
Codeword-aware (foreseer) attacks with a hard budget of floor(nD) modified symbols.

The greedy policies push the sent codeword towards its nearest rival, the
codeword a minimum-distance decoder is most easily confused with. Exhaustive
policies search every modification within budget and serve as oracles on tiny
codes.
"""
import itertools
import math
from enum import StrEnum

import numpy as np
import structlog

from app.adversary.base import AdversaryStrategy, AttackContext
from app.channel.model import DistortionKind, RouteSpec
from app.channel.noise import hard_budget
from app.codes.decoding import consistent_counts, nearest_codewords
from app.codes.verify import error_patterns
from app.core.config import settings
from app.core.exceptions import InfeasibleSpecError, SearchSpaceError
from app.info.primitives import hamming_ball_volume

logger = structlog.get_logger(__name__)


class AttackMode(StrEnum):
    GREEDY = "greedy"
    EXHAUSTIVE = "exhaustive"


def nearest_rival(codebook: np.ndarray, sent_index: int) -> int:
    """Closest other codeword by Hamming distance; ties go to the lowest index."""
    if codebook.shape[0] < 2:
        return sent_index
    distances = (codebook != codebook[sent_index]).sum(axis=1)
    distances[sent_index] = codebook.shape[1] + 1
    return int(distances.argmin())


def _difference_positions(codebook: np.ndarray, sent_index: int, rng: np.random.Generator | None) -> tuple[int, np.ndarray]:
    rival = nearest_rival(codebook, sent_index)
    positions = np.flatnonzero(codebook[sent_index] != codebook[rival])
    if rng is not None:
        positions = rng.permutation(positions)
    return rival, positions


def _check_inputs(codebook: np.ndarray, sent_index: int, budget: int) -> np.ndarray:
    codebook = np.atleast_2d(np.asarray(codebook))
    if codebook.shape[0] == 0:
        raise InfeasibleSpecError("codebook is empty")
    if not 0 <= sent_index < codebook.shape[0]:
        raise InfeasibleSpecError(f"sent index {sent_index} outside codebook of size {codebook.shape[0]}")
    if budget < 0:
        raise InfeasibleSpecError(f"budget must be non-negative, got {budget}")
    return codebook


def foreseer_replacement_attack(
    codebook: np.ndarray,
    sent_index: int,
    budget: int,
    mode: AttackMode | str = AttackMode.GREEDY,
    q: int = 2,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Replace at most ``budget`` symbols of the sent codeword.

    Greedy copies the nearest rival's symbols on up to ``budget`` differing
    positions (random order when ``rng`` is given, ascending otherwise).
    Exhaustive returns the first modification, lightest first, that makes a
    minimum-distance decoder miss; the greedy block when none does.
    """
    codebook = _check_inputs(codebook, sent_index, budget)
    sent = codebook[sent_index].astype(np.int64)
    rival, positions = _difference_positions(codebook, sent_index, rng)
    greedy = sent.copy()
    chosen = positions[:budget]
    greedy[chosen] = codebook[rival, chosen]
    if AttackMode(mode) is AttackMode.GREEDY:
        return greedy

    n = codebook.shape[1]
    radius = min(budget, n)
    space = hamming_ball_volume(n, radius, q).count
    if space > settings.exhaustive_limit:
        raise SearchSpaceError(f"exhaustive replacement search needs {space} blocks, limit is {settings.exhaustive_limit}")
    received = (sent[None, :] + error_patterns(n, radius, q)) % q
    wrong = np.flatnonzero(nearest_codewords(received, codebook) != sent_index)
    if wrong.size == 0:
        return greedy
    return received[wrong[0]]


def foreseer_erasure_attack(
    codebook: np.ndarray,
    sent_index: int,
    budget: int,
    mode: AttackMode | str = AttackMode.GREEDY,
    erasure_symbol: int = 2,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Erase at most ``budget`` symbols of the sent codeword.

    Greedy erases positions where the sent codeword differs from its nearest
    rival. Exhaustive picks the erasure set, lightest first, that leaves the most
    codewords consistent with the kept symbols.
    """
    codebook = _check_inputs(codebook, sent_index, budget)
    sent = codebook[sent_index].astype(np.int64)
    n = codebook.shape[1]
    if AttackMode(mode) is AttackMode.GREEDY:
        _, positions = _difference_positions(codebook, sent_index, rng)
        attacked = sent.copy()
        attacked[positions[:budget]] = erasure_symbol
        return attacked

    radius = min(budget, n)
    space = sum(math.comb(n, w) for w in range(radius + 1))
    if space > settings.exhaustive_limit:
        raise SearchSpaceError(f"exhaustive erasure search needs {space} blocks, limit is {settings.exhaustive_limit}")
    candidates = np.repeat(sent[None, :], space, axis=0)
    row = 0
    for weight in range(radius + 1):
        for erased in itertools.combinations(range(n), weight):
            candidates[row, list(erased)] = erasure_symbol
            row += 1
    counts = consistent_counts(candidates, codebook, erasure_symbol)
    return candidates[int(counts.argmax())]


class ForeseerStrategy(AdversaryStrategy):
    """Applies the replacement or erasure foreseer attack that matches the route's distortion measure."""

    def __init__(self, route: RouteSpec, mode: AttackMode | str = AttackMode.GREEDY, random_positions: bool = True):
        super().__init__(route)
        if route.measure.kind not in (DistortionKind.REPLACEMENT, DistortionKind.ERASURE):
            raise InfeasibleSpecError("foreseer attacks need a replacement or erasure route")
        self.mode = AttackMode(mode)
        self.random_positions = random_positions

    @property
    def name(self) -> str:
        return f"foreseer_{self.route.measure.kind.value}"

    def describe(self) -> dict:
        return {**super().describe(), "mode": self.mode.value}

    def attack(self, block: np.ndarray, context: AttackContext, rng: np.random.Generator) -> np.ndarray:
        if context.codebook is None or context.sent_index is None:
            raise InfeasibleSpecError("foreseer attacks need the codebook and the sent index")
        budget = hard_budget(np.asarray(block).size, self.budget)
        position_rng = rng if self.random_positions else None
        if self.route.measure.kind is DistortionKind.REPLACEMENT:
            return foreseer_replacement_attack(context.codebook, context.sent_index, budget, self.mode, self.route.q, position_rng)
        return foreseer_erasure_attack(
            context.codebook, context.sent_index, budget, self.mode, self.route.erasure_symbol, position_rng
        )
