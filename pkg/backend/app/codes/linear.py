"""
Linear block codes over prime fields and the Varshamov random construction.

Messages are indexed in base q with the most significant digit first, which is
the order ``itertools.product(range(q), repeat=k)`` produces.
"""
from functools import cached_property
from typing import NamedTuple

import numpy as np
import structlog

from app.codes.field import prime_field
from app.core.config import settings
from app.core.exceptions import CodeConstructionError, InfeasibleSpecError, SearchSpaceError
from app.info.primitives import gilbert_varshamov_distance, gv_rate

logger = structlog.get_logger(__name__)

CODEBOOK_CHUNK = 1 << 16


def _check_dimensions(k: int, n: int, q: int) -> None:
    if not 1 <= k <= n:
        raise CodeConstructionError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > settings.max_block_length:
        raise SearchSpaceError(f"block length is limited to {settings.max_block_length}, got n={n}")
    if q**k > settings.codebook_limit:
        raise SearchSpaceError(f"q^k = {q}^{k} exceeds the codebook limit of {settings.codebook_limit} codewords")


def message_digits(indices, q: int, k: int) -> np.ndarray:
    """Base-q digits of message indices, most significant first."""
    indices = np.asarray(indices, dtype=np.int64)
    powers = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (indices[..., None] // powers) % q


def message_index(message, q: int) -> int:
    digits = np.asarray(message, dtype=np.int64)
    powers = q ** np.arange(digits.size - 1, -1, -1, dtype=np.int64)
    return int((digits * powers).sum())


class LinearCode:
    """Code {uG : u in F_q^k} with an enumerated codebook."""

    def __init__(self, generator, q: int):
        matrix = np.atleast_2d(np.asarray(generator))
        if not np.issubdtype(matrix.dtype, np.integer):
            raise CodeConstructionError("generator entries must be integers")
        if matrix.min(initial=0) < 0 or matrix.max(initial=0) >= q:
            raise CodeConstructionError(f"generator entries must lie in [0, {q})")
        self.field = prime_field(q)
        self.q = q
        self.k, self.n = matrix.shape
        _check_dimensions(self.k, self.n, q)
        self.generator = matrix.astype(np.int64)
        self._field_generator = self.field(self.generator)

    def __repr__(self) -> str:
        return f"LinearCode(q={self.q}, k={self.k}, n={self.n})"

    @property
    def size(self) -> int:
        return self.q**self.k

    @property
    def rate(self) -> float:
        """Rate in q-ary symbols per channel use."""
        return self.k / self.n

    def encode(self, message) -> np.ndarray:
        message = np.asarray(message)
        if message.shape != (self.k,):
            raise CodeConstructionError(f"message must have {self.k} symbols, got shape {message.shape}")
        return np.asarray(self.field(message % self.q) @ self._field_generator, dtype=np.int64)

    def encode_index(self, index: int) -> np.ndarray:
        return self.codebook[index].astype(np.int64)

    def message(self, index: int) -> np.ndarray:
        return message_digits(index, self.q, self.k)

    @cached_property
    def codebook(self) -> np.ndarray:
        """All q^k codewords, row m encoding message index m."""
        words = np.empty((self.size, self.n), dtype=np.uint8 if self.q < 256 else np.int64)
        for start in range(0, self.size, CODEBOOK_CHUNK):
            stop = min(start + CODEBOOK_CHUNK, self.size)
            messages = self.field(message_digits(np.arange(start, stop), self.q, self.k))
            words[start:stop] = np.asarray(messages @ self._field_generator)
        return words

    @cached_property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self._field_generator))

    @cached_property
    def min_distance(self) -> int:
        """Minimum weight over nonzero messages; 0 when two messages share a codeword."""
        weights = np.count_nonzero(self.codebook[1:], axis=1)
        return int(weights.min()) if weights.size else self.n


def random_generator(k: int, n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """k x n matrix with i.i.d. uniform entries of F_q."""
    prime_field(q)
    _check_dimensions(k, n, q)
    return rng.integers(0, q, size=(k, n), dtype=np.int64)


class SampledCode(NamedTuple):
    code: LinearCode
    attempts: int


def varshamov_sample(
    k: int, n: int, q: int, d_target: int, rng: np.random.Generator, max_tries: int | None = None
) -> SampledCode:
    """Rejection-sample random generators until the code reaches minimum distance d_target."""
    max_tries = max_tries or settings.varshamov_max_tries
    if d_target < 1 or d_target / n > 1.0 - 1.0 / q:
        raise InfeasibleSpecError(f"d_target/n must lie in (0, 1 - 1/q], got d={d_target}, n={n}, q={q}")
    for attempt in range(1, max_tries + 1):
        code = LinearCode(random_generator(k, n, q, rng), q)
        if code.min_distance >= d_target:
            logger.debug("varshamov_sample_accepted", k=k, n=n, q=q, d=code.min_distance, attempts=attempt)
            return SampledCode(code, attempt)
    target_rate = gv_rate(d_target, n, q)
    logger.warning("varshamov_sample_exhausted", k=k, n=n, q=q, d_target=d_target, tries=max_tries)
    raise CodeConstructionError(
        f"no [{n}, {k}, >={d_target}]_{q} code in {max_tries} tries: rate k/n = {k / n:.4f} "
        f"vs GV rate 1 - H_q(d/n) = {target_rate:.4f}"
    )


def gv_code_for_rate(rate: float, n: int, q: int, rng: np.random.Generator, max_tries: int | None = None) -> SampledCode:
    """Sample a code of dimension round(rate * n) at the distance the Varshamov condition guarantees."""
    k = min(n, max(1, round(rate * n)))
    d = gilbert_varshamov_distance(k, n, q)
    d = min(d, int((1.0 - 1.0 / q) * n)) or 1
    return varshamov_sample(k, n, q, d, rng, max_tries)
