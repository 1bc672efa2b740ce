"""
Exhaustive checks of the correction guarantees a minimum distance promises.
"""
import itertools
import math

import numpy as np
import structlog
from pydantic import BaseModel

from app.codes.decoding import nearest_codewords
from app.codes.linear import LinearCode
from app.core.config import settings
from app.core.exceptions import SearchSpaceError
from app.info.primitives import hamming_ball_volume

logger = structlog.get_logger(__name__)


class VerificationReport(BaseModel):
    """Patterns checked for a code and how many of them failed."""

    radius: int
    patterns: int
    checked: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def error_patterns(n: int, max_weight: int, q: int) -> np.ndarray:
    """Every q-ary error pattern of weight <= max_weight, lightest first."""
    count = hamming_ball_volume(n, max_weight, q).count
    if count > settings.exhaustive_limit:
        raise SearchSpaceError(f"{count} error patterns exceed the exhaustive limit of {settings.exhaustive_limit}")
    patterns = np.zeros((count, n), dtype=np.int64)
    row = 1
    for weight in range(1, max_weight + 1):
        for positions in itertools.combinations(range(n), weight):
            for values in itertools.product(range(1, q), repeat=weight):
                patterns[row, list(positions)] = values
                row += 1
    return patterns


def verify_bounded_distance(code: LinearCode) -> VerificationReport:
    """Decode every codeword plus every error of weight <= floor((d-1)/2) and count wrong decisions."""
    radius = max(0, (code.min_distance - 1) // 2)
    patterns = error_patterns(code.n, radius, code.q)
    failures = 0
    for index in range(code.size):
        received = (code.encode_index(index)[None, :] + patterns) % code.q
        failures += int((nearest_codewords(received, code.codebook) != index).sum())
    report = VerificationReport(radius=radius, patterns=len(patterns), checked=len(patterns) * code.size, failures=failures)
    logger.debug("bounded_distance_verified", code=repr(code), **report.model_dump())
    return report


def verify_erasure_recovery(code: LinearCode) -> VerificationReport:
    """
    Check that every set of <= d-1 erased positions leaves a generator of full rank.

    Full rank on the kept columns means uG restricted to them determines u, so
    every message decodes uniquely for that erasure set.
    """
    radius = max(0, code.min_distance - 1)
    sets = sum(math.comb(code.n, w) for w in range(radius + 1))
    if sets > settings.exhaustive_limit:
        raise SearchSpaceError(f"{sets} erasure sets exceed the exhaustive limit of {settings.exhaustive_limit}")
    generator = code.field(code.generator)
    failures = 0
    for weight in range(radius + 1):
        for erased in itertools.combinations(range(code.n), weight):
            kept = np.setdiff1d(np.arange(code.n), erased)
            if int(np.linalg.matrix_rank(generator[:, kept])) < code.k:
                failures += 1
    report = VerificationReport(radius=radius, patterns=sets, checked=sets * code.size, failures=failures)
    logger.debug("erasure_recovery_verified", code=repr(code), **report.model_dump())
    return report
