"""
Estimators and exact oracles for Monte Carlo results.
"""
import itertools
import math

import numpy as np
from scipy.stats import norm

from app.codes.decoding import nearest_codewords
from app.codes.linear import LinearCode
from app.core.config import settings
from app.core.exceptions import SearchSpaceError
from app.info.primitives import mutual_information_array


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    z = float(norm.ppf(0.5 + confidence / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def joint_counts(x, y, x_size: int | None = None, y_size: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64).ravel()
    y = np.asarray(y, dtype=np.int64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"paired samples must have equal length, got {x.size} and {y.size}")
    x_size = x_size or int(x.max(initial=0)) + 1
    y_size = y_size or int(y.max(initial=0)) + 1
    counts = np.zeros((x_size, y_size), dtype=np.int64)
    np.add.at(counts, (x, y), 1)
    return counts


def mi_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    return mutual_information_array(counts / total)


def empirical_mi(x, y) -> float:
    """
    Plug-in mutual information of paired discrete samples, in bits.

    The estimate is biased upwards by roughly (|X|-1)(|Y|-1) / (2 n ln 2) for n samples.
    """
    return mi_from_counts(joint_counts(x, y))


def plugin_bias(x_size: int, y_size: int, samples: int) -> float:
    """First-order upward bias of the plug-in estimator for independent samples."""
    return (x_size - 1) * (y_size - 1) / (2.0 * samples * math.log(2.0))


def exact_block_error_bsc(code: LinearCode, N: float) -> float:
    """
    Exact minimum-distance block error probability over a binary symmetric channel,
    averaged over uniformly drawn messages, by enumerating every error pattern.
    """
    if code.q != 2:
        raise SearchSpaceError("exact BSC error enumeration covers binary codes only")
    if 2**code.n * code.size > settings.exhaustive_limit * 16:
        raise SearchSpaceError(f"enumerating 2^{code.n} patterns for {code.size} messages is too large")
    patterns = np.array(list(itertools.product((0, 1), repeat=code.n)), dtype=np.int64)
    weights = patterns.sum(axis=1)
    probability = N**weights * (1.0 - N) ** (code.n - weights)
    error = 0.0
    for index in range(code.size):
        received = (code.encode_index(index)[None, :] + patterns) % 2
        wrong = nearest_codewords(received, code.codebook) != index
        error += float(probability[wrong].sum())
    return error / code.size
