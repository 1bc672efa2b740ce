"""
Exact scalar information-theoretic primitives.

All entropies and mutual informations are in bits; 0·log 0 is taken as 0.
Every function here is pure.
"""
import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp

from app.core.exceptions import DistributionError, SearchSpaceError
from app.info.distributions import CondPmf, JointPmf, Pmf

EXACT_BALL_MAX_N = 64


def _check_probability(p: float, name: str = "p") -> float:
    if not 0.0 <= p <= 1.0:
        raise DistributionError(f"{name} must lie in [0, 1], got {p}")
    return float(p)


def binary_entropy(p: float) -> float:
    p = _check_probability(p)
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def q_ary_entropy(x: float, q: int) -> float:
    """q-ary entropy H_q(x), measured in q-ary units."""
    if int(q) != q or q < 2:
        raise DistributionError(f"alphabet size q must be an integer >= 2, got {q}")
    x = _check_probability(x, "x")
    value = 0.0
    if x > 0.0:
        value += x * math.log(q - 1, q) - x * math.log(x, q)
    if x < 1.0:
        value -= (1.0 - x) * math.log(1.0 - x, q)
    return float(value)


def star(a: float, b: float) -> float:
    """Cross-over probability of two cascaded binary symmetric channels."""
    a = _check_probability(a, "a")
    b = _check_probability(b, "b")
    return a * (1.0 - b) + b * (1.0 - a)


def entropy_array(probs: np.ndarray) -> float:
    probs = np.asarray(probs, dtype=float).ravel()
    nz = probs[probs > 0]
    return float(-(nz * np.log2(nz)).sum())


def entropy(pmf: Pmf) -> float:
    return entropy_array(pmf.array)


def mutual_information_array(table: np.ndarray) -> float:
    table = np.clip(np.asarray(table, dtype=float), 0.0, None)
    px = table.sum(axis=1, keepdims=True)
    py = table.sum(axis=0, keepdims=True)
    mask = table > 0
    ratio = np.ones_like(table)
    ratio[mask] = table[mask] / (px @ py)[mask]
    return max(0.0, float((table[mask] * np.log2(ratio[mask])).sum()))


def mutual_information(joint: JointPmf) -> float:
    return mutual_information_array(joint.array)


def channel_mutual_information(input_pmf: Pmf, channel: CondPmf) -> float:
    return mutual_information_array(input_pmf.array[:, None] * channel.array)


def conditional_entropy(joint: JointPmf) -> float:
    """H(A | B) for a joint table indexed [a, b]."""
    arr = joint.array
    return max(0.0, entropy_array(arr) - entropy_array(arr.sum(axis=0)))


class BallVolume(NamedTuple):
    count: int
    log2_volume: float


def hamming_ball_volume(n: int, r: int, q: int) -> BallVolume:
    """Number of q-ary words within Hamming distance r of a fixed word of length n."""
    if q < 2:
        raise DistributionError(f"alphabet size q must be >= 2, got {q}")
    if r < 0 or r > n:
        raise SearchSpaceError(f"radius must satisfy 0 <= r <= n (n={n}, r={r})")
    count = sum(math.comb(n, i) * (q - 1) ** i for i in range(r + 1))
    if n <= EXACT_BALL_MAX_N:
        return BallVolume(count, math.log2(count))
    i = np.arange(r + 1)
    log_terms = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1) + i * math.log(q - 1)
    return BallVolume(count, float(logsumexp(log_terms) / math.log(2)))


def gilbert_varshamov_distance(k: int, n: int, q: int) -> int:
    """Largest d for which the Varshamov condition guarantees a linear [n, k, d]_q code."""
    if not 1 <= k <= n:
        raise DistributionError(f"need 1 <= k <= n, got k={k}, n={n}")
    redundancy = q ** (n - k)
    d = 1
    # Varshamov: an [n, k, d] code exists when Vol_q(n-1, d-2) < q^(n-k)
    while d + 1 <= n and hamming_ball_volume(n - 1, d - 1, q).count < redundancy:
        d += 1
    return d


def gv_rate(d: int, n: int, q: int) -> float:
    """Asymptotic Gilbert-Varshamov rate 1 - H_q(d/n), clamped at zero past 1 - 1/q."""
    delta = d / n
    if delta >= 1.0 - 1.0 / q:
        return 0.0
    return 1.0 - q_ary_entropy(delta, q)


def q_ary_symmetric(q: int, crossover: float) -> np.ndarray:
    """Channel matrix that keeps a symbol w.p. 1-N and moves it uniformly elsewhere otherwise."""
    crossover = _check_probability(crossover, "N")
    if q == 1:
        return np.ones((1, 1))
    matrix = np.full((q, q), crossover / (q - 1))
    np.fill_diagonal(matrix, 1.0 - crossover)
    return matrix
