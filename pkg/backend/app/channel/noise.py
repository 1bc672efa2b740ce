"""
Stochastic route channels applied to symbol streams, and block distortion accounting.
"""
import math

import numpy as np

from app.channel.model import ChannelKind, DistortionMeasure, RouteSpec
from app.core.exceptions import AlphabetMismatchError, SpecMismatchError

BUDGET_SLACK = 1e-12


def _as_symbols(stream, alphabet: int) -> np.ndarray:
    symbols = np.asarray(stream)
    if symbols.size and (not np.issubdtype(symbols.dtype, np.integer) or symbols.min() < 0 or symbols.max() >= alphabet):
        raise AlphabetMismatchError(f"symbols must be integers in [0, {alphabet})")
    return symbols.astype(np.int64, copy=False)


def apply_noise(route: RouteSpec, x_a_stream, rng: np.random.Generator) -> np.ndarray:
    """Pass each symbol independently through the route's adversary-to-receiver channel."""
    if route.kind is ChannelKind.AWGN:
        x_a = np.asarray(x_a_stream, dtype=float)
        return x_a + rng.normal(0.0, math.sqrt(route.noise), size=x_a.shape)

    x_a = _as_symbols(x_a_stream, route.adversary_alphabet)
    if route.kind is ChannelKind.BSC:
        if route.q != 2:
            return _sample_rows(route.transition_matrix(), x_a, rng)
        flips = rng.random(x_a.shape) < route.noise
        return np.where(flips, 1 - x_a, x_a)
    if route.kind is ChannelKind.BEC:
        erase = (rng.random(x_a.shape) < route.noise) & (x_a != route.erasure_symbol)
        return np.where(erase, route.erasure_symbol, x_a)
    return _sample_rows(route.transition_matrix(), x_a, rng)


def _sample_rows(matrix: np.ndarray, symbols: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cumulative = np.cumsum(matrix, axis=1)
    cumulative[:, -1] = 1.0
    draws = rng.random(symbols.shape)
    return (draws[..., None] > cumulative[symbols]).sum(axis=-1)


def block_distortion(x, x_a, measure: DistortionMeasure, q: int | None = None) -> float:
    """Average per-symbol distortion between a sent block and its modified version."""
    x = np.asarray(x)
    x_a = np.asarray(x_a)
    if x.shape != x_a.shape:
        raise AlphabetMismatchError(f"block lengths differ: {x.shape} vs {x_a.shape}")
    if x.size == 0:
        return 0.0
    if q is None and measure.discrete:
        raise SpecMismatchError(f"{measure.kind} distortion needs the route alphabet size q")
    costs = measure.symbol_costs(x, x_a, q)
    if np.isinf(costs).any():
        return math.inf
    return float(costs.mean())


def check_budget(x, x_a, measure: DistortionMeasure, D: float, q: int | None = None) -> bool:
    return block_distortion(x, x_a, measure, q) <= D + BUDGET_SLACK


def hard_budget(n: int, D: float) -> int:
    """Number of symbols an adversary may modify in a block of length n."""
    return int(math.floor(n * D + BUDGET_SLACK))
