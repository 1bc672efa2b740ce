"""
Enumeration of adversary placements s ∈ {0,1}^n_r with w_H(s) <= n_a.
"""
import itertools
import math

from app.channel.model import PlacementVector
from app.core.config import settings
from app.core.exceptions import SearchSpaceError


def placement_count(n_r: int, n_a: int) -> int:
    return sum(math.comb(n_r, w) for w in range(n_a + 1))


def enumerate_placements(n_r: int, n_a: int) -> list[PlacementVector]:
    """All placements of weight <= n_a, in lexicographic order of their bit strings."""
    if n_r > settings.max_routes:
        raise SearchSpaceError(f"placement enumeration is limited to n_r <= {settings.max_routes}, got {n_r}")
    if not 0 <= n_a <= n_r or n_r < 1:
        raise ValueError(f"need 0 <= n_a <= n_r and n_r >= 1, got n_r={n_r}, n_a={n_a}")
    return [
        PlacementVector(bits=bits)
        for bits in itertools.product((0, 1), repeat=n_r)
        if sum(bits) <= n_a
    ]
