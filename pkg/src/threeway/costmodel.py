"""Closed-form communication costs and the 1,3J / 2,3J crossover.

Integer forms are used wherever a value is compared against engine
counters; the square-root forms are real-valued conveniences.

Symbols: ``r, s, t`` are the sizes of R, S, T; ``j = |R join S|``;
``r_agg`` is the aggregated intermediate size; ``r_raw3`` the raw
three-way join size; ``k = k1 * k2`` reducers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, CostInvariantError


@dataclass(frozen=True)
class CostInputs:
    r: int
    s: int
    t: int
    j: int = 0
    r_agg: int = 0
    r_raw3: int = 0
    k1: int = 1
    k2: int = 1

    def __post_init__(self):
        for name in ("r", "s", "t", "j", "r_agg", "r_raw3"):
            if getattr(self, name) < 0:
                raise CostInvariantError(f"{name} must be non-negative")
        if self.k1 < 1 or self.k2 < 1:
            raise CostInvariantError("k1 and k2 must be >= 1")
        if self.r_agg > self.j:
            raise CostInvariantError(f"r_agg={self.r_agg} exceeds j={self.j}; aggregation cannot grow a relation")

    @property
    def k(self) -> int:
        return self.k1 * self.k2


def cost_two_way(r: int, s: int) -> int:
    return 2 * r + 2 * s


def cost_2_3J(r: int, s: int, t: int, j: int) -> int:
    return 2 * r + 2 * s + 2 * t + 2 * j


def cost_1_3J(r: int, s: int, t: int, k1: int, k2: int) -> int:
    if k1 < 1 or k2 < 1:
        raise ConfigurationError(f"grid dimensions must be >= 1, got {k1}x{k2}")
    return (r + s + t) + (s + k1 * t + k2 * r)


def optimal_split(r: float, t: float, k: float):
    """Real-valued ``(k1, k2)`` with ``k1 * k2 = k`` minimising ``k1*t + k2*r``."""
    return math.sqrt(k * r / t), math.sqrt(k * t / r)


def cost_1_3J_real(r: float, s: float, t: float, k1: float, k2: float) -> float:
    return (r + s + t) + (s + k1 * t + k2 * r)


def cost_1_3J_optimal(r: float, s: float, t: float, k: float) -> float:
    """1,3J cost at the real-valued optimal split: ``r + 2s + t + 2*sqrt(k*r*t)``."""
    return r + 2 * s + t + 2 * math.sqrt(k * r * t)


def cost_1_3J_selfjoin(r: float, k: float) -> float:
    return 4 * r + 2 * r * math.sqrt(k)


def cost_2_3JA(r: int, j: int, r_agg: int) -> int:
    """Selfjoin 2,3JA cost over the join, aggregate and join rounds."""
    if r_agg > j:
        raise CostInvariantError(f"r_agg={r_agg} exceeds j={j}; aggregation cannot grow a relation")
    return 6 * r + 2 * j + 2 * r_agg


def cost_2_3JA_general(r: int, s: int, t: int, j: int, r_agg: int) -> int:
    """Same rounds for distinct R, S, T: ``2r+2s`` + ``2j`` + ``2r_agg+2t``."""
    if r_agg > j:
        raise CostInvariantError(f"r_agg={r_agg} exceeds j={j}; aggregation cannot grow a relation")
    return cost_two_way(r, s) + 2 * j + cost_two_way(r_agg, t)


def _selfjoin_grid_sum(k: int, k1, k2):
    if k1 is not None and k2 is not None:
        if k1 * k2 != k:
            raise ConfigurationError(f"{k1}x{k2} is not a grid of {k} reducers")
        return k1 + k2
    root = math.isqrt(k)
    if root * root == k:
        return 2 * root
    # Squarest factor pair; for a selfjoin this is also the cheapest.
    a = max(d for d in range(1, root + 1) if k % d == 0)
    return a + k // a


def cost_1_3JA(r: int, k: int, r_raw3: int, k1: int | None = None, k2: int | None = None) -> int:
    """Selfjoin 1,3JA cost ``4r + 2r*sqrt(k) + 2*r_raw3``.

    For a perfect-square ``k`` this is exact with ``2*sqrt(k)``; otherwise
    ``k1 + k2`` of the given grid (or the squarest factor pair) replaces it.
    """
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    return 4 * r + r * _selfjoin_grid_sum(k, k1, k2) + 2 * r_raw3


def cost_1_3JA_general(r: int, s: int, t: int, k1: int, k2: int, r_raw3: int) -> int:
    return cost_1_3J(r, s, t, k1, k2) + 2 * r_raw3


def crossover_k_real(r: float, s: float, t: float, j: float) -> float:
    """Reducer count at which the optimally split 1,3J cost equals the 2,3J cost.

    Solving ``r + 2s + t + 2*sqrt(k*r*t) = 2r + 2s + 2t + 2j`` gives
    ``k = ((r + t + 2j) / 2)**2 / (r*t)``; for a selfjoin ``(1 + j/r)**2``.
    """
    return ((r + t + 2 * j) / 2) ** 2 / (r * t)


def _near_square_grids(start=1):
    n = start
    while True:
        yield n, n
        yield n, n + 1
        n += 1


def crossover_reducers(r: int, s: int, t: int, j: int):
    """Return ``(k_real, (k1, k2))`` for the 1,3J / 2,3J crossover.

    The grid is the first near-square grid (``|k1 - k2| <= 1``, visited in
    increasing size) with at least two reducers at which the analytic 1,3J
    cost reaches the 2,3J cost. The cheaper orientation of a non-square grid
    is used. A single reducer is excluded because it replicates nothing;
    it only ties the cascade when ``j == 0``.
    """
    if min(r, s, t) < 1:
        raise ConfigurationError("r, s and t must be >= 1")
    if j < 0:
        raise ConfigurationError("j must be >= 0")
    k_real = crossover_k_real(r, s, t, j)
    target = cost_2_3J(r, s, t, j)
    # An n x n grid costs r+2s+t + n(r+t), so smaller n cannot reach target.
    start = max(1, (target - (r + 2 * s + t)) // (r + t) - 1)
    for k1, k2 in _near_square_grids(start):
        if k1 * k2 < 2:
            continue
        c12, c21 = cost_1_3J(r, s, t, k1, k2), cost_1_3J(r, s, t, k2, k1)
        if min(c12, c21) >= target:
            return k_real, ((k1, k2) if c12 <= c21 else (k2, k1))


def machines_needed(k: int, cores_per_machine: int = 8) -> float:
    return k / cores_per_machine
