"""Two-way join, the two-round cascade (2,3J) and the one-round grid join (1,3J).

All three are built as :mod:`threeway.engine` jobs so their communication
costs come from the engine's counters rather than from formulas.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import NamedTuple

from .engine import mix64, pipeline_cost, run_job
from .errors import ConfigurationError
from .relation import Relation

DEFAULT_REDUCERS = 4

# Separates the g stream from the h stream for the same seed.
_G_SALT = 0x5851F42D4C957F2D


class JoinedPair(NamedTuple):
    a: int
    b: int
    c: int
    v: int
    w: int


class JoinedTriple(NamedTuple):
    a: int
    b: int
    c: int
    d: int
    v: int
    w: int
    x: int


@dataclass(frozen=True)
class ReducerGrid:
    """A ``k1 x k2`` arrangement of reducers addressed by ``(h(b), g(c))``."""

    k1: int
    k2: int
    seed: int = 0

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise ConfigurationError(f"grid dimensions must be >= 1, got {self.k1}x{self.k2}")

    @property
    def k(self) -> int:
        return self.k1 * self.k2

    def h(self, b: int) -> int:
        return mix64((b ^ mix64(self.seed)) & 0xFFFFFFFFFFFFFFFF) % self.k1

    def g(self, c: int) -> int:
        return mix64((c ^ mix64(self.seed ^ _G_SALT)) & 0xFFFFFFFFFFFFFFFF) % self.k2

    def cell_index(self, key, num_reducers=None) -> int:
        i, j = key
        return i * self.k2 + j


def _binary_join(left, right, left_key, right_key, combine, num_reducers, name, **engine_opts):
    """Reduce-side equi-join of two record lists; ``combine(l, r)`` builds each output."""

    def map_fn(tagged):
        side, rec = tagged
        if side == 0:
            yield left_key(rec), (0, rec)
        else:
            yield right_key(rec), (1, rec)

    def reduce_fn(key, values):
        lefts = [rec for side, rec in values if side == 0]
        if not lefts:
            return
        for side, rec in values:
            if side == 1:
                for lrec in lefts:
                    yield combine(lrec, rec)

    records = [(0, rec) for rec in left] + [(1, rec) for rec in right]
    return run_job(records, map_fn, reduce_fn, num_reducers, name=name, **engine_opts)


def two_way_join(R: Relation, S: Relation, num_reducers: int = DEFAULT_REDUCERS, project=None, **engine_opts):
    """Join ``R(a,b,v)`` with ``S(b,c,w)`` on ``b``; returns ``(JoinedPair list, JobStats)``."""
    out, stats = _binary_join(
        R, S,
        left_key=lambda t: t.b,
        right_key=lambda t: t.a,
        combine=lambda r, s: JoinedPair(r.a, r.b, s.b, r.v, s.v),
        num_reducers=num_reducers,
        name=f"join({R.name},{S.name})",
        **engine_opts,
    )
    if project is not None:
        out = [project(rec) for rec in out]
    return out, stats


def cascade_three_way(
    R: Relation,
    S: Relation,
    T: Relation,
    num_reducers: int = DEFAULT_REDUCERS,
    order: str = "left",
    project=None,
    **engine_opts,
):
    """The 2,3J cascade: two two-way join rounds.

    ``order="left"`` computes ``(R join S) join T``; ``"right"`` computes
    ``R join (S join T)``. Both yield the same multiset. The first round's
    ``output_records`` is the intermediate join size.
    """
    if order == "left":
        first, s1 = two_way_join(R, S, num_reducers, **engine_opts)
        out, s2 = _binary_join(
            first, T,
            left_key=lambda p: p.c,
            right_key=lambda t: t.a,
            combine=lambda p, t: JoinedTriple(p.a, p.b, p.c, t.b, p.v, p.w, t.v),
            num_reducers=num_reducers,
            name=f"join({R.name}{S.name},{T.name})",
            **engine_opts,
        )
    elif order == "right":
        first, s1 = two_way_join(S, T, num_reducers, **engine_opts)
        out, s2 = _binary_join(
            R, first,
            left_key=lambda t: t.b,
            right_key=lambda p: p.a,
            combine=lambda t, p: JoinedTriple(t.a, t.b, p.b, p.c, t.v, p.v, p.w),
            num_reducers=num_reducers,
            name=f"join({R.name},{S.name}{T.name})",
            **engine_opts,
        )
    else:
        raise ConfigurationError(f"order must be 'left' or 'right', got {order!r}")
    if project is not None:
        out = [project(rec) for rec in out]
    return out, pipeline_cost([s1, s2])


def one_round_three_way(R: Relation, S: Relation, T: Relation, grid: ReducerGrid, project=None, **engine_opts):
    """The 1,3J join over a ``k1 x k2`` reducer grid in a single round.

    Each S tuple goes to cell ``(h(b), g(c))``; each R tuple is replicated
    to the ``k2`` cells of row ``h(b)``; each T tuple to the ``k1`` cells of
    column ``g(c)``. Every cell then joins locally on ``b`` and ``c``.
    """
    k1, k2 = grid.k1, grid.k2
    h, g = grid.h, grid.g

    def map_fn(tagged):
        tag, t = tagged
        if tag == "S":
            yield (h(t.a), g(t.b)), tagged
        elif tag == "R":
            row = h(t.b)
            for j in range(k2):
                yield (row, j), tagged
        else:
            col = g(t.a)
            for i in range(k1):
                yield (i, col), tagged

    def reduce_fn(cell, values):
        r_by_b = defaultdict(list)
        t_by_c = defaultdict(list)
        middle = []
        for tag, t in values:
            if tag == "R":
                r_by_b[t.b].append(t)
            elif tag == "T":
                t_by_c[t.a].append(t)
            else:
                middle.append(t)
        for s in middle:
            rs = r_by_b.get(s.a)
            ts = t_by_c.get(s.b)
            if not rs or not ts:
                continue
            for r in rs:
                for t in ts:
                    yield JoinedTriple(r.a, s.a, s.b, t.b, r.v, s.v, t.v)

    records = [("R", t) for t in R] + [("S", t) for t in S] + [("T", t) for t in T]
    out, stats = run_job(
        records, map_fn, reduce_fn, grid.k, grid.cell_index,
        name=f"1,3J({R.name},{S.name},{T.name})@{k1}x{k2}",
        **engine_opts,
    )
    if project is not None:
        out = [project(rec) for rec in out]
    return out, pipeline_cost([stats])


def optimal_grid(r: int, t: int, k: int, seed: int = 0) -> ReducerGrid:
    """Integer grid for ``k`` reducers minimising the 1,3J replication cost.

    Searches the factor pairs ``k1 * k2 == k`` (all reducers are used) for
    the smallest ``k1*t + k2*r``; ties go to the squarer grid, then to the
    smaller ``k1``. The real-valued optimum is ``k1 = sqrt(k*r/t)``.
    """
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    if r < 1 or t < 1:
        raise ConfigurationError(f"relation sizes must be >= 1, got r={r}, t={t}")
    best = None
    for k1 in range(1, math.isqrt(k) + 1):
        if k % k1:
            continue
        for a, b in ((k1, k // k1), (k // k1, k1)):
            rank = (a * t + b * r, abs(a - b), a)
            if best is None or rank < best[0]:
                best = (rank, a, b)
    return ReducerGrid(best[1], best[2], seed)


def join_size_two_way(R: Relation, S: Relation) -> int:
    """Exact ``|R join S|`` from degree counts, without materialising the join."""
    s_by_b = Counter(t.a for t in S)
    return sum(s_by_b.get(t.b, 0) for t in R)


def join_size_three_way(R: Relation, S: Relation, T: Relation) -> int:
    """Exact ``|R join S join T|`` from degree counts."""
    r_by_b = Counter(t.b for t in R)
    t_by_c = Counter(t.a for t in T)
    return sum(r_by_b.get(s.a, 0) * t_by_c.get(s.b, 0) for s in S)
