"""Sum aggregators, the aggregated pipelines 2,3JA / 1,3JA, and triangle counting.

Matrix multiplication is a join followed by a group-by-sum: joining
``R(a,b,v)`` with ``S(b,c,w)`` and summing ``v*w`` per ``(a, c)`` gives the
product ``M_R @ M_S`` restricted to its structurally nonzero cells.
"""

from __future__ import annotations

from typing import NamedTuple

from .engine import pipeline_cost, run_job
from .errors import IntegrityError, WeightOverflowError
from .joins import DEFAULT_REDUCERS, ReducerGrid, one_round_three_way, two_way_join
from .relation import Relation, Tuple

INT64_MAX = 2**63 - 1


class AggregatedCell(NamedTuple):
    row: int
    col: int
    value: int


def _check(value):
    # Python ints never wrap; the bound mirrors a signed 64-bit accumulator.
    if isinstance(value, int) and not -INT64_MAX - 1 <= value <= INT64_MAX:
        raise WeightOverflowError(f"weight {value} overflows a signed 64-bit integer")
    return value


def _sum_reduce(key, values):
    total = 0
    for p in values:
        total = _check(total + p)
    yield AggregatedCell(key[0], key[1], total)


def sum_aggregate_pairs(J, num_reducers: int = DEFAULT_REDUCERS, name: str = "agg(a,c)", **engine_opts):
    """Group two-way join records ``(a,b,c,v,w)`` by ``(a, c)`` and sum ``v*w``."""

    def map_fn(rec):
        yield (rec.a, rec.c), _check(rec.v * rec.w)

    return run_job(J, map_fn, _sum_reduce, num_reducers, name=name, **engine_opts)


def sum_aggregate_triples(J, num_reducers: int = DEFAULT_REDUCERS, **engine_opts):
    """Group three-way join records ``(a,b,c,d,v,w,x)`` by ``(a, d)`` and sum ``v*w*x``."""

    def map_fn(rec):
        yield (rec.a, rec.d), _check(rec.v * rec.w * rec.x)

    return run_job(J, map_fn, _sum_reduce, num_reducers, name="agg(a,d)", **engine_opts)


def cells_to_relation(cells, name: str) -> Relation:
    return Relation(name, [Tuple(c.row, c.col, c.value) for c in cells])


def matmul_2_3JA(R: Relation, S: Relation, T: Relation, num_reducers: int = DEFAULT_REDUCERS, **engine_opts):
    """Cascade with the aggregation pushed into the intermediate result.

    Rounds: ``R join S`` -> sum per (a,c) -> join with ``T`` -> sum per (a,d).
    ``paper_cost`` covers the first three rounds; ``full_cost`` all four.
    Returns ``(cells, CostReport)``.
    """
    j1, s1 = two_way_join(R, S, num_reducers, **engine_opts)
    agg1, s2 = sum_aggregate_pairs(j1, num_reducers, **engine_opts)
    RS = cells_to_relation(agg1, f"agg({R.name}{S.name})")
    j2, s3 = two_way_join(RS, T, num_reducers, **engine_opts)
    cells, s4 = sum_aggregate_pairs(j2, num_reducers, name="agg(a,d)", **engine_opts)
    return cells, pipeline_cost([s1, s2, s3, s4], counted_rounds=3)


def matmul_1_3JA(R: Relation, S: Relation, T: Relation, grid: ReducerGrid, num_reducers: int = DEFAULT_REDUCERS, **engine_opts):
    """One-round grid join followed by a single sum per (a,d); both rounds are charged."""
    triples, report = one_round_three_way(R, S, T, grid, **engine_opts)
    cells, s2 = sum_aggregate_triples(triples, num_reducers, **engine_opts)
    return cells, pipeline_cost(report.per_round + [s2])


def diagonal_sum(G: Relation, algorithm: str = "2-3JA", grid: ReducerGrid | None = None, **engine_opts):
    """``trace(A^3)`` of the adjacency relation, via a three-way selfjoin; returns ``(sum, CostReport)``."""
    R, S, T = G.renamed("R"), G.renamed("S"), G.renamed("T")
    if algorithm == "2-3JA":
        cells, report = matmul_2_3JA(R, S, T, **engine_opts)
    elif algorithm == "1-3JA":
        cells, report = matmul_1_3JA(R, S, T, grid or ReducerGrid(1, 1), **engine_opts)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return sum(c.value for c in cells if c.row == c.col), report


def triangle_count(G: Relation, drop_self_loops: bool = True, algorithm: str = "2-3JA", grid=None, **engine_opts) -> int:
    """Number of directed 3-cycles: ``trace(A^3) / 3``.

    Self-loops add degenerate closed walks to the trace, so they are dropped
    unless ``drop_self_loops`` is false. Duplicate edges count with
    multiplicity.

    Raises:
        ValueError: a weight other than 1.
        IntegrityError: the diagonal sum is not a multiple of 3.
    """
    if any(t.v != 1 for t in G):
        raise ValueError("triangle_count needs binary (all-1) weights")
    if drop_self_loops:
        G = G.without_self_loops()
    total, _ = diagonal_sum(G, algorithm, grid, **engine_opts)
    if total % 3:
        raise IntegrityError(f"diagonal sum {total} is not divisible by 3 (self-loops present?)")
    return total // 3
