"""Three-way joins on an instrumented in-process MapReduce engine."""

from .aggregate import (
    AggregatedCell,
    matmul_1_3JA,
    matmul_2_3JA,
    sum_aggregate_pairs,
    sum_aggregate_triples,
    triangle_count,
)
from .engine import CostReport, JobStats, pipeline_cost, run_job
from .joins import (
    JoinedPair,
    JoinedTriple,
    ReducerGrid,
    cascade_three_way,
    one_round_three_way,
    optimal_grid,
    two_way_join,
)
from .relation import Relation, Tuple, parse_edge_list, read_edge_list, relation_size, serialize_edge_list

__version__ = "0.1.0"
