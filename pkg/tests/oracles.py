"""Brute-force reference implementations; none of them touch the engine."""

import itertools
import random

from threeway.relation import Relation, Tuple


def random_relation(rng, name, max_tuples=100, n_ids=20, wmax=5, min_tuples=0):
    n = rng.randint(min_tuples, max_tuples)
    return Relation(name, [Tuple(rng.randrange(n_ids), rng.randrange(n_ids), rng.randint(1, wmax)) for _ in range(n)])


def random_graph(rng, n_nodes, n_edges, name="G"):
    """Simple directed graph (no duplicate edges, no self-loops) with unit weights."""
    edges = set()
    while len(edges) < n_edges:
        a, b = rng.randrange(n_nodes), rng.randrange(n_nodes)
        if a != b:
            edges.add((a, b))
    return Relation(name, [Tuple(a, b, 1) for a, b in sorted(edges)])


def nested_loop_two_way(R, S):
    return sorted((r.a, r.b, s.b, r.v, s.v) for r in R for s in S if r.b == s.a)


def nested_loop_three_way(R, S, T):
    out = []
    for r, s, t in itertools.product(R, S, T):
        if r.b == s.a and s.b == t.a:
            out.append((r.a, r.b, s.b, t.b, r.v, s.v, t.v))
    return sorted(out)


def dense(rel, n):
    m = [[0] * n for _ in range(n)]
    for t in rel:
        m[t.a][t.b] += t.v
    return m


def dense_matmul(x, y):
    n = len(x)
    return [[sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def dense_triple_product_cells(R, S, T, n):
    """Nonzero cells of ``M_R @ M_S @ M_T`` as a sorted ``(row, col, value)`` list."""
    p = dense_matmul(dense_matmul(dense(R, n), dense(S, n)), dense(T, n))
    return sorted((i, j, p[i][j]) for i in range(n) for j in range(n) if p[i][j])


def brute_directed_triangles(edges):
    """Directed 3-cycles counted over ordered node triples, each cycle once."""
    adj = {}
    for t in edges:
        adj[(t.a, t.b)] = adj.get((t.a, t.b), 0) + 1
    nodes = sorted({t.a for t in edges} | {t.b for t in edges})
    rotations = 0
    for i, j, k in itertools.permutations(nodes, 3):
        rotations += adj.get((i, j), 0) * adj.get((j, k), 0) * adj.get((k, i), 0)
    assert rotations % 3 == 0
    return rotations // 3


def group_counts(records):
    counts = {}
    for r in records:
        counts[r] = counts.get(r, 0) + 1
    return counts


def seeded(seed):
    return random.Random(seed)
