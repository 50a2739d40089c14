"""A minimal in-process MapReduce runtime with exact communication counters.

One call to :func:`run_job` is one MapReduce round: the map phase turns each
input record into zero or more ``(key, value)`` pairs, the shuffle routes every
pair to ``partitioner(key, num_reducers)``, and the reduce phase calls
``reduce_fn(key, values)`` once per distinct key with the complete group.

Costs are counted in tuples, never bytes. A round costs ``tuples_read``
(mapper input) plus ``tuples_shuffled`` (mapper emissions, each received by
exactly one reducer). The output of the last round of a pipeline is not
charged; every earlier round's output is charged as the next round's read.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import ConfigurationError, JobError, SkewError, ThreewayError

log = logging.getLogger(__name__)

DEFAULT_GROUP_CAP = 10**7

_MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """SplitMix64 finaliser: a bijective avalanche hash on 64-bit integers."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def stable_hash(key) -> int:
    """Process-independent hash of an int, str, bytes or a tuple of those.

    Built-in ``hash`` is randomised for strings and is the identity on small
    ints, so neither is used for bucketing.
    """
    if isinstance(key, tuple):
        acc = 0x243F6A8885A308D3
        for part in key:
            acc = mix64(acc ^ stable_hash(part))
        return acc
    if isinstance(key, str):
        key = key.encode("utf-8")
    if isinstance(key, bytes):
        return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return mix64(int(key) & _MASK64)


def hash_partitioner(key, num_reducers: int) -> int:
    return stable_hash(key) % num_reducers


@dataclass
class JobStats:
    name: str = "job"
    tuples_read: int = 0
    tuples_shuffled: int = 0
    output_records: int = 0
    num_groups: int = 0
    # KVPs received by each reducer partition; sums to tuples_shuffled.
    partition_loads: list = field(default_factory=list)

    @property
    def cost(self) -> int:
        return self.tuples_read + self.tuples_shuffled


@dataclass
class CostReport:
    per_round: list
    paper_cost: int
    full_cost: int
    # Number of leading rounds charged in paper_cost.
    counted_rounds: int = 0

    def round(self, name: str) -> JobStats:
        for stats in self.per_round:
            if stats.name == name:
                return stats
        raise KeyError(name)


def pipeline_cost(rounds: Sequence[JobStats], counted_rounds: int | None = None) -> CostReport:
    """Total a pipeline's communication cost.

    ``paper_cost`` sums read + shuffled over the first ``counted_rounds``
    rounds (default: all of them). ``full_cost`` covers every round and also
    charges the final round's output write.
    """
    rounds = list(rounds)
    if not rounds:
        raise ConfigurationError("pipeline_cost needs at least one round")
    if counted_rounds is None:
        counted_rounds = len(rounds)
    if not 1 <= counted_rounds <= len(rounds):
        raise ConfigurationError(f"counted_rounds must be in [1, {len(rounds)}], got {counted_rounds}")
    charged = sum(r.cost for r in rounds[:counted_rounds])
    full = sum(r.cost for r in rounds) + rounds[-1].output_records
    return CostReport(per_round=rounds, paper_cost=charged, full_cost=full, counted_rounds=counted_rounds)


def _chunks(records, n):
    size = max(1, -(-len(records) // n))
    return [records[i:i + size] for i in range(0, len(records), size)]


def _map_chunk(chunk, map_fn, partitioner, num_reducers):
    routed = []
    for record in chunk:
        try:
            pairs = list(map_fn(record))
        except ThreewayError:
            raise
        except Exception as exc:
            raise JobError("map", record, exc) from exc
        for key, value in pairs:
            part = partitioner(key, num_reducers)
            if not (isinstance(part, int) and 0 <= part < num_reducers):
                raise ConfigurationError(f"partitioner sent key {key!r} to {part!r}, outside [0, {num_reducers})")
            routed.append((part, key, value))
    return routed


def _reduce_partition(groups, reduce_fn, group_cap):
    out = []
    for key in sorted(groups):
        values = groups[key]
        if len(values) > group_cap:
            raise SkewError(
                f"reduce group for key {key!r} holds {len(values)} KVPs, above the cap of {group_cap}",
                size=len(values),
                cap=group_cap,
            )
        try:
            out.extend(reduce_fn(key, values))
        except ThreewayError:
            raise
        except Exception as exc:
            raise JobError("reduce", key, exc) from exc
    return out


def run_job(
    records: Iterable,
    map_fn: Callable,
    reduce_fn: Callable,
    num_reducers: int = 1,
    partitioner: Callable | None = None,
    *,
    workers: int = 1,
    group_cap: int = DEFAULT_GROUP_CAP,
    name: str = "job",
    sort_output: bool = True,
):
    """Run one MapReduce round and return ``(output, JobStats)``.

    ``map_fn(record)`` yields ``(key, value)`` pairs; keys must be ints, strings
    or tuples of those. ``reduce_fn(key, values)`` yields output records and sees
    each key exactly once. Values within a group arrive in input order, so
    results do not depend on ``workers``. Output is sorted unless
    ``sort_output`` is false.

    Raises:
        ConfigurationError: ``num_reducers < 1`` or a partition out of range.
        SkewError: a reduce group is larger than ``group_cap``.
        JobError: ``map_fn`` or ``reduce_fn`` raised.
    """
    if num_reducers < 1:
        raise ConfigurationError(f"num_reducers must be >= 1, got {num_reducers}")
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    partitioner = partitioner or hash_partitioner
    records = list(records)
    stats = JobStats(name=name, tuples_read=len(records))

    # Map phase; chunk results are concatenated in input order.
    chunks = _chunks(records, workers)
    if workers == 1 or len(chunks) <= 1:
        mapped = [_map_chunk(c, map_fn, partitioner, num_reducers) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mapped = list(pool.map(lambda c: _map_chunk(c, map_fn, partitioner, num_reducers), chunks))

    # Shuffle: one key -> values dict per reducer partition.
    partitions = [dict() for _ in range(num_reducers)]
    loads = [0] * num_reducers
    for routed in mapped:
        for part, key, value in routed:
            partitions[part].setdefault(key, []).append(value)
            loads[part] += 1
    stats.partition_loads = loads
    stats.tuples_shuffled = sum(loads)
    stats.num_groups = sum(len(p) for p in partitions)

    # Reduce phase.
    busy = [p for p in partitions if p]
    if workers == 1 or len(busy) <= 1:
        reduced = [_reduce_partition(p, reduce_fn, group_cap) for p in busy]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reduced = list(pool.map(lambda p: _reduce_partition(p, reduce_fn, group_cap), busy))

    output = [rec for part in reduced for rec in part]
    if sort_output:
        output.sort()
    stats.output_records = len(output)
    log.debug("%s: read=%d shuffled=%d out=%d", name, stats.tuples_read, stats.tuples_shuffled, stats.output_records)
    return output, stats
