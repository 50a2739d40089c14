"""Weighted relations (sparse matrices / edge lists) and SNAP edge-list I/O.

A :class:`Relation` is an immutable, named multiset of ``(a, b, v)`` tuples.
Row ``a`` and column ``b`` are opaque non-negative integer ids; ``v`` is the
cell weight. Duplicate tuples are kept because join sizes and communication
costs are defined over raw tuple counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

from .errors import EdgeListParseError

WEIGHT_TYPES = {"int": int, "fraction": Fraction, "float": float}


class Tuple(NamedTuple):
    a: int
    b: int
    v: int = 1


@dataclass(frozen=True)
class Relation:
    name: str
    tuples: tuple = field(default=())

    def __post_init__(self):
        # Accept any iterable of 3-sequences and normalise to Tuple.
        tuples = self.tuples
        if not (isinstance(tuples, tuple) and all(isinstance(t, Tuple) for t in tuples)):
            object.__setattr__(self, "tuples", tuple(t if isinstance(t, Tuple) else Tuple(*t) for t in tuples))

    @property
    def size(self) -> int:
        return len(self.tuples)

    def __len__(self):
        return len(self.tuples)

    def __iter__(self) -> Iterator[Tuple]:
        return iter(self.tuples)

    def renamed(self, name: str) -> "Relation":
        """Role-tagged logical copy sharing the same tuples (used for selfjoins)."""
        return Relation(name, self.tuples)

    def deduplicated(self) -> "Relation":
        """Drop repeated ``(a, b)`` edges, keeping the first occurrence's weight."""
        seen = set()
        kept = []
        for t in self.tuples:
            if (t.a, t.b) not in seen:
                seen.add((t.a, t.b))
                kept.append(t)
        return Relation(self.name, kept)

    def without_self_loops(self) -> "Relation":
        return Relation(self.name, [t for t in self.tuples if t.a != t.b])

    def multiset(self):
        """Sorted tuple list; two relations hold the same multiset iff these are equal."""
        return sorted(self.tuples)


def relation_size(rel: Relation) -> int:
    return len(rel.tuples)


def _parse_id(token, lineno):
    try:
        value = int(token)
    except ValueError:
        raise EdgeListParseError(lineno, f"non-integer id {token!r}") from None
    if value < 0:
        raise EdgeListParseError(lineno, f"negative id {value}")
    return value


def _parse_weight(token, lineno, weight_type):
    try:
        value = weight_type(token)
    except (ValueError, ZeroDivisionError):
        raise EdgeListParseError(lineno, f"bad weight {token!r}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise EdgeListParseError(lineno, f"non-finite weight {token!r}")
    return value


def parse_edge_list(lines: Iterable[str], default_weight=1, name: str = "R", weight_type=int) -> Relation:
    """Parse SNAP-style edge-list lines into a :class:`Relation`.

    Each data line holds ``src dst`` or ``src dst weight`` separated by tabs or
    spaces. Lines starting with ``#`` and blank lines are skipped. Two-column
    lines get ``default_weight``.

    Raises:
        EdgeListParseError: on a wrong field count, a non-integer or negative
            id, or an unparseable weight. ``lineno`` is 1-based.
    """
    if isinstance(weight_type, str):
        weight_type = WEIGHT_TYPES[weight_type]
    tuples = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) not in (2, 3):
            raise EdgeListParseError(lineno, f"expected 2 or 3 fields, got {len(fields)}")
        a = _parse_id(fields[0], lineno)
        b = _parse_id(fields[1], lineno)
        v = _parse_weight(fields[2], lineno, weight_type) if len(fields) == 3 else default_weight
        tuples.append(Tuple(a, b, v))
    return Relation(name, tuples)


def read_edge_list(path, default_weight=1, name: str = "R", weight_type=int) -> Relation:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, default_weight=default_weight, name=name, weight_type=weight_type)


def serialize_edge_list(rel: Relation) -> str:
    """Three-column tab-separated text that :func:`parse_edge_list` reads back exactly."""
    return "".join(f"{t.a}\t{t.b}\t{t.v}\n" for t in rel.tuples)


def write_edge_list(rel: Relation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_edge_list(rel))
