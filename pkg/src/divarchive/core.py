"""Objective-space primitives: Pareto dominance and non-dominated filtering.

Objective vectors are plain sequences of numbers (all objectives minimized).
Comparisons are exact; there is no epsilon tolerance.
"""

from __future__ import annotations

import enum
from typing import Sequence

Vector = Sequence[float]


class DimensionError(ValueError):
    """Objective vectors of different lengths were compared."""


class EmptySetError(ValueError):
    """An operation that needs at least one point received none."""


class Relation(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


def _check(a: Vector, b: Vector) -> None:
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {len(a)} vs {len(b)}")


def dominates(a: Vector, b: Vector) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    _check(a, b)
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def weakly_dominates(a: Vector, b: Vector) -> bool:
    _check(a, b)
    return all(x <= y for x, y in zip(a, b))


def compare(a: Vector, b: Vector) -> Relation:
    _check(a, b)
    better = worse = False
    for x, y in zip(a, b):
        if x < y:
            better = True
        elif x > y:
            worse = True
    if better and worse:
        return Relation.INCOMPARABLE
    if better:
        return Relation.DOMINATES
    if worse:
        return Relation.DOMINATED_BY
    return Relation.EQUAL


def _uniform_dim(points: Sequence[Vector]) -> None:
    if points:
        m = len(points[0])
        for p in points:
            if len(p) != m:
                raise DimensionError(f"dimension mismatch: {m} vs {len(p)}")


def pareto_filter(points: Sequence[Vector]) -> list[tuple]:
    """Return the non-dominated subset of ``points``.

    Duplicates collapse onto their first occurrence and survivors keep their
    input order.
    """
    _uniform_dim(points)
    pts = [tuple(p) for p in points]
    out = []
    seen = set()
    for i, p in enumerate(pts):
        if p in seen:
            continue
        if any(dominates(q, p) for j, q in enumerate(pts) if j != i):
            continue
        seen.add(p)
        out.append(p)
    return out


def nadir(points: Sequence[Vector]) -> tuple:
    """Componentwise maximum over the non-dominated subset of ``points``."""
    if not points:
        raise EmptySetError("nadir of an empty set is undefined")
    front = pareto_filter(points)
    return tuple(max(col) for col in zip(*front))


def ideal(points: Sequence[Vector]) -> tuple:
    if not points:
        raise EmptySetError("ideal of an empty set is undefined")
    _uniform_dim(points)
    return tuple(min(col) for col in zip(*points))
