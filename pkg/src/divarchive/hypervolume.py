"""Exact hypervolume by stack-based slicing, exclusive contributions, and
the hypervolume archiving policy.

The stack engine repeatedly pops a point, measures the box it dominates
exclusively with respect to the rest of the stack, and pushes back the
"spawns" covering the remainder of its dominated region. Run to an empty
stack it yields the total hypervolume; stopped once the stack returns to
its starting depth it yields one point's exclusive contribution.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

from divarchive.archive import ArchiveEntry, ReplacementPolicy
from divarchive.core import pareto_filter, weakly_dominates


class HypervolumeDomainError(ValueError):
    """A point does not strictly dominate the reference point."""


def _validate(points: Sequence[Sequence[float]], ref: Sequence[float]) -> list[tuple]:
    pts = [tuple(float(x) for x in p) for p in points]
    for p in pts:
        if len(p) != len(ref):
            raise HypervolumeDomainError(f"point {p} has wrong dimension for reference {tuple(ref)}")
        if not all(x < r for x, r in zip(p, ref)):
            raise HypervolumeDomainError(f"point {p} does not strictly dominate reference {tuple(ref)}")
    return pts


class HvStack:
    """LIFO stack of points plus the volume measured so far.

    ``max_depth`` is ``initial depth + m - 1``; exceeding it raises
    AssertionError (the spawning argument guarantees it never happens).
    """

    def __init__(self, points: Sequence[tuple], ref: Sequence[float]):
        self.points: list[tuple] = list(points)
        self.ref = tuple(float(r) for r in ref)
        self.accumulated_volume = 0.0
        self.max_depth = len(self.points) + len(self.ref) - 1
        self.peak_depth = len(self.points)

    @property
    def depth(self) -> int:
        return len(self.points)

    def pop_and_measure(self) -> float:
        p = self.points.pop()
        rest = self.points
        m = len(p)
        bound = list(self.ref)
        for q in rest:
            for j in range(m):
                if p[j] < q[j] < bound[j]:
                    bound[j] = q[j]
        vol = 1.0
        for j in range(m):
            vol *= bound[j] - p[j]
        self.accumulated_volume += vol

        for j in range(m):
            if bound[j] >= self.ref[j]:
                continue
            spawn = p[:j] + (bound[j],) + p[j + 1 :]
            if any(weakly_dominates(q, spawn) for q in rest):
                continue
            rest.append(spawn)
        if len(rest) > self.peak_depth:
            self.peak_depth = len(rest)
        if len(rest) > self.max_depth:
            raise AssertionError(f"stack depth {len(rest)} exceeds bound {self.max_depth}")
        return vol

    def run(self, stop_depth: int = 0) -> float:
        while self.depth > stop_depth:
            self.pop_and_measure()
        return self.accumulated_volume


def hypervolume_stack(points: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    pts = pareto_filter(_validate(points, ref))
    if not pts:
        return 0.0
    return HvStack(pts, ref).run()


def hypervolume_2d(points: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    """Sweep over the first objective; exact for two objectives."""
    if len(ref) != 2:
        raise HypervolumeDomainError("2-D sweep needs a 2-D reference point")
    pts = sorted(pareto_filter(_validate(points, ref)))
    total = 0.0
    prev_y = float(ref[1])
    for x, y in pts:
        total += (ref[0] - x) * (prev_y - y)
        prev_y = y
    return total


def hypervolume_inclusion_exclusion(points: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    """Brute-force oracle, exponential in the number of points."""
    pts = _validate(points, ref)
    total = 0.0
    for k in range(1, len(pts) + 1):
        sign = 1.0 if k % 2 else -1.0
        for subset in itertools.combinations(pts, k):
            corner = [max(col) for col in zip(*subset)]
            total += sign * math.prod(r - c for r, c in zip(ref, corner))
    return total


def hypervolume(points: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    """Volume of the union of boxes ``[p, ref]`` over ``points``."""
    if len(ref) == 2:
        return hypervolume_2d(points, ref)
    return hypervolume_stack(points, ref)


def hv_contribution(
    index: int,
    points: Sequence[Sequence[float]],
    ref: Sequence[float],
    method: str = "stack",
) -> float:
    """Exclusive hypervolume of ``points[index]`` within ``points``.

    ``method="stack"`` pushes the point above the others and stops when the
    stack is back to its starting depth; ``method="difference"`` evaluates
    the two hypervolumes.
    """
    pts = _validate(points, ref)
    p = pts[index]
    others = pts[:index] + pts[index + 1 :]
    if method == "difference":
        return hypervolume_stack(pts, ref) - hypervolume_stack(others, ref)
    if method != "stack":
        raise ValueError(f"unknown method {method!r}")
    if any(weakly_dominates(q, p) for q in others):
        return 0.0
    stack = HvStack(others + [p], ref)
    return stack.run(stop_depth=len(others))


def contributions_2d(points: Sequence[Sequence[float]], ref: Sequence[float]) -> list[float]:
    """Exclusive contributions for a mutually non-dominated 2-D set.

    Equal points are allowed and contribute zero each.
    """
    pts = _validate(points, ref)
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    out = [0.0] * len(pts)
    for rank, i in enumerate(order):
        x, y = pts[i]
        next_x = pts[order[rank + 1]][0] if rank + 1 < len(order) else ref[0]
        prev_y = pts[order[rank - 1]][1] if rank > 0 else ref[1]
        out[i] = (next_x - x) * (prev_y - y)
    return out


def contributions(points: Sequence[Sequence[float]], ref: Sequence[float]) -> list[float]:
    if len(ref) == 2:
        return contributions_2d(points, ref)
    return [hv_contribution(i, points, ref) for i in range(len(points))]


def offset_nadir(points: Sequence[Sequence[float]], offset: float = 0.1) -> tuple:
    """Componentwise max pushed out by ``offset`` of each axis' range (+1 if flat)."""
    ref = []
    for col in zip(*points):
        hi, lo = max(col), min(col)
        span = hi - lo
        ref.append(hi + (offset * span if span > 0 else 1.0))
    return tuple(ref)


def select_victim_ha(
    entries: Sequence[ArchiveEntry],
    candidate_index: int,
    ref: Sequence[float],
) -> int:
    contrib = contributions([e.objectives for e in entries], ref)
    best = 0
    for i, c in enumerate(contrib):
        if c < contrib[best]:
            best = i
    return best


class HypervolumePolicy(ReplacementPolicy):
    name = "ha"

    def __init__(self, offset: float = 0.1):
        self.offset = offset
        self.last_reference: tuple | None = None

    def select_victim(self, entries, candidate_index):
        ref = offset_nadir([e.objectives for e in entries], self.offset)
        self.last_reference = ref
        return select_victim_ha(entries, candidate_index, ref)

    def describe(self) -> dict:
        return {"policy": self.name, "reference": f"nadir+{self.offset:g}*range"}
