"""Quality indicators for a final archive against a per-instance reference
front: fullness, spread, normalised hypervolume and IGD+."""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

from divarchive.core import EmptySetError, pareto_filter
from divarchive.hypervolume import hypervolume

HV_REFERENCE = 1.1


@dataclasses.dataclass(frozen=True)
class ReferenceSet:
    points: tuple
    ideal: tuple
    nadir_pt: tuple

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]]) -> "ReferenceSet":
        front = pareto_filter([tuple(float(x) for x in p) for p in points])
        if not front:
            raise EmptySetError("reference set needs at least one point")
        return cls(
            tuple(front),
            tuple(min(col) for col in zip(*front)),
            tuple(max(col) for col in zip(*front)),
        )


@dataclasses.dataclass(frozen=True)
class MetricsRow:
    fullness_pct: float
    spread: float
    hv_norm: float
    igd_plus: float


def _vectors(front) -> list[tuple]:
    out = []
    for p in front:
        p = getattr(p, "objectives", p)
        out.append(tuple(float(x) for x in p))
    return out


def build_reference_set(snapshots: Iterable[Iterable]) -> ReferenceSet:
    """Non-dominated union of every snapshot's objective vectors."""
    pts = []
    for snap in snapshots:
        pts.extend(_vectors(snap))
    return ReferenceSet.from_points(pts)


def fullness(snapshot: Sequence, capacity: int) -> float:
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    return 100.0 * len(snapshot) / capacity


def normalize(points: Iterable, ref: ReferenceSet) -> list[tuple]:
    """Map each axis through ``(v - ideal) / (nadir - ideal)``; flat axes map to 0."""
    out = []
    for p in _vectors(points):
        out.append(
            tuple(
                (v - lo) / (hi - lo) if hi > lo else 0.0
                for v, lo, hi in zip(p, ref.ideal, ref.nadir_pt)
            )
        )
    return out


def igd_plus(front: Iterable, ref: ReferenceSet | Iterable) -> float:
    """Mean over reference points of the clamped distance to the nearest front point.

    Works in whatever space the inputs are given in; :func:`evaluate_front`
    passes normalised vectors.
    """
    pts = _vectors(front)
    if not pts:
        raise EmptySetError("IGD+ of an empty front is undefined")
    targets = ref.points if isinstance(ref, ReferenceSet) else _vectors(ref)
    if not targets:
        raise EmptySetError("IGD+ needs reference points")
    total = 0.0
    for r in targets:
        total += min(
            math.sqrt(sum(max(a - b, 0.0) ** 2 for a, b in zip(p, r))) for p in pts
        )
    return total / len(targets)


def normalized_hypervolume(front: Iterable, ref: ReferenceSet) -> float:
    pts = normalize(front, ref)
    if not pts:
        raise EmptySetError("hypervolume of an empty front is undefined")
    m = len(ref.ideal)
    clamped = [tuple(min(max(v, 0.0), HV_REFERENCE) for v in p) for p in pts]
    inside = [p for p in clamped if all(v < HV_REFERENCE for v in p)]
    if not inside:
        return 0.0
    return hypervolume(inside, (HV_REFERENCE,) * m) / HV_REFERENCE**m


def spread(front: Iterable, ref: ReferenceSet) -> float:
    """Two-objective spread (Delta) in normalised objective space.

    A single-point front scores 1; a zero denominator (all gaps and extreme
    distances zero) scores 0.
    """
    pts = _vectors(front)
    if not pts:
        raise EmptySetError("spread of an empty front is undefined")
    if len(ref.ideal) != 2:
        raise ValueError("spread is defined for two objectives only")
    f = sorted(set(normalize(pareto_filter(pts), ref)))
    r = normalize(ref.points, ref)
    first_ext = min(r, key=lambda p: (p[0], p[1]))
    last_ext = min(r, key=lambda p: (p[1], p[0]))
    if len(f) == 1:
        return 1.0
    d_f = math.dist(f[0], first_ext)
    d_l = math.dist(f[-1], last_ext)
    gaps = [math.dist(a, b) for a, b in zip(f, f[1:])]
    mean_gap = sum(gaps) / len(gaps)
    num = d_f + d_l + sum(abs(d - mean_gap) for d in gaps)
    den = d_f + d_l + len(gaps) * mean_gap
    return num / den if den > 0 else 0.0


def evaluate_front(snapshot: Sequence, capacity: int, ref: ReferenceSet) -> MetricsRow:
    """All four indicators for one final archive; IGD+ in normalised space."""
    return MetricsRow(
        fullness_pct=fullness(snapshot, capacity),
        spread=spread(snapshot, ref),
        hv_norm=normalized_hypervolume(snapshot, ref),
        igd_plus=igd_plus(normalize(snapshot, ref), normalize(ref.points, ref)),
    )
