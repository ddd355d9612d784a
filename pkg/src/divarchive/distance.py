"""Solution-space replacement: Hamming and Jaccard distance archiving, plus
the uniform Random baseline.

A member's contribution is the sum of its distances to every other member
of the archive-plus-candidate set; the member with the smallest sum goes.
Tours are compared as undirected edge sets, so rotations and reflections of
the same cycle are at distance zero.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from divarchive.archive import ArchiveEntry, ConfigurationError, ReplacementPolicy

Metric = Callable[[Any, Any], float]


@dataclasses.dataclass(frozen=True)
class EdgeSet:
    """Undirected edges of a tour, each stored as ``u * n + v`` with ``u < v``."""

    n: int
    codes: frozenset

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "EdgeSet":
        o = np.asarray(order, dtype=np.int64)
        nxt = np.roll(o, -1)
        n = len(o)
        codes = np.minimum(o, nxt) * n + np.maximum(o, nxt)
        return cls(n, frozenset(codes.tolist()))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "EdgeSet":
        codes = set()
        for u, v in pairs:
            if u == v:
                raise ValueError("self-loop in edge set")
            u, v = min(u, v), max(u, v)
            codes.add(u * n + v)
        return cls(n, frozenset(codes))

    @functools.cached_property
    def mask(self) -> int:
        """Edge-incidence bit vector packed into one integer."""
        bits = np.zeros(self.n * self.n, dtype=np.uint8)
        bits[list(self.codes)] = 1
        return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(divmod(c, self.n) for c in self.codes)

    def __len__(self) -> int:
        return len(self.codes)


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of positions where two equal-length bit vectors differ."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def tour_hamming_distance(a: EdgeSet, b: EdgeSet) -> int:
    """Size of the symmetric difference of two edge sets.

    Equals the Hamming distance between the edges' incidence vectors.
    """
    if a.n != b.n:
        raise ValueError(f"node-set mismatch: {a.n} vs {b.n}")
    return (a.mask ^ b.mask).bit_count()


def jaccard_distance(a: Iterable, b: Iterable) -> float:
    if isinstance(a, EdgeSet) and isinstance(b, EdgeSet):
        union = (a.mask | b.mask).bit_count()
        return 1.0 - (a.mask & b.mask).bit_count() / union if union else 0.0
    a = a.codes if isinstance(a, EdgeSet) else set(a)
    b = b.codes if isinstance(b, EdgeSet) else set(b)
    union = len(a | b)
    if union == 0:
        return 0.0
    return 1.0 - len(a & b) / union


def _edges(solution: Any) -> EdgeSet:
    return solution if isinstance(solution, EdgeSet) else solution.edges


def hamming_metric(a: Any, b: Any) -> int:
    return tour_hamming_distance(_edges(a), _edges(b))


def jaccard_metric(a: Any, b: Any) -> float:
    return jaccard_distance(_edges(a), _edges(b))


class SolutionMetric:
    """A distance between solutions with a batched form for policy caches.

    ``key`` turns a solution into whatever ``row`` compares quickly;
    ``integral`` metrics allow exact incremental row sums.
    """

    integral = False

    def __init__(self, fn: Metric):
        self.fn = fn

    def __call__(self, a: Any, b: Any) -> float:
        return self.fn(a, b)

    def key(self, solution: Any) -> Any:
        return solution

    def row(self, key: Any, keys: Sequence[Any]) -> list:
        return [self.fn(key, k) for k in keys]


class EdgeHamming(SolutionMetric):
    integral = True

    def __init__(self):
        super().__init__(hamming_metric)

    def key(self, solution: Any) -> int:
        return _edges(solution).mask

    def row(self, key: int, keys: Sequence[int]) -> list[int]:
        return [(key ^ k).bit_count() for k in keys]


class EdgeJaccard(SolutionMetric):
    def __init__(self):
        super().__init__(jaccard_metric)

    def key(self, solution: Any) -> int:
        return _edges(solution).mask

    def row(self, key: int, keys: Sequence[int]) -> list[float]:
        out = []
        for k in keys:
            union = (key | k).bit_count()
            out.append(1.0 - (key & k).bit_count() / union if union else 0.0)
        return out


METRICS: dict[str, type] = {"hamming": EdgeHamming, "jaccard": EdgeJaccard}


def contribution_sum(entry_index: int, entries: Sequence[ArchiveEntry], metric: Metric) -> float:
    if len(entries) < 2:
        raise ValueError("contribution is undefined for fewer than two entries")
    sol = entries[entry_index].solution
    return math.fsum(metric(sol, e.solution) for j, e in enumerate(entries) if j != entry_index)


def argmin_first(values: Sequence[float]) -> int:
    best = 0
    for i, v in enumerate(values):
        if v < values[best]:
            best = i
    return best


def select_victim_dist(entries: Sequence[ArchiveEntry], candidate_index: int, metric: Metric) -> int:
    """From-scratch row-sum argmin; earliest index wins ties."""
    sums = [contribution_sum(i, entries, metric) for i in range(len(entries))]
    return argmin_first(sums)


def select_victim_random(entries: Sequence[ArchiveEntry], rng: np.random.Generator) -> int:
    if not entries:
        raise ValueError("cannot pick a victim from an empty set")
    return int(rng.integers(len(entries)))


class DistancePolicy(ReplacementPolicy):
    """Row-sum argmin with a distance matrix cached in archive storage order.

    Each selection costs one distance per archive member (the candidate's
    row); inserts reuse that row, removals drop a row and a column. Sums are
    exact: integer metrics keep running totals, real-valued ones are
    re-summed with ``math.fsum`` so storage order never changes a tie.
    """

    def __init__(self, metric: SolutionMetric | Metric | str, name: str | None = None):
        if isinstance(metric, str):
            self.name = name or {"hamming": "hdaa", "jaccard": "jdaa"}[metric]
            metric = METRICS[metric]()
        else:
            self.name = name or "distance"
            if not isinstance(metric, SolutionMetric):
                metric = SolutionMetric(metric)
        self.metric = metric
        self._keys: list[Any] = []
        self._rows: list[list] = []
        self._sums: list[int] = []
        self._pending: tuple[Any, Any, list] | None = None

    def bind(self, capacity: int, num_objectives: int | None) -> None:
        if capacity < 2:
            raise ConfigurationError("distance-based archiving needs capacity >= 2")
        super().bind(capacity, num_objectives)

    def on_append(self, entry: ArchiveEntry) -> None:
        if self._pending is not None and self._pending[0] is entry.solution:
            key, row = self._pending[1], self._pending[2]
        else:
            key = self.metric.key(entry.solution)
            row = self.metric.row(key, self._keys)
        self._pending = None
        for r, d in zip(self._rows, row):
            r.append(d)
        self._rows.append(list(row) + [0])
        self._keys.append(key)
        if self.metric.integral:
            for i, d in enumerate(row):
                self._sums[i] += d
            self._sums.append(sum(row))

    def on_remove(self, index: int) -> None:
        del self._keys[index]
        gone = self._rows.pop(index)
        for r in self._rows:
            del r[index]
        if self.metric.integral:
            del self._sums[index]
            del gone[index]
            for i, d in enumerate(gone):
                self._sums[i] -= d
        if self._pending is not None:
            del self._pending[2][index]

    def row_sums(self) -> list[float]:
        if self.metric.integral:
            return list(self._sums)
        return [math.fsum(r) for r in self._rows]

    def distance_matrix(self) -> list[list]:
        return [list(r) for r in self._rows]

    def select_victim(self, entries, candidate_index):
        if len(entries) != len(self._keys) + 1 or candidate_index != len(self._keys):
            # not aligned with the cache (direct call): compute from scratch
            return select_victim_dist(entries, candidate_index, self.metric)
        cand = entries[candidate_index].solution
        key = self.metric.key(cand)
        cand_row = self.metric.row(key, self._keys)
        self._pending = (cand, key, cand_row)
        if self.metric.integral:
            sums = [s + d for s, d in zip(self._sums, cand_row)]
            sums.append(sum(cand_row))
        else:
            sums = [math.fsum(r + [d]) for r, d in zip(self._rows, cand_row)]
            sums.append(math.fsum(cand_row))
        return argmin_first(sums)


class RandomPolicy(ReplacementPolicy):
    name = "random"

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def select_victim(self, entries, candidate_index):
        return select_victim_random(entries, self.rng)
