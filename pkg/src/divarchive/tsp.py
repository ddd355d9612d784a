"""Bi-objective symmetric TSP: tours, costs, 2-opt moves, greedy starts,
instance generators and the on-disk instance format."""

from __future__ import annotations

import dataclasses
import functools
import math
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from divarchive.distance import EdgeSet

KINDS = ("random", "euclidean", "cluster")
RNG_ID = "numpy-PCG64/v1"
MAX_WEIGHT = 10**6
CLUSTER_RADIUS = 10**4


class InstanceFormatError(ValueError):
    pass


def canonical_order(order: Sequence[int]) -> tuple[int, ...]:
    """Rotate to start at node 0, then orient so ``order[1] < order[-1]``."""
    order = list(order)
    k = order.index(0)
    order = order[k:] + order[:k]
    if len(order) > 2 and order[1] > order[-1]:
        order = [order[0]] + order[:0:-1]
    return tuple(order)


@dataclasses.dataclass(frozen=True)
class Tour:
    order: tuple

    def __post_init__(self) -> None:
        n = len(self.order)
        if n < 3:
            raise ValueError(f"a tour needs at least 3 nodes, got {n}")
        if sorted(self.order) != list(range(n)):
            raise ValueError("tour is not a permutation of 0..n-1")
        object.__setattr__(self, "order", canonical_order(int(x) for x in self.order))

    @classmethod
    def of(cls, *nodes: int) -> "Tour":
        return cls(tuple(nodes))

    @property
    def n(self) -> int:
        return len(self.order)

    @functools.cached_property
    def edges(self) -> EdgeSet:
        return EdgeSet.from_order(self.order)

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


@dataclasses.dataclass(frozen=True, eq=False)
class WeightMatrix:
    w: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weight matrix must be square")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if np.any(np.diag(w) != 0):
            raise ValueError("diagonal must be zero")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightMatrix) and np.array_equal(self.w, other.w)

    __hash__ = None


@dataclasses.dataclass(frozen=True)
class BiObjInstance:
    name: str
    kind: str
    g1: WeightMatrix
    g2: WeightMatrix
    meta: dict = dataclasses.field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.g1.n != self.g2.n:
            raise ValueError("both graphs must have the same node count")
        if self.kind not in KINDS and self.kind != "custom":
            raise ValueError(f"unknown instance kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.g1.n


def tour_cost(t: Tour, g: WeightMatrix) -> int:
    if t.n != g.n:
        raise ValueError(f"tour has {t.n} nodes, graph has {g.n}")
    o = np.asarray(t.order)
    return int(g.w[o, np.roll(o, -1)].sum())


def evaluate(t: Tour, inst: BiObjInstance) -> tuple[int, int]:
    return tour_cost(t, inst.g1), tour_cost(t, inst.g2)


# --- 2-opt -----------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def two_opt_moves(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j) with the segment ``i+1..j`` reversed; n(n-3)/2 moves."""
    ii, jj = [], []
    for i in range(n - 2):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            ii.append(i)
            jj.append(j)
    I = np.array(ii, dtype=np.intp)
    J = np.array(jj, dtype=np.intp)
    I.setflags(write=False)
    J.setflags(write=False)
    return I, J


def apply_two_opt(order: Sequence[int], i: int, j: int) -> Tour:
    order = list(order)
    return Tour(tuple(order[: i + 1] + order[i + 1 : j + 1][::-1] + order[j + 1 :]))


def two_opt_neighbors(t: Tour) -> list[Tour]:
    if t.n < 4:
        return []
    I, J = two_opt_moves(t.n)
    seen = set()
    out = []
    for i, j in zip(I.tolist(), J.tolist()):
        nb = apply_two_opt(t.order, i, j)
        if nb not in seen:
            seen.add(nb)
            out.append(nb)
    return out


def two_opt_deltas(order: Sequence[int], g: WeightMatrix) -> np.ndarray:
    """Cost change of every move from :func:`two_opt_moves`, same order."""
    n = len(order)
    I, J = two_opt_moves(n)
    o = np.asarray(order, dtype=np.intp)
    a, b = o[I], o[I + 1]
    c, d = o[J], o[(J + 1) % n]
    w = g.w
    return w[a, c] + w[b, d] - w[a, b] - w[c, d]


# --- greedy start ----------------------------------------------------------

def _nearest_neighbor(w: np.ndarray, start: int) -> list[int]:
    n = w.shape[0]
    visited = np.zeros(n, dtype=bool)
    visited[start] = True
    route = [start]
    cur = start
    for _ in range(n - 1):
        row = np.where(visited, np.inf, w[cur])
        cur = int(np.argmin(row))
        visited[cur] = True
        route.append(cur)
    return route


def scalarization_weights(count: int) -> list[float]:
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return [0.5]
    return [float(x) for x in np.linspace(0.0, 1.0, count)]


def greedy_init(inst: BiObjInstance, count: int, rng: np.random.Generator) -> list[Tour]:
    """Nearest-neighbour tours on ``lam*g1 + (1-lam)*g2`` for evenly spaced ``lam``."""
    tours = []
    w1 = inst.g1.w.astype(float)
    w2 = inst.g2.w.astype(float)
    for lam in scalarization_weights(count):
        start = int(rng.integers(inst.n))
        tours.append(Tour(tuple(_nearest_neighbor(lam * w1 + (1 - lam) * w2, start))))
    return tours


# --- generators ------------------------------------------------------------

def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _euclidean_weights(xy: np.ndarray) -> np.ndarray:
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    # TSPLIB nint(): round half up
    return np.floor(dist + 0.5).astype(np.int64)


def num_clusters(n: int) -> int:
    return max(2, n // 100)


def generate_graph(kind: str, n: int, seed: int) -> WeightMatrix:
    if n < 3:
        raise ValueError("need at least 3 nodes")
    rng = make_rng(seed)
    if kind == "random":
        iu = np.triu_indices(n, k=1)
        w = np.zeros((n, n), dtype=np.int64)
        w[iu] = rng.integers(0, MAX_WEIGHT, size=len(iu[0]), endpoint=True)
        return WeightMatrix(w + w.T)
    if kind == "euclidean":
        xy = rng.integers(1, MAX_WEIGHT, size=(n, 2), endpoint=True).astype(float)
        return WeightMatrix(_euclidean_weights(xy), coords=xy)
    if kind == "cluster":
        c = num_clusters(n)
        xy = np.empty((n, 2), dtype=float)
        xy[:c] = rng.integers(1, MAX_WEIGHT, size=(c, 2), endpoint=True)
        rest = n - c
        owner = np.arange(rest) % c
        radius = CLUSTER_RADIUS * np.sqrt(rng.random(rest))
        theta = 2 * np.pi * rng.random(rest)
        xy[c:, 0] = xy[owner, 0] + radius * np.cos(theta)
        xy[c:, 1] = xy[owner, 1] + radius * np.sin(theta)
        return WeightMatrix(_euclidean_weights(xy), coords=xy)
    raise ValueError(f"unknown instance kind {kind!r}")


def cluster_owner(n: int, node: int) -> int | None:
    """Center index of ``node`` in a cluster instance, None for centers."""
    c = num_clusters(n)
    return None if node < c else (node - c) % c


def instance_name(kind: str, n: int, seed_a: int, seed_b: int) -> str:
    return f"{kind}-n{n}-a{seed_a}-b{seed_b}"


def make_instance(kind: str, n: int, seed_a: int, seed_b: int, name: str | None = None) -> BiObjInstance:
    if seed_a == seed_b:
        raise ValueError("the two graphs need distinct seeds")
    meta = {"rng": RNG_ID, "seed_a": seed_a, "seed_b": seed_b}
    if kind == "cluster":
        meta["clusters"] = num_clusters(n)
        meta["cluster_offset"] = f"uniform-disk r={CLUSTER_RADIUS}"
        meta["cluster_assignment"] = "round-robin"
    return BiObjInstance(
        name or instance_name(kind, n, seed_a, seed_b),
        kind,
        generate_graph(kind, n, seed_a),
        generate_graph(kind, n, seed_b),
        meta,
    )


# --- instance file ---------------------------------------------------------

def format_instance(inst: BiObjInstance) -> str:
    lines = [f"name: {inst.name}", f"kind: {inst.kind}", f"n: {inst.n}"]
    meta = dict(inst.meta)
    lines.append(f"rng: {meta.pop('rng', RNG_ID)}")
    for key in ("seed_a", "seed_b"):
        if key in meta:
            lines.append(f"{key}: {meta.pop(key)}")
    for key, val in meta.items():
        lines.append(f"{key}: {val}")
    for k, g in ((1, inst.g1), (2, inst.g2)):
        lines.append(f"GRAPH {k}")
        iu, ju = np.triu_indices(g.n, k=1)
        lines.extend(f"{i} {j} {w}" for i, j, w in zip(iu.tolist(), ju.tolist(), g.w[iu, ju].tolist()))
    for k, g in ((1, inst.g1), (2, inst.g2)):
        if g.coords is not None:
            lines.append(f"COORDS {k}")
            lines.extend(f"{i} {x!r} {y!r}" for i, (x, y) in enumerate(g.coords.tolist()))
    return "\n".join(lines) + "\n"


def write_instance(inst: BiObjInstance, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_instance(inst), encoding="utf-8")
    return path


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def parse_instance(text: str) -> BiObjInstance:
    header: dict[str, str] = {}
    sections: dict[tuple[str, int], list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(("GRAPH ", "COORDS ")):
            tag, k = line.split()
            current = (tag, int(k))
            if current in sections:
                raise InstanceFormatError(f"line {lineno}: duplicate section {line}")
            sections[current] = []
        elif current is None:
            key, sep, val = line.partition(":")
            if not sep:
                raise InstanceFormatError(f"line {lineno}: expected 'key: value', got {line!r}")
            header[key.strip()] = val.strip()
        else:
            sections[current].append(line)
    for key in ("name", "kind", "n"):
        if key not in header:
            raise InstanceFormatError(f"missing header field {key!r}")
    n = int(header["n"])
    graphs = []
    for k in (1, 2):
        if ("GRAPH", k) not in sections:
            raise InstanceFormatError(f"missing GRAPH {k} section")
        w = np.full((n, n), -1, dtype=np.int64)
        np.fill_diagonal(w, 0)
        for line in sections[("GRAPH", k)]:
            i, j, val = (int(x) for x in line.split())
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise InstanceFormatError(f"GRAPH {k}: bad edge {line!r}")
            for a, b in ((i, j), (j, i)):
                if w[a, b] not in (-1, val):
                    raise InstanceFormatError(f"GRAPH {k}: asymmetric weights on edge {i}-{j}")
                w[a, b] = val
        if np.any(w < 0):
            i, j = np.argwhere(w < 0)[0]
            raise InstanceFormatError(f"GRAPH {k}: missing edge {i}-{j}")
        coords = None
        if ("COORDS", k) in sections:
            coords = np.zeros((n, 2))
            for line in sections[("COORDS", k)]:
                idx, x, y = line.split()
                coords[int(idx)] = (float(x), float(y))
        graphs.append(WeightMatrix(w, coords=coords))
    meta = {k: _parse_value(v) for k, v in header.items() if k not in ("name", "kind", "n")}
    return BiObjInstance(header["name"], header["kind"], graphs[0], graphs[1], meta)


def read_instance(path: str | Path) -> BiObjInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def figure_instance() -> BiObjInstance:
    """The 4-node, two-graph worked example used throughout the tests."""
    def full(e01, e02, e03, e12, e13, e23):
        return np.array(
            [[0, e01, e02, e03], [e01, 0, e12, e13], [e02, e12, 0, e23], [e03, e13, e23, 0]]
        )

    return BiObjInstance(
        "figure-4",
        "custom",
        WeightMatrix(full(4, 7, 9, 2, 8, 5)),
        WeightMatrix(full(7, 5, 2, 6, 4, 9)),
    )
