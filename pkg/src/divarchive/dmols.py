"""Dominance-based multi-objective local search over a bounded archive.

Each iteration picks a few unexplored archive members, evaluates their whole
2-opt neighbourhood, keeps the non-dominated neighbours and offers them to
the archive.
"""

from __future__ import annotations

import dataclasses
import time
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from divarchive.archive import (
    ArchiveEntry,
    BoundedArchive,
    ConfigurationError,
    ReplacementPolicy,
    dump_entries,
    parse_entry_line,
)
from divarchive.distance import DistancePolicy, RandomPolicy
from divarchive.grid import AdaptiveGridPolicy
from divarchive.hypervolume import HypervolumePolicy
from divarchive.tsp import BiObjInstance, Tour, apply_two_opt, evaluate, greedy_init, two_opt_deltas, two_opt_moves

POLICIES = ("random", "aga", "ha", "hdaa", "jdaa")
RESTART_FRACTION = 0.1


def make_policy(name: str, rng: np.random.Generator) -> ReplacementPolicy:
    if name == "random":
        return RandomPolicy(rng)
    if name == "aga":
        return AdaptiveGridPolicy(rng)
    if name == "ha":
        return HypervolumePolicy()
    if name == "hdaa":
        return DistancePolicy("hamming")
    if name == "jdaa":
        return DistancePolicy("jaccard")
    raise ConfigurationError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}")


@dataclasses.dataclass
class SearchConfig:
    time_limit: float | None = None
    max_iterations: int | None = None
    current_set_size: int = 1
    init_count: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.time_limit is None and self.max_iterations is None:
            raise ConfigurationError("set time_limit, max_iterations, or both")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigurationError("time_limit must be positive")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be >= 0")
        if self.current_set_size < 1 or self.init_count < 1:
            raise ConfigurationError("current_set_size and init_count must be >= 1")


@dataclasses.dataclass
class RunRecord:
    instance: str
    policy: str
    capacity: int
    seed: int
    elapsed_s: float
    iterations: int
    evaluations: int
    archive: tuple
    stop_reason: str = ""
    restarts: int = 0
    params: dict = dataclasses.field(default_factory=dict)

    def objective_vectors(self) -> list[tuple]:
        return [e.objectives for e in self.archive]


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Rows of a 2-column array not strictly dominated by another row.

    Identical rows survive together.
    """
    if len(F) == 0:
        return np.zeros(0, dtype=bool)
    order = np.lexsort((F[:, 1], F[:, 0]))
    f1, f2 = F[order, 0], F[order, 1]
    prev_min = np.minimum.accumulate(np.concatenate(([np.inf], f2[:-1])))
    keep = f2 < prev_min
    # a copy of the row just before it shares its fate
    dup = np.concatenate(([False], (f1[1:] == f1[:-1]) & (f2[1:] == f2[:-1])))
    for k in np.flatnonzero(dup).tolist():
        keep[k] = keep[k - 1]
    mask = np.empty(len(F), dtype=bool)
    mask[order] = keep
    return mask


def _explore(current: Sequence[ArchiveEntry], inst: BiObjInstance):
    """Non-dominated neighbours of the current set as (objectives, parent order, i, j).

    Neighbours no better than their parent in any objective are dropped
    before the non-dominated filter.
    """
    objs, origin, move_ids = [], [], []
    I, J = two_opt_moves(inst.n)
    evaluated = 0
    for k, entry in enumerate(current):
        order = entry.solution.order
        f1, f2 = entry.objectives
        d1 = two_opt_deltas(order, inst.g1)
        d2 = two_opt_deltas(order, inst.g2)
        evaluated += len(d1)
        sel = np.flatnonzero((d1 < 0) | (d2 < 0))
        objs.append(np.column_stack((f1 + d1[sel], f2 + d2[sel])))
        origin.append(np.full(len(sel), k))
        move_ids.append(sel)
    F = np.concatenate(objs)
    parent = np.concatenate(origin)
    moves = np.concatenate(move_ids)
    keep = np.flatnonzero(nondominated_mask(F))
    out = []
    for idx in keep.tolist():
        m = moves[idx]
        out.append(
            (
                (float(F[idx, 0]), float(F[idx, 1])),
                current[parent[idx]].solution.order,
                int(I[m]),
                int(J[m]),
            )
        )
    return out, evaluated


def run_dmols(inst: BiObjInstance, archive: BoundedArchive, cfg: SearchConfig) -> RunRecord:
    if archive.capacity < 2:
        raise ConfigurationError("local search needs an archive capacity of at least 2")
    start = time.perf_counter()
    search_rng = np.random.default_rng(cfg.seed)

    for tour in greedy_init(inst, cfg.init_count, search_rng):
        archive.try_insert(ArchiveEntry(tour, tuple(float(v) for v in evaluate(tour, inst))))

    iterations = evaluations = restarts = 0
    stop_reason = ""
    if inst.n < 4:
        stop_reason = "no_neighbourhood"
    while not stop_reason:
        elapsed = time.perf_counter() - start
        if cfg.time_limit is not None and elapsed >= cfg.time_limit:
            stop_reason = "time_limit"
            break
        if cfg.max_iterations is not None and iterations >= cfg.max_iterations:
            stop_reason = "max_iterations"
            break
        unexplored = [e for e in archive.entries if not e.explored]
        if not unexplored:
            remaining = []
            if cfg.time_limit is not None:
                remaining.append((cfg.time_limit - elapsed) / cfg.time_limit)
            if cfg.max_iterations is not None:
                remaining.append((cfg.max_iterations - iterations) / max(cfg.max_iterations, 1))
            if restarts == 0 and min(remaining) >= RESTART_FRACTION:
                for e in archive.entries:
                    e.explored = False
                restarts += 1
                continue
            stop_reason = "local_optimum"
            break

        size = min(cfg.current_set_size, len(unexplored))
        picks = np.sort(search_rng.choice(len(unexplored), size=size, replace=False))
        current = [unexplored[i] for i in picks.tolist()]
        candidates, count = _explore(current, inst)
        evaluations += count
        for e in current:
            e.explored = True
        for objs, order, i, j in candidates:
            if archive.is_dominated(objs):
                continue
            archive.try_insert(ArchiveEntry(apply_two_opt(order, i, j), objs))
        iterations += 1

    return RunRecord(
        instance=inst.name,
        policy=archive.policy.name,
        capacity=archive.capacity,
        seed=cfg.seed,
        elapsed_s=time.perf_counter() - start,
        iterations=iterations,
        evaluations=evaluations,
        archive=archive.snapshot(),
        stop_reason=stop_reason,
        restarts=restarts,
        params={
            **{k: v for k, v in archive.policy.describe().items() if k != "policy"},
            "current_set_size": cfg.current_set_size,
            "init_count": cfg.init_count,
            "time_limit": cfg.time_limit,
            "max_iterations": cfg.max_iterations,
        },
    )


def run_policy(inst: BiObjInstance, policy: str, capacity: int, cfg: SearchConfig) -> RunRecord:
    """Build the archive for ``policy`` (its RNG derived from ``cfg.seed``) and search."""
    policy_seed = np.random.SeedSequence([cfg.seed, 0x5EED])
    archive = BoundedArchive(capacity, make_policy(policy, np.random.default_rng(policy_seed)))
    return run_dmols(inst, archive, cfg)


# --- RunRecord text format: "key: value" header, ARCHIVE line, dump lines ---

_HEADER_KEYS = (
    "instance", "policy", "capacity", "seed", "elapsed_s", "iterations",
    "evaluations", "stop_reason", "restarts",
)


def write_run_record(rec: RunRecord, fh: IO[str]) -> None:
    for key in _HEADER_KEYS:
        fh.write(f"{key}: {getattr(rec, key)}\n")
    for key, val in rec.params.items():
        fh.write(f"param.{key}: {val}\n")
    fh.write(f"size: {len(rec.archive)}\n")
    fh.write("ARCHIVE\n")
    dump_entries(rec.archive, fh)


def save_run_record(rec: RunRecord, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        write_run_record(rec, fh)
    return path


def parse_run_record(text: str) -> RunRecord:
    header: dict[str, str] = {}
    lines = text.splitlines()
    try:
        split = lines.index("ARCHIVE")
    except ValueError:
        raise ValueError("run record has no ARCHIVE section") from None
    for line in lines[:split]:
        key, _, val = line.partition(":")
        header[key.strip()] = val.strip()
    entries = []
    for line in lines[split + 1 :]:
        if not line.strip():
            continue
        objs, tokens = parse_entry_line(line)
        entries.append(ArchiveEntry(Tour(tuple(int(t) for t in tokens)), objs))
    if "size" in header and int(header["size"]) != len(entries):
        raise ValueError("run record size does not match its archive section")
    params = {k[len("param."):]: v for k, v in header.items() if k.startswith("param.")}
    return RunRecord(
        instance=header["instance"],
        policy=header["policy"],
        capacity=int(header["capacity"]),
        seed=int(header["seed"]),
        elapsed_s=float(header["elapsed_s"]),
        iterations=int(header["iterations"]),
        evaluations=int(header["evaluations"]),
        archive=tuple(entries),
        stop_reason=header.get("stop_reason", ""),
        restarts=int(header.get("restarts", 0)),
        params=params,
    )


def load_run_record(path: str | Path) -> RunRecord:
    return parse_run_record(Path(path).read_text(encoding="utf-8"))
