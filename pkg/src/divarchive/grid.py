"""Adaptive grid archiving.

Objective space is split into ``div`` equal slices per axis between the
current extremes of the archive plus candidate. On overflow one member of
the most crowded cell is dropped uniformly at random.
"""

from __future__ import annotations

import dataclasses
import math
from collections import defaultdict
from typing import Sequence

import numpy as np

from divarchive.archive import ArchiveEntry, ConfigurationError, ReplacementPolicy


def grid_bound_holds(capacity: int, num_objectives: int, div: int) -> bool:
    """``capacity - 2*o > div**o - (div-1)**o``."""
    o = num_objectives
    return capacity - 2 * o > div**o - (div - 1) ** o


def max_feasible_div(capacity: int, num_objectives: int) -> int:
    """Largest ``div >= 1`` satisfying the grid convergence bound.

    The right-hand side grows with ``div`` so we count up until it fails.
    """
    if num_objectives < 1:
        raise ConfigurationError("need at least one objective")
    if not grid_bound_holds(capacity, num_objectives, 1):
        raise ConfigurationError(
            f"no feasible grid division for capacity {capacity} with {num_objectives} objectives"
        )
    div = 1
    while grid_bound_holds(capacity, num_objectives, div + 1):
        div += 1
    return div


@dataclasses.dataclass(frozen=True)
class GridConfig:
    div: int
    num_objectives: int

    @classmethod
    def for_capacity(cls, capacity: int, num_objectives: int) -> "GridConfig":
        return cls(max_feasible_div(capacity, num_objectives), num_objectives)


def grid_index(v: Sequence[float], lower: Sequence[float], upper: Sequence[float], div: int) -> tuple[int, ...]:
    coords = []
    for x, lo, hi in zip(v, lower, upper):
        if hi == lo:
            coords.append(0)
            continue
        c = math.floor(div * (x - lo) / (hi - lo))
        coords.append(min(max(c, 0), div - 1))
    return tuple(coords)


def bin_entries(objectives: Sequence[Sequence[float]], div: int) -> list[tuple[int, ...]]:
    lower = [min(col) for col in zip(*objectives)]
    upper = [max(col) for col in zip(*objectives)]
    return [grid_index(v, lower, upper, div) for v in objectives]


def select_victim_aga(
    entries: Sequence[ArchiveEntry],
    candidate_index: int,
    config: GridConfig,
    rng: np.random.Generator,
) -> int:
    cells = bin_entries([e.objectives for e in entries], config.div)
    occupants: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for i, cell in enumerate(cells):
        occupants[cell].append(i)
    top = max(len(v) for v in occupants.values())
    # dict preserves first-seen order, so region choice is replayable
    crowded = [members for members in occupants.values() if len(members) == top]
    members = crowded[int(rng.integers(len(crowded)))]
    return members[int(rng.integers(len(members)))]


class AdaptiveGridPolicy(ReplacementPolicy):
    name = "aga"

    def __init__(self, rng: np.random.Generator, div: int | None = None):
        self.rng = rng
        self._fixed_div = div
        self.config: GridConfig | None = None

    def bind(self, capacity: int, num_objectives: int | None) -> None:
        super().bind(capacity, num_objectives)
        if num_objectives is None:
            return
        if self._fixed_div is not None:
            if not grid_bound_holds(capacity, num_objectives, self._fixed_div):
                raise ConfigurationError(
                    f"div={self._fixed_div} violates the grid bound for capacity {capacity}"
                )
            self.config = GridConfig(self._fixed_div, num_objectives)
        else:
            self.config = GridConfig.for_capacity(capacity, num_objectives)

    def select_victim(self, entries, candidate_index):
        if self.config is None:
            self.bind(self.capacity, len(entries[0].objectives))
        return select_victim_aga(entries, candidate_index, self.config, self.rng)

    def describe(self) -> dict:
        d = {"policy": self.name}
        if self.config is not None:
            d["div"] = self.config.div
        return d
