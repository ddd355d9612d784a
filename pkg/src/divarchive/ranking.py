"""Rank-based comparison of policies across cases (Friedman family).

Each case (row) ranks the policies, 1 being best, ties sharing the average
position; column means over rows give the per-policy average rank.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections import defaultdict
from typing import Hashable, Sequence

import numpy as np
from scipy import stats


class Direction(enum.Enum):
    HIGHER_BETTER = "higher"
    LOWER_BETTER = "lower"


def rank_row(values: Sequence[float], direction: Direction) -> list[float]:
    if len(values) == 0:
        raise ValueError("cannot rank an empty row")
    arr = np.asarray(values, dtype=float)
    if direction is Direction.HIGHER_BETTER:
        arr = -arr
    return [float(r) for r in stats.rankdata(arr, method="average")]


@dataclasses.dataclass
class RankMatrix:
    columns: list[str]
    rows: list[list[float]] = dataclasses.field(default_factory=list)
    groups: list[Hashable] = dataclasses.field(default_factory=list)

    def add(self, ranks: Sequence[float], group: Hashable = None) -> None:
        if len(ranks) != len(self.columns):
            raise ValueError(f"row has {len(ranks)} ranks for {len(self.columns)} columns")
        self.rows.append([float(r) for r in ranks])
        self.groups.append(group)

    @classmethod
    def from_values(
        cls,
        columns: Sequence[str],
        value_rows: Sequence[Sequence[float]],
        direction: Direction,
        groups: Sequence[Hashable] | None = None,
    ) -> "RankMatrix":
        m = cls(list(columns))
        for i, vals in enumerate(value_rows):
            m.add(rank_row(vals, direction), None if groups is None else groups[i])
        return m


def average_ranks(matrix: RankMatrix, grouping: Sequence[Hashable] | None = None) -> tuple[dict, list[float]]:
    """Per-group and overall column means of the rank rows.

    Returns ``({group: [mean per column]}, [overall mean per column])``;
    groups keep first-seen order.
    """
    if not matrix.rows:
        raise ValueError("empty rank matrix")
    labels = list(grouping) if grouping is not None else matrix.groups
    if len(labels) != len(matrix.rows):
        raise ValueError("grouping must label every row")
    buckets: dict[Hashable, list[list[float]]] = defaultdict(list)
    for label, row in zip(labels, matrix.rows):
        buckets[label].append(row)
    per_group = {g: [float(x) for x in np.mean(rows, axis=0)] for g, rows in buckets.items()}
    overall = [float(x) for x in np.mean(matrix.rows, axis=0)]
    return per_group, overall


def friedman_statistic(matrix: RankMatrix) -> float:
    """Friedman chi-square from average ranks."""
    n = len(matrix.rows)
    k = len(matrix.columns)
    if n < 2 or k < 2:
        raise ValueError("Friedman statistic needs at least 2 rows and 2 columns")
    mean_ranks = np.mean(matrix.rows, axis=0)
    return float(12 * n / (k * (k + 1)) * (np.sum(mean_ranks**2) - k * (k + 1) ** 2 / 4))


def friedman_pvalue(matrix: RankMatrix) -> float:
    return float(stats.chi2.sf(friedman_statistic(matrix), len(matrix.columns) - 1))


def nemenyi_critical_difference(k: int, n: int, alpha: float = 0.05) -> float:
    """Average-rank difference beyond which two of ``k`` policies differ over ``n`` cases."""
    q = stats.studentized_range.ppf(1 - alpha, k, np.inf) / math.sqrt(2)
    return float(q * math.sqrt(k * (k + 1) / (6 * n)))
