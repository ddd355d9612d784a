"""Bounded archive of mutually non-dominated solutions.

Insertion follows three rules. A candidate that dominates archive members
evicts them. A non-dominated candidate is stored while there is room. Once
the archive is full, the replacement policy is shown the archive plus the
candidate and names one member to drop, which may be the candidate itself.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import IO, Any, Iterable, Sequence

import numpy as np

from divarchive.core import DimensionError


class ConfigurationError(ValueError):
    """Invalid archive, policy or search configuration."""


@dataclasses.dataclass(slots=True)
class ArchiveEntry:
    solution: Any
    objectives: tuple
    explored: bool = False

    def __post_init__(self) -> None:
        self.objectives = tuple(self.objectives)

    def same_as(self, other: "ArchiveEntry") -> bool:
        return self.objectives == other.objectives and self.solution == other.solution


class Outcome(enum.Enum):
    ACCEPTED_WITH_REMOVALS = "accepted_with_removals"
    ACCEPTED_INTO_SPACE = "accepted_into_space"
    ACCEPTED_REPLACING = "accepted_replacing"
    REJECTED_DOMINATED = "rejected_dominated"
    REJECTED_BY_POLICY = "rejected_by_policy"


@dataclasses.dataclass(frozen=True)
class InsertOutcome:
    kind: Outcome
    removed: tuple = ()

    @property
    def accepted(self) -> bool:
        return self.kind in (
            Outcome.ACCEPTED_WITH_REMOVALS,
            Outcome.ACCEPTED_INTO_SPACE,
            Outcome.ACCEPTED_REPLACING,
        )


class ReplacementPolicy:
    """Base class for victim selection on a full archive.

    Subclasses implement :meth:`select_victim`. The archive reports every
    structural change through :meth:`on_append` and :meth:`on_remove` so
    stateful policies can keep caches aligned with storage order.
    """

    name = "base"

    def bind(self, capacity: int, num_objectives: int | None) -> None:
        self.capacity = capacity

    def on_append(self, entry: ArchiveEntry) -> None:
        pass

    def on_remove(self, index: int) -> None:
        pass

    def select_victim(self, entries: Sequence[ArchiveEntry], candidate_index: int) -> int:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"policy": self.name}


class BoundedArchive:
    def __init__(self, capacity: int, policy: ReplacementPolicy):
        if not isinstance(capacity, int) or capacity < 1:
            raise ConfigurationError(f"capacity must be a positive integer, got {capacity!r}")
        self.capacity = capacity
        self.policy = policy
        self.entries: list[ArchiveEntry] = []
        # objective mirror of ``entries`` for vectorised dominance tests
        self._objs = np.empty((0, 0))
        self._bound_dim: int | None = None
        policy.bind(capacity, None)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def is_full(self) -> bool:
        return len(self.entries) >= self.capacity

    def snapshot(self) -> tuple[ArchiveEntry, ...]:
        return tuple(dataclasses.replace(e) for e in self.entries)

    def objective_vectors(self) -> list[tuple]:
        return [e.objectives for e in self.entries]

    def is_dominated(self, objectives: Sequence[float]) -> bool:
        """Cheap pre-check: is ``objectives`` strictly dominated by a member?"""
        if not self.entries:
            return False
        c = np.asarray(objectives, dtype=float)
        O = self._objs
        return bool(((O <= c).all(axis=1) & (O < c).any(axis=1)).any())

    def _remove_at(self, index: int) -> ArchiveEntry:
        entry = self.entries.pop(index)
        self._objs = np.delete(self._objs, index, axis=0)
        self.policy.on_remove(index)
        return entry

    def _append(self, entry: ArchiveEntry) -> None:
        if self._bound_dim is None:
            self._bound_dim = len(entry.objectives)
            self._objs = np.empty((0, self._bound_dim))
            self.policy.bind(self.capacity, self._bound_dim)
        self.entries.append(entry)
        self._objs = np.vstack((self._objs, np.asarray(entry.objectives, dtype=float)))
        self.policy.on_append(entry)

    def try_insert(self, candidate: ArchiveEntry) -> InsertOutcome:
        if self._bound_dim is not None and len(candidate.objectives) != self._bound_dim:
            raise DimensionError(
                f"candidate has {len(candidate.objectives)} objectives, archive holds {self._bound_dim}"
            )
        removed = []
        if self.entries:
            c = np.asarray(candidate.objectives, dtype=float)
            O = self._objs
            le = (O <= c).all(axis=1)
            lt = (O < c).any(axis=1)
            if (le & lt).any():
                return InsertOutcome(Outcome.REJECTED_DOMINATED)
            for i in np.flatnonzero(le).tolist():
                if self.entries[i].solution == candidate.solution:
                    return InsertOutcome(Outcome.REJECTED_DOMINATED)
            beaten = np.flatnonzero((O >= c).all(axis=1) & (O > c).any(axis=1)).tolist()
            for shift, i in enumerate(beaten):
                removed.append(self._remove_at(i - shift))

        if len(self.entries) < self.capacity:
            self._append(candidate)
            if removed:
                return InsertOutcome(Outcome.ACCEPTED_WITH_REMOVALS, tuple(removed))
            return InsertOutcome(Outcome.ACCEPTED_INTO_SPACE)

        provisional = self.entries + [candidate]
        victim = self.policy.select_victim(provisional, len(self.entries))
        if not 0 <= victim < len(provisional):
            raise IndexError(f"policy {self.policy.name} returned victim {victim}")
        if victim == len(self.entries):
            return InsertOutcome(Outcome.REJECTED_BY_POLICY)
        evicted = self._remove_at(victim)
        self._append(candidate)
        return InsertOutcome(Outcome.ACCEPTED_REPLACING, (evicted,))


# --- archive dump format: obj1<TAB>...<TAB>objm<TAB>space-separated tokens ---

def _fmt_number(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def format_entry(entry: ArchiveEntry) -> str:
    sol = entry.solution
    tokens = " ".join(str(t) for t in sol) if sol is not None else ""
    return "\t".join([*(_fmt_number(v) for v in entry.objectives), tokens])


def parse_entry_line(line: str, num_objectives: int | None = None) -> tuple[tuple, tuple[str, ...]]:
    """Parse one dump line into (objectives, solution tokens).

    Without ``num_objectives`` the last tab field is taken as the token list.
    """
    fields = line.rstrip("\n").split("\t")
    if num_objectives is None:
        num_objectives = len(fields) - 1
    if len(fields) != num_objectives + 1 or num_objectives < 1:
        raise ValueError(f"malformed archive line: {line!r}")
    objs = tuple(float(f) for f in fields[:num_objectives])
    tokens = tuple(fields[num_objectives].split())
    return objs, tokens


def dump_entries(entries: Iterable[ArchiveEntry], fh: IO[str]) -> None:
    for e in entries:
        fh.write(format_entry(e) + "\n")


def load_entries(lines: Iterable[str]) -> list[tuple[tuple, tuple[str, ...]]]:
    return [parse_entry_line(ln) for ln in lines if ln.strip()]
