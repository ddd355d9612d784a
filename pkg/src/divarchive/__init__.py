"""Bounded non-dominated archives with objective- and solution-space
replacement policies, driven by a dominance-based local search on the
bi-objective TSP."""

from divarchive.archive import ArchiveEntry, BoundedArchive, InsertOutcome, Outcome
from divarchive.core import (
    DimensionError,
    Relation,
    compare,
    dominates,
    nadir,
    pareto_filter,
)

__all__ = [
    "ArchiveEntry",
    "BoundedArchive",
    "DimensionError",
    "InsertOutcome",
    "Outcome",
    "Relation",
    "compare",
    "dominates",
    "nadir",
    "pareto_filter",
]

__version__ = "0.1.0"
