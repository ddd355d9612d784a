"""Seeded policy-comparison campaigns: instance generation, runs, metrics
CSV, per-cell summaries and rank reports."""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import functools
import hashlib
import itertools
import logging
import os
import re
import statistics
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

from divarchive.archive import ConfigurationError
from divarchive.dmols import POLICIES, RunRecord, SearchConfig, run_policy, save_run_record
from divarchive.metrics import build_reference_set, evaluate_front
from divarchive.ranking import (
    Direction,
    RankMatrix,
    average_ranks,
    friedman_pvalue,
    friedman_statistic,
    nemenyi_critical_difference,
    rank_row,
)
from divarchive.tsp import KINDS, BiObjInstance, instance_name, make_instance, read_instance, write_instance

log = logging.getLogger(__name__)

METRICS_HEADER = [
    "instance", "policy", "capacity", "seed", "fullness", "spread", "hv", "igdplus",
    "elapsed_s", "iterations",
]
METRIC_COLUMNS = ("fullness", "spread", "hv", "igdplus")
METRIC_DIRECTION = {
    "fullness": Direction.HIGHER_BETTER,
    "spread": Direction.LOWER_BETTER,
    "hv": Direction.HIGHER_BETTER,
    "igdplus": Direction.LOWER_BETTER,
}
RANKED_METRICS = ("hv", "igdplus")


class StatsInputError(ValueError):
    pass


def stable_seed(*parts) -> int:
    """64-bit seed from a BLAKE2b digest of the joined parts."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


@dataclasses.dataclass(frozen=True)
class InstanceSpec:
    kind: str
    n: int
    seed_a: int
    seed_b: int

    @property
    def name(self) -> str:
        return instance_name(self.kind, self.n, self.seed_a, self.seed_b)


@dataclasses.dataclass
class CampaignConfig:
    instances: list[InstanceSpec] = dataclasses.field(default_factory=list)
    instance_files: list[Path] = dataclasses.field(default_factory=list)
    policies: list[str] = dataclasses.field(default_factory=lambda: list(POLICIES))
    capacities: list[int] = dataclasses.field(default_factory=lambda: [20, 50])
    runs_per_cell: int = 10
    time_limit_s: float | None = 10.0
    max_iterations: int | None = None
    current_set_size: int = 1
    init_count: int = 3
    output_dir: Path = Path("results")
    master_seed: int = 1

    def __post_init__(self) -> None:
        if not self.instances and not self.instance_files:
            raise ConfigurationError("campaign has no instances")
        if not self.policies:
            raise ConfigurationError("campaign has no policies")
        for p in self.policies:
            if p not in POLICIES:
                raise ConfigurationError(f"unknown policy {p!r}")
        if not self.capacities or min(self.capacities) < 2:
            raise ConfigurationError("capacities must be a non-empty list of integers >= 2")
        if self.runs_per_cell < 1:
            raise ConfigurationError("runs_per_cell must be >= 1")
        if self.time_limit_s is not None and self.time_limit_s <= 0:
            raise ConfigurationError("time budget must be positive")
        if self.time_limit_s is None and self.max_iterations is None:
            raise ConfigurationError("set time_limit_s or max_iterations")

    def search_config(self, seed: int) -> SearchConfig:
        return SearchConfig(
            time_limit=self.time_limit_s,
            max_iterations=self.max_iterations,
            current_set_size=self.current_set_size,
            init_count=self.init_count,
            seed=seed,
        )


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _optional_number(value: str, cast):
    return None if value.lower() in ("", "none", "off") else cast(value)


def parse_config(text: str, base_dir: Path | None = None) -> CampaignConfig:
    """Read a flat ``key: value`` campaign file.

    Instances come either from ``kinds`` x ``sizes`` x ``instances_per_size``
    (graph seeds derived from ``master_seed``) or from explicit
    ``instance_files``; both may be given.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ConfigurationError(f"line {lineno}: expected 'key: value'")
        raw[key.strip()] = value.strip()
    base_dir = base_dir or Path.cwd()
    master = int(raw.pop("master_seed", 1))
    files = [(base_dir / f).resolve() for f in _split(raw.pop("instance_files", ""))]
    # desk-scale defaults; an explicit empty "kinds:" disables generation
    kinds = _split(raw.pop("kinds", "" if files else ",".join(KINDS)))
    sizes = [int(s) for s in _split(raw.pop("sizes", "50, 100"))]
    per_size = int(raw.pop("instances_per_size", 1))
    for k in kinds:
        if k not in KINDS:
            raise ConfigurationError(f"unknown instance kind {k!r}")
    specs = []
    for kind, n, idx in itertools.product(kinds, sizes, range(per_size)):
        a = stable_seed(master, "graph", kind, n, idx, "a") % 2**32
        b = stable_seed(master, "graph", kind, n, idx, "b") % 2**32
        if a == b:
            b = (b + 1) % 2**32
        specs.append(InstanceSpec(kind, n, a, b))
    kwargs = {}
    if "policies" in raw:
        kwargs["policies"] = _split(raw.pop("policies"))
    if "capacities" in raw:
        kwargs["capacities"] = [int(c) for c in _split(raw.pop("capacities"))]
    if "runs_per_cell" in raw:
        kwargs["runs_per_cell"] = int(raw.pop("runs_per_cell"))
    if "time_limit_s" in raw:
        kwargs["time_limit_s"] = _optional_number(raw.pop("time_limit_s"), float)
    if "max_iterations" in raw:
        kwargs["max_iterations"] = _optional_number(raw.pop("max_iterations"), int)
    if "current_set_size" in raw:
        kwargs["current_set_size"] = int(raw.pop("current_set_size"))
    if "init_count" in raw:
        kwargs["init_count"] = int(raw.pop("init_count"))
    if "output_dir" in raw:
        kwargs["output_dir"] = base_dir / raw.pop("output_dir")
    if raw:
        raise ConfigurationError(f"unknown config keys: {', '.join(sorted(raw))}")
    return CampaignConfig(instances=specs, instance_files=files, master_seed=master, **kwargs)


def load_config(path: str | Path) -> CampaignConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


# --- generate --------------------------------------------------------------

def cmd_generate(kind: str, n: int, seed_a: int, seed_b: int, out: str | Path) -> Path:
    """Write one instance; ``out`` may be a directory or a file path."""
    out = Path(out)
    inst = make_instance(kind, n, seed_a, seed_b)
    if out.is_dir() or str(out).endswith(os.sep):
        out.mkdir(parents=True, exist_ok=True)
        out = out / f"{inst.name}.tsp"
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
    return write_instance(inst, out)


def generate_instances(config: CampaignConfig) -> list[Path]:
    """Materialise every instance of the campaign, reusing existing files."""
    inst_dir = Path(config.output_dir) / "instances"
    inst_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for spec in config.instances:
        path = inst_dir / f"{spec.name}.tsp"
        if not path.exists():
            write_instance(make_instance(spec.kind, spec.n, spec.seed_a, spec.seed_b), path)
        paths.append(path)
    for path in config.instance_files:
        if not path.exists():
            raise FileNotFoundError(f"instance file not found: {path}")
        paths.append(path)
    return paths


# --- run -------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Cell:
    instance_path: str
    instance: str
    policy: str
    capacity: int
    run: int
    seed: int

    @property
    def stem(self) -> str:
        return f"{self.instance}__{self.policy}__c{self.capacity}__r{self.run:02d}"


def plan_cells(config: CampaignConfig, instances: Sequence[tuple[Path, str]]) -> list[Cell]:
    """One cell per instance x policy x capacity x run.

    The seed ignores the policy so that all policies in a (instance,
    capacity, run) case share their initial tours.
    """
    cells = []
    for (path, name), cap, run, policy in itertools.product(
        instances, config.capacities, range(config.runs_per_cell), config.policies
    ):
        seed = stable_seed(config.master_seed, name, cap, run)
        cells.append(Cell(str(path), name, policy, cap, run, seed))
    return cells


@functools.lru_cache(maxsize=8)
def _cached_instance(path: str) -> BiObjInstance:
    return read_instance(path)


def _run_cell(cell: Cell, config: CampaignConfig) -> RunRecord:
    inst = _cached_instance(cell.instance_path)
    return run_policy(inst, cell.policy, cell.capacity, config.search_config(cell.seed))


def jobs_from_env(default: int) -> int:
    env = os.environ.get("PA_JOBS")
    if env:
        return max(1, int(env))
    return max(1, default)


def execute_cells(cells: Sequence[Cell], config: CampaignConfig, jobs: int = 1) -> list[RunRecord]:
    if jobs <= 1:
        return [_run_cell(c, config) for c in cells]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_cell, cells, itertools.repeat(config)))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_front(path: Path, points: Iterable[Sequence[float]]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for p in sorted(tuple(p) for p in points):
            fh.write(" ".join(_fmt(v) for v in p) + "\n")


def cmd_run(config: CampaignConfig, jobs: int = 1) -> Path:
    """Run every cell, then score each instance against its reference front.

    Returns the path of ``metrics.csv``.
    """
    out = Path(config.output_dir)
    for sub in ("runs", "fronts", "reference"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    paths = generate_instances(config)
    named = [(p, read_instance(p).name) for p in paths]
    cells = plan_cells(config, named)
    log.info("running %d cells with %d worker(s)", len(cells), jobs)
    records = execute_cells(cells, config, jobs)

    by_instance: dict[str, list[tuple[Cell, RunRecord]]] = defaultdict(list)
    for cell, rec in zip(cells, records):
        save_run_record(rec, out / "runs" / f"{cell.stem}.run")
        write_front(out / "fronts" / f"{cell.stem}.dat", rec.objective_vectors())
        by_instance[cell.instance].append((cell, rec))

    rows = []
    for _, name in named:
        pairs = by_instance[name]
        ref = build_reference_set(rec.archive for _, rec in pairs)
        write_front(out / "reference" / f"{name}.dat", ref.points)
        for cell, rec in pairs:
            m = evaluate_front(rec.archive, rec.capacity, ref)
            rows.append(
                [
                    name, cell.policy, str(cell.capacity), str(cell.seed),
                    _fmt(m.fullness_pct), _fmt(m.spread), _fmt(m.hv_norm), _fmt(m.igd_plus),
                    f"{rec.elapsed_s:.3f}", str(rec.iterations),
                ]
            )
    metrics_path = out / "metrics.csv"
    with metrics_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        writer.writerows(rows)
    return metrics_path


# --- stats -----------------------------------------------------------------

def read_metrics_csv(path: str | Path) -> list[dict]:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(METRICS_HEADER) <= set(reader.fieldnames):
            raise StatsInputError(f"{path}: header must contain {', '.join(METRICS_HEADER)}")
        rows = []
        for lineno, row in enumerate(reader, 2):
            try:
                parsed = {
                    "instance": row["instance"],
                    "policy": row["policy"],
                    "capacity": int(row["capacity"]),
                    "seed": int(row["seed"]),
                    "elapsed_s": float(row["elapsed_s"]),
                    "iterations": int(row["iterations"]),
                }
                for col in METRIC_COLUMNS:
                    parsed[col] = float(row[col])
            except (TypeError, ValueError) as exc:
                raise StatsInputError(f"{path}:{lineno}: {exc}") from None
            rows.append(parsed)
    return rows


def describe(values: Sequence[float]) -> tuple[float, float, float]:
    """Mean, median and sample standard deviation (0 for a single value)."""
    avg = statistics.fmean(values)
    med = statistics.median(values)
    dev = statistics.stdev(values) if len(values) > 1 else 0.0
    return avg, med, dev


_NAME_RE = re.compile(r"^(?P<kind>random|euclidean|cluster)-n(?P<n>\d+)\b")


def instance_group(name: str) -> tuple[str, str]:
    """(subset, size group) parsed from a generated instance name."""
    m = _NAME_RE.match(name)
    if m is None:
        return "custom", name
    return m["kind"], m["n"]


def _policy_order(rows: Sequence[dict]) -> list[str]:
    present = {r["policy"] for r in rows}
    ordered = [p for p in POLICIES if p in present]
    return ordered + sorted(present - set(ordered))


def summarize(rows: Sequence[dict]) -> list[list[str]]:
    cells: dict[tuple, list[dict]] = defaultdict(list)
    for r in rows:
        cells[(r["instance"], r["policy"], r["capacity"])].append(r)
    order = {p: i for i, p in enumerate(_policy_order(rows))}
    out = []
    for key in sorted(cells, key=lambda k: (k[0], k[2], order[k[1]])):
        group = cells[key]
        line = [key[0], key[1], str(key[2]), str(len(group))]
        for col in METRIC_COLUMNS:
            line.extend(_fmt(v) for v in describe([g[col] for g in group]))
        line.append("single_run" if len(group) == 1 else "")
        out.append(line)
    return out


def rank_report(rows: Sequence[dict], metrics: Sequence[str] = RANKED_METRICS) -> tuple[list[list[str]], list[str]]:
    """Average ranks per (subset, metric): one row per size group plus Average.

    A case is one (instance, capacity, seed) with every policy present.
    """
    policies = _policy_order(rows)
    cases: dict[tuple, dict[str, dict]] = defaultdict(dict)
    for r in rows:
        cases[(r["instance"], r["capacity"], r["seed"])][r["policy"]] = r
    report = []
    subsets = sorted({instance_group(k[0])[0] for k in cases})
    for subset, metric in itertools.product(subsets, metrics):
        matrix = RankMatrix(policies)
        for key in sorted(cases, key=lambda k: (instance_group(k[0])[1], k)):
            subset_k, group = instance_group(key[0])
            case = cases[key]
            if subset_k != subset or len(case) != len(policies):
                continue
            matrix.add(rank_row([case[p][metric] for p in policies], METRIC_DIRECTION[metric]), group)
        if not matrix.rows:
            continue
        per_group, overall = average_ranks(matrix)
        counts = defaultdict(int)
        for g in matrix.groups:
            counts[g] += 1
        for g, ranks in per_group.items():
            report.append([subset, metric, str(g), *(f"{r:.3f}" for r in ranks), str(counts[g]), "", "", ""])
        stat = p = cd = ""
        if len(matrix.rows) >= 2 and len(policies) >= 2:
            stat = f"{friedman_statistic(matrix):.4f}"
            p = f"{friedman_pvalue(matrix):.4g}"
            cd = f"{nemenyi_critical_difference(len(policies), len(matrix.rows)):.3f}"
        report.append([subset, metric, "Average", *(f"{r:.3f}" for r in overall), str(len(matrix.rows)), stat, p, cd])
    return report, policies


def cmd_stats(csv_in: str | Path, out_dir: str | Path) -> tuple[Path, Path]:
    rows = read_metrics_csv(csv_in)
    if not rows:
        raise StatsInputError(f"{csv_in}: no data rows")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    summary_path = out / "summary.csv"
    with summary_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["instance", "policy", "capacity", "runs"]
        for col in METRIC_COLUMNS:
            header += [f"{col}_avg", f"{col}_med", f"{col}_dev"]
        writer.writerow(header + ["note"])
        writer.writerows(summarize(rows))

    report, policies = rank_report(rows)
    ranks_path = out / "ranks.csv"
    with ranks_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["subset", "metric", "group", *policies, "cases", "friedman_chi2", "friedman_p", "nemenyi_cd"])
        writer.writerows(report)
    return summary_path, ranks_path
