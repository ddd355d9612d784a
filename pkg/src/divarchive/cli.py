"""Command-line entry point: ``generate``, ``run`` and ``stats``."""

from __future__ import annotations

import argparse
import logging
import sys

from divarchive import bench
from divarchive.tsp import KINDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divarchive",
        description="Bounded-archive local search on the bi-objective TSP.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write one bi-objective TSP instance")
    gen.add_argument("--kind", choices=KINDS, required=True)
    gen.add_argument("--n", type=int, required=True, help="number of nodes")
    gen.add_argument("--seed-a", type=int, required=True, help="seed of the first graph")
    gen.add_argument("--seed-b", type=int, required=True, help="seed of the second graph")
    gen.add_argument("--out", required=True, help="output file, or directory ending in /")

    run = sub.add_parser("run", help="run a campaign described by a key: value config file")
    run.add_argument("--config", required=True)
    run.add_argument("--jobs", type=int, default=1, help="worker processes (PA_JOBS overrides)")

    st = sub.add_parser("stats", help="summarise a metrics CSV and rank the policies")
    st.add_argument("--in", dest="csv_in", required=True)
    st.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "generate":
            path = bench.cmd_generate(args.kind, args.n, args.seed_a, args.seed_b, args.out)
            print(path)
        elif args.command == "run":
            config = bench.load_config(args.config)
            print(bench.cmd_run(config, jobs=bench.jobs_from_env(args.jobs)))
        elif args.command == "stats":
            for path in bench.cmd_stats(args.csv_in, args.out):
                print(path)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
