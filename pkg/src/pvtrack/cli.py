"""Command line entry point: ``pvtrack run``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ConfigError, RunConfig, apply_overrides, load_config
from .experiment import OracleMismatchError, run_one
from .glmb import FilterCollapseError

log = logging.getLogger("pvtrack")

OUT_DIR_ENV = "PVTRACK_OUT_DIR"

EXIT_CONFIG = 2
EXIT_COLLAPSE = 3
EXIT_ORACLE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvtrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="simulate and track, writing per-run tables")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--structure", choices=["independence", "collision", "occlusion"])
    run.add_argument("--seed", type=int)
    run.add_argument("--runs", type=int, help="number of seeded Monte Carlo runs")
    run.add_argument("--k", type=int, help="maximum number of hypotheses")
    run.add_argument("--tree-generations", type=int,
                     help="write a DOT hypothesis tree covering this many frames")
    run.add_argument("--out-dir", help=f"output directory (env {OUT_DIR_ENV})")
    run.add_argument("--oracle", action="store_true", default=None,
                     help="check every ranking against brute-force enumeration")
    run.add_argument("--workers", type=int, default=None,
                     help="parallel processes for --runs (default: CPU count)")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config)
    env_out = os.environ.get(OUT_DIR_ENV)
    if env_out:
        cfg.out_dir = env_out
    apply_overrides(cfg, {
        "structure": args.structure, "seed": args.seed, "runs": args.runs,
        "k": args.k, "tree_generations": args.tree_generations,
        "out_dir": args.out_dir, "oracle": args.oracle,
    })
    cfg.validate()
    return cfg


def run_command(args) -> int:
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"pvtrack: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"pvtrack: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_root = Path(cfg.out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    workers = args.workers or min(cfg.runs, os.cpu_count() or 1)
    rows = []
    try:
        if workers > 1 and cfg.runs > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_one, cfg, i, str(out_root)) for i in range(cfg.runs)]
                rows = [f.result() for f in futures]
        else:
            for i in range(cfg.runs):
                rows.append(run_one(cfg, i, str(out_root)))
                log.info("run %d: %d overtakes, %.1f proposals/frame",
                         i, rows[-1]["overtakes"], rows[-1]["mean_proposals_per_frame"])
    except FilterCollapseError as exc:
        print(f"pvtrack: filter collapsed at frame {exc.frame}: {exc}", file=sys.stderr)
        return EXIT_COLLAPSE
    except OracleMismatchError as exc:
        print(f"pvtrack: oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE

    columns = ["run", "seed", "dir", "frames", "overtakes", "mean_proposals_per_frame",
               "max_proposals_per_frame", "mean_hypotheses", "certificate_rate",
               "impossible_children", "demoted_children", "capped_parents",
               "would_collide_selected", "oracle_checks", "oracle_skipped"]
    with open(out_root / "aggregate.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([row[c] for c in columns])
    aggregate = {
        "structure": cfg.structure,
        "runs": cfg.runs,
        "k": cfg.k,
        "total_overtakes": sum(r["overtakes"] for r in rows),
        "runs_with_overtakes": sum(r["overtakes"] > 0 for r in rows),
        "mean_proposals_per_frame": sum(r["mean_proposals_per_frame"] for r in rows) / len(rows),
        "mean_certificate_rate": sum(r["certificate_rate"] for r in rows) / len(rows),
        "oracle_checks": sum(r["oracle_checks"] for r in rows),
    }
    (out_root / "aggregate.json").write_text(json.dumps(aggregate, indent=2, sort_keys=True) + "\n")
    print(json.dumps(aggregate, sort_keys=True))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return run_command(args)
    return 1


if __name__ == "__main__":
    sys.exit(main())
