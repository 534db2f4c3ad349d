"""Command-line interface.

    olsrsim run   [--config F] [--metric M] [--rate N] [--seed N]
                  [--duration S] [--out-dir D]
    olsrsim sweep [--config F] [--metric M[,M...]] [--rate N[,N...]] [--seed N]
                  [--replications N] [--duration S] [--out-dir D]
                  [--desk-scale] [--workers N]

Flags override config-file values. Exit codes: 0 success, 2 configuration
error, 3 degenerate topology, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import metrics
from .config import (
    ConfigError,
    RunConfig,
    SweepConfig,
    apply_desk_scale,
    load_config,
    validate_run_config,
    validate_sweep_config,
)
from .engine import InvariantViolation
from .experiment import DegenerateTopology, run_single, run_sweep
from .stats import RUN_COLUMNS, write_runs_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_INVARIANT = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olsrsim",
        description="Discrete-event OLSR mesh simulator with pluggable link metrics "
        f"(route kernel backend: {metrics.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a single simulation run")
    run_p.add_argument("--config", type=Path, help="key = value config file")
    run_p.add_argument("--metric", help="hop | etx | invetx | ml | md")
    run_p.add_argument("--rate", type=int, help="CBR packets per second (1..16)")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--duration", type=float, help="simulated seconds")
    run_p.add_argument("--out-dir", type=Path, help="write runs.csv here")

    sweep_p = sub.add_parser("sweep", help="execute a metric x rate x seed sweep")
    sweep_p.add_argument("--config", type=Path, help="key = value config file")
    sweep_p.add_argument("--metric", help="comma-separated metric list")
    sweep_p.add_argument("--rate", help="comma-separated rate list")
    sweep_p.add_argument("--seed", type=int, help="base seed (replication r adds r)")
    sweep_p.add_argument("--replications", type=int)
    sweep_p.add_argument("--duration", type=float, help="simulated seconds per run")
    sweep_p.add_argument("--out-dir", type=Path, default=Path("results"))
    sweep_p.add_argument(
        "--desk-scale",
        action="store_true",
        help="preset: 300 s runs, 3 replications, rates 1,4,8,12,16",
    )
    sweep_p.add_argument("--workers", type=int, default=1, help="parallel run processes")
    return parser


def _parse_metric_flag(raw: str):
    from .config import _parse_metric  # shared error wording

    return _parse_metric("--metric", raw)


def _load_base(path: Path | None) -> RunConfig | SweepConfig:
    if path is None:
        return RunConfig()
    return load_config(path)


def _cmd_run(args) -> int:
    loaded = _load_base(args.config)
    if isinstance(loaded, SweepConfig):
        raise ConfigError("config file describes a sweep; use 'olsrsim sweep'")
    cfg = loaded
    if args.metric is not None:
        cfg = replace(cfg, metric=_parse_metric_flag(args.metric))
    if args.rate is not None:
        cfg = replace(cfg, rate_pps=args.rate)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.duration is not None:
        cfg = replace(cfg, duration_s=args.duration)
    validate_run_config(cfg)
    row = run_single(cfg)
    for column in RUN_COLUMNS:
        print(f"{column} = {row[column]}")
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        write_runs_csv([row], args.out_dir / "runs.csv")
        print(f"wrote {args.out_dir / 'runs.csv'}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    loaded = _load_base(args.config)
    sweep = loaded if isinstance(loaded, SweepConfig) else SweepConfig(base=loaded)
    if not isinstance(loaded, SweepConfig):
        sweep = replace(sweep, base_seed=sweep.base.seed)
    if args.desk_scale:
        sweep = apply_desk_scale(sweep)
    if args.metric is not None:
        parts = [part.strip() for part in args.metric.split(",") if part.strip()]
        sweep = replace(sweep, metrics=tuple(_parse_metric_flag(part) for part in parts))
    if args.rate is not None:
        try:
            rates = tuple(int(part) for part in args.rate.split(",") if part.strip())
        except ValueError:
            raise ConfigError(f"--rate: expected a comma-separated integer list, got {args.rate!r}")
        sweep = replace(sweep, rates=rates)
    if args.seed is not None:
        sweep = replace(sweep, base_seed=args.seed)
    if args.replications is not None:
        sweep = replace(sweep, replications=args.replications)
    if args.duration is not None:
        sweep = replace(sweep, base=replace(sweep.base, duration_s=args.duration))
    if args.workers < 1:
        raise ConfigError(f"--workers: must be >= 1, got {args.workers}")
    validate_run_config(sweep.base)
    validate_sweep_config(sweep)
    rows, _ = run_sweep(sweep, args.out_dir, workers=args.workers)
    print(f"{len(rows)} runs -> {args.out_dir}/runs.csv, summary.csv, fig_*.dat")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_sweep(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateTopology as exc:
        print(f"degenerate topology: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
