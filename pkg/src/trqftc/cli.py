"""Command-line entry point: ``trqftc run | compare | list-scenarios | version``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .harness.batch import controller_variants, run_batch
from .harness.config import Config, ConfigError, builtin_config, load_config
from .harness.export import ExportError, export_csv, export_metrics_csv
from .harness.metrics import format_table

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2


def _config(path: str | None) -> Config:
    return builtin_config() if path is None else load_config(path)


def _file_stem(name: str) -> str:
    return name.replace("/", "__")


def _execute(scenarios, seed: int, out: Path, workers: int) -> None:
    results = run_batch(scenarios, seed=seed, workers=workers)
    for run, _ in results:
        export_csv(run, out / f"{_file_stem(run.scenario)}.csv")
    metrics = [m for _, m in results]
    export_metrics_csv(metrics, out / "metrics.csv")
    print(format_table(metrics))
    print(f"\nwrote {len(results)} run log(s) and metrics.csv to {out}")


def cmd_run(args) -> int:
    cfg = _config(args.config)
    _execute(cfg.select(args.scenario), cfg.seed, Path(args.out), args.workers)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args.config)
    variants = [v for s in cfg.select(args.scenario) for v in controller_variants(s)]
    _execute(variants, cfg.seed, Path(args.out), args.workers)
    return EXIT_OK


def cmd_list(args) -> int:
    cfg = _config(args.config)
    for s in cfg.scenarios:
        fault = s.fault.kind if s.fault.kind == "none" else f"{s.fault.kind}@{s.fault.start_time:g}s"
        print(
            f"{s.name:<24} {s.controller:<14} {s.trajectory.kind:<13} "
            f"fault={fault} wind={s.wind.force_magnitude:g}N duration={s.duration:g}s"
        )
    return EXIT_OK


def cmd_version(args) -> int:
    print(__version__)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trqftc", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("--config", help="YAML scenario file (default: the built-in set)")
        sp.add_argument("--scenario", help="run only this scenario")
        sp.add_argument("--out", default=out_default, help="output directory (default: %(default)s)")
        sp.add_argument("--workers", type=int, default=1, help="parallel processes (default: 1)")

    run = sub.add_parser("run", help="run scenarios and write CSV logs plus a metrics table")
    common(run, "runs")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="run the three controller variants on each scenario")
    common(cmp_, "compare")
    cmp_.set_defaults(func=cmd_compare)

    ls = sub.add_parser("list-scenarios", help="list the scenarios of a config")
    ls.add_argument("--config", help="YAML scenario file (default: the built-in set)")
    ls.set_defaults(func=cmd_list)

    ver = sub.add_parser("version", help="print the package version")
    ver.set_defaults(func=cmd_version)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("numba").setLevel(logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExportError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
