"""Command line entry point: ``python -m nldiffusion <experiment> [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .config import ConfigError, load_config
from .experiments import EXPERIMENTS, ExperimentResult

SUBCOMMANDS = list(EXPERIMENTS) + ["all"]


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, float):
        return "%.16e" % x
    if hasattr(x, "dtype"):
        return "%.16e" % float(x) if x.dtype.kind == "f" else str(x.item())
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    if isinstance(x, float) and (x != x or x in (float("inf"), float("-inf"))):
        return str(x)
    return x


def emit(res: ExperimentResult, out: Path, cfg) -> None:
    for name, (header, rows) in res.tables.items():
        write_csv(out / name, header, rows)
    summary = {
        "experiment": res.name,
        "passed": res.passed,
        "metrics": res.metrics,
        "checks": [asdict(c) for c in res.checks],
        "config": cfg.to_dict(),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    (out / f"{res.name}.json").write_text(json.dumps(_jsonable(summary), indent=2) + "\n", encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nldiffusion", description="Nonlocal diffusion on model manifolds.")
    p.add_argument("experiment", choices=SUBCOMMANDS)
    p.add_argument("--config", default="defaults", help="INI config path, or 'defaults'")
    p.add_argument("--out", default="reports", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="seed for the random comparison pairs")
    p.add_argument("--grid-scale", type=float, default=None, help="multiplier for report sampling grids")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        if args.seed < 0:
            print("seed must be nonnegative", file=sys.stderr)
            return 2
        cfg.seed = args.seed
    if args.grid_scale is not None:
        if not args.grid_scale > 0:
            print("grid scale must be positive", file=sys.stderr)
            return 2
        cfg.grid_scale = args.grid_scale
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = list(EXPERIMENTS) if args.experiment == "all" else [args.experiment]
    ok = True
    for name in names:
        for fn in EXPERIMENTS[name]:
            try:
                res = fn(cfg)
            except Exception as exc:  # report and keep going
                res = ExperimentResult(fn.__name__.removeprefix("run_"))
                res.check("completed", False, float("nan"), "no exception", f"{type(exc).__name__}: {exc}")
            emit(res, out, cfg)
            bad = [c.name for c in res.checks if not c.passed]
            status = "PASS" if res.passed else "FAIL"
            tail = "" if not bad else " failed: " + ", ".join(bad)
            print(f"[{status}] {res.name} ({res.runtime:.1f}s, {len(res.checks)} checks){tail}")
            ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
