"""Command-line entry point.

Subcommands:

  run        advance one configured experiment, writing manifest,
             time-series CSV and any requested field dumps
  converge   error-vs-resolution sweep against the exact travelling wave
  compare    full solver vs a limit model across a parameter sweep
  dump-info  show the header and payload statistics of a field dump

Exit codes: 0 success, 2 configuration error, 3 numerical abort (caustic
halt or non-finite data).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    ConfigError,
    apply_overrides,
    build_preset,
    load_config,
    manifest_text,
    parse_values,
)
from .dumps import read_dump
from .experiments import compare_regimes, convergence_sweep, run_experiment
from .grid import set_fft_workers


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a single configuration key (repeatable)",
    )
    p.add_argument("--output", type=Path, help="output directory")
    p.add_argument("--threads", type=int, help="FFT worker count (pins results)")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mdkit", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance one experiment")
    _add_common(p_run)

    p_conv = sub.add_parser("converge", help="convergence sweep")
    _add_common(p_conv)
    p_conv.add_argument("--axis", choices=("space", "time"), required=True)
    p_conv.add_argument(
        "--levels",
        required=True,
        help="comma list: grid sizes for space, dt values (fractions ok) for time",
    )
    p_conv.add_argument(
        "--parallel-levels", action="store_true", help="run levels in subprocesses"
    )

    p_cmp = sub.add_parser("compare", help="solver vs limit model")
    _add_common(p_cmp)
    p_cmp.add_argument("--pair", choices=("md_vs_wkb", "md_vs_sp"), required=True)
    p_cmp.add_argument(
        "--values", required=True, help="comma list of epsilon (wkb) or delta (sp)"
    )
    p_cmp.add_argument("--parallel-levels", action="store_true")

    p_info = sub.add_parser("dump-info", help="inspect a field dump")
    p_info.add_argument("file", type=Path)
    return ap


def _resolve(args) -> dict:
    raw = load_config(args.config) if args.config else {}
    raw = apply_overrides(raw, args.set)
    return parse_values(raw)


def _parse_number(text: str) -> float:
    from fractions import Fraction

    return float(Fraction(text)) if "/" in text else float(text)


def _sweep_overrides(values: dict) -> dict:
    """Map config keys onto make_preset keyword overrides (sweeps only)."""
    mapping = {
        "grid.n": "n",
        "time.dt": "dt",
        "time.t_final": "t_final",
        "md.epsilon": "epsilon",
        "md.delta": "delta",
        "md.splitting": "splitting",
        "md.dealias": "dealias",
        "wkb.caustic_threshold": "caustic_threshold",
        "preset.chi": "chi",
        "preset.center": "center",
        "preset.width": "width",
    }
    out = {dst: values[src] for src, dst in mapping.items() if src in values}
    if "preset.name" in values:
        out["preset"] = values["preset.name"]
    return out


def _write_rows(path: Path, rows: list[dict]) -> None:
    cols = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in rows:
            writer.writerow([repr(row.get(c, float("nan"))) for c in cols])


def _print_rows(rows: list[dict]) -> None:
    cols = list(rows[0].keys())
    print("  ".join(f"{c:>14s}" for c in cols))
    for row in rows:
        cells = []
        for c in cols:
            val = row.get(c, float("nan"))
            cells.append(f"{val:14.6e}" if isinstance(val, float) else f"{val!s:>14s}")
        print("  ".join(cells))


def _cmd_run(args) -> int:
    values = _resolve(args)
    preset, solver, options = build_preset(values)
    outdir = args.output or Path(options["output.dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    options["output.dir"] = str(outdir)
    (outdir / "manifest.txt").write_text(manifest_text(preset, solver, options))

    result = run_experiment(
        preset,
        solver,
        output_dir=outdir,
        dump_times=options["output.dump_times"],
        stride=options["output.stride"],
    )
    last = result.series.rows[-1]
    print(
        f"{preset.name} [{solver}]: t = {last['t']:.6g}, charge = {last['charge']:.12g}"
    )
    if result.aborted == "caustic":
        print(f"halted on caustic flag at t = {result.final_state.time:.6g}")
        return 3
    if result.aborted == "nan":
        print("halted on non-finite data")
        return 3
    print(f"wrote {outdir / 'timeseries.csv'}")
    return 0


def _cmd_converge(args) -> int:
    values = _resolve(args)
    overrides = _sweep_overrides(values)
    overrides.pop("preset", None)  # sweeps always use the exact solution
    if args.axis == "space":
        levels = [int(p) for p in args.levels.split(",")]
    else:
        levels = [_parse_number(p) for p in args.levels.split(",")]
    rows = convergence_sweep(args.axis, levels, overrides, parallel=args.parallel_levels)
    _print_rows(rows)
    if args.output:
        args.output.mkdir(parents=True, exist_ok=True)
        path = args.output / f"converge_{args.axis}.csv"
        _write_rows(path, rows)
        print(f"wrote {path}")
    return 0


def _cmd_compare(args) -> int:
    values = _resolve(args)
    overrides = _sweep_overrides(values)
    sweep_values = [_parse_number(p) for p in args.values.split(",")]
    rows = compare_regimes(
        args.pair, sweep_values, overrides, parallel=args.parallel_levels
    )
    _print_rows(rows)
    if args.output:
        args.output.mkdir(parents=True, exist_ok=True)
        path = args.output / f"compare_{args.pair}.csv"
        _write_rows(path, rows)
        print(f"wrote {path}")
    return 0


def _cmd_dump_info(args) -> int:
    header, data = read_dump(args.file)
    print(json.dumps(header, indent=2, sort_keys=True))
    mag = np.abs(data)
    print(f"min|f| = {mag.min():.6e}  max|f| = {mag.max():.6e}")
    print(f"l2 = {np.sqrt(np.sum(mag ** 2)):.6e}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        set_fft_workers(args.threads)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "converge":
            return _cmd_converge(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_dump_info(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
