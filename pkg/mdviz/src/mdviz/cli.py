"""Batch plotting command line.

Subcommands:
  slice        heatmap of one x3 plane of a field dump
  convergence  log-log error-vs-resolution plot from sweep CSVs

Exit codes: 0 on success, 2 on any input error (unreadable file, bad
header, invalid component or plane, malformed CSV).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import load_dump
from .plots import QUANTITIES, plot_convergence, plot_slice


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdviz", description="Render figures from field dumps and sweep CSVs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pslice = sub.add_parser("slice", help="heatmap of one plane of a field dump")
    pslice.add_argument("dump", type=Path, help="MDKIT1 dump file")
    pslice.add_argument(
        "--quantity", choices=QUANTITIES, default="density", help="what to plot"
    )
    pslice.add_argument(
        "--component", type=int, default=None, help="component index (default 0/all)"
    )
    pslice.add_argument(
        "--plane", type=float, default=0.0, help="x3 coordinate of the slice plane"
    )
    pslice.add_argument(
        "--out", type=Path, default=None, help="output image (default: <dump>.png)"
    )

    pconv = sub.add_parser(
        "convergence", help="log-log convergence plot from sweep CSVs"
    )
    pconv.add_argument("csv", nargs="+", type=Path, help="sweep CSV file(s)")
    pconv.add_argument(
        "--out", type=Path, default=Path("convergence.png"), help="output image"
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "slice":
            record = load_dump(args.dump)
            out = args.out if args.out is not None else args.dump.with_suffix(".png")
            path = plot_slice(
                record,
                out,
                plane=args.plane,
                quantity=args.quantity,
                component=args.component,
            )
            print(f"wrote {path}")
        else:
            fits = plot_convergence(args.csv, args.out)
            for fit in fits:
                print(f"{fit['file']}: {fit['column']} slope {fit['slope']:.3f}")
            print(f"wrote {args.out}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
