"""plotkit render --run DIR --kind KIND --out FILE"""

from __future__ import annotations

import argparse
import sys

from .artifacts import ArtifactError
from .render import PLOT_KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plotkit")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("render", help="render a figure from run artifacts")
    p.add_argument("--run", help="run directory (not needed for cobweb)")
    p.add_argument("--kind", required=True, choices=PLOT_KINDS)
    p.add_argument("--out", required=True, help="output image path (.png or .svg)")
    p.add_argument("--iterates", help="comma-separated iterate numbers (default: all)")
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--table", help="classification table CSV for the cobweb mark")
    p.add_argument("--p0", type=float, default=0.45)
    p.add_argument("--bins", type=int, default=60)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    iterates = None
    if args.iterates:
        iterates = tuple(int(v) for v in args.iterates.split(","))
    try:
        spec = PlotSpec(
            run_dir=args.run,
            kind=args.kind,
            out_path=args.out,
            iterates=iterates,
            j=args.j,
            k=args.k,
            table_csv=args.table,
            p0=args.p0,
            bins=args.bins,
        )
        result = render(spec)
    except (ValueError, ArtifactError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(result.path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
