"""`plots render --csv results.csv --y success_rate --out fig.svg`"""

from __future__ import annotations

import argparse
import sys

from anonlab_plots.render import PlotSpec, Y_CHOICES, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render per-cell mean line charts")
    p.add_argument("--csv", required=True)
    p.add_argument("--y", choices=Y_CHOICES, default="success_rate")
    p.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = render(PlotSpec(csv_path=args.csv, y=args.y, out_path=args.out))
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
