"""figgen command line: render sublora CSVs to png/svg."""

from __future__ import annotations

import argparse
import sys

from .reader import ReaderError
from .render import FigureSpec, KINDS, KindMismatchError, render


def build_parser():
    parser = argparse.ArgumentParser(prog="figgen",
                                     description="Render sublora result CSVs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one CSV to an image")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True, help="output image (.png or .svg)")
    p.add_argument("--xlabel")
    p.add_argument("--ylabel")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    labels = {k: v for k, v in (("xlabel", args.xlabel), ("ylabel", args.ylabel)) if v}
    try:
        info = render(FigureSpec(args.csv, args.kind, args.out, labels))
    except (ReaderError, KindMismatchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{info.out_path}: {info.n_series} series, "
          f"{info.n_neutral_markers} flagged markers")
    return 0


if __name__ == "__main__":
    sys.exit(main())
