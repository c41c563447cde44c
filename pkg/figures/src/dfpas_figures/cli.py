"""Command line: render a figure spec against a sweep CSV."""

from __future__ import annotations

import argparse
import sys

from .render import render_figure
from .spec import FigureSpec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dfpas-figures", description="Render dfpas sweep CSVs into line plots.")
    sub = parser.add_subparsers(dest="command", required=True)
    cmd = sub.add_parser("render", help="render one figure from a spec file")
    cmd.add_argument("--spec", required=True, help="JSON figure spec")
    cmd.add_argument("--csv", default=None, help="override the spec's input CSV")
    cmd.add_argument("--out", default=None, help="override the spec's output path")
    args = parser.parse_args(argv)

    try:
        spec = FigureSpec.from_json(args.spec)
        if args.csv is not None:
            spec.input_csv = args.csv
        if args.out is not None:
            spec.output_path = args.out
        path = render_figure(spec)
    except (ValueError, OSError) as exc:
        print(f"render failed: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
