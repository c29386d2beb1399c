"""Command line: ``resqfigures KIND --out IMAGE input.csv [more.csv]``."""

from __future__ import annotations

import argparse
import sys

from .render import FigureJob, FigureKind, SchemaError, render


def _build_parser() -> argparse.ArgumentParser:
    kinds = ", ".join(k.value for k in FigureKind)
    parser = argparse.ArgumentParser(
        prog="resqfigures",
        description="Render a figure from result CSVs.",
    )
    parser.add_argument("kind", help=f"figure kind: {kinds}")
    parser.add_argument("inputs", nargs="+", help="input CSV file(s), order documented per kind")
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        kind = FigureKind(args.kind.lower())
    except ValueError:
        print(f"error: unknown figure kind {args.kind!r}", file=sys.stderr)
        return 1
    try:
        result = render(FigureJob(kind, tuple(args.inputs), args.out))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(result.output)
    return 0


def cli_entry() -> None:
    sys.exit(main())
