"""Command line: render benchmark figures from trace / summary CSVs."""

from __future__ import annotations

import argparse
import sys

from .radar import render_radar
from .schema import SchemaError, read_metrics, read_trace
from .timeseries import PANELS, FigureSpec, render_timeseries


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser():
    p = argparse.ArgumentParser(
        prog="pneuplots",
        description="Figures for pneumatic pressure-tracking benchmark CSVs.")
    sub = p.add_subparsers(required=True)

    ts = sub.add_parser("timeseries",
                        help="stacked pressure/error/duty/mode panels")
    ts.add_argument("--trace", action="append", required=True,
                    metavar="LABEL=PATH",
                    help="trace CSV with display label; repeatable")
    ts.add_argument("--out", required=True, help="image file to write")
    ts.add_argument("--panels", default=",".join(PANELS),
                    help=f"comma list from {','.join(PANELS)}")
    ts.add_argument("--zoom", nargs=2, type=float, metavar=("T0", "T1"),
                    default=None, help="inset window on the pressure panel")
    ts.set_defaults(func=_cmd_timeseries)

    rd = sub.add_parser("radar", help="rank-based radar over the five metrics")
    rd.add_argument("--metrics", required=True,
                    help="summary CSV from `pneumpc compare --out`")
    rd.add_argument("--out", required=True, help="image file to write")
    rd.set_defaults(func=_cmd_radar)
    return p


def _parse_trace_arg(arg):
    label, sep, path = arg.partition("=")
    if not sep:
        return None, arg
    return label, path


def _cmd_timeseries(args) -> int:
    traces = [read_trace(path, label)
              for label, path in map(_parse_trace_arg, args.trace)]
    panels = tuple(s.strip() for s in args.panels.split(",") if s.strip())
    spec = FigureSpec(traces=traces, out=args.out, panels=panels,
                      zoom=tuple(args.zoom) if args.zoom else None)
    render_timeseries(spec)
    print(f"wrote {args.out} ({len(traces)} controller(s), "
          f"{len(panels)} panel(s))")
    return 0


def _cmd_radar(args) -> int:
    metrics = read_metrics(args.metrics)
    radii = render_radar(metrics, args.out)
    print(f"wrote {args.out} ({len(radii)} controllers)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
