"""begplot command line: capacity chart and alpha-sweep renderer.

Exit codes: 0 success, 1 usage error, 2 data/schema error.
"""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import PlotJob, render_alpha_sweep, render_capacity_figure


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_refs(pairs):
    refs = {}
    for pair in pairs or ():
        name, _, value = pair.partition("=")
        if not name or not value:
            raise SchemaError(f"reference line must be name=value, got {pair!r}")
        refs[name] = float(value)
    return refs


def _cmd_capacity(args) -> int:
    job = PlotJob(
        theory_csv=args.theory,
        results_csv=args.results,
        critical_json=args.critical,
        out_image=args.out,
        reference_lines=_parse_refs(args.ref),
        target_fraction=args.target,
    )
    info = render_capacity_figure(job)
    print(f"wrote {info['out_image']} ({info['theory_points']} theory points, "
          f"{info['critical_markers']} empirical markers, right endpoint "
          f"{info['endpoint_label']})")
    return 0


def _cmd_sweep(args) -> int:
    info = render_alpha_sweep(args.results, args.out, theory_csv=args.theory)
    print(f"wrote {info['out_image']} ({info['groups']} (N, gamma) groups)")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="begplot",
                     description="Render capacity charts from begmem CSV/JSON "
                                 "outputs.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_cap = sub.add_parser("capacity", help="threshold curve with optional "
                                            "empirical markers")
    p_cap.add_argument("--theory", required=True,
                       help="CSV from 'begmem theory'")
    p_cap.add_argument("--critical", default=None,
                       help="JSON from 'begmem critical' (markers)")
    p_cap.add_argument("--results", default=None,
                       help="audit rows CSV; enables CI-based error bars")
    p_cap.add_argument("--ref", action="append", metavar="NAME=VALUE",
                       help="horizontal reference line (repeatable)")
    p_cap.add_argument("--target", type=float, default=0.5,
                       help="crossing fraction used for error bars (default 0.5)")
    p_cap.add_argument("--out", default="capacity.png",
                       help="output image path (default: capacity.png)")
    p_cap.set_defaults(func=_cmd_capacity)

    p_sweep = sub.add_parser("sweep", help="unstable fraction vs load per "
                                           "(N, gamma)")
    p_sweep.add_argument("--results", required=True,
                         help="CSV from 'begmem simulate' or 'begmem scan'")
    p_sweep.add_argument("--theory", default=None,
                         help="theory CSV for threshold verticals")
    p_sweep.add_argument("--out", default="sweep.png",
                         help="output image path (default: sweep.png)")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"begplot: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
