"""Command-line interface.

Subcommands:
  theory    -- tabulate the capacity curve alpha_star(gamma) as CSV
  simulate  -- Monte Carlo stability runs over an (N, gamma, alpha) grid
  scan      -- alpha sweep around the theoretical threshold (grid helper)
  critical  -- bisection estimate of the empirical critical load

Exit codes: 0 success, 1 usage error, 2 runtime/data error.  All file outputs
are byte-deterministic for a fixed seed; elapsed time goes to stderr only.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .capacity import alpha_star, theory_point
from .experiments import (
    BisectionSpec,
    BracketError,
    ExperimentConfig,
    estimate_critical_alpha,
    emit_results,
    make_executor,
    run_grid,
)
from .patterns import PatternBudgetError
from .rng import mix64

THEORY_HEADER = "gamma,x_hat,x_star,alpha_star"


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def parse_float_spec(spec: str) -> tuple[float, ...]:
    """Grid syntax: either 'a,b,c' or an inclusive range 'lo:hi:step'."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"range spec must be lo:hi:step, got {spec!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"range step must be positive, got {step}")
        if hi < lo:
            raise ValueError(f"range upper end {hi} below lower end {lo}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + i * step for i in range(count))
    return tuple(float(p) for p in spec.split(","))


def parse_int_list(spec: str) -> tuple[int, ...]:
    return tuple(int(p) for p in spec.split(","))


def _echo_rows(rows) -> None:
    print(f"{'N':>6} {'gamma':>8} {'alpha':>12} {'M':>9} "
          f"{'unstable':>9} {'ci_lo':>9} {'ci_hi':>9}")
    for r in rows:
        print(f"{r.N:>6} {r.gamma:>8.4g} {r.alpha:>12.6g} {r.M:>9} "
              f"{r.unstable_fraction:>9.4f} {r.ci_lo:>9.4f} {r.ci_hi:>9.4f}")


def _cmd_theory(args) -> int:
    gammas = parse_float_spec(args.gamma)
    for g in gammas:
        if not (0.0 < g <= 2.0):
            raise ValueError(
                f"gamma grid point {g} outside the admissible range (0, 2]"
            )
    lines = [THEORY_HEADER]
    for g in gammas:
        tp = theory_point(g)
        lines.append(",".join(
            [_fmt(tp.gamma), _fmt(tp.x_hat), _fmt(tp.x_star), _fmt(tp.alpha_star)]
        ))
    with open(args.out, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(gammas)} theory rows to {args.out}")
    return 0


def _experiment_config(args, alpha_list=None, bisection=None) -> ExperimentConfig:
    return ExperimentConfig(
        variant=args.variant,
        N_list=parse_int_list(args.N),
        gamma_list=parse_float_spec(args.gamma) if args.gamma else (0.0,),
        alpha_list=alpha_list,
        bisection=bisection,
        trials=args.trials,
        patterns_per_set=args.patterns_per_set,
        master_seed=args.seed,
        threads=args.threads,
    )


def _run_and_emit(cfg: ExperimentConfig, out, manifest) -> int:
    t0 = time.perf_counter()
    rows = run_grid(cfg)
    elapsed = time.perf_counter() - t0
    emit_results(rows, out, manifest, cfg)
    _echo_rows(rows)
    print(f"wrote {len(rows)} rows to {out} (manifest: {manifest})")
    print(f"elapsed: {elapsed:.1f}s", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    cfg = _experiment_config(args, alpha_list=parse_float_spec(args.alpha))
    return _run_and_emit(cfg, args.out, args.manifest or args.out + ".manifest.json")


def _cmd_scan(args) -> int:
    if args.points < 1:
        raise ValueError("--points must be at least 1")
    if args.alpha_lo <= 0 or args.alpha_hi < args.alpha_lo:
        raise ValueError("need 0 < --alpha-lo <= --alpha-hi")
    if args.points == 1:
        factors = [args.alpha_lo]
    elif args.geometric:
        ratio = args.alpha_hi / args.alpha_lo
        factors = [args.alpha_lo * ratio ** (i / (args.points - 1))
                   for i in range(args.points)]
    else:
        step = (args.alpha_hi - args.alpha_lo) / (args.points - 1)
        factors = [args.alpha_lo + i * step for i in range(args.points)]

    gammas = parse_float_spec(args.gamma) if args.gamma else (0.0,)
    if args.relative:
        if args.variant == "original" or len(gammas) != 1:
            raise ValueError(
                "--relative needs the thresholded variant and a single gamma"
            )
        scale = alpha_star(gammas[0])
        print(f"alpha_star({gammas[0]:g}) = {scale:.6g}; "
              f"scanning {args.points} multiples in "
              f"[{args.alpha_lo:g}, {args.alpha_hi:g}]", file=sys.stderr)
        factors = [f * scale for f in factors]

    cfg = _experiment_config(args, alpha_list=tuple(factors))
    return _run_and_emit(cfg, args.out, args.manifest or args.out + ".manifest.json")


def _cmd_critical(args) -> int:
    spec = BisectionSpec(lo=args.lo, hi=args.hi,
                         target_fraction=args.target, max_iters=args.max_iters)
    cfg = _experiment_config(args, bisection=spec)
    if cfg.variant == "thresholded" and not args.gamma:
        raise ValueError("critical needs --gamma for the thresholded variant")

    t0 = time.perf_counter()
    pool = make_executor(cfg.threads)
    entries = []
    all_rows = []
    failed = False
    try:
        for combo_index, (n, g) in enumerate(
            (n, g) for n in cfg.N_list for g in cfg.gamma_list
        ):
            combo_seed = mix64(cfg.master_seed, combo_index)
            entry = {"gamma": g, "N": n, "alpha_hat": None, "rows": str(args.rows_csv)}
            try:
                alpha_hat, rows = estimate_critical_alpha(
                    cfg.variant, n, g, spec, cfg.trials, combo_seed,
                    cfg.patterns_per_set, pool,
                )
                entry["alpha_hat"] = alpha_hat
                all_rows.extend(rows)
                print(f"N={n} gamma={g:g} alpha_hat={alpha_hat:.6g}")
            except BracketError as exc:
                failed = True
                entry["error"] = str(exc)
                all_rows.extend(exc.rows)
                print(f"N={n} gamma={g:g} bracket error: {exc}", file=sys.stderr)
            entries.append(entry)
    finally:
        if pool is not None:
            pool.shutdown()

    emit_results(all_rows, args.rows_csv,
                 str(args.rows_csv) + ".manifest.json", cfg)
    with open(args.out_json, "w", newline="") as fh:
        json.dump(entries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(entries)} estimates to {args.out_json} "
          f"(audit rows: {args.rows_csv})")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 2 if failed else 0


def _add_common_experiment_flags(p: _Parser) -> None:
    p.add_argument("--variant", choices=["original", "thresholded"],
                   default="thresholded",
                   help="update rule (default: thresholded)")
    p.add_argument("--N", required=True,
                   help="comma-separated neuron counts, e.g. 1000,2000")
    p.add_argument("--gamma", default=None,
                   help="threshold coefficients: comma list or lo:hi:step "
                        "(ignored by the original variant; default 0)")
    p.add_argument("--trials", type=int, default=200,
                   help="pattern sets per cell (default: 200)")
    p.add_argument("--patterns-per-set", dest="patterns_per_set", type=int,
                   default=1, help="stored patterns tested per set (default: 1)")
    p.add_argument("--seed", type=int, default=0,
                   help="64-bit master seed (default: 0)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes; never affects results (default: 1)")


def _add_output_flags(p: _Parser, default_out: str) -> None:
    p.add_argument("--out", default=default_out,
                   help=f"results CSV path (default: {default_out})")
    p.add_argument("--manifest", default=None,
                   help="manifest JSON path (default: <out>.manifest.json)")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="begmem",
        description="Sparse ternary associative memory: capacity theory and "
                    "Monte Carlo stability experiments.",
    )
    parser.add_argument("--version", action="version",
                        version=f"begmem {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_theory = sub.add_parser(
        "theory", help="tabulate the capacity curve alpha_star(gamma)")
    p_theory.add_argument("--gamma", default="0.1:2.0:0.1",
                          help="gamma grid, comma list or lo:hi:step within "
                               "(0, 2] (default: 0.1:2.0:0.1)")
    p_theory.add_argument("--out", default="theory.csv",
                          help="output CSV path (default: theory.csv)")
    p_theory.set_defaults(func=_cmd_theory)

    p_sim = sub.add_parser(
        "simulate", help="run stability trials over an (N, gamma, alpha) grid")
    _add_common_experiment_flags(p_sim)
    _add_output_flags(p_sim, "results.csv")
    p_sim.add_argument("--alpha", required=True,
                       help="load coefficients: comma list or lo:hi:step")
    p_sim.set_defaults(func=_cmd_simulate)

    p_scan = sub.add_parser(
        "scan", help="alpha sweep, optionally as multiples of alpha_star(gamma)")
    _add_common_experiment_flags(p_scan)
    _add_output_flags(p_scan, "scan.csv")
    p_scan.add_argument("--alpha-lo", dest="alpha_lo", type=float, required=True,
                        help="lower end of the sweep")
    p_scan.add_argument("--alpha-hi", dest="alpha_hi", type=float, required=True,
                        help="upper end of the sweep")
    p_scan.add_argument("--points", type=int, default=8,
                        help="number of sweep points (default: 8)")
    p_scan.add_argument("--geometric", action="store_true",
                        help="space points geometrically instead of linearly")
    p_scan.add_argument("--relative", action="store_true",
                        help="interpret the sweep as multiples of alpha_star(gamma)")
    p_scan.set_defaults(func=_cmd_scan)

    p_crit = sub.add_parser(
        "critical", help="bisection estimate of the empirical critical load")
    _add_common_experiment_flags(p_crit)
    p_crit.add_argument("--lo", type=float, required=True,
                        help="lower alpha bracket")
    p_crit.add_argument("--hi", type=float, required=True,
                        help="upper alpha bracket")
    p_crit.add_argument("--target", type=float, default=0.5,
                        help="unstable fraction defining the crossing (default: 0.5)")
    p_crit.add_argument("--max-iters", dest="max_iters", type=int, default=12,
                        help="bisection depth (default: 12)")
    p_crit.add_argument("--out-json", dest="out_json", default="critical.json",
                        help="summary JSON path (default: critical.json)")
    p_crit.add_argument("--rows-csv", dest="rows_csv", default="critical_rows.csv",
                        help="audit rows CSV path (default: critical_rows.csv)")
    p_crit.set_defaults(func=_cmd_critical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BracketError, PatternBudgetError, ValueError, OSError) as exc:
        print(f"begmem: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
