#!/usr/bin/env python3
"""Finite-size trend of the empirical critical load.

Estimates the load where the unstable fraction crosses 1/2 for a sequence of
system sizes and prints the drift of alpha_hat(N).  The asymptotic theory
only pins the N -> infinity limit, so this records the trend for inspection;
nothing here asserts convergence.

Example:
    python scripts/critical_trend.py --N 1000,2000,4000 --gamma 2 --trials 100
"""

import argparse
import json
import pathlib
import sys
import time

from begmem.capacity import alpha_star
from begmem.experiments import BisectionSpec, estimate_critical_alpha, make_executor
from begmem.rng import mix64


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", default="1000,2000,4000")
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--lo", type=float, default=0.02)
    ap.add_argument("--hi", type=float, default=8.0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--max-iters", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out", default="data/critical_trend.json")
    args = ap.parse_args()

    sizes = [int(n) for n in args.N.split(",")]
    spec = BisectionSpec(lo=args.lo, hi=args.hi, max_iters=args.max_iters)
    limit = alpha_star(args.gamma) if args.gamma <= 2 else None
    pool = make_executor(args.threads)
    trend = []
    try:
        for i, n in enumerate(sizes):
            t0 = time.perf_counter()
            alpha_hat, rows = estimate_critical_alpha(
                "thresholded", n, args.gamma, spec, args.trials,
                mix64(args.seed, i), executor=pool,
            )
            trend.append({"N": n, "gamma": args.gamma, "alpha_hat": alpha_hat,
                          "evaluations": len(rows)})
            note = f" (limit alpha_star={limit:.4f})" if limit else ""
            print(f"N={n:>6}: alpha_hat = {alpha_hat:.4f}{note} "
                  f"[{time.perf_counter() - t0:.0f}s]")
    finally:
        if pool is not None:
            pool.shutdown()

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(trend, indent=2) + "\n")
    print(f"trend written to {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
