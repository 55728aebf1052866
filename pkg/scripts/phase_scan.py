#!/usr/bin/env python3
"""Sweep the load across the predicted threshold and write the phase data.

Produces results CSVs for one or more system sizes at a fixed threshold
coefficient, sweeping alpha geometrically around alpha_star(gamma).  The
CSVs feed the alpha-sweep renderer of the plotting package.

Example:
    python scripts/phase_scan.py --N 1000,2000 --gamma 1.5 --trials 200 \
        --out-dir data/
"""

import argparse
import pathlib
import sys
import time

from begmem.capacity import alpha_star
from begmem.experiments import ExperimentConfig, emit_results, run_grid


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", default="1000,2000")
    ap.add_argument("--gamma", type=float, default=1.5)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--factor-lo", type=float, default=0.1)
    ap.add_argument("--factor-hi", type=float, default=10.0)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out-dir", default="data")
    args = ap.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    scale = alpha_star(args.gamma)
    ratio = args.factor_hi / args.factor_lo
    alphas = tuple(
        args.factor_lo * ratio ** (i / (args.points - 1)) * scale
        for i in range(args.points)
    )
    print(f"alpha_star({args.gamma}) = {scale:.6g}; sweeping {alphas[0]:.4g} "
          f".. {alphas[-1]:.4g}")

    cfg = ExperimentConfig(
        variant="thresholded",
        N_list=tuple(int(n) for n in args.N.split(",")),
        gamma_list=(args.gamma,),
        alpha_list=alphas,
        trials=args.trials,
        master_seed=args.seed,
        threads=args.threads,
    )
    t0 = time.perf_counter()
    rows = run_grid(cfg)
    csv_path = out_dir / f"phase_scan_gamma{args.gamma:g}.csv"
    emit_results(rows, csv_path, str(csv_path) + ".manifest.json", cfg)
    print(f"wrote {len(rows)} rows to {csv_path} "
          f"({time.perf_counter() - t0:.0f}s)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
