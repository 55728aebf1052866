"""Monte Carlo stability experiments over (N, gamma, alpha) grids.

Each trial resamples the quenched disorder: a fresh pattern set is generated
from a trial-specific seed and one (or more) of its stored patterns is tested
for one-step fixed-point stability.  A cell aggregates its trials into per
pattern error-type fractions with a 95% Wilson interval on the unstable
fraction.

Reproducibility contract: every quantity in a ResultRow is a pure function of
(config, master_seed).  Cell seeds derive from (master_seed, cell index), and
trial seeds from (cell seed, trial index), through the fixed 64-bit mixing in
begmem.rng, so results are byte-identical across repeated runs and across any
number of worker processes.  Because of this contract the wall_seconds column
is pinned to 0.0 in rows and CSVs; elapsed time is reported on stderr by the
CLI instead of being recorded in the data.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dynamics import check_stability
from .params import ModelParams
from .patterns import generate_pattern_set
from .rng import mix64

__all__ = [
    "BisectionSpec",
    "ExperimentConfig",
    "ResultRow",
    "BracketError",
    "wilson_interval",
    "run_cell",
    "run_grid",
    "estimate_critical_alpha",
    "emit_results",
    "read_manifest",
    "make_executor",
    "CSV_HEADER",
]

CSV_HEADER = ("N,gamma,alpha,M,trials,tested_patterns,unstable_fraction,"
              "zero_on_fraction,erase_fraction,flip_fraction,ci_lo,ci_hi,"
              "wall_seconds,seed")

# two-sided 95% normal quantile for the Wilson score interval
Z95 = 1.959963984540054

DEFAULT_TRIALS = 200


class BracketError(ValueError):
    """Bisection bracket is degenerate or does not straddle the target."""

    def __init__(self, message: str, rows: list["ResultRow"] | None = None):
        super().__init__(message)
        self.rows = rows or []


@dataclass(frozen=True)
class BisectionSpec:
    """Critical-load search bracket: bisect alpha in [lo, hi]."""

    lo: float
    hi: float
    target_fraction: float = 0.5
    max_iters: int = 12

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise BracketError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not (0.0 < self.target_fraction < 1.0):
            raise ValueError(f"target_fraction must lie in (0,1), got {self.target_fraction}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a grid or bisection experiment.

    Lists are normalized to sorted unique tuples; the original variant
    ignores the firing threshold, so its gamma list collapses to (0.0,).
    ``threads`` is an execution hint and does not influence any result.
    """

    variant: str
    N_list: tuple[int, ...]
    gamma_list: tuple[float, ...] = (0.0,)
    alpha_list: tuple[float, ...] | None = None
    bisection: BisectionSpec | None = None
    trials: int = DEFAULT_TRIALS
    patterns_per_set: int = 1
    master_seed: int = 0
    threads: int = 1

    def __post_init__(self) -> None:
        if self.variant not in ("original", "thresholded"):
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "N_list",
                           tuple(sorted({int(n) for n in self.N_list})))
        gammas = (0.0,) if self.variant == "original" else \
            tuple(sorted({float(g) for g in self.gamma_list}))
        object.__setattr__(self, "gamma_list", gammas)
        if self.alpha_list is not None:
            object.__setattr__(self, "alpha_list",
                               tuple(sorted({float(a) for a in self.alpha_list})))
        if (self.alpha_list is None) == (self.bisection is None):
            raise ValueError("exactly one of alpha_list and bisection must be given")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.patterns_per_set < 1:
            raise ValueError("patterns_per_set must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        for n in self.N_list:
            if n < 3:
                raise ValueError(f"N must be at least 3, got {n}")
        for g in self.gamma_list:
            if g < 0:
                raise ValueError(f"gamma must be non-negative, got {g}")
        for a in self.alpha_list or ():
            if a <= 0:
                raise ValueError(f"alpha must be positive, got {a}")


@dataclass(frozen=True)
class ResultRow:
    """One (N, gamma, alpha) cell of a Monte Carlo experiment."""

    N: int
    gamma: float
    alpha: float
    M: int
    trials: int
    tested_patterns: int
    unstable_fraction: float
    zero_on_fraction: float
    erase_fraction: float
    flip_fraction: float
    ci_lo: float
    ci_hi: float
    wall_seconds: float
    seed: int


def wilson_interval(successes: int, total: int, z: float = Z95) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion.

    Well-behaved at proportions near 0 and 1, which is where the interesting
    stability regimes sit.
    """
    if total < 1:
        raise ValueError("total must be at least 1")
    if not 0 <= successes <= total:
        raise ValueError("successes must lie in [0, total]")
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2.0 * total)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / total
                         + z * z / (4.0 * total * total)) / denom
    # at the extremes the exact bounds are 0 and 1; avoid rounding residue
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == total else min(1.0, center + half)
    return lo, hi


def _trial_counts(task: tuple) -> tuple[int, int, int, int, int]:
    """One Monte Carlo trial: fresh disorder, stability of the first patterns.

    Returns (tested, unstable, with_zero_on, with_erase, with_flip) counts
    over the patterns tested in this trial.  Top-level so process pools can
    pickle it.
    """
    variant, n, gamma, alpha, patterns_per_set, seed = task
    params = ModelParams(N=n, gamma=gamma, alpha=alpha)
    ps = generate_pattern_set(params, seed)
    tested = unstable = zero_on = erase = flip = 0
    for mu in range(min(patterns_per_set, ps.m)):
        rep = check_stability(ps, mu, variant, gamma)
        tested += 1
        unstable += 0 if rep.stable else 1
        zero_on += 1 if rep.zero_to_nonzero > 0 else 0
        erase += 1 if rep.erased > 0 else 0
        flip += 1 if rep.sign_flipped > 0 else 0
    return tested, unstable, zero_on, erase, flip


def _cell_tasks(variant: str, n: int, gamma: float, alpha: float,
                trials: int, cell_seed: int, patterns_per_set: int) -> list[tuple]:
    return [
        (variant, n, gamma, alpha, patterns_per_set, mix64(cell_seed, t))
        for t in range(trials)
    ]


def _aggregate(n: int, gamma: float, alpha: float, trials: int, cell_seed: int,
               counts: Iterable[tuple[int, int, int, int, int]]) -> ResultRow:
    tested = unstable = zero_on = erase = flip = 0
    for t, u, z, e, f in counts:
        tested += t
        unstable += u
        zero_on += z
        erase += e
        flip += f
    ci_lo, ci_hi = wilson_interval(unstable, tested)
    params = ModelParams(N=n, gamma=gamma, alpha=alpha)
    return ResultRow(
        N=n, gamma=gamma, alpha=alpha, M=params.M,
        trials=trials, tested_patterns=tested,
        unstable_fraction=unstable / tested,
        zero_on_fraction=zero_on / tested,
        erase_fraction=erase / tested,
        flip_fraction=flip / tested,
        ci_lo=ci_lo, ci_hi=ci_hi,
        wall_seconds=0.0,
        seed=cell_seed,
    )


def make_executor(threads: int) -> Executor | None:
    """Process pool for trial evaluation, or None for inline execution."""
    if threads <= 1:
        return None
    return ProcessPoolExecutor(max_workers=threads)


def _run_tasks(tasks: list[tuple], executor: Executor | None) -> list[tuple]:
    if executor is None:
        return [_trial_counts(t) for t in tasks]
    chunksize = max(1, len(tasks) // 64)
    return list(executor.map(_trial_counts, tasks, chunksize=chunksize))


def run_cell(variant: str, N: int, gamma: float, alpha: float, trials: int,
             master_seed: int, patterns_per_set: int = 1,
             executor: Executor | None = None) -> ResultRow:
    """Monte Carlo estimate of the instability probability at one cell.

    ``master_seed`` acts as the cell seed; trial t uses mix64(master_seed, t).
    The row is deterministic in its arguments, independent of the executor.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    tasks = _cell_tasks(variant, N, gamma, alpha, trials, master_seed,
                        patterns_per_set)
    counts = _run_tasks(tasks, executor)
    return _aggregate(N, gamma, alpha, trials, master_seed, counts)


def grid_cells(cfg: ExperimentConfig) -> list[tuple[int, float, float]]:
    """Cells of the cartesian grid in deterministic lexicographic order."""
    if cfg.alpha_list is None:
        raise ValueError("config has no alpha grid (bisection spec instead)")
    return [
        (n, g, a)
        for n in cfg.N_list
        for g in cfg.gamma_list
        for a in cfg.alpha_list
    ]


def run_grid(cfg: ExperimentConfig, executor: Executor | None = None) -> list[ResultRow]:
    """Run every cell of the config's grid; rows in lexicographic cell order.

    All trials of all cells form one flat task list so a pool is kept busy
    across cell boundaries; the reduction is by cell index, so the output
    does not depend on scheduling.
    """
    cells = grid_cells(cfg)
    own_pool = executor is None and cfg.threads > 1
    pool = make_executor(cfg.threads) if own_pool else executor
    try:
        tasks: list[tuple] = []
        spans: list[tuple[int, int]] = []
        seeds: list[int] = []
        for cell_index, (n, g, a) in enumerate(cells):
            cell_seed = mix64(cfg.master_seed, cell_index)
            seeds.append(cell_seed)
            start = len(tasks)
            tasks.extend(_cell_tasks(cfg.variant, n, g, a, cfg.trials,
                                     cell_seed, cfg.patterns_per_set))
            spans.append((start, len(tasks)))
        counts = _run_tasks(tasks, pool)
    finally:
        if own_pool and pool is not None:
            pool.shutdown()
    return [
        _aggregate(n, g, a, cfg.trials, seeds[i], counts[lo:hi])
        for i, ((n, g, a), (lo, hi)) in enumerate(zip(cells, spans))
    ]


def estimate_critical_alpha(variant: str, N: int, gamma: float,
                            spec: BisectionSpec, trials: int, master_seed: int,
                            patterns_per_set: int = 1,
                            executor: Executor | None = None
                            ) -> tuple[float, list[ResultRow]]:
    """Bisection estimate of the load where the unstable fraction crosses target.

    Both bracket endpoints are evaluated first and must straddle the target
    fraction strictly (BracketError otherwise, carrying the audit rows).
    Bisection then re-runs the cell at each midpoint; it stops early once the
    midpoint's Wilson interval contains the target, since further splitting
    would chase Monte Carlo noise.  Every evaluated row is returned.
    """
    rows: list[ResultRow] = []

    def evaluate(alpha: float, eval_index: int) -> ResultRow:
        row = run_cell(variant, N, gamma, alpha, trials,
                       mix64(master_seed, eval_index), patterns_per_set,
                       executor)
        rows.append(row)
        return row

    row_lo = evaluate(spec.lo, 0)
    row_hi = evaluate(spec.hi, 1)
    target = spec.target_fraction
    if not (row_lo.unstable_fraction < target < row_hi.unstable_fraction):
        raise BracketError(
            f"bracket [{spec.lo}, {spec.hi}] does not straddle "
            f"target {target}: fractions "
            f"{row_lo.unstable_fraction:.3f} and {row_hi.unstable_fraction:.3f}",
            rows,
        )
    lo, hi = spec.lo, spec.hi
    for it in range(spec.max_iters):
        mid = 0.5 * (lo + hi)
        row = evaluate(mid, 2 + it)
        if row.ci_lo <= target <= row.ci_hi:
            return mid, rows
        if row.unstable_fraction < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), rows


def _fmt(x: float) -> str:
    """Floats at 9 significant digits; fixed formatting keeps CSVs byte-stable."""
    return format(float(x), ".9g")


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            str(r.N), _fmt(r.gamma), _fmt(r.alpha), str(r.M), str(r.trials),
            str(r.tested_patterns), _fmt(r.unstable_fraction),
            _fmt(r.zero_on_fraction), _fmt(r.erase_fraction),
            _fmt(r.flip_fraction), _fmt(r.ci_lo), _fmt(r.ci_hi),
            _fmt(r.wall_seconds), str(r.seed),
        ]))
    return "\n".join(lines) + "\n"


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = {
        "variant": cfg.variant,
        "N_list": list(cfg.N_list),
        "gamma_list": list(cfg.gamma_list),
        "alpha_list": list(cfg.alpha_list) if cfg.alpha_list is not None else None,
        "bisection": None,
        "trials": cfg.trials,
        "patterns_per_set": cfg.patterns_per_set,
        "master_seed": cfg.master_seed,
    }
    if cfg.bisection is not None:
        d["bisection"] = {
            "lo": cfg.bisection.lo,
            "hi": cfg.bisection.hi,
            "target_fraction": cfg.bisection.target_fraction,
            "max_iters": cfg.bisection.max_iters,
        }
    return d


def emit_results(rows: Sequence[ResultRow], path_csv, path_manifest,
                 config: ExperimentConfig) -> None:
    """Write the results CSV and its JSON manifest.

    The CSV is byte-deterministic: fixed header, 9-significant-digit floats,
    LF line endings, rows in the given order.  The manifest records the full
    scientific config plus tool version; the thread hint lives in a separate
    execution section so the config block is identical across worker counts.
    """
    from . import __version__

    with open(path_csv, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))
    manifest = {
        "format_version": 1,
        "tool": {"name": "begmem", "version": __version__},
        "config": _config_dict(config),
        "execution": {"threads": config.threads},
        "outputs": {"csv": str(path_csv), "rows": len(rows)},
    }
    with open(path_manifest, "w", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path) -> ExperimentConfig:
    """Reconstruct the ExperimentConfig recorded in a manifest."""
    with open(path) as fh:
        manifest = json.load(fh)
    c = manifest["config"]
    bisection = None
    if c.get("bisection"):
        bisection = BisectionSpec(**c["bisection"])
    return ExperimentConfig(
        variant=c["variant"],
        N_list=tuple(c["N_list"]),
        gamma_list=tuple(c["gamma_list"]),
        alpha_list=tuple(c["alpha_list"]) if c["alpha_list"] is not None else None,
        bisection=bisection,
        trials=c["trials"],
        patterns_per_set=c["patterns_per_set"],
        master_seed=c["master_seed"],
        threads=manifest.get("execution", {}).get("threads", 1),
    )
