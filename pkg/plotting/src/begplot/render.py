"""Figure rendering: capacity chart and alpha-sweep phase plots.

Consumes only the public CSV/JSON files; structurally deterministic given
identical inputs (same curves, labels and annotations).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import (
    SchemaError,
    read_critical_json,
    read_results_csv,
    read_theory_csv,
)

FIGSIZE = (7.0, 4.6)
DPI = 130


@dataclass(frozen=True)
class PlotJob:
    """Inputs for the capacity chart."""

    theory_csv: str
    out_image: str
    results_csv: str | None = None
    critical_json: str | None = None
    reference_lines: dict[str, float] = field(default_factory=dict)
    target_fraction: float = 0.5


def _alpha_brackets(results_csv, target):
    """Per (N, gamma): alpha range whose Wilson CIs still include the target.

    Rows with ci_hi below target are confidently stable, rows with ci_lo
    above it confidently unstable; the gap between the outermost such rows
    brackets the crossing and serves as the error bar of alpha_hat.
    """
    groups: dict[tuple[int, float], list] = {}
    for row in read_results_csv(results_csv):
        groups.setdefault((row.N, row.gamma), []).append(row)
    brackets = {}
    for key, rows in groups.items():
        below = [r.alpha for r in rows if r.ci_hi < target]
        above = [r.alpha for r in rows if r.ci_lo > target]
        if below and above:
            brackets[key] = (max(below), min(above))
    return brackets


def render_capacity_figure(job: PlotJob) -> dict:
    """Draw the capacity threshold curve alpha_star(gamma) and overlays.

    Returns a small summary (right endpoint, marker count, label text) so
    pipelines can verify what was drawn without parsing the image.
    """
    theory = read_theory_csv(job.theory_csv)
    theory = sorted(theory, key=lambda r: r.gamma)

    fig, ax = plt.subplots(figsize=FIGSIZE)
    gammas = [r.gamma for r in theory]
    alphas = [r.alpha_star for r in theory]
    ax.plot(gammas, alphas, lw=2, color="tab:blue",
            label="ternary memory threshold")

    right = theory[-1]
    endpoint_label = (
        f"γ={right.gamma:g}: α*={right.alpha_star:.3f}"
    )
    ax.annotate(endpoint_label, xy=(right.gamma, right.alpha_star),
                xytext=(-10, 12), textcoords="offset points", ha="right")
    ax.plot([right.gamma], [right.alpha_star], "o", ms=5, color="tab:blue")

    markers = 0
    if job.critical_json is not None:
        brackets = (_alpha_brackets(job.results_csv, job.target_fraction)
                    if job.results_csv else {})
        for entry in read_critical_json(job.critical_json):
            if entry.alpha_hat is None:
                continue
            err = None
            bracket = brackets.get((entry.N, entry.gamma))
            if bracket is not None:
                lo, hi = bracket
                err = [[max(0.0, entry.alpha_hat - lo)],
                       [max(0.0, hi - entry.alpha_hat)]]
            ax.errorbar([entry.gamma], [entry.alpha_hat], yerr=err,
                        fmt="s", ms=5, capsize=3,
                        label=f"empirical crossing, N={entry.N}")
            markers += 1

    for name, value in sorted(job.reference_lines.items()):
        ax.axhline(value, ls="--", lw=1, alpha=0.6, color="gray")
        ax.annotate(name, xy=(gammas[0], value), xytext=(4, 3),
                    textcoords="offset points", fontsize=8, color="gray")

    ax.set_xlabel("threshold coefficient γ")
    ax.set_ylabel("storage capacity α")
    ax.set_title("Storage capacity of the sparse ternary memory")
    ax.legend(loc="upper left", fontsize=8)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(job.out_image, dpi=DPI)
    plt.close(fig)

    return {
        "right_endpoint": (right.gamma, right.alpha_star),
        "endpoint_label": endpoint_label,
        "theory_points": len(theory),
        "critical_markers": markers,
        "out_image": str(Path(job.out_image)),
    }


def render_alpha_sweep(results_csv, out_image, theory_csv=None) -> dict:
    """Unstable fraction versus load, one curve with CI band per (N, gamma).

    When a theory CSV is supplied, each admissible gamma (<= 2) gets a
    vertical line at its predicted threshold, interpolated from the curve.
    """
    rows = read_results_csv(results_csv)
    groups: dict[tuple[int, float], list] = {}
    for row in rows:
        groups.setdefault((row.N, row.gamma), []).append(row)

    theory = None
    if theory_csv is not None:
        theory = sorted(read_theory_csv(theory_csv), key=lambda r: r.gamma)

    fig, ax = plt.subplots(figsize=FIGSIZE)
    drawn_thresholds = set()
    for (n, gamma), grp in sorted(groups.items()):
        grp = sorted(grp, key=lambda r: r.alpha)
        xs = [r.alpha for r in grp]
        (line,) = ax.plot(xs, [r.unstable_fraction for r in grp], "-o", ms=4,
                          label=f"N={n}, γ={gamma:g}")
        ax.fill_between(xs, [r.ci_lo for r in grp], [r.ci_hi for r in grp],
                        alpha=0.2, color=line.get_color())
        if theory is not None and 0 < gamma <= 2 and gamma not in drawn_thresholds:
            threshold = _interp_alpha_star(theory, gamma)
            if threshold is not None:
                ax.axvline(threshold, ls=":", lw=1.2, color=line.get_color())
                drawn_thresholds.add(gamma)

    ax.set_xscale("log")
    ax.set_xlabel("load α")
    ax.set_ylabel("fraction of unstable patterns")
    ax.set_title("One-step retrieval instability vs load")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(out_image, dpi=DPI)
    plt.close(fig)
    return {"groups": len(groups), "out_image": str(Path(out_image))}


def _interp_alpha_star(theory, gamma):
    """Linear interpolation of the threshold curve at gamma (None outside)."""
    pts = [(r.gamma, r.alpha_star) for r in theory]
    if not pts or gamma < pts[0][0] - 1e-9 or gamma > pts[-1][0] + 1e-9:
        return None
    for (g0, a0), (g1, a1) in zip(pts, pts[1:]):
        if g0 - 1e-9 <= gamma <= g1 + 1e-9:
            if g1 == g0:
                return a0
            w = (gamma - g0) / (g1 - g0)
            return a0 + w * (a1 - a0)
    return pts[-1][1] if abs(gamma - pts[-1][0]) <= 1e-9 else None
