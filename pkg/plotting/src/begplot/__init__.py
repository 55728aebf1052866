"""Capacity-chart renderer for the sparse ternary memory result files."""

__version__ = "0.1.0"

from .io import SchemaError, read_critical_json, read_results_csv, read_theory_csv
from .render import PlotJob, render_alpha_sweep, render_capacity_figure

__all__ = [
    "__version__",
    "SchemaError",
    "PlotJob",
    "render_capacity_figure",
    "render_alpha_sweep",
    "read_theory_csv",
    "read_results_csv",
    "read_critical_json",
]
