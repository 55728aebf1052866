"""Sparse ternary associative memory: patterns, dynamics, theory, experiments."""

__version__ = "0.1.0"

from .capacity import (
    TheoryPoint,
    alpha_star,
    capacity_gap,
    cramer_rate,
    erase_error_exponent,
    gamma_admissibility,
    signflip_exponent,
    theory_point,
    x_hat,
    x_star,
    zero_error_exponent,
)
from .dynamics import (
    FieldPair,
    StabilityReport,
    all_fields,
    apply_map,
    check_stability,
    dense_oracle_fields,
    local_fields,
    transfer,
)
from .experiments import (
    BisectionSpec,
    BracketError,
    ExperimentConfig,
    ResultRow,
    emit_results,
    estimate_critical_alpha,
    read_manifest,
    run_cell,
    run_grid,
    wilson_interval,
)
from .params import ModelParams
from .patterns import (
    PatternBudgetError,
    PatternSet,
    TernaryConfig,
    activity_of,
    generate_pattern_set,
)
from .rng import mix64

__all__ = [
    "__version__",
    "ModelParams",
    "TernaryConfig",
    "PatternSet",
    "PatternBudgetError",
    "generate_pattern_set",
    "activity_of",
    "FieldPair",
    "StabilityReport",
    "transfer",
    "local_fields",
    "all_fields",
    "dense_oracle_fields",
    "apply_map",
    "check_stability",
    "TheoryPoint",
    "theory_point",
    "capacity_gap",
    "x_hat",
    "x_star",
    "alpha_star",
    "zero_error_exponent",
    "erase_error_exponent",
    "signflip_exponent",
    "cramer_rate",
    "gamma_admissibility",
    "ExperimentConfig",
    "BisectionSpec",
    "ResultRow",
    "BracketError",
    "wilson_interval",
    "run_cell",
    "run_grid",
    "estimate_critical_alpha",
    "emit_results",
    "read_manifest",
    "mix64",
]
