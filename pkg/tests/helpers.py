"""Shared test helpers."""

import math

from begmem import ModelParams


def params_with_m(n: int, m: int, p_override=None, gamma: float = 1.0) -> ModelParams:
    """ModelParams whose derived M equals m exactly (alpha chosen accordingly)."""
    alpha = (m + 0.5) * math.log(n) ** 2 / n**2
    params = ModelParams(N=n, gamma=gamma, alpha=alpha, p_override=p_override)
    assert params.M == m
    return params
