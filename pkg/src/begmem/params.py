"""Experiment control knobs and the quantities derived from them.

The model lives on N ternary neurons.  Per-entry activity is tied to the
system size, p = ln(N)/N, and the number of stored patterns scales as
M = floor(alpha * N^2 / ln(N)^2).  All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """(N, gamma, alpha) plus the derived activity p and pattern count M.

    ``gamma`` scales the firing threshold gamma * ln(N) of the thresholded
    update rule; ``alpha`` is the load coefficient.  ``p_override`` replaces
    the canonical p = ln(N)/N and exists only so unit tests of the dynamics
    can use small dense instances; experiments never set it.
    """

    N: int
    gamma: float
    alpha: float
    p_override: float | None = None

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"N must be an integer >= 3, got {self.N!r}")
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma!r}")
        if self.p_override is not None and not (0.0 < self.p_override < 1.0):
            raise ValueError(f"p_override must lie in (0, 1), got {self.p_override!r}")

    @property
    def p(self) -> float:
        """Per-entry activity: probability that a pattern entry is nonzero."""
        if self.p_override is not None:
            return float(self.p_override)
        return math.log(self.N) / self.N

    @property
    def M(self) -> int:
        """Stored pattern count, floor(alpha * N^2 / ln(N)^2), at least 1."""
        return max(1, math.floor(self.alpha * self.N * self.N / math.log(self.N) ** 2))
