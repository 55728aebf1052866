"""Analytic storage-capacity theory for the thresholded ternary memory.

With M = alpha * N^2 / ln(N)^2 stored patterns and firing threshold
gamma * ln(N), the load threshold separating stable from unstable retrieval
is alpha_star(gamma) = gamma / (x_star(gamma) - 1), where x_star(gamma) is
the unique root above 1 of

    capacity_gap(gamma, x) = x * (1 + 2/gamma - ln x) - 1 - 2/gamma.

The gap function vanishes at x = 1, rises to a maximum at x_hat = e^(2/gamma)
and falls back through its second root x_star > x_hat; it is negative on
(0, 1) and (x_star, inf) and positive in between.  Admissible thresholds are
gamma in (0, 2]; the best capacity is reached at gamma = 2 where
alpha_star = 2 / (x_star(2) - 1) ~= 0.51.

The large-deviation exponents below give the per-ln(N) decay rates of the
three retrieval error types: an inactive neuron firing, an active neuron
erased, and an active neuron flipping sign.  A negative exponent means the
corresponding error probability vanishes as N grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize

__all__ = [
    "capacity_gap",
    "x_hat",
    "x_star",
    "alpha_star",
    "TheoryPoint",
    "theory_point",
    "zero_error_profile",
    "zero_error_tilt",
    "zero_error_tilt_argmin",
    "zero_error_exponent",
    "erase_error_exponent",
    "signflip_exponent",
    "cramer_rate",
    "gamma_admissibility",
]

GAMMA_MAX = 2.0
ALPHA_STAR_BOUNDARY_TOL = 1e-9


def capacity_gap(gamma: float, x: float) -> float:
    """x * (1 + 2/gamma - ln x) - 1 - 2/gamma; its sign classifies loads."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    c = 1.0 + 2.0 / gamma
    return x * (c - math.log(x)) - c


def x_hat(gamma: float) -> float:
    """Location e^(2/gamma) of the gap function's maximum."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return math.exp(2.0 / gamma)


def x_star(gamma: float) -> float:
    """Unique root of the gap function above x_hat(gamma), by bisection.

    The bracket starts at [x_hat, X] with X doubled until the gap turns
    negative, then bisects down to a one-ulp bracket (well below the 1e-12
    relative target).  Note the achievable residual |capacity_gap| at the
    root is limited by float64 cancellation, which grows with x_star and
    becomes the dominant error for gamma below roughly 0.2.
    """
    lo = x_hat(gamma)
    if not math.isfinite(lo):
        raise ValueError(f"gamma={gamma} too small: x_hat overflows float64")
    hi = 2.0 * lo
    while capacity_gap(gamma, hi) >= 0.0:
        hi *= 2.0
    # invariant: gap(lo) > 0 >= gap(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            return hi
        if capacity_gap(gamma, mid) > 0.0:
            lo = mid
        else:
            hi = mid


def alpha_star(gamma: float) -> float:
    """Critical load gamma / (x_star(gamma) - 1) for gamma in (0, 2]."""
    if not (0.0 < gamma <= GAMMA_MAX):
        raise ValueError(f"gamma must lie in (0, {GAMMA_MAX}], got {gamma}")
    return gamma / (x_star(gamma) - 1.0)


@dataclass(frozen=True)
class TheoryPoint:
    """One point of the capacity curve."""

    gamma: float
    x_hat: float
    x_star: float
    alpha_star: float


def theory_point(gamma: float) -> TheoryPoint:
    return TheoryPoint(
        gamma=float(gamma),
        x_hat=x_hat(gamma),
        x_star=x_star(gamma),
        alpha_star=alpha_star(gamma),
    )


def zero_error_profile(x: float, alpha: float, rho: float = 1.0) -> float:
    """1 + rho*alpha*(-x ln x + x - 1)/2, the inactive-neuron error profile."""
    if x <= 0 or alpha <= 0 or rho <= 0:
        raise ValueError("arguments must be positive")
    return 1.0 + 0.5 * rho * alpha * (-x * math.log(x) + x - 1.0)


def zero_error_tilt(t: float, alpha: float, gamma: float, rho: float = 1.0) -> float:
    """Chernoff tilt -t*gamma + rho*alpha*(e^(2t)/2 - 1/2 - t) before minimization."""
    return -t * gamma + rho * alpha * (0.5 * math.exp(2.0 * t) - 0.5 - t)


def zero_error_tilt_argmin(alpha: float, gamma: float, rho: float = 1.0) -> float:
    """Minimizing tilt parameter t = ln(1 + gamma/(rho*alpha)) / 2."""
    if alpha <= 0 or gamma <= 0 or rho <= 0:
        raise ValueError("arguments must be positive")
    return 0.5 * math.log(1.0 + gamma / (rho * alpha))


def zero_error_exponent(alpha: float, gamma: float, rho: float = 1.0) -> float:
    """Per-ln(N) exponent of P(some inactive neuron fires).

    Equals zero_error_profile evaluated at x = 1 + gamma/(rho*alpha), which
    is 1 plus the minimized Chernoff tilt; negative iff alpha < alpha_star.
    """
    if alpha <= 0 or gamma <= 0 or rho <= 0:
        raise ValueError("arguments must be positive")
    return zero_error_profile(1.0 + gamma / (rho * alpha), alpha, rho)


def erase_error_exponent(alpha: float, gamma: float, rho: float = 1.0) -> float:
    """Per-ln(N) exponent of P(an active neuron is erased), gamma < 2.

    With v = 1 - 2/alpha + gamma/(rho*alpha) the exponent is
    rho*alpha*(-v ln v + v - 1)/2 when v > 0.  For v <= 0 (the low-load
    branch alpha <= 2 - gamma/rho) the decay is faster than any rate of this
    form; returned as -inf.
    """
    if alpha <= 0 or gamma <= 0 or rho <= 0:
        raise ValueError("arguments must be positive")
    if gamma >= 2.0:
        raise ValueError(
            f"erase exponent defined for gamma < 2 (got {gamma}); "
            "larger thresholds are classified by gamma_admissibility"
        )
    v = 1.0 - 2.0 / alpha + gamma / (rho * alpha)
    if v <= 0.0:
        return -math.inf
    return 0.5 * rho * alpha * (-v * math.log(v) + v - 1.0)


def signflip_exponent(alpha: float) -> float:
    """Per-active-neuron exponent of a sign flip, -arsinh(1/a) + a*(sqrt(1+1/a^2)-1).

    Strictly negative for every alpha > 0, so sign flips never limit capacity.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    inv = 1.0 / alpha
    return -math.asinh(inv) + alpha * (math.sqrt(1.0 + inv * inv) - 1.0)


def cramer_rate(lam: float, epsilon: float, x: float) -> float:
    """Large-deviation rate at x of a Poisson(lam) sum of {-eps, 2-eps} steps.

    The mean is lam*(1-epsilon); x must not lie below it (the boundary value
    is accepted and yields rate 0).  For epsilon = 0 the Legendre transform
    has the closed form (x/2)*ln(x/lam) - (x-lam)/2; otherwise the concave
    dual t |-> t*x + lam - (lam/2)*e^(-eps*t)*(e^(2t)+1) is maximized
    numerically over [0, ln(1+2x/lam)], where its maximum provably lies.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if not (0.0 <= epsilon < 0.5):
        raise ValueError(f"epsilon must lie in [0, 0.5), got {epsilon}")
    mean = lam * (1.0 - epsilon)
    if x < mean:
        raise ValueError(f"x={x} below the mean {mean}; rate defined above it")
    if x == mean:
        return 0.0
    if epsilon == 0.0:
        return 0.5 * x * math.log(x / lam) - 0.5 * (x - lam)

    def neg_dual(t: float) -> float:
        return -(t * x + lam
                 - 0.5 * lam * math.exp(-epsilon * t) * (math.exp(2.0 * t) + 1.0))

    res = optimize.minimize_scalar(
        neg_dual,
        bounds=(0.0, math.log(1.0 + 2.0 * x / lam)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return -float(res.fun)


def gamma_admissibility(gamma: float, alpha: float) -> str:
    """Classify (gamma, alpha): 'stable', 'unstable' or 'inadmissible_gamma'.

    Thresholds above 2 erase active neurons regardless of load.  At gamma in
    (0, 2] the load is compared against alpha_star(gamma); the measure-zero
    boundary alpha == alpha_star (within 1e-9) is classified unstable.
    """
    if gamma <= 0 or alpha <= 0:
        raise ValueError("arguments must be positive")
    if gamma > GAMMA_MAX:
        return "inadmissible_gamma"
    threshold = alpha_star(gamma)
    if abs(alpha - threshold) <= ALPHA_STAR_BOUNDARY_TOL:
        return "unstable"
    return "stable" if alpha < threshold else "unstable"
