"""Local fields, update rules and fixed-point stability classification.

For a probe configuration sigma the two local fields at neuron i are

    S_i(sigma)     = sum_{j != i} J_ij sigma_j,      J_ij = sum_mu xi_i^mu xi_j^mu
    theta_i(sigma) = sum_{j != i} K_ij sigma_j^2,    K_ij = sum_mu eta_i^mu eta_j^mu / (1-p)^2

with eta_i^mu = (xi_i^mu)^2 - p.  S_i is an exact integer; theta_i is real.
The update rule maps neuron i to

    sgn(S_i) * Theta(|S_i| + theta_i - tau),    Theta(x) = 1_{x >= 0},

with tau = 0 for the original rule and tau = gamma * ln(N) for the
thresholded rule; sgn(0) = 0, so a vanishing spin field always yields 0.

Neither J nor K is ever materialized.  Writing ov_mu = sum_j sigma_j xi_j^mu
and c_mu = |supp(sigma) & supp(xi^mu)| gives

    S_i = sum_mu xi_i^mu ov_mu - sigma_i degrees[i],

so only patterns overlapping the probe support contribute, reachable through
the inverted index.  For theta the centering split eta = xi^2 - p collapses
the sum over all M patterns to precomputed degree statistics:

    a_mu(i)  = c_mu - [i in supp, mu active at i] - p * (n_A - [i in supp])
    theta_i  = ( sum_{mu active at i} a_mu(i) - p * sum_mu a_mu(i) ) / (1-p)^2

where sum_mu c_mu = sum_{j in supp} degrees[j].  One full field sweep costs
O(sum_{j in supp} degrees[j] + touched pattern mass + N) instead of O(N^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .patterns import PatternSet, TernaryConfig

__all__ = [
    "FieldPair",
    "StabilityReport",
    "Variant",
    "transfer",
    "local_fields",
    "all_fields",
    "dense_oracle_fields",
    "apply_map",
    "check_stability",
]

Variant = Literal["original", "thresholded"]

DENSE_ORACLE_LIMIT = 512


@dataclass(frozen=True)
class FieldPair:
    """Local fields at one neuron: exact integer spin field, real activity field."""

    s: int
    theta: float


@dataclass(frozen=True)
class StabilityReport:
    """One-step retrieval errors of a stored pattern under a given rule."""

    mu: int
    k: int
    zero_to_nonzero: int
    erased: int
    sign_flipped: int
    stable: bool


def transfer(s: int, theta: float, tau: float) -> int:
    """Single-neuron update: sgn(s) * Theta(|s| + theta - tau), Theta(0) = 1."""
    if s == 0:
        return 0
    if abs(s) + theta - tau >= 0.0:
        return 1 if s > 0 else -1
    return 0


def _check_probe(ps: PatternSet, probe: TernaryConfig) -> None:
    if probe.n != ps.n:
        raise ValueError(f"probe dimension {probe.n} != pattern set dimension {ps.n}")


def _ragged_take(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Flat gather indices for CSR slices [starts_r, starts_r + lengths_r)."""
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    out_starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    return np.repeat(starts - out_starts, lengths) + np.arange(total, dtype=np.int64)


def _overlaps(ps: PatternSet, probe: TernaryConfig):
    """Per-pattern probe statistics over the patterns touching supp(probe).

    Returns (touched pattern ids, spin overlaps ov_mu, support overlaps c_mu);
    untouched patterns have both overlaps zero and are omitted.
    """
    a = probe.indices
    starts = ps._inv_indptr[a]
    lengths = ps._inv_indptr[a + 1] - starts
    flat = _ragged_take(starts, lengths)
    mus = ps._inv_mu[flat]
    spins = ps._inv_sgn[flat].astype(np.int64)
    sigma_rep = np.repeat(probe.signs.astype(np.int64), lengths)
    touched, inverse = np.unique(mus, return_inverse=True)
    t = touched.size
    # weights are small integers, so the float64 bincount sums are exact
    ov = np.bincount(inverse, weights=spins * sigma_rep, minlength=t)
    cnt = np.bincount(inverse, weights=None, minlength=t)
    return touched, ov, cnt


def _field_arrays(ps: PatternSet, probe: TernaryConfig):
    """All N field pairs as arrays: exact int64 S and float64 theta."""
    _check_probe(ps, probe)
    n, p, m = ps.n, ps.p, ps.m
    a = probe.indices
    n_a = int(a.size)
    d = ps.degrees

    s_raw = np.zeros(n, dtype=np.float64)
    c_sum = np.zeros(n, dtype=np.float64)
    if n_a:
        touched, ov, cnt = _overlaps(ps, probe)
        if touched.size:
            starts = ps._pat_indptr[touched]
            lengths = ps._pat_indptr[touched + 1] - starts
            flat = _ragged_take(starts, lengths)
            sites = ps._pat_idx[flat]
            spins = ps._pat_sgn[flat].astype(np.float64)
            s_raw = np.bincount(sites, weights=np.repeat(ov, lengths) * spins,
                                minlength=n)
            c_sum = np.bincount(sites, weights=np.repeat(cnt, lengths),
                                minlength=n)

    s = np.rint(s_raw).astype(np.int64)
    if n_a:
        s[a] -= probe.signs.astype(np.int64) * d[a]

    in_supp = np.zeros(n, dtype=np.int64)
    in_supp[a] = 1
    t_deg = float(d[a].sum())
    active_part = c_sum - in_supp * d - p * ((n_a - in_supp) * d)
    all_part = t_deg - in_supp * d - p * ((n_a - in_supp) * m)
    theta = (active_part - p * all_part) / (1.0 - p) ** 2
    return s, theta


def all_fields(ps: PatternSet, probe: TernaryConfig) -> list[FieldPair]:
    """Field pairs at every neuron, via the sparse overlap decomposition."""
    s, theta = _field_arrays(ps, probe)
    return [FieldPair(int(s[i]), float(theta[i])) for i in range(ps.n)]


def local_fields(ps: PatternSet, probe: TernaryConfig, i: int) -> FieldPair:
    """Field pair at one neuron; agrees exactly with all_fields element i."""
    _check_probe(ps, probe)
    if not 0 <= i < ps.n:
        raise IndexError(f"neuron {i} outside [0, {ps.n})")
    p, m = ps.p, ps.m
    a = probe.indices
    n_a = int(a.size)
    d_i = int(ps.degrees[i])

    touched, ov, cnt = _overlaps(ps, probe)
    ov_map = {int(mu): float(v) for mu, v in zip(touched, ov)}
    cnt_map = {int(mu): float(v) for mu, v in zip(touched, cnt)}

    mus_i, spins_i = ps.inverted(i)
    s_raw = 0.0
    c_i = 0.0
    for mu, sp in zip(mus_i, spins_i):
        s_raw += ov_map.get(int(mu), 0.0) * float(sp)
        c_i += cnt_map.get(int(mu), 0.0)

    sigma_i = probe.spin(i)
    s = int(round(s_raw)) - sigma_i * d_i

    in_supp = 1 if sigma_i != 0 else 0
    t_deg = float(ps.degrees[a].sum())
    active_part = c_i - in_supp * d_i - p * ((n_a - in_supp) * d_i)
    all_part = t_deg - in_supp * d_i - p * ((n_a - in_supp) * m)
    theta = (active_part - p * all_part) / (1.0 - p) ** 2
    return FieldPair(s, float(theta))


def dense_oracle_fields(ps: PatternSet, probe: TernaryConfig) -> list[FieldPair]:
    """Testing oracle: fields from explicitly materialized J and K matrices.

    Independent of the sparse route; guarded to small instances.
    """
    _check_probe(ps, probe)
    if ps.n > DENSE_ORACLE_LIMIT:
        raise ValueError(
            f"dense oracle limited to n <= {DENSE_ORACLE_LIMIT}, got {ps.n}"
        )
    n, m, p = ps.n, ps.m, ps.p
    x = np.zeros((n, m), dtype=np.int64)
    for mu in range(m):
        lo, hi = ps._pat_indptr[mu], ps._pat_indptr[mu + 1]
        x[ps._pat_idx[lo:hi], mu] = ps._pat_sgn[lo:hi]

    sigma = probe.to_dense().astype(np.int64)
    j_mat = x @ x.T
    np.fill_diagonal(j_mat, 0)
    s = j_mat @ sigma

    eta = (x != 0).astype(np.float64) - p
    k_mat = (eta @ eta.T) / (1.0 - p) ** 2
    np.fill_diagonal(k_mat, 0.0)
    theta = k_mat @ (sigma != 0).astype(np.float64)
    return [FieldPair(int(s[i]), float(theta[i])) for i in range(n)]


def apply_map(ps: PatternSet, probe: TernaryConfig, variant: Variant,
              gamma: float = 0.0) -> TernaryConfig:
    """One synchronous application of the update rule to the probe.

    All fields are evaluated against the unmodified input, so the result does
    not depend on any neuron ordering.  gamma is ignored for the original
    variant (tau = 0); the thresholded variant uses tau = gamma * ln(N).
    """
    if variant not in ("original", "thresholded"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "thresholded" and gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    tau = 0.0 if variant == "original" else float(gamma) * math.log(ps.n)
    s, theta = _field_arrays(ps, probe)
    fires = (np.abs(s) + theta - tau) >= 0.0
    out = np.where(fires, np.sign(s), 0).astype(np.int8)
    active = np.nonzero(out)[0]
    return TernaryConfig(ps.n, active, out[active], validate=False)


def check_stability(ps: PatternSet, mu: int, variant: Variant,
                    gamma: float = 0.0) -> StabilityReport:
    """Classify the disagreements of T(xi^mu) with xi^mu.

    Three error classes: an inactive neuron firing (zero_to_nonzero), an
    active spin dropping to 0 (erased), and an active spin changing sign
    (sign_flipped).  The pattern is stable iff no error occurs; the all-zero
    pattern is trivially stable.
    """
    if not 0 <= mu < ps.m:
        raise IndexError(f"pattern id {mu} outside [0, {ps.m})")
    probe = ps.pattern(mu)
    image = apply_map(ps, probe, variant, gamma)
    before = probe.to_dense()
    after = image.to_dense()
    zero_on = int(np.count_nonzero((before == 0) & (after != 0)))
    erased = int(np.count_nonzero((before != 0) & (after == 0)))
    flipped = int(np.count_nonzero((before != 0) & (after == -before)))
    return StabilityReport(
        mu=mu,
        k=probe.support_size,
        zero_to_nonzero=zero_on,
        erased=erased,
        sign_flipped=flipped,
        stable=(zero_on + erased + flipped) == 0,
    )
