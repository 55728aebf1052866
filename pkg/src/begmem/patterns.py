"""Sparse ternary pattern sets and their inverted index.

A pattern is an element of {-1, 0, +1}^N with i.i.d. entries: zero with
probability 1-p and +-1 with probability p/2 each.  At p = ln(N)/N storing
the M x N array densely is wasteful, so a PatternSet keeps two CSR views of
the nonzero entries:

  * pattern-major: for pattern mu, its sorted active neuron indices and spins;
  * neuron-major (the inverted index): for neuron i, the patterns in which it
    is active and the corresponding spins, in ascending mu order.

Both views are built once and never mutated, which makes a PatternSet safe to
share across workers.

Generation draws each pattern from its own counter-mode stream keyed by
(master_seed, mu): counter 0 yields the activity count k through the inverse
CDF of Binomial(N, p); counters 1, 2, ... are scanned for k distinct neuron
indices (first-k-distinct rejection); a disjoint counter block yields the
spins of the sorted support.  Because every pattern's draws are addressed by
(mu, counter) alone, the result is independent of chunking and of the order
in which patterns are produced.
"""

from __future__ import annotations

import io
import json
import math
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy import stats

from .params import ModelParams
from .rng import counter_values, sign_values, stream_keys, uniform01, uniform_ints

__all__ = [
    "TernaryConfig",
    "PatternSet",
    "PatternBudgetError",
    "generate_pattern_set",
    "activity_of",
    "DEFAULT_CELL_BUDGET",
]

# Generation refuses instances whose conceptual dense size M * N exceeds this
# (configurable) budget; it flags experiment sizes that cannot be intended.
DEFAULT_CELL_BUDGET = 2**36

# Counter layout inside one pattern's stream.
_CTR_COUNT = 0          # activity count k
_CTR_INDEX = 1          # first index candidate; rejection scans upward
_CTR_SIGN = 1 << 32     # spin block, disjoint from any realistic index scan

_SNAPSHOT_MAGIC = b"BEGPAT01"


class PatternBudgetError(ValueError):
    """Requested pattern set exceeds the configured memory budget."""


class TernaryConfig:
    """A sparse configuration in {-1, 0, +1}^n.

    Stored as a sorted index array plus parallel spin array; an absent index
    means the entry is 0.  Instances are treated as immutable.
    """

    __slots__ = ("n", "indices", "signs")

    def __init__(self, n: int, indices=(), signs=(), *, validate: bool = True):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        sgn = np.asarray(signs, dtype=np.int8).reshape(-1)
        if validate:
            if n < 1:
                raise ValueError(f"dimension must be positive, got {n}")
            if idx.shape != sgn.shape:
                raise ValueError("indices and signs must have equal length")
            if idx.size:
                if idx[0] < 0 or idx[-1] >= n or np.any(np.diff(idx) <= 0):
                    raise ValueError("indices must be sorted, unique and in [0, n)")
                if np.any(np.abs(sgn) != 1):
                    raise ValueError("stored spins must be -1 or +1")
        idx.setflags(write=False)
        sgn.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "signs", sgn)

    def __setattr__(self, name, value):
        raise AttributeError("TernaryConfig is immutable")

    @property
    def support_size(self) -> int:
        return int(self.indices.size)

    def entries(self) -> dict[int, int]:
        """Sparse map index -> spin (absent means 0)."""
        return {int(i): int(s) for i, s in zip(self.indices, self.signs)}

    def spin(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"site {i} outside [0, {self.n})")
        pos = np.searchsorted(self.indices, i)
        if pos < self.indices.size and self.indices[pos] == i:
            return int(self.signs[pos])
        return 0

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int8)
        out[self.indices] = self.signs
        return out

    @classmethod
    def zeros(cls, n: int) -> "TernaryConfig":
        return cls(n)

    @classmethod
    def from_entries(cls, n: int, mapping: dict[int, int]) -> "TernaryConfig":
        items = sorted((i, s) for i, s in mapping.items() if s != 0)
        idx = [i for i, _ in items]
        sgn = [s for _, s in items]
        return cls(n, idx, sgn)

    @classmethod
    def from_dense(cls, vec) -> "TernaryConfig":
        vec = np.asarray(vec)
        idx = np.nonzero(vec)[0]
        return cls(int(vec.size), idx, vec[idx].astype(np.int8))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TernaryConfig):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.signs, other.signs)
        )

    def __hash__(self):
        return hash((self.n, self.indices.tobytes(), self.signs.tobytes()))

    def __repr__(self) -> str:
        return f"TernaryConfig(n={self.n}, support={self.support_size})"


class _PatternSeq(Sequence):
    """Lazy sequence view over a PatternSet's patterns."""

    def __init__(self, ps: "PatternSet"):
        self._ps = ps

    def __len__(self) -> int:
        return self._ps.m

    def __getitem__(self, mu: int) -> TernaryConfig:
        return self._ps.pattern(mu)

    def __iter__(self) -> Iterator[TernaryConfig]:
        for mu in range(self._ps.m):
            yield self._ps.pattern(mu)


class PatternSet:
    """M sparse ternary patterns over N neurons plus the inverted index.

    Immutable after construction.  ``degrees[i]`` counts the patterns in which
    neuron i is active; ``total_active`` is the total nonzero entry count.
    The activity indicators eta = xi^2 - p that drive the theta field are
    derived on the fly from the stored spins, never materialized.
    """

    __slots__ = (
        "params", "n", "p", "m", "master_seed", "degrees", "total_active",
        "_pat_indptr", "_pat_idx", "_pat_sgn", "_inv_indptr", "_inv_mu", "_inv_sgn",
    )

    def __init__(self, params, n, p, m, master_seed,
                 pat_indptr, pat_idx, pat_sgn):
        self.params = params
        self.n = int(n)
        self.p = float(p)
        self.m = int(m)
        self.master_seed = int(master_seed)
        self._pat_indptr = np.ascontiguousarray(pat_indptr, dtype=np.int64)
        self._pat_idx = np.ascontiguousarray(pat_idx, dtype=np.int32)
        self._pat_sgn = np.ascontiguousarray(pat_sgn, dtype=np.int8)
        if self._pat_indptr.size != self.m + 1:
            raise ValueError("pattern pointer array has wrong length")
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"activity p must lie in (0, 1), got {self.p}")

        # neuron-major view: stable sort keeps ascending mu within each neuron
        order = np.argsort(self._pat_idx, kind="stable")
        mu_of_entry = np.repeat(
            np.arange(self.m, dtype=np.int32), np.diff(self._pat_indptr)
        )
        self._inv_mu = mu_of_entry[order]
        self._inv_sgn = self._pat_sgn[order]
        self.degrees = np.bincount(self._pat_idx, minlength=self.n).astype(np.int64)
        self._inv_indptr = np.concatenate(
            ([0], np.cumsum(self.degrees))
        ).astype(np.int64)
        self.total_active = int(self._pat_idx.size)
        for a in (self._pat_indptr, self._pat_idx, self._pat_sgn,
                  self._inv_indptr, self._inv_mu, self._inv_sgn, self.degrees):
            a.setflags(write=False)

    @property
    def patterns(self) -> Sequence[TernaryConfig]:
        return _PatternSeq(self)

    def pattern(self, mu: int) -> TernaryConfig:
        if not 0 <= mu < self.m:
            raise IndexError(f"pattern id {mu} outside [0, {self.m})")
        lo, hi = self._pat_indptr[mu], self._pat_indptr[mu + 1]
        return TernaryConfig(
            self.n, self._pat_idx[lo:hi], self._pat_sgn[lo:hi], validate=False
        )

    def activity(self, mu: int) -> int:
        """Number of active neurons of pattern mu."""
        if not 0 <= mu < self.m:
            raise IndexError(f"pattern id {mu} outside [0, {self.m})")
        return int(self._pat_indptr[mu + 1] - self._pat_indptr[mu])

    def inverted(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Patterns touching neuron i: (pattern ids, spins), ascending mu."""
        if not 0 <= i < self.n:
            raise IndexError(f"neuron {i} outside [0, {self.n})")
        lo, hi = self._inv_indptr[i], self._inv_indptr[i + 1]
        return self._inv_mu[lo:hi], self._inv_sgn[lo:hi]

    def equals(self, other: "PatternSet") -> bool:
        return (
            self.n == other.n
            and self.m == other.m
            and self.p == other.p
            and self.master_seed == other.master_seed
            and np.array_equal(self._pat_indptr, other._pat_indptr)
            and np.array_equal(self._pat_idx, other._pat_idx)
            and np.array_equal(self._pat_sgn, other._pat_sgn)
        )

    @classmethod
    def from_patterns(cls, n: int, p: float, patterns, master_seed: int = 0,
                      params: ModelParams | None = None) -> "PatternSet":
        """Build a set from explicit TernaryConfigs (hand-crafted tests)."""
        configs = list(patterns)
        for c in configs:
            if c.n != n:
                raise ValueError("pattern dimension mismatch")
        indptr = np.concatenate(
            ([0], np.cumsum([c.support_size for c in configs]))
        ).astype(np.int64)
        if configs:
            idx = np.concatenate([c.indices for c in configs]).astype(np.int32)
            sgn = np.concatenate([c.signs for c in configs]).astype(np.int8)
        else:
            idx = np.zeros(0, dtype=np.int32)
            sgn = np.zeros(0, dtype=np.int8)
        return cls(params, n, p, len(configs), master_seed, indptr, idx, sgn)

    # -- snapshot format: magic, json header line, raw little-endian arrays --

    def save(self, path) -> None:
        """Write a deterministic, versioned binary snapshot."""
        header = {
            "version": 1,
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "master_seed": self.master_seed,
            "total_active": self.total_active,
        }
        with open(path, "wb") as fh:
            fh.write(_SNAPSHOT_MAGIC)
            blob = json.dumps(header, sort_keys=True).encode()
            fh.write(len(blob).to_bytes(4, "little"))
            fh.write(blob)
            fh.write(self._pat_indptr.astype("<i8").tobytes())
            fh.write(self._pat_idx.astype("<i4").tobytes())
            fh.write(self._pat_sgn.astype("i1").tobytes())

    @classmethod
    def load(cls, path) -> "PatternSet":
        with open(path, "rb") as fh:
            magic = fh.read(len(_SNAPSHOT_MAGIC))
            if magic != _SNAPSHOT_MAGIC:
                raise ValueError("not a pattern snapshot (bad magic)")
            (hlen,) = (int.from_bytes(fh.read(4), "little"),)
            header = json.loads(fh.read(hlen).decode())
            if header.get("version") != 1:
                raise ValueError(f"unsupported snapshot version {header.get('version')}")
            m, n = header["m"], header["n"]
            indptr = np.frombuffer(fh.read(8 * (m + 1)), dtype="<i8")
            total = int(indptr[-1])
            idx = np.frombuffer(fh.read(4 * total), dtype="<i4")
            sgn = np.frombuffer(fh.read(total), dtype="i1")
        return cls(None, n, header["p"], m, header["master_seed"],
                   indptr.copy(), idx.copy(), sgn.copy())

    def __repr__(self) -> str:
        return (
            f"PatternSet(n={self.n}, m={self.m}, p={self.p:.6g}, "
            f"active={self.total_active}, seed={self.master_seed})"
        )


@lru_cache(maxsize=64)
def _binom_cdf_table(n: int, p: float) -> np.ndarray:
    """CDF table of Binomial(n, p) for inverse-CDF sampling of activities.

    Truncated where the survival probability drops below 1e-15; the last
    entry is forced to 1.0 so searchsorted never escapes the table.
    """
    if n <= 2048:
        kmax = n
    else:
        kmax = min(n, int(stats.binom.isf(1e-15, n, p)) + 2)
    cdf = stats.binom.cdf(np.arange(kmax + 1), n, p).astype(np.float64)
    cdf[-1] = 1.0
    cdf.setflags(write=False)
    return cdf


def _distinct_indices_scalar(key: int, k: int, n: int) -> np.ndarray:
    """Sequential first-k-distinct scan of one pattern's index stream.

    Fallback for the rare rows whose first k candidates collide.  Pure-int
    splitmix64 arithmetic, draw for draw identical to the vectorized path.
    """
    from .rng import _GOLDEN, _INV53, mix

    key = int(key)
    chosen: list[int] = []
    seen: set[int] = set()
    ctr = _CTR_INDEX
    while len(chosen) < k:
        raw = mix(key + (ctr + 1) * _GOLDEN)
        idx = min(int((raw >> 11) * _INV53 * n), n - 1)
        ctr += 1
        if idx not in seen:
            seen.add(idx)
            chosen.append(idx)
    return np.asarray(chosen, dtype=np.int64)


def _generate_chunk(keys: np.ndarray, n: int, cdf: np.ndarray):
    """Generate activities, sorted supports and spins for one key chunk."""
    c = keys.size
    u0 = uniform01(counter_values(keys, np.asarray([_CTR_COUNT], dtype=np.uint64)[0]))
    k = np.searchsorted(cdf, u0, side="right").astype(np.int64)
    kmax = int(k.max()) if c else 0
    if kmax == 0:
        return k, np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int8)

    # candidate rectangle: row mu scans its counters 1..kmax
    ctrs = np.arange(_CTR_INDEX, _CTR_INDEX + kmax, dtype=np.uint64)
    cand = uniform_ints(counter_values(keys[:, None], ctrs[None, :]), n)
    mask = np.arange(kmax)[None, :] < k[:, None]

    # duplicate detection among each row's first k candidates; padding uses
    # distinct sentinels >= n so it can never fake a duplicate
    padded = np.where(mask, cand, n + np.arange(kmax, dtype=np.int64)[None, :])
    has_dup = (np.diff(np.sort(padded, axis=1), axis=1) == 0).any(axis=1)
    for row in np.nonzero(has_dup)[0]:
        cand[row, : k[row]] = _distinct_indices_scalar(keys[row], int(k[row]), n)

    support = np.sort(np.where(mask, cand, np.iinfo(np.int64).max), axis=1)

    # spins drawn from the disjoint sign block, rank r of the sorted support
    sgn_ctrs = np.arange(_CTR_SIGN, _CTR_SIGN + kmax, dtype=np.uint64)
    sgn = sign_values(counter_values(keys[:, None], sgn_ctrs[None, :]))

    flat = mask.reshape(-1)
    return k, support.reshape(-1)[flat].astype(np.int32), sgn.reshape(-1)[flat]


def generate_pattern_set(params: ModelParams, master_seed: int, *,
                         max_cells: int = DEFAULT_CELL_BUDGET) -> PatternSet:
    """Draw a full pattern set: M i.i.d. sparse ternary patterns.

    Deterministic in (params, master_seed); every pattern owns an independent
    counter stream keyed by (master_seed, mu), so generation may be chunked or
    parallelized over mu without changing a single entry.
    """
    n, p, m = params.N, params.p, params.M
    if m * n > max_cells:
        raise PatternBudgetError(
            f"pattern array of {m} x {n} = {m * n} cells exceeds the budget "
            f"of {max_cells}; raise max_cells if this size is intended"
        )
    cdf = _binom_cdf_table(n, p)

    chunk = 65536
    ks, idxs, sgns = [], [], []
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        keys = stream_keys(master_seed, np.arange(lo, hi, dtype=np.uint64))
        k, idx, sgn = _generate_chunk(keys, n, cdf)
        ks.append(k)
        idxs.append(idx)
        sgns.append(sgn)

    k_all = np.concatenate(ks)
    indptr = np.concatenate(([0], np.cumsum(k_all))).astype(np.int64)
    return PatternSet(
        params, n, p, m, master_seed,
        indptr, np.concatenate(idxs), np.concatenate(sgns),
    )


def activity_of(ps: PatternSet, mu: int) -> int:
    """Support size of stored pattern mu."""
    return ps.activity(mu)
