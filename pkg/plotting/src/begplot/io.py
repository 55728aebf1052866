"""Schema-validated readers for the simulator's file interfaces.

This package deliberately never imports the simulation code; the CSV headers
below are the wire format.  A header mismatch is reported with the offending
column so broken pipelines fail loudly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

THEORY_FIELDS = ("gamma", "x_hat", "x_star", "alpha_star")
RESULT_FIELDS = (
    "N", "gamma", "alpha", "M", "trials", "tested_patterns",
    "unstable_fraction", "zero_on_fraction", "erase_fraction", "flip_fraction",
    "ci_lo", "ci_hi", "wall_seconds", "seed",
)


class SchemaError(ValueError):
    """Input file does not match the expected wire format."""


@dataclass(frozen=True)
class TheoryRow:
    gamma: float
    x_hat: float
    x_star: float
    alpha_star: float


@dataclass(frozen=True)
class ResultRow:
    N: int
    gamma: float
    alpha: float
    unstable_fraction: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class CriticalEntry:
    gamma: float
    N: int
    alpha_hat: float | None


def _check_header(actual: list[str] | None, expected: tuple[str, ...],
                  path) -> None:
    actual = actual or []
    if tuple(actual) == expected:
        return
    for i, want in enumerate(expected):
        got = actual[i] if i < len(actual) else "<missing>"
        if got != want:
            raise SchemaError(
                f"{path}: column {i + 1} is {got!r}, expected {want!r}"
            )
    raise SchemaError(
        f"{path}: {len(actual) - len(expected)} unexpected trailing column(s), "
        f"first is {actual[len(expected)]!r}"
    )


def _open_checked(path) -> Path:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input file not found: {p}")
    return p


def read_theory_csv(path) -> list[TheoryRow]:
    p = _open_checked(path)
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), THEORY_FIELDS, p)
        rows = [
            TheoryRow(float(r[0]), float(r[1]), float(r[2]), float(r[3]))
            for r in reader if r
        ]
    if not rows:
        raise SchemaError(f"{p}: no data rows")
    return rows


def read_results_csv(path) -> list[ResultRow]:
    p = _open_checked(path)
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), RESULT_FIELDS, p)
        rows = [
            ResultRow(
                N=int(r[0]), gamma=float(r[1]), alpha=float(r[2]),
                unstable_fraction=float(r[6]), ci_lo=float(r[10]),
                ci_hi=float(r[11]),
            )
            for r in reader if r
        ]
    if not rows:
        raise SchemaError(f"{p}: no data rows")
    return rows


def read_critical_json(path) -> list[CriticalEntry]:
    p = _open_checked(path)
    try:
        entries = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{p}: not valid JSON ({exc})") from exc
    if not isinstance(entries, list):
        raise SchemaError(f"{p}: expected a JSON array of estimates")
    out = []
    for i, e in enumerate(entries):
        for key in ("gamma", "N", "alpha_hat"):
            if key not in e:
                raise SchemaError(f"{p}: entry {i} is missing {key!r}")
        out.append(CriticalEntry(gamma=float(e["gamma"]), N=int(e["N"]),
                                 alpha_hat=(None if e["alpha_hat"] is None
                                            else float(e["alpha_hat"]))))
    return out
