"""Residual reports and CSV helpers shared across modules."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = ["Sense", "ResidualReport", "tol_scale", "write_csv", "fmt"]


def tol_scale() -> float:
    """Global tolerance multiplier, read from ISO_RICCI_TOL_SCALE (default 1)."""
    return float(os.environ.get("ISO_RICCI_TOL_SCALE", "1.0"))


class Sense:
    """How a residual array is judged against its tolerance."""

    EQUALITY = "Equality"
    LESS_EQUAL = "LessEqual"
    GREATER_EQUAL = "GreaterEqual"


@dataclass(frozen=True)
class ResidualReport:
    """Per-point residuals of a differential identity or inequality.

    ``sense`` controls the verdict: Equality requires max|r| <= tol,
    LessEqual requires max r <= tol, GreaterEqual requires min r >= -tol.
    """

    grid: np.ndarray
    residuals: np.ndarray
    tolerance: float
    sense: str = Sense.EQUALITY
    label: str = ""
    max_abs: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        r = np.asarray(self.residuals, dtype=float)
        object.__setattr__(self, "max_abs", float(np.max(np.abs(r))) if r.size else 0.0)
        tol = self.tolerance * tol_scale()
        if self.sense == Sense.EQUALITY:
            ok = self.max_abs <= tol
        elif self.sense == Sense.LESS_EQUAL:
            ok = float(np.max(r)) <= tol if r.size else True
        elif self.sense == Sense.GREATER_EQUAL:
            ok = float(np.min(r)) >= -tol if r.size else True
        else:
            raise ValueError(f"unknown sense: {self.sense}")
        object.__setattr__(self, "passed", bool(ok))

    def worst(self) -> float:
        """Signed residual closest to violating the sense."""
        r = np.asarray(self.residuals, dtype=float)
        if r.size == 0:
            return 0.0
        if self.sense == Sense.LESS_EQUAL:
            return float(np.max(r))
        if self.sense == Sense.GREATER_EQUAL:
            return float(np.min(r))
        return self.max_abs


def fmt(x) -> str:
    """Deterministic shortest-roundtrip formatting for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header: Sequence[str], rows) -> None:
    """Write rows of scalars to CSV with a header line."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(c) for c in row) + "\n")
