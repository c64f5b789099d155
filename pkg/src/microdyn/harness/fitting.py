"""Power-law exponent from (scale, deflection) pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class ScalingFitResult:
    exponent: float
    intercept: float
    r_squared: float
    n_points: int


def fit_scaling(pairs) -> ScalingFitResult:
    """Ordinary least squares of ln|deflection| on ln(s).

    Needs at least three points, every s > 0, and nonzero deflections of a
    single sign.
    """
    data = np.asarray(list(pairs), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError("pairs must be a sequence of (s, deflection)", "pairs")
    if len(data) < 3:
        raise DomainError(f"need at least 3 points, got {len(data)}", "pairs")
    s, y = data[:, 0], data[:, 1]
    if not np.all(np.isfinite(data)):
        raise DomainError("pairs must be finite", "pairs")
    if np.any(s <= 0):
        raise DomainError("scale values must be > 0", "s")
    if np.any(y == 0):
        raise DomainError("deflections must be nonzero", "deflection")
    if not (np.all(y > 0) or np.all(y < 0)):
        raise DomainError("deflections must all have the same sign", "deflection")
    if np.all(s == s[0]):
        raise DomainError("scale values must not all be equal", "s")

    lx, ly = np.log(s), np.log(np.abs(y))
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    # flat data is fitted exactly by exponent 0
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    if not math.isfinite(slope):
        raise DomainError("fit did not produce a finite exponent", "pairs")
    return ScalingFitResult(float(slope), float(intercept), r2, len(data))


def fit_line(x, y):
    """Least-squares line; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - fitted) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
