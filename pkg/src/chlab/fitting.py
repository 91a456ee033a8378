"""Least-squares rate fitting on log2/log-log data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

__all__ = ["FitResult", "fit_log2_slope", "fit_loglog_slope", "fit_quadratic_offset"]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float  # RMS residual of the fitted log data

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
        }


def _line_fit(x: np.ndarray, y: np.ndarray) -> FitResult:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def fit_log2_slope(x, values) -> FitResult:
    """Fit log2(values) ~ slope * x + intercept (x is typically n)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0):
        raise ValueError("rate fitting needs positive values")
    return _line_fit(x, np.log2(v))


def fit_loglog_slope(x, values) -> FitResult:
    """Fit log(values) ~ slope * log(x) + intercept (x positive)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(x <= 0) or np.any(v <= 0):
        raise ValueError("log-log fitting needs positive data")
    return _line_fit(np.log(x), np.log(v))


def fit_quadratic_offset(times, values) -> tuple[float, float, float]:
    """Nonnegative least squares for values ~ a * t^2 + b.

    Returns (a, b, relative_l2_residual); the nonnegativity keeps the
    offset meaningful as a size (the data being fitted are norms).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    design = np.column_stack([t * t, np.ones_like(t)])
    coef, _ = scipy.optimize.nnls(design, y)
    resid = y - design @ coef
    scale = float(np.linalg.norm(y))
    rel = float(np.linalg.norm(resid)) / scale if scale > 0 else 0.0
    return float(coef[0]), float(coef[1]), rel
