"""Least-squares line fits with r^2, shared by the scan analyses."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = ["LineFit", "fit_line", "fit_loglog"]


class LineFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def fit_line(x, y) -> LineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("need two matching 1-d arrays of length >= 2")
    if np.ptp(x) == 0:
        raise ValueError("degenerate fit: all abscissae identical")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / sst if sst > 0 else float("nan")
    return LineFit(float(slope), float(intercept), float(r2))


def fit_loglog(x, y) -> LineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive data")
    return fit_line(np.log(x), np.log(y))
