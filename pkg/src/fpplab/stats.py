"""Small statistics helpers: weighted least squares, binomial intervals, means."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps


@dataclass(frozen=True)
class ExponentFit:
    x: tuple[float, ...]
    y: tuple[float, ...]
    slope: float
    slope_ci: tuple[float, float]
    intercept: float
    r2: float
    level: float = 0.95
    dropped: tuple[float, ...] = ()

    @property
    def slope_stderr(self) -> float:
        return (self.slope_ci[1] - self.slope_ci[0]) / (2 * sps.t.ppf(0.5 + self.level / 2, max(len(self.x) - 2, 1)))

    def slope_below(self, value: float) -> bool:
        """Upper end of the slope interval strictly below ``value``."""
        return self.slope_ci[1] < value

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "slope_ci": list(self.slope_ci),
            "intercept": self.intercept,
            "r2": self.r2,
            "n_points": len(self.x),
        }


class FitError(ValueError):
    pass


MIN_POINTS = 4


def wls_fit(x, y, sigma=None, level: float = 0.95) -> ExponentFit:
    """Fit y = b + a x with weights 1/sigma^2 and a Student-t interval for a.

    The residual scale is estimated from the data, so sigma only sets relative
    weights.  Fewer than four points are refused.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise FitError("x and y differ in shape")
    if len(x) < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} points, got {len(x)}")
    if sigma is None:
        w = np.ones_like(x)
    else:
        s = np.asarray(sigma, dtype=float)
        if (s <= 0).any() or not np.isfinite(s).all():
            raise FitError("sigma must be positive and finite")
        w = 1.0 / s**2
    X = np.column_stack([np.ones_like(x), x])
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    resid = y - X @ beta
    dof = len(x) - 2
    s2 = float((w * resid**2).sum() / dof)
    cov = s2 * np.linalg.inv((X * w[:, None]).T @ X)
    se = math.sqrt(max(cov[1, 1], 0.0))
    q = sps.t.ppf(0.5 + level / 2, dof)
    ybar = float((w * y).sum() / w.sum())
    ss_tot = float((w * (y - ybar) ** 2).sum())
    r2 = 1.0 - float((w * resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    a = float(beta[1])
    return ExponentFit(tuple(x.tolist()), tuple(y.tolist()), a, (a - q * se, a + q * se), float(beta[0]), r2, level)


def binomial_ci(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval."""
    if n <= 0:
        raise ValueError("n must be positive")
    a = 1 - level
    lo = 0.0 if k == 0 else float(sps.beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(sps.beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


def mean_stderr(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("no values")
    m = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return m, se


def z_value(level: float = 0.95) -> float:
    return float(sps.norm.ppf(0.5 + level / 2))
