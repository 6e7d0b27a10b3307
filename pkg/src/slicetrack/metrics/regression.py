"""Ordinary least squares line fit with R-squared."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }


def ols_fit(points: Iterable[tuple[float, float]]) -> RegressionFit:
    """Least-squares y = slope * x + intercept.

    R^2 = 1 - SS_res / SS_tot; when every y is identical and residuals are
    zero, R^2 is 1 by convention.
    """
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    if n < 2:
        raise ValueError("insufficient points")
    x_mean = math.fsum(x for x, _ in pts) / n
    y_mean = math.fsum(y for _, y in pts) / n
    s_xx = math.fsum((x - x_mean) ** 2 for x, _ in pts)
    if s_xx == 0.0:
        raise ValueError("degenerate abscissa")
    s_xy = math.fsum((x - x_mean) * (y - y_mean) for x, y in pts)
    slope = s_xy / s_xx
    intercept = y_mean - slope * x_mean
    ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in pts)
    ss_tot = math.fsum((y - y_mean) ** 2 for _, y in pts)
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else -math.inf
    else:
        r_squared = 1.0 - ss_res / ss_tot
    if not all(map(math.isfinite, (slope, intercept))):
        raise ValueError("non-finite fit coefficients")
    return RegressionFit(slope=slope, intercept=intercept, r_squared=r_squared, n_points=n)
