"""Point estimation of the edge probability from an observed count series.

Two estimators, both reading nothing but the T x n count matrix:

* method of moments ("mom" / "mom-known-mean"): match the empirical lag-1
  covariance to its closed form and invert.  Valid when the recorded window
  is (approximately) stationary — use a burn-in when simulating.
* least squares ("ls"): invert the slope of the one-step conditional mean,
  estimated by the ratio of lagged to instantaneous second moments.  The
  underlying relation holds at every step, so this estimator needs no
  stationarity assumption at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moment_kernel import (
    P_MIN,
    ModelDims,
    invert_monotone_decreasing,
    lag1_cov,
    ls_slope,
)
from .simulator import ObservationSeries

__all__ = [
    "SummaryStats",
    "EstimationReport",
    "DegenerateSeriesError",
    "summarize",
    "estimate_mom",
    "estimate_ls",
]


class DegenerateSeriesError(ValueError):
    """The series carries no information about p (perfectly uniform counts)."""


@dataclass(frozen=True, eq=False)
class SummaryStats:
    """Sufficient statistics of a series for both estimators.

    Products and squares are averaged over the window t = 1..T-1 with
    divisor T-1 — the only window on which every lag-1 product is defined —
    while ``mean_counts`` averages the full window with divisor T.
    ``lag1_total`` and ``square_total`` keep the raw integer sums so that
    downstream ratios (and the degeneracy test) are exact.
    """

    dims: ModelDims
    T: int
    mean_counts: np.ndarray  # (n,), (1/T) sum_t count[i, t]
    lag1_products: np.ndarray  # (n,), (1/(T-1)) sum_{t<T} count[i, t] * count[i, t+1]
    squares: np.ndarray  # (n,), (1/(T-1)) sum_{t<T} count[i, t]^2
    lag1_total: int
    square_total: int
    c_hat: float
    c_hat_known_mean: float


@dataclass(frozen=True)
class EstimationReport:
    """One point estimate with its inversion diagnostics."""

    method: str  # "mom" | "mom-known-mean" | "ls"
    p_hat: float
    statistic: float  # the raw inverted scalar, before any clamping
    clamped: str  # "none" | "low" | "high"
    bracket: tuple[float, float]
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "p_hat": self.p_hat,
            "statistic": self.statistic,
            "clamped": self.clamped,
            "bracket_lo": self.bracket[0],
            "bracket_hi": self.bracket[1],
            "tol": self.tol,
        }


def summarize(series: ObservationSeries) -> SummaryStats:
    """Reduce a series to the statistics both estimators consume."""
    if series.T < 2:
        raise ValueError(f"need at least 2 time steps for lag-1 statistics, got {series.T}")
    counts = series.counts
    n, m = series.dims.n, series.dims.m
    T = series.T
    head = counts[:-1]
    prod_sums = (head * counts[1:]).sum(axis=0)
    sq_sums = (head * head).sum(axis=0)
    mean_counts = counts.sum(axis=0) / T
    lag1_products = prod_sums / (T - 1)
    squares = sq_sums / (T - 1)
    c_hat = float(np.mean(lag1_products - mean_counts**2))
    c_hat_known_mean = float(np.mean(lag1_products) - (m / n) ** 2)
    return SummaryStats(
        dims=series.dims,
        T=T,
        mean_counts=mean_counts,
        lag1_products=lag1_products,
        squares=squares,
        lag1_total=int(prod_sums.sum()),
        square_total=int(sq_sums.sum()),
        c_hat=c_hat,
        c_hat_known_mean=c_hat_known_mean,
    )


def estimate_mom(
    stats: SummaryStats,
    variant: str = "sample-mean",
    bracket: tuple[float, float] = (P_MIN, 1.0),
    tol: float = 1e-10,
) -> EstimationReport:
    """Invert the empirical lag-1 covariance through its closed form.

    ``variant`` picks the covariance centering: "sample-mean" subtracts the
    per-vertex empirical means, "known-mean" subtracts the exact stationary
    mean m/n.  Targets outside the covariance range clamp to a bracket end
    and are flagged in the report.
    """
    if variant not in ("sample-mean", "known-mean"):
        raise ValueError(f"unknown variant {variant!r}")
    target = stats.c_hat if variant == "sample-mean" else stats.c_hat_known_mean
    lo, hi = bracket
    inv = invert_monotone_decreasing(
        target, lambda q: lag1_cov(stats.dims, q), lo, hi, tol
    )
    return EstimationReport(
        method="mom" if variant == "sample-mean" else "mom-known-mean",
        p_hat=inv.p,
        statistic=target,
        clamped=inv.clamped,
        bracket=(lo, hi),
        tol=tol,
    )


def estimate_ls(stats: SummaryStats, tol: float = 1e-10) -> EstimationReport:
    """Invert the one-step conditional-mean slope; needs no stationarity.

    The slope is estimated by r = (n * sum lag-1 products - m^2 (T-1)) /
    (n * sum squares - m^2 (T-1)), computed here in exact integer
    arithmetic.  A zero denominator means the counts were perfectly uniform
    at every step of the window — p is unidentifiable and the estimator
    refuses to fabricate a value.  Ratios pushed outside [0, 1] by noise
    clamp to an endpoint with a flag.
    """
    n, m = stats.dims.n, stats.dims.m
    scale = m * m * (stats.T - 1)
    den = n * stats.square_total - scale
    if den == 0:
        raise DegenerateSeriesError(
            "counts are uniform and constant over the whole window; "
            "the series carries no information about p"
        )
    ratio = (n * stats.lag1_total - scale) / den
    inv = invert_monotone_decreasing(
        ratio, lambda q: ls_slope(n, q), 0.0, 1.0, tol
    )
    return EstimationReport(
        method="ls",
        p_hat=inv.p,
        statistic=ratio,
        clamped=inv.clamped,
        bracket=(0.0, 1.0),
        tol=tol,
    )
