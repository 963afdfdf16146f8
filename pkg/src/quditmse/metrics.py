"""Benchmark values, sample statistics, and asymptotic power-law fits.

The accuracy benchmark for one estimated state is (d-1)/N_T with N_T the
number of copies consumed.  The simulated measurement interferes the
unknown d-dimensional state with a known reference, which is a separable
measurement on a 2d-dimensional system, so convergence curves are
compared against the benchmark evaluated at dimension 2d.
"""

from dataclasses import dataclass

import numpy as np

from .core import squared_error
from .errors import EmptyData, InvalidData, InvalidDimension, RangeError


def gill_massar_mse(d, n_t):
    """Lower bound (d-1)/N_T on the mean squared error at dimension d."""
    if d < 2:
        raise InvalidDimension("benchmark needs d >= 2, got %r" % (d,))
    if n_t < 1:
        raise InvalidData("N_T must be >= 1, got %r" % (n_t,))
    return (d - 1.0) / n_t


def predicted_unitary_mse(d, alpha, n_t_star):
    """Expected unitary-estimation MSE d^2 (2d + alpha) / N_T*.

    alpha is the small excess over the per-column coefficient 2d observed
    in converged runs; N_T* counts copies over all d columns.  Dividing
    the same expression by d recovers the per-column form d(2d+alpha)/N_T.
    """
    if d < 2:
        raise InvalidDimension("prediction needs d >= 2, got %r" % (d,))
    if n_t_star < 1:
        raise InvalidData("N_T* must be >= 1, got %r" % (n_t_star,))
    return d * d * (2.0 * d + alpha) / n_t_star


def mse_over_estimates(target, estimates):
    """Mean squared error of a list of estimates of one target."""
    if len(estimates) == 0:
        raise EmptyData("no estimates given")
    return float(np.mean([squared_error(target, est) for est in estimates]))


@dataclass(frozen=True)
class SampleStatistics:
    mean: float
    median: float
    q1: float
    q3: float
    count: int


def summary_statistics(values):
    """Mean, median and quartiles of a sample.

    Median uses the midpoint convention for even counts; quartiles use
    linear interpolation (the inclusive method), so {1..8} gives
    q1 = 2.75 and q3 = 6.25.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyData("no values given")
    return SampleStatistics(
        mean=float(np.mean(values)),
        median=float(np.median(values)),
        q1=float(np.percentile(values, 25, method="linear")),
        q3=float(np.percentile(values, 75, method="linear")),
        count=int(values.size),
    )


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of mse = p / N_T^a over a window of iterations."""

    p: float
    a: float
    window: tuple
    residual: float


def power_law_fit(points, window):
    """Fit mse = p / N_T^a to (N_T, mse) points by log-log least squares.

    points must already be restricted to the window, which is recorded on
    the result as (k_lo, k_hi).  residual is the root-mean-square misfit
    of ln(mse).
    """
    points = list(points)
    if len(points) < 3:
        raise RangeError("need at least 3 points to fit, got %d" % len(points))
    n_t = np.array([float(p[0]) for p in points])
    mse = np.array([float(p[1]) for p in points])
    if np.any(n_t <= 0) or np.any(mse <= 0):
        raise InvalidData("power-law fit needs strictly positive data")
    x = np.log(n_t)
    y = np.log(mse)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return PowerLawFit(
        p=float(np.exp(intercept)),
        a=float(-slope),
        window=(int(window[0]), int(window[1])),
        residual=float(np.sqrt(np.mean(resid * resid))),
    )
