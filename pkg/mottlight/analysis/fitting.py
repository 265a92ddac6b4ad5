"""Least-squares fits shared by the experiment modules.

fit_exponential: storage-time decay A exp(-t/tau)
fit_gaussian_1d: camera row-sum profiles
fit_line: deflection angle versus interaction time
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.optimize import curve_fit

from mottlight.core.exceptions import DomainError, FitConvergenceError

logger = logging.getLogger("mottlight.analysis")


@dataclass(frozen=True)
class ExponentialFit:
    """Result of fitting A exp(-t/tau).

    tau is math.inf (and no_decay set) when the data show no decay.
    """

    tau: float
    tau_stderr: float
    amplitude: float
    amplitude_stderr: float
    no_decay: bool = False


@dataclass(frozen=True)
class GaussianFit:
    """Result of fitting a exp(-(x-c)^2 / 2 sigma^2) + b."""

    center: float
    width: float
    amplitude: float
    offset: float
    center_stderr: float
    width_stderr: float
    amplitude_stderr: float
    offset_stderr: float
    converged: bool = True


@dataclass(frozen=True)
class LineFit:
    """Result of a straight-line fit y = slope x + intercept."""

    slope: float
    intercept: float
    slope_stderr: float
    relative_residual: float


def _exp_decay(t, amplitude, rate):
    return amplitude * np.exp(-rate * t)


def gaussian(x, center, width, amplitude, offset):
    """1D Gaussian with additive offset."""
    return amplitude * np.exp(-0.5 * ((x - center) / width) ** 2) + offset


def _gaussian_jacobian(x, center, width, amplitude, offset):
    r = (x - center) / width
    g = np.exp(-0.5 * r**2)
    return np.column_stack(
        (amplitude * g * r / width, amplitude * g * r**2 / width, g, np.ones_like(x))
    )


def fit_exponential(times, values) -> ExponentialFit:
    """Fit A exp(-t/tau) to positive data.

    A log-linear fit provides the starting point for a nonlinear least-squares
    refinement on the untransformed values.

    Args:
        times: sample times (any consistent unit)
        values: strictly positive samples

    Returns:
        ExponentialFit in the units of times

    Raises:
        ValueError: fewer than 3 points or mismatched lengths
        DomainError: non-positive or non-finite values
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("times and values must be 1D arrays of equal length")
    if t.size < 3:
        raise ValueError(f"exponential fit needs >= 3 points, got {t.size}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise DomainError("exponential fit requires strictly positive values")

    log_y = np.log(y)
    if np.ptp(log_y) <= 1e-12:
        logger.warning("Exponential fit on constant series, tau set to infinity")
        return ExponentialFit(math.inf, math.inf, float(y.mean()), 0.0, no_decay=True)

    slope, intercept = np.polyfit(t, log_y, 1)
    p0 = (math.exp(intercept), -slope)
    try:
        popt, pcov = curve_fit(
            _exp_decay, t, y, p0=p0, ftol=1e-14, xtol=1e-14, gtol=1e-14, maxfev=10000
        )
    except RuntimeError as e:
        raise FitConvergenceError(f"exponential fit failed: {e}", last_iterate=p0) from e

    amplitude, rate = popt
    errors = np.sqrt(np.abs(np.diag(pcov))) if np.all(np.isfinite(pcov)) else (
        np.array([math.inf, math.inf])
    )
    if rate <= 0:
        logger.warning("Fitted decay rate %.3g is not positive, tau set to infinity", rate)
        return ExponentialFit(math.inf, math.inf, float(amplitude), float(errors[0]),
                              no_decay=True)
    tau = 1.0 / rate
    return ExponentialFit(
        tau=float(tau),
        tau_stderr=float(errors[1] / rate**2),
        amplitude=float(amplitude),
        amplitude_stderr=float(errors[0]),
    )


def fit_gaussian_1d(xs, ys) -> GaussianFit:
    """Fit a 1D Gaussian with offset to a profile.

    Args:
        xs: sample positions
        ys: sample values

    Returns:
        GaussianFit with standard errors; width is the standard deviation

    Raises:
        ValueError: fewer than 5 points or mismatched lengths
        FitConvergenceError: flat data or no convergence; carries the last
            parameter iterate (center, width, amplitude, offset)
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1D arrays of equal length")
    if x.size < 5:
        raise ValueError(f"Gaussian fit needs >= 5 points, got {x.size}")

    offset0 = float(min(y[0], y[-1]))
    peak = int(np.argmax(y))
    amplitude0 = float(y[peak] - offset0)
    peak_value = float(np.max(np.abs(y)))
    weights = np.clip(y - offset0, 0.0, None)
    if np.ptp(y) <= 1e-12 * peak_value or weights.sum() <= 0:
        p0 = (float(x[peak]), float(np.ptp(x)), 0.0, offset0)
        raise FitConvergenceError("Gaussian fit on flat data", last_iterate=p0)

    center0 = float(np.sum(weights * x) / weights.sum())
    width0 = float(np.sqrt(np.sum(weights * (x - center0) ** 2) / weights.sum()))
    if not width0 > 0:
        width0 = float(np.ptp(x)) / 4.0
    p0 = (center0, width0, amplitude0, offset0)

    # Fit in units of the moment width and peak value, centered on the first moment
    u = (x - center0) / width0
    v = y / peak_value
    q0 = (0.0, 1.0, amplitude0 / peak_value, offset0 / peak_value)
    try:
        qopt, qcov = curve_fit(
            gaussian, u, v, p0=q0, jac=_gaussian_jacobian,
            ftol=1e-12, xtol=1e-12, gtol=1e-12, maxfev=20000,
        )
    except RuntimeError as e:
        raise FitConvergenceError(f"Gaussian fit did not converge: {e}",
                                  last_iterate=p0) from e

    factors = np.array([width0, width0, peak_value, peak_value])
    center, width, amplitude, offset = qopt * factors
    center += center0
    if np.all(np.isfinite(qcov)):
        errors = np.sqrt(np.abs(np.diag(qcov))) * factors
    else:
        logger.debug("Gaussian fit covariance undefined, standard errors set to infinity")
        errors = np.full(4, math.inf)
    return GaussianFit(
        center=float(center),
        width=float(abs(width)),
        amplitude=float(amplitude),
        offset=float(offset),
        center_stderr=float(errors[0]),
        width_stderr=float(errors[1]),
        amplitude_stderr=float(errors[2]),
        offset_stderr=float(errors[3]),
    )


def fit_line(xs, ys) -> LineFit:
    """Ordinary least-squares straight line.

    relative_residual is the rms residual divided by the rms of the fitted
    values (0 for an exact line).

    Raises:
        ValueError: fewer than 2 distinct x values
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("line fit needs at least 2 distinct x values")
    result = stats.linregress(x, y)
    fitted = result.slope * x + result.intercept
    rms_fit = math.sqrt(float(np.mean(fitted**2)))
    rms_residual = math.sqrt(float(np.mean((y - fitted) ** 2)))
    relative = rms_residual / rms_fit if rms_fit > 0 else 0.0
    stderr = float(result.stderr) if x.size > 2 else 0.0
    return LineFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        slope_stderr=stderr,
        relative_residual=relative,
    )
