"""Fitting utilities."""

from mottlight.analysis.fitting import (
    ExponentialFit,
    GaussianFit,
    LineFit,
    fit_exponential,
    fit_gaussian_1d,
    fit_line,
    gaussian,
)

__all__ = [
    "ExponentialFit",
    "GaussianFit",
    "LineFit",
    "fit_exponential",
    "fit_gaussian_1d",
    "fit_line",
    "gaussian",
]
