"""Rate-equation EIT spectroscopy: F=1 -> F=2 transfer versus two-photon detuning."""

from mottlight.spectroscopy.lineshape import (
    Feature,
    LineshapeScan,
    extract_fwhm,
    feature_center,
    scan_lineshape,
    window_depth,
)
from mottlight.spectroscopy.rate_model import (
    RateModel,
    SpectroscopyConfig,
    off_resonant_background,
    simulate_transfer,
    single_cell_transfer,
)

__all__ = [
    "Feature",
    "LineshapeScan",
    "extract_fwhm",
    "feature_center",
    "scan_lineshape",
    "window_depth",
    "RateModel",
    "SpectroscopyConfig",
    "off_resonant_background",
    "simulate_transfer",
    "single_cell_transfer",
]
