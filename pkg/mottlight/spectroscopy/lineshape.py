"""Transfer lineshape scans and width extraction."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.signal import find_peaks

from mottlight.core.exceptions import NoFeatureError, ParameterError
from mottlight.spectroscopy.rate_model import RateModel, SpectroscopyConfig
from mottlight.system.workers import ScanPool

logger = logging.getLogger("mottlight.spectroscopy")


class Feature(str, Enum):
    WINDOW = "window"
    LINE = "line"


@dataclass(frozen=True)
class LineshapeScan:
    """Transfer fraction N_2/N versus two-photon detuning.

    Attributes:
        detunings: two-photon detunings (rad/s)
        transfer_fractions: N_2/N per detuning
        out_of_regime: probe saturation above the weak-probe limit
    """

    detunings: np.ndarray
    transfer_fractions: np.ndarray
    out_of_regime: bool = False

    def __post_init__(self):
        detunings = np.asarray(self.detunings, dtype=float)
        fractions = np.asarray(self.transfer_fractions, dtype=float)
        if detunings.shape != fractions.shape or detunings.ndim != 1:
            raise ParameterError("detunings and fractions must have the same length")
        if fractions.size and (fractions.min() < 0 or fractions.max() > 1):
            raise ParameterError("transfer fractions must lie in [0, 1]")
        object.__setattr__(self, "detunings", detunings)
        object.__setattr__(self, "transfer_fractions", fractions)

    def __len__(self):
        return self.detunings.size


def scan_lineshape(
    config: SpectroscopyConfig,
    delta_list: Sequence[float],
    pool: Optional[ScanPool] = None,
) -> LineshapeScan:
    """Evaluate the transfer fraction at each detuning, preserving order.

    Args:
        config: rate-model inputs
        delta_list: two-photon detunings (rad/s)
        pool: optional started ScanPool for concurrent points

    Returns:
        LineshapeScan in the order of delta_list
    """
    deltas = [float(d) for d in delta_list]
    if not deltas:
        return LineshapeScan(np.empty(0), np.empty(0), config.out_of_regime)
    model = RateModel(config)
    logger.info("Scanning %d detunings", len(deltas))
    if pool is None:
        fractions = [model.transfer(d) for d in deltas]
    else:
        fractions = pool.map(model.transfer, deltas)
    return LineshapeScan(np.array(deltas), np.array(fractions), config.out_of_regime)


def _crossing(x, y, inner: int, outer: int, level: float) -> float:
    """Interpolated position where y crosses level between two adjacent samples."""
    y_in, y_out = y[inner], y[outer]
    if y_out == y_in:
        return float(x[outer])
    fraction = (level - y_in) / (y_out - y_in)
    return float(x[inner] + fraction * (x[outer] - x[inner]))


def _sorted(scan: LineshapeScan):
    order = np.argsort(scan.detunings)
    return scan.detunings[order], scan.transfer_fractions[order]


def _deepest_dip(y):
    """(index, prominence) of the most prominent local minimum."""
    scale = max(float(np.max(np.abs(y))), 1e-300) if y.size else 1.0
    dips, properties = find_peaks(-y, prominence=1e-9 * scale)
    if dips.size == 0:
        raise NoFeatureError("scan contains no transparency window")
    best = int(np.argmax(properties["prominences"]))
    return int(dips[best]), float(properties["prominences"][best])


def _window_width(x, y) -> float:
    center, prominence = _deepest_dip(y)
    half_level = y[center] + 0.5 * prominence

    left = center
    while left > 0 and y[left] < half_level:
        left -= 1
    right = center
    while right < y.size - 1 and y[right] < half_level:
        right += 1
    if y[left] < half_level or y[right] < half_level:
        raise NoFeatureError("transparency window is not resolved inside the scan")
    return _crossing(x, y, right - 1, right, half_level) - _crossing(
        x, y, left + 1, left, half_level
    )


def _line_width(x, y) -> float:
    baseline = min(y[0], y[-1])
    height = float(np.max(y)) - baseline
    if height <= 1e-12 * max(float(np.max(np.abs(y))), 1e-300):
        raise NoFeatureError("scan contains no absorption line")
    half_level = baseline + 0.5 * height
    above = np.nonzero(y >= half_level)[0]
    left, right = int(above[0]), int(above[-1])
    if left == 0 or right == y.size - 1:
        raise NoFeatureError("absorption line is not resolved inside the scan")
    return _crossing(x, y, right, right + 1, half_level) - _crossing(
        x, y, left, left - 1, half_level
    )


def extract_fwhm(scan: LineshapeScan, feature: Feature = Feature.WINDOW) -> float:
    """Full width at half maximum of a spectral feature (rad/s).

    window: the most prominent dip, measured at half of its depth below
        the lower of its two flanking maxima.
    line: the outer half-height crossings of the whole absorption envelope
        above the lower of the two scan end points.

    Raises:
        NoFeatureError: The feature is absent or not contained in the scan.
    """
    feature = Feature(feature)
    if len(scan) < 3:
        raise NoFeatureError("scan too short to contain a feature")
    x, y = _sorted(scan)
    if feature is Feature.WINDOW:
        width = _window_width(x, y)
    else:
        width = _line_width(x, y)
    logger.debug("Extracted %s FWHM %.4g rad/s", feature.value, width)
    return width


def feature_center(scan: LineshapeScan) -> float:
    """Detuning of the bottom of the most prominent transparency dip (rad/s).

    Raises:
        NoFeatureError: The scan has no dip.
    """
    x, y = _sorted(scan)
    center, _ = _deepest_dip(y)
    return float(x[center])


def window_depth(scan: LineshapeScan) -> float:
    """Depth of the most prominent transparency dip."""
    _, y = _sorted(scan)
    return _deepest_dip(y)[1]
