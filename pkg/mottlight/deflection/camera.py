"""Retrieval, paraxial propagation to a defocused camera and centroid analysis.

The retrieved field has the transverse profile of the spin wave. It is
propagated over the defocus distance with the angular-spectrum method,
E(k) -> E(k) exp(-i (k_y^2 + k_z^2) D / (2 k_p)), which is unitary on the
grid. The image is summed along z and a 1D Gaussian fit gives the centroid
shift delta_y; beta = delta_y / D.
"""

import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mottlight.analysis.fitting import GaussianFit, LineFit, fit_gaussian_1d, fit_line
from mottlight.core.constants import RB87_D1, PhysicalConstants
from mottlight.core.exceptions import GridTooSmallError, ParameterError
from mottlight.deflection.phase import (
    GradientBeam,
    SpinWaveMap,
    envelope_radius,
    is_linear_regime,
    light_shift_profile,
    phase_imprint,
)
from mottlight.system.workers import ScanPool

logger = logging.getLogger("mottlight.deflection")

# Fraction of the grid width per side treated as the aliasing band
EDGE_BAND_FRACTION = 1.0 / 32.0
ALIASING_LIMIT = 0.01
DEFAULT_DEFOCUS = 1e-3  # m


@dataclass(frozen=True)
class DeflectionResult:
    """Camera image and extracted deflection.

    Attributes:
        image: intensity |E|^2 on the camera grid, shape (len(y), len(z))
        y: camera coordinates along the deflection axis (m)
        row_sums: image summed along z
        centroid_shift: fitted center delta_y (m)
        defocus: propagation distance D (m)
        beta: deflection angle delta_y / D (rad)
        fit: Gaussian fit of the row sums
    """

    image: np.ndarray
    y: np.ndarray
    row_sums: np.ndarray
    centroid_shift: float
    defocus: float
    beta: float
    fit: GaussianFit

    @property
    def energy(self) -> float:
        return float(self.image.sum())


def _edge_fraction(image: np.ndarray) -> float:
    band = max(1, int(round(image.shape[0] * EDGE_BAND_FRACTION)))
    total = image.sum()
    if total <= 0:
        return 0.0
    interior = image[band:-band, band:-band].sum()
    return float((total - interior) / total)


def angular_spectrum(field: np.ndarray, dy: float, dz: float, k: float, distance: float):
    """Paraxial angular-spectrum propagation of a sampled field over distance."""
    ky = 2.0 * np.pi * np.fft.fftfreq(field.shape[0], d=dy)
    kz = 2.0 * np.pi * np.fft.fftfreq(field.shape[1], d=dz)
    kyy, kzz = np.meshgrid(ky, kz, indexing="ij")
    transfer = np.exp(-1j * (kyy**2 + kzz**2) * distance / (2.0 * k))
    spectrum = np.fft.fft2(field, norm="ortho")
    return np.fft.ifft2(spectrum * transfer, norm="ortho")


def propagate_to_camera(
    sw: SpinWaveMap, k_p: float, defocus: float = DEFAULT_DEFOCUS, energy_factor: float = 1.0
) -> DeflectionResult:
    """Retrieve the spin wave and image it at a defocused camera.

    Args:
        sw: spin wave (possibly phase-imprinted)
        k_p: probe wavevector (1/m)
        defocus: distance between focal plane and camera (m)
        energy_factor: scalar retrieval factor (e.g. storage decay)

    Raises:
        GridTooSmallError: more than 1% of the image energy near the grid edge
        ParameterError: non-positive wavevector or negative defocus
    """
    if not k_p > 0:
        raise ParameterError(f"probe wavevector must be > 0, got {k_p}")
    if defocus < 0:
        raise ParameterError(f"defocus must be >= 0, got {defocus}")
    field = angular_spectrum(sw.amplitude, sw.dy, sw.dz, k_p, defocus)
    image = energy_factor * np.abs(field) ** 2

    edge = _edge_fraction(image)
    if edge > ALIASING_LIMIT:
        raise GridTooSmallError(
            f"{edge:.2%} of the camera image lies at the grid edge; "
            f"enlarge the grid span or reduce the defocus"
        )

    row_sums = image.sum(axis=1)
    fit = fit_gaussian_1d(sw.y, row_sums)
    beta = fit.center / defocus if defocus > 0 else 0.0
    return DeflectionResult(
        image=image,
        y=sw.y,
        row_sums=row_sums,
        centroid_shift=fit.center,
        defocus=defocus,
        beta=beta,
        fit=fit,
    )


@dataclass(frozen=True)
class DeflectionScan:
    """Deflection angle versus interaction time.

    Attributes:
        interaction_times: t_int values (s)
        betas: deflection angles (rad)
        results: DeflectionResult per t_int
        fit: straight-line fit of beta versus t_int (None for < 2 distinct times)
        wall_time: seconds spent
    """

    interaction_times: np.ndarray
    betas: np.ndarray
    results: tuple
    fit: Optional[LineFit]
    wall_time: float = 0.0

    @property
    def slope(self) -> Optional[float]:
        """Fitted d(beta)/d(t_int) (rad/s)."""
        return self.fit.slope if self.fit is not None else None


def simulate_deflection_scan(
    t_int_list: Sequence[float],
    beam: GradientBeam,
    spin_wave: SpinWaveMap,
    defocus: float = DEFAULT_DEFOCUS,
    constants: PhysicalConstants = RB87_D1,
    energy_factor: float = 1.0,
    pool: Optional[ScanPool] = None,
) -> DeflectionScan:
    """Imprint, propagate and locate the retrieved beam for every t_int.

    Returns:
        DeflectionScan with a least-squares slope when >= 2 distinct t_int
    """
    started = time.perf_counter()
    times = [float(t) for t in t_int_list]
    if any(t < 0 for t in times):
        raise ParameterError("interaction times must be >= 0")
    shifts = light_shift_profile(beam, spin_wave)
    k_p = constants.probe_wavevector
    waist = envelope_radius(spin_wave)
    for t in times:
        if not is_linear_regime(beam, waist, t):
            logger.warning(
                "t_int=%.3g s imprints more than pi/4 of non-linear phase "
                "across the envelope; deflection is no longer linear", t,
            )

    def point(t_int):
        imprinted = phase_imprint(spin_wave, shifts, t_int)
        return propagate_to_camera(imprinted, k_p, defocus, energy_factor)

    results = pool.map(point, times) if pool is not None else [point(t) for t in times]
    betas = np.array([r.beta for r in results])
    fit = None
    if len(set(times)) >= 2:
        fit = fit_line(times, betas)
        logger.info("Deflection slope %.4g rad/s over %d points", fit.slope, len(times))
    return DeflectionScan(
        np.array(times), betas, tuple(results), fit, time.perf_counter() - started
    )
