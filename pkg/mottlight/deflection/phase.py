"""Spin-wave maps and light-shift phase imprinting.

A far-detuned gradient beam shifts |1> and |2> differently. During the
interaction time t_int the stored spin wave picks up the local phase
phi(y, z) = (Delta_1 - Delta_2)(y, z) t_int, with shifts carried as angular
frequencies.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from mottlight.cloud.sample import AtomCloud, BeamProfile, column_density
from mottlight.core.constants import RB87_D1, TWO_PI, PhysicalConstants
from mottlight.core.exceptions import ParameterError
from mottlight.physics.angular import ab_initio_differential_shift

logger = logging.getLogger("mottlight.deflection")

# Differential light shift at the cloud center for the reference beam
REFERENCE_CENTER_SHIFT = TWO_PI * 7.7e3  # rad/s


class SlopeConvention(str, Enum):
    CLOUD_CENTER = "cloud_center"
    INTENSITY_WEIGHTED = "intensity_weighted"


def _reference_profile() -> BeamProfile:
    return BeamProfile(
        waist=42e-6,
        center=(20e-6, 0.0),
        peak_intensity=2.3e4,
        detuning=-TWO_PI * 20e9,
    )


@dataclass(frozen=True)
class GradientBeam:
    """Far-detuned beam imprinting a differential light shift.

    Attributes:
        profile: Gaussian beam; center is the offset from the cloud center
        shift_calibration: Delta_1 - Delta_2 per unit intensity (rad/s per W/m^2)
    """

    profile: BeamProfile = field(default_factory=_reference_profile)
    shift_calibration: Optional[float] = None

    def __post_init__(self):
        if self.profile.detuning == 0:
            raise ParameterError("gradient beam detuning must be nonzero")
        if self.shift_calibration is None:
            object.__setattr__(
                self, "shift_calibration", self.calibration_for(REFERENCE_CENTER_SHIFT)
            )

    def calibration_for(self, center_shift: float) -> float:
        """Calibration giving center_shift at the cloud center."""
        center_intensity = float(self.profile.intensity(0.0, 0.0))
        if center_intensity <= 0:
            return 0.0
        return center_shift / center_intensity

    @classmethod
    def calibrated(cls, profile: BeamProfile, center_shift: float) -> "GradientBeam":
        """Beam whose shift at the cloud center equals center_shift (rad/s)."""
        beam = cls(profile, shift_calibration=0.0)
        return replace(beam, shift_calibration=beam.calibration_for(center_shift))

    @classmethod
    def ab_initio(
        cls, profile: BeamProfile, constants: PhysicalConstants = RB87_D1
    ) -> "GradientBeam":
        """Beam calibrated from the D1 hyperfine structure instead of a measured shift."""
        reference = 1e4  # W/m^2; the estimate is linear in intensity
        calibration = ab_initio_differential_shift(reference, profile.detuning, constants)
        return cls(profile, shift_calibration=calibration / reference)

    def shift(self, y, z):
        """Delta_1 - Delta_2 at (y, z) (rad/s)."""
        return self.shift_calibration * self.profile.intensity(y, z)

    def shift_gradient(self, y, z):
        """d(Delta_1 - Delta_2)/dy at (y, z) (rad/s per m)."""
        y0, _ = self.profile.center
        return self.shift(y, z) * (-4.0 * (np.asarray(y) - y0) / self.profile.waist**2)

    def mirrored(self) -> "GradientBeam":
        """Same beam placed on the opposite side of the cloud (y0 -> -y0)."""
        y0, z0 = self.profile.center
        return replace(self, profile=replace(self.profile, center=(-y0, z0)))


@dataclass(frozen=True)
class SpinWaveMap:
    """Transverse spin-coherence amplitude on a square grid.

    Attributes:
        y: grid coordinates along the deflection axis (m)
        z: grid coordinates along the other transverse axis (m)
        amplitude: complex amplitude, shape (len(y), len(z))
    """

    y: np.ndarray
    z: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        amplitude = np.asarray(self.amplitude, dtype=complex)
        if amplitude.shape != (len(self.y), len(self.z)):
            raise ParameterError(
                f"amplitude shape {amplitude.shape} does not match grid "
                f"({len(self.y)}, {len(self.z)})"
            )
        if not np.all(np.isfinite(amplitude)):
            raise ParameterError("spin-wave amplitude must be finite")
        object.__setattr__(self, "amplitude", amplitude)

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])

    @property
    def span(self) -> float:
        return float(len(self.y) * self.dy)

    def energy(self) -> float:
        """sum |amplitude|^2 x cell area."""
        return float(np.sum(np.abs(self.amplitude) ** 2) * self.dy * self.dz)

    def mesh(self):
        return np.meshgrid(self.y, self.z, indexing="ij")

    @classmethod
    def from_storage(
        cls,
        cloud: AtomCloud,
        probe: BeamProfile,
        points: int = 256,
        span: float = 512e-6,
    ) -> "SpinWaveMap":
        """Spin wave left by a stored probe pulse.

        The amplitude follows the probe field amplitude and the column
        density of the cloud, normalized to the central column.

        Raises:
            ParameterError: grid narrower than 4 probe waists
        """
        if span < 4.0 * probe.waist:
            raise ParameterError(
                f"grid span {span:.3g} m is below 4 probe waists ({4 * probe.waist:.3g} m)"
            )
        if points < 16:
            raise ParameterError(f"grid needs >= 16 points, got {points}")
        step = span / points
        axis = (np.arange(points) - points // 2) * step
        yy, zz = np.meshgrid(axis, axis, indexing="ij")
        columns = column_density(cloud, yy, zz)
        peak = column_density(cloud, 0.0, 0.0)
        field_amplitude = np.sqrt(probe.relative_intensity(yy, zz))
        amplitude = field_amplitude * columns / peak if peak > 0 else np.zeros_like(yy)
        logger.debug(
            "Spin wave on %dx%d grid, span %.3g m, cloud radii %s",
            points, points, span, cloud.radii,
        )
        return cls(axis.copy(), axis.copy(), amplitude.astype(complex))


def light_shift_profile(beam: GradientBeam, grid: SpinWaveMap) -> np.ndarray:
    """Differential light shift Delta_1 - Delta_2 on the grid cells (rad/s)."""
    yy, zz = grid.mesh()
    return np.asarray(beam.shift(yy, zz), dtype=float)


def phase_imprint(sw: SpinWaveMap, shifts, t_int: float) -> SpinWaveMap:
    """Multiply the spin wave by exp(i shift t_int).

    Raises:
        ParameterError: negative interaction time or mismatched shift map
    """
    if t_int < 0:
        raise ParameterError(f"interaction time must be >= 0, got {t_int}")
    shifts = np.asarray(shifts, dtype=float)
    if shifts.shape not in ((), sw.amplitude.shape):
        raise ParameterError("shift map does not match the spin-wave grid")
    if t_int == 0:
        return sw
    return replace(sw, amplitude=sw.amplitude * np.exp(1j * shifts * t_int))


def deflection_slope(
    beam: GradientBeam,
    constants: PhysicalConstants = RB87_D1,
    convention: SlopeConvention = SlopeConvention.CLOUD_CENTER,
    spin_wave: Optional[SpinWaveMap] = None,
) -> float:
    """Analytic deflection rate d(beta)/d(t_int) (rad/s).

    cloud_center: shift gradient at the cloud center divided by k_p.
    intensity_weighted: gradient averaged with weight |spin wave|^2, which
        is what the centroid of the retrieved beam measures.

    Raises:
        ParameterError: intensity_weighted without a spin wave
    """
    convention = SlopeConvention(convention)
    k_p = constants.probe_wavevector
    if convention is SlopeConvention.CLOUD_CENTER:
        gradient = float(beam.shift_gradient(0.0, 0.0))
    else:
        if spin_wave is None:
            raise ParameterError("intensity-weighted slope needs a spin wave")
        yy, zz = spin_wave.mesh()
        weight = np.abs(spin_wave.amplitude) ** 2
        total = weight.sum()
        if total <= 0:
            return 0.0
        gradient = float(np.sum(weight * beam.shift_gradient(yy, zz)) / total)
    slope = gradient / k_p
    logger.debug("Analytic deflection slope (%s): %.4g rad/s", convention.value, slope)
    return slope


def center_gradient_hz_per_um(beam: GradientBeam) -> float:
    """Shift gradient at the cloud center in Hz per micrometer."""
    return float(beam.shift_gradient(0.0, 0.0)) / (TWO_PI * 1e6)


def envelope_radius(sw: SpinWaveMap) -> float:
    """1/e^2 radius along y of |amplitude|^2, taken as twice the rms width."""
    weight = np.sum(np.abs(sw.amplitude) ** 2, axis=1)
    total = weight.sum()
    if total <= 0:
        return 0.0
    mean = np.sum(weight * sw.y) / total
    return float(2.0 * np.sqrt(np.sum(weight * (sw.y - mean) ** 2) / total))


def phase_variation(beam: GradientBeam, waist: float, t_int: float) -> float:
    """Imprinted phase across +-waist left after removing the linear tilt (rad).

    A pure tilt only steers the beam; this residual is what distorts it.
    """
    curvature = (
        beam.shift(waist, 0.0) + beam.shift(-waist, 0.0) - 2.0 * beam.shift(0.0, 0.0)
    )
    return 0.5 * abs(float(curvature)) * t_int


def is_linear_regime(beam: GradientBeam, waist: float, t_int: float) -> bool:
    return phase_variation(beam, waist, t_int) < math.pi / 4
