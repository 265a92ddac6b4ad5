"""Unity-filled Mott-insulator sample and Gaussian beam profiles.

The sample is a hard-edged ellipsoid with one atom per lattice cell of
volume (lambda_x/2)(lambda_y/2)(lambda_z/2). The probe propagates along x,
so transverse footprints are ellipses in (y, z).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Tuple

import numpy as np
from scipy import integrate, special

from mottlight.core.constants import RB87_D1, PhysicalConstants
from mottlight.core.exceptions import ParameterError
from mottlight.physics.angular import probe_strength_factor

logger = logging.getLogger("mottlight.cloud")

Vector3 = Tuple[float, float, float]


class Polarization(str, Enum):
    SIGMA_PLUS = "sigma+"
    SIGMA_MINUS = "sigma-"
    PI = "pi"


@dataclass(frozen=True)
class AtomCloud:
    """Ellipsoidal lattice sample.

    Attributes:
        radii: (r_x, r_y, r_z) semi-axes (m); x is the probe axis
        lattice_wavelengths: (lambda_x, lambda_y, lambda_z) (m)
        filling: atoms per lattice site
        line_strength_factor: relative strength of the |1> -> |3> probe line
    """

    radii: Vector3 = (8.6e-6, 13.1e-6, 13.1e-6)
    lattice_wavelengths: Vector3 = (765e-9, 844e-9, 844e-9)
    filling: float = 1.0
    line_strength_factor: float = field(default_factory=probe_strength_factor)

    def __post_init__(self):
        if len(self.radii) != 3 or any(not r > 0 for r in self.radii):
            raise ParameterError(f"radii must be three positive lengths, got {self.radii}")
        if len(self.lattice_wavelengths) != 3 or any(
            not w > 0 for w in self.lattice_wavelengths
        ):
            raise ParameterError(
                f"lattice wavelengths must be positive, got {self.lattice_wavelengths}"
            )
        if self.filling < 0:
            raise ParameterError(f"filling must be >= 0, got {self.filling}")
        if self.line_strength_factor < 0:
            raise ParameterError("line_strength_factor must be >= 0")

    @property
    def density(self) -> float:
        """Peak density n_0 = filling / cell volume (1/m^3)."""
        cell = math.prod(w / 2.0 for w in self.lattice_wavelengths)
        return self.filling / cell

    @property
    def volume(self) -> float:
        r_x, r_y, r_z = self.radii
        return 4.0 / 3.0 * math.pi * r_x * r_y * r_z

    def scaled_to_atom_number(self, atom_number: float) -> "AtomCloud":
        """Rescale all radii at fixed density to hold the given atom number."""
        current = self.density * self.volume
        if current <= 0 or atom_number <= 0:
            raise ParameterError("cannot rescale an empty cloud")
        factor = (atom_number / current) ** (1.0 / 3.0)
        logger.debug("Rescaling cloud radii by %.4f for N=%.4g", factor, atom_number)
        return replace(self, radii=tuple(r * factor for r in self.radii))

    def with_peak_optical_depth(
        self, alpha: float, constants: PhysicalConstants = RB87_D1
    ) -> "AtomCloud":
        """Copy whose effective line strength yields the given peak OD."""
        if alpha < 0:
            raise ParameterError(f"optical depth must be >= 0, got {alpha}")
        bare = constants.resonant_cross_section * column_density(self, 0.0, 0.0)
        if bare <= 0:
            raise ParameterError("cloud has no column density")
        return replace(self, line_strength_factor=alpha / bare)


@dataclass(frozen=True)
class BeamProfile:
    """Gaussian beam crossing the sample.

    Attributes:
        waist: 1/e^2 intensity radius w_0 (m)
        center: (y_0, z_0) offset from the cloud center (m)
        peak_intensity: on-axis intensity (W/m^2)
        detuning: laser detuning (rad/s)
        polarization: sigma+, sigma- or pi
    """

    waist: float
    center: Tuple[float, float] = (0.0, 0.0)
    peak_intensity: float = 0.0
    detuning: float = 0.0
    polarization: Polarization = Polarization.SIGMA_PLUS

    def __post_init__(self):
        if not self.waist > 0:
            raise ParameterError(f"beam waist must be > 0, got {self.waist}")
        if self.peak_intensity < 0:
            raise ParameterError(f"intensity must be >= 0, got {self.peak_intensity}")
        object.__setattr__(self, "polarization", Polarization(self.polarization))

    @classmethod
    def from_power(cls, waist: float, power: float, **kwargs) -> "BeamProfile":
        """Beam with total power (W) instead of peak intensity."""
        return cls(waist=waist, peak_intensity=peak_intensity_from_power(power, waist),
                   **kwargs)

    @property
    def total_power(self) -> float:
        return 0.5 * math.pi * self.waist**2 * self.peak_intensity

    def relative_intensity(self, y, z):
        """I(y, z) / I_peak."""
        y0, z0 = self.center
        rho2 = (np.asarray(y) - y0) ** 2 + (np.asarray(z) - z0) ** 2
        return np.exp(-2.0 * rho2 / self.waist**2)

    def intensity(self, y, z):
        """Intensity (W/m^2) at transverse position (y, z)."""
        return self.peak_intensity * self.relative_intensity(y, z)


def peak_intensity_from_power(power: float, waist: float) -> float:
    """On-axis intensity of a Gaussian beam, 2P / (pi w_0^2)."""
    if power < 0 or not waist > 0:
        raise ParameterError("power must be >= 0 and waist > 0")
    return 2.0 * power / (math.pi * waist**2)


def atom_number(cloud: AtomCloud) -> float:
    """N = n_0 x ellipsoid volume."""
    return cloud.density * cloud.volume


def column_density(cloud: AtomCloud, y, z):
    """Column density along x through transverse point (y, z) (1/m^2).

    n_0 * 2 r_x * sqrt(1 - y^2/r_y^2 - z^2/r_z^2) inside the footprint, 0 outside.
    Accepts scalars or broadcastable arrays.
    """
    r_x, r_y, r_z = cloud.radii
    inside = 1.0 - (np.asarray(y) / r_y) ** 2 - (np.asarray(z) / r_z) ** 2
    chord = 2.0 * r_x * np.sqrt(np.clip(inside, 0.0, None))
    result = cloud.density * chord
    return result if np.ndim(result) else float(result)


def peak_optical_depth(cloud: AtomCloud, constants: PhysicalConstants = RB87_D1) -> float:
    """Resonant peak OD alpha = sigma_0 x line strength x central column density."""
    return (
        constants.resonant_cross_section
        * cloud.line_strength_factor
        * column_density(cloud, 0.0, 0.0)
    )


def optical_depth_map(cloud: AtomCloud, y, z, constants: PhysicalConstants = RB87_D1):
    """Resonant OD of each transverse column."""
    return (
        constants.resonant_cross_section
        * cloud.line_strength_factor
        * column_density(cloud, y, z)
    )


def geometric_overlap(cloud: AtomCloud, probe: BeamProfile) -> float:
    """Fraction of probe power crossing the transverse footprint of the cloud.

    The z-integral over the ellipse is done with error functions, the
    remaining y-integral with adaptive quadrature in beam-waist units.
    """
    _, r_y, r_z = cloud.radii
    y0, z0 = probe.center
    w = probe.waist
    scale = math.sqrt(2.0) / w

    def strip(u):
        y = y0 + u * w
        half = r_z * math.sqrt(max(0.0, 1.0 - (y / r_y) ** 2))
        z_fraction = 0.5 * (
            special.erf(scale * (half - z0)) - special.erf(scale * (-half - z0))
        )
        return math.sqrt(2.0 / math.pi) * math.exp(-2.0 * u * u) * z_fraction

    lower = max((-r_y - y0) / w, -6.0)
    upper = min((r_y - y0) / w, 6.0)
    if lower >= upper:
        return 0.0
    value, _ = integrate.quad(strip, lower, upper, limit=200, epsabs=1e-12)
    return float(min(max(value, 0.0), 1.0))


def transverse_cells(cloud: AtomCloud, cells: int):
    """Cell-centered grid over the bounding box of the footprint.

    Returns:
        tuple: (y, z, area) with y, z of shape (cells, cells) and the cell area.
    """
    if cells < 8:
        raise ParameterError(f"transverse grid needs >= 8 cells, got {cells}")
    _, r_y, r_z = cloud.radii
    dy = 2.0 * r_y / cells
    dz = 2.0 * r_z / cells
    y = -r_y + dy * (np.arange(cells) + 0.5)
    z = -r_z + dz * (np.arange(cells) + 0.5)
    yy, zz = np.meshgrid(y, z, indexing="ij")
    return yy, zz, dy * dz
