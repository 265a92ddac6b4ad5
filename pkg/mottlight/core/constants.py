"""Physical constants and Rb-87 D1 line data.

All quantities are SI; frequencies are angular (rad/s).
"""

import math
from dataclasses import dataclass

from scipy import constants as const

from mottlight.core.exceptions import ParameterError

TWO_PI = 2.0 * math.pi

# Rb-87 5S1/2 -> 5P1/2 (D1)
RB87_D1_WAVELENGTH = 794.978851e-9  # m
RB87_D1_LINEWIDTH = TWO_PI * 5.75e6  # rad/s, natural linewidth Gamma
RB87_GROUND_SPLITTING = TWO_PI * 6.834682610904e9  # rad/s
RB87_NUCLEAR_SPIN = 1.5
RB87_D1_J_GROUND = 0.5
RB87_D1_J_EXCITED = 0.5
RB87_MASS = 86.909180527 * const.atomic_mass  # kg

# Lambda system levels as (F, m_F): |1> probe ground, |2> coupling ground, |3> excited
STATE_1 = (1, -1)
STATE_2 = (2, 1)
STATE_3 = (1, 0)
# pi-polarized probe leakage drives |1> -> |F'=1, m_F=-1>
STATE_PI_LEAK = (1, -1)


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants of the probe transition.

    Attributes:
        probe_wavelength: vacuum wavelength of the probe (m)
        natural_linewidth: excited-state decay rate Gamma (rad/s)
        ground_splitting: ground hyperfine splitting omega_21 (rad/s)
        speed_of_light: m/s
        reduced_planck: J s
    """

    probe_wavelength: float = RB87_D1_WAVELENGTH
    natural_linewidth: float = RB87_D1_LINEWIDTH
    ground_splitting: float = RB87_GROUND_SPLITTING
    speed_of_light: float = const.c
    reduced_planck: float = const.hbar

    def __post_init__(self):
        for name in (
            "probe_wavelength",
            "natural_linewidth",
            "ground_splitting",
            "speed_of_light",
            "reduced_planck",
        ):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive and finite, got {value}")

    @property
    def probe_wavevector(self) -> float:
        """k_p = 2 pi / lambda (1/m)."""
        return TWO_PI / self.probe_wavelength

    @property
    def resonant_cross_section(self) -> float:
        """Two-level resonant cross section sigma_0 = 3 lambda^2 / 2 pi (m^2)."""
        return 3.0 * self.probe_wavelength**2 / TWO_PI

    @property
    def default_gamma_31(self) -> float:
        """Radiative optical coherence decay Gamma/2 (rad/s)."""
        return 0.5 * self.natural_linewidth


RB87_D1 = PhysicalConstants()
