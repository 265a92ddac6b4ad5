"""Three-level Lambda system: parameters, dark state and EIT lineshape.

Convention: a field of Rabi frequency Omega enters the optical Bloch
equations as Omega/2. The same convention is used by the rate model and the
Maxwell-Bloch solver.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from mottlight.core.constants import RB87_D1, PhysicalConstants
from mottlight.core.exceptions import DegenerateStateError, ParameterError

logger = logging.getLogger("mottlight.physics")

# Saturation parameter above which the weak-probe lineshape no longer holds
WEAK_PROBE_LIMIT = 0.1

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class LambdaSystem:
    """Rabi frequencies, detunings and decay rates (all rad/s).

    Attributes:
        omega_c: coupling Rabi frequency on |2> <-> |3>
        omega_p: probe Rabi frequency on |1> <-> |3>
        omega_p_pi: pi-polarized probe leakage Rabi frequency
        delta: two-photon detuning omega_p - omega_c - omega_21
        delta_1p: one-photon probe detuning
        gamma_31: optical coherence decay
        gamma_21: ground-state coherence decay
    """

    omega_c: float
    omega_p: float = 0.0
    omega_p_pi: float = 0.0
    delta: float = 0.0
    delta_1p: float = 0.0
    gamma_31: float = RB87_D1.default_gamma_31
    gamma_21: float = 0.0

    def __post_init__(self):
        for name in ("omega_c", "omega_p", "omega_p_pi", "delta", "delta_1p",
                     "gamma_31", "gamma_21"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if self.omega_c < 0:
            raise ParameterError(f"omega_c must be >= 0, got {self.omega_c}")
        if self.omega_p < 0:
            raise ParameterError(f"omega_p must be >= 0, got {self.omega_p}")
        if self.omega_p_pi < 0 or self.omega_p_pi > self.omega_p:
            raise ParameterError(
                f"omega_p_pi must lie in [0, omega_p], got {self.omega_p_pi}"
            )
        if self.gamma_31 <= 0:
            raise ParameterError(f"gamma_31 must be > 0, got {self.gamma_31}")
        if self.gamma_21 < 0:
            raise ParameterError(f"gamma_21 must be >= 0, got {self.gamma_21}")

    def detuned(self, delta: float) -> "LambdaSystem":
        """Copy with the probe scanned: delta_1p follows delta."""
        return replace(self, delta=delta, delta_1p=delta)

    @property
    def pi_leak_fraction(self) -> float:
        return self.omega_p_pi / self.omega_p if self.omega_p > 0 else 0.0


@dataclass(frozen=True)
class DarkState:
    """Dark superposition of |1> and |2>.

    Attributes:
        amp_1: amplitude on |1> (uniform)
        amp_2_field: amplitude on |2> at each requested position
    """

    amp_1: complex
    amp_2_field: np.ndarray

    def norm(self) -> np.ndarray:
        """|amp_1|^2 + |amp_2|^2 at every position."""
        return abs(self.amp_1) ** 2 + np.abs(self.amp_2_field) ** 2


@dataclass(frozen=True)
class ScatteringRate:
    """Photon scattering rate with its regime flag.

    Attributes:
        rate: scattering rate (1/s)
        saturation: saturation parameter the rate was computed for
        out_of_regime: True when the weak-probe assumption is violated
    """

    rate: float
    saturation: float
    out_of_regime: bool

    def __float__(self):
        return float(self.rate)


def dark_state(omega_c, omega_p, k_c, k_p, positions) -> DarkState:
    """Construct the dark state for given fields and atom positions.

    amp_1 = Omega_c / Omega, amp_2(r) = -Omega_p exp(i (k_c - k_p) . r) / Omega
    with Omega = sqrt(Omega_c^2 + Omega_p^2).

    Args:
        omega_c: coupling Rabi frequency (rad/s)
        omega_p: probe Rabi frequency (rad/s)
        k_c: coupling wavevector, 3-vector (1/m)
        k_p: probe wavevector, 3-vector (1/m)
        positions: array of shape (n, 3) (m)

    Returns:
        DarkState with amp_2_field of shape (n,)

    Raises:
        DegenerateStateError: If both Rabi frequencies are zero.
        ParameterError: If a Rabi frequency is negative.
    """
    if omega_c < 0 or omega_p < 0:
        raise ParameterError("Rabi frequencies must be non-negative")
    total = math.hypot(omega_c, omega_p)
    if total == 0:
        raise DegenerateStateError("dark state undefined for Omega_c = Omega_p = 0")

    delta_k = np.asarray(k_c, dtype=float) - np.asarray(k_p, dtype=float)
    r = np.atleast_2d(np.asarray(positions, dtype=float))
    if r.shape[-1] != 3:
        raise ParameterError(f"positions must be 3-vectors, got shape {r.shape}")
    phase = r @ delta_k
    amp_1 = complex(omega_c / total)
    amp_2 = -(omega_p / total) * np.exp(1j * phase)
    return DarkState(amp_1=amp_1, amp_2_field=amp_2)


def lineshape(delta: ArrayLike, delta_1p: ArrayLike, omega_c: float,
              gamma_31: float, gamma_21: float) -> ArrayLike:
    """Vectorized EIT lineshape L(delta, delta_1p).

    L = -gamma_31 (delta + i gamma_21)
        / [(delta + i gamma_21)(delta_1p + i gamma_31) - Omega_c^2 / 4]

    so that Im L = 1 on two-level resonance (Omega_c = 0, delta_1p = 0).
    """
    if gamma_31 <= 0:
        raise ParameterError(f"gamma_31 must be > 0, got {gamma_31}")
    two_photon = np.asarray(delta) + 1j * gamma_21
    one_photon = np.asarray(delta_1p) + 1j * gamma_31
    if omega_c == 0:
        result = -gamma_31 / (one_photon + 0 * two_photon)
    else:
        result = -gamma_31 * two_photon / (two_photon * one_photon - 0.25 * omega_c**2)
    return result if np.ndim(result) else complex(result)


def susceptibility_lineshape(sys: LambdaSystem) -> complex:
    """Unit-normalized linear susceptibility of the probe transition.

    Im L is the absorption relative to a resonant two-level atom and
    Re L the corresponding dispersion.
    """
    return lineshape(sys.delta, sys.delta_1p, sys.omega_c, sys.gamma_31, sys.gamma_21)


def saturation_parameter(omega_p: float, constants: PhysicalConstants = RB87_D1) -> float:
    """Two-level saturation parameter s = 2 Omega_p^2 / Gamma^2."""
    return 2.0 * omega_p**2 / constants.natural_linewidth**2


def rabi_frequency_from_intensity(
    intensity: float,
    line_strength: float = 1.0,
    constants: PhysicalConstants = RB87_D1,
) -> float:
    """Rabi frequency (rad/s) of a beam of given intensity (W/m^2).

    Uses I_sat = hbar omega Gamma / (2 sigma_0) for a full-strength line and
    scales Omega^2 by the line strength factor.
    """
    if intensity < 0:
        raise ParameterError(f"intensity must be >= 0, got {intensity}")
    omega = constants.probe_wavevector * constants.speed_of_light
    saturation_intensity = (
        constants.reduced_planck * omega * constants.natural_linewidth
        / (2.0 * constants.resonant_cross_section)
    )
    return constants.natural_linewidth * math.sqrt(
        0.5 * line_strength * intensity / saturation_intensity
    )


def scattering_rate(
    sys: LambdaSystem,
    intensity_saturation_param: float,
    constants: PhysicalConstants = RB87_D1,
) -> ScatteringRate:
    """Weak-probe photon scattering rate R = (Gamma/2) s Im L.

    Args:
        sys: Lambda system (detunings, coupling, decays)
        intensity_saturation_param: probe saturation parameter s
        constants: supplies the natural linewidth Gamma

    Returns:
        ScatteringRate; out_of_regime is set when s > 0.1.

    Raises:
        ParameterError: If s is negative or not finite.
    """
    s = intensity_saturation_param
    if not (s >= 0 and math.isfinite(s)):
        raise ParameterError(f"saturation parameter must be >= 0, got {s}")
    out_of_regime = s > WEAK_PROBE_LIMIT
    if out_of_regime:
        logger.warning(
            "Saturation parameter %.3g exceeds weak-probe limit %.2g", s, WEAK_PROBE_LIMIT
        )
    absorption = susceptibility_lineshape(sys).imag
    rate = 0.5 * constants.natural_linewidth * s * absorption
    return ScatteringRate(rate=rate, saturation=s, out_of_regime=out_of_regime)
