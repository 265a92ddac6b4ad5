"""Angular-momentum factors of the Rb-87 D1 line.

Relative transition strengths and decay branching ratios are built from
Wigner 3j and 6j symbols. A strength factor of 1 corresponds to a transition
with the full reduced dipole moment, i.e. the resonant cross section
3 lambda^2 / 2 pi.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

from sympy import Rational
from sympy.physics.wigner import wigner_3j, wigner_6j

from mottlight.core.constants import (
    RB87_D1,
    RB87_D1_J_EXCITED,
    RB87_D1_J_GROUND,
    RB87_NUCLEAR_SPIN,
    STATE_1,
    STATE_2,
    STATE_3,
    STATE_PI_LEAK,
    PhysicalConstants,
    TWO_PI,
)
from mottlight.core.exceptions import ParameterError

logger = logging.getLogger("mottlight.physics")

# 5P1/2 hyperfine splitting, F'=2 above F'=1
RB87_D1_EXCITED_SPLITTING = TWO_PI * 814.5e6  # rad/s

Level = Tuple[float, float]


def _r(value: float) -> Rational:
    return Rational(value).limit_denominator(4)


@lru_cache(maxsize=None)
def hyperfine_strength(
    f_ground: float,
    f_excited: float,
    j_ground: float = RB87_D1_J_GROUND,
    j_excited: float = RB87_D1_J_EXCITED,
    nuclear_spin: float = RB87_NUCLEAR_SPIN,
) -> float:
    """Relative hyperfine strength S_FF' (sums to 1 over F' for fixed F)."""
    six_j = wigner_6j(
        _r(j_ground), _r(j_excited), 1, _r(f_excited), _r(f_ground), _r(nuclear_spin)
    )
    return float((2 * f_excited + 1) * (2 * j_ground + 1) * six_j**2)


@lru_cache(maxsize=None)
def line_strength_factor(ground: Level, excited: Level) -> float:
    """Strength of |F, m> -> |F', m'> relative to a full-strength two-level line.

    Args:
        ground: (F, m_F) of the lower state
        excited: (F', m_F') of the upper state

    Returns:
        float: 0 for forbidden transitions; 1/12 for |1,-1> -> |1',0>
    """
    f_g, m_g = ground
    f_e, m_e = excited
    if abs(m_g) > f_g or abs(m_e) > f_e:
        raise ParameterError(f"Invalid magnetic sublevels {ground} -> {excited}")
    q = m_g - m_e
    if abs(q) > 1:
        return 0.0
    three_j = wigner_3j(_r(f_e), 1, _r(f_g), _r(m_e), _r(q), _r(-m_g))
    return float(
        hyperfine_strength(f_g, f_e) * (2 * f_g + 1) * three_j**2
    )


@lru_cache(maxsize=None)
def branching_ratio(excited: Level, f_ground: float) -> float:
    """Probability that |F', m'> decays into the ground manifold F.

    Sums the emission strengths over all m_F of F and normalizes by the
    sum over both D1 ground manifolds.
    """
    def manifold_weight(f_g):
        return sum(
            line_strength_factor((f_g, m), excited)
            for m in _sublevels(f_g)
        )

    total = manifold_weight(1) + manifold_weight(2)
    return manifold_weight(f_ground) / total


def _sublevels(f: float):
    count = int(round(2 * f + 1))
    return [-f + i for i in range(count)]


def ground_state_light_shift(
    ground: Level,
    rabi_full_squared: float,
    detuning_from_f1_excited: float,
    polarization: int = 1,
) -> float:
    """Far-detuned light shift of one ground sublevel (rad/s).

    Sums |Omega|^2 / (4 Delta) over both D1 excited hyperfine levels
    reachable with the given polarization (q = +1 for sigma+).

    Args:
        ground: (F, m_F)
        rabi_full_squared: Omega_0^2 of a full-strength transition (rad^2/s^2)
        detuning_from_f1_excited: laser detuning from |F> -> |F'=1> (rad/s)
        polarization: spherical component q of the light
    """
    f_g, m_g = ground
    m_e = m_g + polarization
    shift = 0.0
    for f_e, offset in ((1, 0.0), (2, RB87_D1_EXCITED_SPLITTING)):
        if abs(m_e) > f_e:
            continue
        strength = line_strength_factor(ground, (f_e, m_e))
        detuning = detuning_from_f1_excited - offset
        shift += rabi_full_squared * strength / (4.0 * detuning)
    return shift


def ab_initio_differential_shift(
    intensity: float,
    detuning_from_23: float,
    constants: PhysicalConstants = RB87_D1,
) -> float:
    """Estimate Delta_1 - Delta_2 for a sigma+ beam from atomic structure (rad/s).

    Only the D1 line is summed and the beam is taken as purely sigma+; the
    result cross-checks the calibrated shift to within a small factor.

    Args:
        intensity: local intensity (W/m^2)
        detuning_from_23: detuning from |2> -> |3> = |F=2> -> |F'=1> (rad/s)
    """
    if intensity < 0:
        raise ParameterError(f"intensity must be >= 0, got {intensity}")
    if detuning_from_23 == 0:
        raise ParameterError("detuning must be nonzero")
    omega = TWO_PI * constants.speed_of_light / constants.probe_wavelength
    saturation_intensity = (
        constants.reduced_planck * omega * constants.natural_linewidth
        / (2.0 * constants.resonant_cross_section)
    )
    rabi_full_squared = 0.5 * constants.natural_linewidth**2 * intensity / saturation_intensity
    # F=1 lies one ground splitting below F=2, so its transitions are bluer
    shift_1 = ground_state_light_shift(
        STATE_1, rabi_full_squared, detuning_from_23 - constants.ground_splitting
    )
    shift_2 = ground_state_light_shift(STATE_2, rabi_full_squared, detuning_from_23)
    logger.debug(
        "Ab-initio light shifts: Delta_1=%.4g Delta_2=%.4g rad/s", shift_1, shift_2
    )
    return shift_1 - shift_2


def probe_strength_factor() -> float:
    """Strength of the sigma+ probe transition |1> -> |3>."""
    return line_strength_factor(STATE_1, STATE_3)


def pi_leak_strength_factor() -> float:
    """Strength of the pi-polarized leak |1> -> |F'=1, m=-1>."""
    return line_strength_factor(STATE_1, STATE_PI_LEAK)


def f2_branching_ratio() -> float:
    """Fraction of |F'=1> decays that end in the F=2 manifold (5/6)."""
    ratio = branching_ratio(STATE_3, 2)
    if not math.isfinite(ratio):
        raise ParameterError("branching ratio is not finite")
    return ratio
