"""Lambda-system physics: dark state, EIT lineshape, atomic structure factors."""

from mottlight.physics.angular import (
    ab_initio_differential_shift,
    branching_ratio,
    f2_branching_ratio,
    line_strength_factor,
    pi_leak_strength_factor,
    probe_strength_factor,
)
from mottlight.physics.lambda_system import (
    DarkState,
    LambdaSystem,
    ScatteringRate,
    dark_state,
    lineshape,
    rabi_frequency_from_intensity,
    saturation_parameter,
    scattering_rate,
    susceptibility_lineshape,
)

__all__ = [
    "ab_initio_differential_shift",
    "branching_ratio",
    "f2_branching_ratio",
    "line_strength_factor",
    "pi_leak_strength_factor",
    "probe_strength_factor",
    "DarkState",
    "LambdaSystem",
    "ScatteringRate",
    "dark_state",
    "lineshape",
    "rabi_frequency_from_intensity",
    "saturation_parameter",
    "scattering_rate",
    "susceptibility_lineshape",
]
