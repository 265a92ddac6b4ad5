"""Phase imprinting on the stored spin wave and beam deflection."""

from mottlight.deflection.camera import (
    DEFAULT_DEFOCUS,
    DeflectionResult,
    DeflectionScan,
    angular_spectrum,
    propagate_to_camera,
    simulate_deflection_scan,
)
from mottlight.deflection.phase import (
    GradientBeam,
    SlopeConvention,
    SpinWaveMap,
    center_gradient_hz_per_um,
    deflection_slope,
    envelope_radius,
    is_linear_regime,
    light_shift_profile,
    phase_imprint,
    phase_variation,
)

__all__ = [
    "DEFAULT_DEFOCUS",
    "DeflectionResult",
    "DeflectionScan",
    "angular_spectrum",
    "propagate_to_camera",
    "simulate_deflection_scan",
    "GradientBeam",
    "SlopeConvention",
    "SpinWaveMap",
    "center_gradient_hz_per_um",
    "deflection_slope",
    "envelope_radius",
    "is_linear_regime",
    "light_shift_profile",
    "phase_imprint",
    "phase_variation",
]
