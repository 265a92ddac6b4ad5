"""Tests for light-shift phase imprinting and deflection of the retrieved beam.

Tests cover:
- Gradient beam calibration, gradient and mirror image
- Spin-wave maps from a stored probe
- Phase imprinting and the linear-phase regime
- Angular-spectrum propagation: energy, pure tilts, grid-edge detection
- Deflection scans: zero at t_int = 0, mirror symmetry, slope of the
  published gradient beam, agreement with the intensity-weighted slope
"""

import logging
import math

import numpy as np
import pytest

from mottlight.cloud.sample import AtomCloud, BeamProfile
from mottlight.core.constants import RB87_D1, TWO_PI
from mottlight.core.exceptions import GridTooSmallError, ParameterError
from mottlight.deflection.camera import (
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
from mottlight.system.workers import ScanPool

K_P = RB87_D1.probe_wavevector
INTERACTION_TIMES = [0.0, 10e-6, 20e-6, 30e-6, 40e-6, 50e-6]


@pytest.fixture
def gaussian_wave():
    """Round Gaussian spin wave, 30 um 1/e^2 intensity radius, on a 512 um grid."""
    axis = (np.arange(256) - 128) * 2e-6
    yy, zz = np.meshgrid(axis, axis, indexing="ij")
    amplitude = np.exp(-(yy**2 + zz**2) / (30e-6) ** 2)
    return SpinWaveMap(axis, axis.copy(), amplitude)


@pytest.fixture
def stored_wave():
    """Spin wave of the 2.5e5-atom sample under a 40 um probe."""
    cloud = AtomCloud().scaled_to_atom_number(2.5e5)
    return SpinWaveMap.from_storage(cloud, BeamProfile(40e-6), points=256, span=512e-6)


class TestGradientBeam:
    """Tests for the differential light-shift beam."""

    def test_default_calibrated_to_center_shift(self):
        beam = GradientBeam()
        assert float(beam.shift(0.0, 0.0)) == pytest.approx(TWO_PI * 7.7e3)

    def test_center_gradient(self):
        """An offset 42 um beam gives about 349 Hz/um at the cloud center."""
        assert center_gradient_hz_per_um(GradientBeam()) == pytest.approx(349.2, rel=1e-3)

    def test_calibrated_constructor(self):
        profile = BeamProfile(waist=42e-6, center=(20e-6, 0.0), peak_intensity=1e4,
                              detuning=-TWO_PI * 20e9)
        beam = GradientBeam.calibrated(profile, TWO_PI * 1e3)
        assert float(beam.shift(0.0, 0.0)) == pytest.approx(TWO_PI * 1e3)

    def test_ab_initio_is_linear_in_intensity(self):
        base = BeamProfile(waist=42e-6, center=(20e-6, 0.0), peak_intensity=1e4,
                           detuning=-TWO_PI * 20e9)
        brighter = BeamProfile(waist=42e-6, center=(20e-6, 0.0), peak_intensity=2e4,
                               detuning=-TWO_PI * 20e9)
        shift = float(GradientBeam.ab_initio(base).shift(0.0, 0.0))
        assert shift != 0
        assert float(GradientBeam.ab_initio(brighter).shift(0.0, 0.0)) == pytest.approx(
            2.0 * shift
        )

    def test_zero_detuning_rejected(self):
        with pytest.raises(ParameterError):
            GradientBeam(BeamProfile(waist=42e-6, peak_intensity=1e4, detuning=0.0))

    def test_mirrored_flips_gradient(self):
        beam = GradientBeam()
        mirrored = beam.mirrored()
        assert mirrored.profile.center == (-20e-6, 0.0)
        assert float(mirrored.shift_gradient(0.0, 0.0)) == pytest.approx(
            -float(beam.shift_gradient(0.0, 0.0))
        )


class TestSpinWaveMap:
    """Tests for transverse spin-wave maps."""

    def test_from_storage_peak_at_center(self, stored_wave):
        center = np.unravel_index(np.argmax(np.abs(stored_wave.amplitude)),
                                  stored_wave.amplitude.shape)
        assert stored_wave.y[center[0]] == 0.0
        assert stored_wave.z[center[1]] == 0.0
        assert np.abs(stored_wave.amplitude).max() == pytest.approx(1.0)

    def test_from_storage_zero_outside_cloud(self, stored_wave):
        far = np.abs(stored_wave.y) > 30e-6
        assert np.all(stored_wave.amplitude[far, :] == 0)

    def test_narrow_grid_rejected(self):
        with pytest.raises(ParameterError, match="4 probe waists"):
            SpinWaveMap.from_storage(AtomCloud(), BeamProfile(40e-6), span=100e-6)

    def test_shape_mismatch_rejected(self):
        axis = np.arange(8) * 1e-6
        with pytest.raises(ParameterError, match="does not match"):
            SpinWaveMap(axis, axis, np.ones((8, 4)))

    def test_envelope_radius_of_gaussian(self, gaussian_wave):
        """Twice the rms width of |amplitude|^2 is the 1/e^2 radius."""
        assert envelope_radius(gaussian_wave) == pytest.approx(30e-6, rel=1e-3)


class TestPhaseImprint:
    """Tests for imprinting the light-shift phase."""

    def test_zero_time_leaves_wave_unchanged(self, stored_wave):
        shifts = light_shift_profile(GradientBeam(), stored_wave)
        assert phase_imprint(stored_wave, shifts, 0.0) is stored_wave

    def test_imprint_keeps_magnitude(self, stored_wave):
        shifts = light_shift_profile(GradientBeam(), stored_wave)
        imprinted = phase_imprint(stored_wave, shifts, 30e-6)
        np.testing.assert_allclose(
            np.abs(imprinted.amplitude), np.abs(stored_wave.amplitude), atol=1e-12
        )

    def test_negative_time_rejected(self, stored_wave):
        with pytest.raises(ParameterError):
            phase_imprint(stored_wave, 0.0, -1e-6)

    def test_mismatched_shift_map_rejected(self, stored_wave):
        with pytest.raises(ParameterError, match="does not match"):
            phase_imprint(stored_wave, np.zeros((3, 3)), 1e-6)

    def test_linear_regime(self):
        beam = GradientBeam()
        assert phase_variation(beam, 20e-6, 0.0) == 0.0
        assert is_linear_regime(beam, 20e-6, 50e-6)
        assert not is_linear_regime(beam, 20e-6, 1.0)


class TestAngularSpectrum:
    """Tests for paraxial propagation to the camera."""

    def test_zero_distance_is_identity(self, gaussian_wave):
        field = angular_spectrum(gaussian_wave.amplitude, 2e-6, 2e-6, K_P, 0.0)
        np.testing.assert_allclose(field, gaussian_wave.amplitude, atol=1e-12)

    def test_energy_conserved(self, stored_wave):
        result = propagate_to_camera(stored_wave, K_P, 1e-3)
        expected = stored_wave.energy() / (stored_wave.dy * stored_wave.dz)
        assert result.energy == pytest.approx(expected, rel=5e-3)

    def test_energy_factor_scales_image(self, gaussian_wave):
        full = propagate_to_camera(gaussian_wave, K_P, 1e-3)
        dimmed = propagate_to_camera(gaussian_wave, K_P, 1e-3, energy_factor=0.5)
        assert dimmed.energy == pytest.approx(0.5 * full.energy)
        assert dimmed.beta == pytest.approx(full.beta, abs=1e-6)

    def test_linear_phase_deflects_by_tilt(self, gaussian_wave):
        """A phase exp(i dk y) steers the beam by dk / k_p."""
        beta = 5e-3
        yy, _ = gaussian_wave.mesh()
        tilted = phase_imprint(gaussian_wave, beta * K_P * yy, 1.0)
        result = propagate_to_camera(tilted, K_P, 1e-3)
        assert result.beta == pytest.approx(beta, rel=0.01)
        assert result.centroid_shift == pytest.approx(beta * 1e-3, rel=0.01)

    def test_untilted_beam_not_deflected(self, gaussian_wave):
        result = propagate_to_camera(gaussian_wave, K_P, 1e-3)
        assert abs(result.beta) < 1e-6
        assert result.row_sums.shape == (256,)

    def test_unimprinted_stored_wave_centered(self, stored_wave):
        """A profile symmetric about y = 0 fits to a zero centroid."""
        result = propagate_to_camera(stored_wave, K_P, 1e-3)
        assert result.fit.converged
        assert abs(result.centroid_shift) < 1e-12
        assert abs(result.beta) < 1e-9

    def test_zero_defocus_gives_zero_angle(self, gaussian_wave):
        assert propagate_to_camera(gaussian_wave, K_P, 0.0).beta == 0.0

    def test_field_at_grid_edge_detected(self):
        axis = np.arange(64) * 1e-6
        filled = SpinWaveMap(axis, axis.copy(), np.ones((64, 64)))
        with pytest.raises(GridTooSmallError, match="grid edge"):
            propagate_to_camera(filled, K_P, 0.0)

    def test_invalid_arguments(self, gaussian_wave):
        with pytest.raises(ParameterError):
            propagate_to_camera(gaussian_wave, 0.0)
        with pytest.raises(ParameterError):
            propagate_to_camera(gaussian_wave, K_P, -1e-3)


class TestAnalyticSlope:
    """Tests for the analytic deflection rate."""

    def test_cloud_center_slope(self):
        """349.2 Hz/um at the center deflects by about 277.6 urad/us."""
        assert deflection_slope(GradientBeam()) == pytest.approx(277.6, rel=1e-3)

    def test_weighted_slope_needs_spin_wave(self):
        with pytest.raises(ParameterError):
            deflection_slope(GradientBeam(), convention=SlopeConvention.INTENSITY_WEIGHTED)

    def test_weighted_slope_below_center_slope(self, stored_wave):
        """The gradient weakens toward the far side of the cloud."""
        beam = GradientBeam()
        weighted = deflection_slope(beam, convention="intensity_weighted",
                                    spin_wave=stored_wave)
        assert 0.7 * deflection_slope(beam) < weighted < deflection_slope(beam)


class TestDeflectionScan:
    """Tests for deflection angle versus interaction time."""

    def test_no_deflection_without_interaction(self, stored_wave):
        scan = simulate_deflection_scan([0.0], GradientBeam(), stored_wave)
        assert abs(scan.betas[0]) < 1e-6
        assert scan.fit is None
        assert scan.slope is None

    def test_slope_near_calculated_value(self, stored_wave):
        """The published gradient beam deflects by 232 +- 46 urad/us."""
        scan = simulate_deflection_scan(INTERACTION_TIMES, GradientBeam(), stored_wave)
        # rad/s equals urad/us
        assert 232.0 - 46.0 < scan.slope < 232.0 + 46.0
        assert scan.fit.relative_residual < 0.05

    def test_numeric_slope_matches_weighted_slope(self, stored_wave):
        beam = GradientBeam()
        scan = simulate_deflection_scan(INTERACTION_TIMES, beam, stored_wave)
        weighted = deflection_slope(
            beam, convention=SlopeConvention.INTENSITY_WEIGHTED, spin_wave=stored_wave
        )
        assert scan.slope == pytest.approx(weighted, rel=0.1)

    def test_mirror_symmetry(self, stored_wave):
        """Moving the beam to the other side reverses the deflection."""
        beam = GradientBeam()
        times = [20e-6, 40e-6]
        scan = simulate_deflection_scan(times, beam, stored_wave)
        mirrored = simulate_deflection_scan(times, beam.mirrored(), stored_wave)
        np.testing.assert_allclose(mirrored.betas, -scan.betas, rtol=1e-3)

    def test_threaded_scan_identical(self, stored_wave):
        beam = GradientBeam()
        serial = simulate_deflection_scan(INTERACTION_TIMES[:3], beam, stored_wave)
        with ScanPool(threads=3) as pool:
            threaded = simulate_deflection_scan(INTERACTION_TIMES[:3], beam, stored_wave,
                                                pool=pool)
        np.testing.assert_array_equal(serial.betas, threaded.betas)

    def test_negative_time_rejected(self, stored_wave):
        with pytest.raises(ParameterError):
            simulate_deflection_scan([-1e-6], GradientBeam(), stored_wave)

    def test_nonlinear_regime_warns(self, stored_wave, caplog):
        """Short defocus keeps the strongly deflected beam on the grid."""
        caplog.set_level(logging.WARNING, logger="mottlight.deflection")
        simulate_deflection_scan([6e-4], GradientBeam(), stored_wave, defocus=1e-5)
        assert "no longer linear" in caplog.text

    def test_angles_grow_with_time(self, stored_wave):
        scan = simulate_deflection_scan(INTERACTION_TIMES, GradientBeam(), stored_wave)
        assert np.all(np.diff(scan.betas) > 0)
        assert math.isfinite(scan.wall_time)
