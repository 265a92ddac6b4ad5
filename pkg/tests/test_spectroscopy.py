"""Tests for rate-equation EIT spectroscopy.

Tests cover:
- Configuration validation and the weak-probe regime flag
- Transparency on two-photon resonance
- Optically thin limit against the single-cell closed form
- Pi-leak background against its column-wise closed form, far-detuned level
- Ordering in gamma_21, probe duration and probe power
- Lineshape scans, mirror symmetry, window and line widths, missing features
- Window width of the published spectroscopy parameters (slow)
"""

import numpy as np
import pytest

from mottlight.cloud.sample import BeamProfile
from mottlight.core.constants import TWO_PI
from mottlight.core.exceptions import NoFeatureError, ParameterError
from mottlight.physics.lambda_system import LambdaSystem
from mottlight.spectroscopy.lineshape import (
    Feature,
    LineshapeScan,
    extract_fwhm,
    feature_center,
    scan_lineshape,
    window_depth,
)
from mottlight.spectroscopy.rate_model import (
    RateModel,
    SpectroscopyConfig,
    off_resonant_background,
    simulate_transfer,
    single_cell_transfer,
)
from mottlight.system.workers import ScanPool


def _lorentzian_scan(width, depth=0.0, points=201, span=5.0):
    deltas = np.linspace(-span * width, span * width, points)
    hwhm = 0.5 * width
    line = 0.6 * hwhm**2 / (deltas**2 + hwhm**2)
    return deltas, line


class TestSpectroscopyConfig:
    """Tests for rate-model inputs."""

    def test_leak_fraction_taken_from_system(self, eit_system, mott_cloud):
        config = SpectroscopyConfig(sys=eit_system, cloud=mott_cloud)
        assert config.pi_leak_fraction == pytest.approx(0.2)

    def test_leak_fraction_overrides_system(self, eit_system):
        config = SpectroscopyConfig(sys=eit_system, pi_leak_fraction=0.0)
        assert config.sys.omega_p_pi == 0.0

    def test_invalid_leak_fraction(self, eit_system):
        with pytest.raises(ParameterError):
            SpectroscopyConfig(sys=eit_system, pi_leak_fraction=1.5)

    def test_coarse_grid_rejected(self, eit_system):
        with pytest.raises(ParameterError, match=">= 8"):
            SpectroscopyConfig(sys=eit_system, transverse_grid=4)

    def test_weak_probe_in_regime(self, coarse_spectroscopy):
        assert coarse_spectroscopy.saturation < 0.1
        assert not coarse_spectroscopy.out_of_regime

    def test_strong_probe_out_of_regime(self, mott_cloud):
        strong = LambdaSystem(omega_c=TWO_PI * 27e3, omega_p=TWO_PI * 3e6)
        config = SpectroscopyConfig(sys=strong, cloud=mott_cloud, transverse_grid=8,
                                    propagation_slices=8)
        assert config.out_of_regime
        scan = scan_lineshape(config, [0.0])
        assert scan.out_of_regime


class TestTransfer:
    """Tests for the transferred fraction N_2/N."""

    def test_transparent_on_two_photon_resonance(self, mott_cloud):
        """Without ground decay or leak no atom is pumped at delta = 0."""
        sys = LambdaSystem(omega_c=TWO_PI * 27e3, omega_p=TWO_PI * 3.9e3)
        config = SpectroscopyConfig(sys=sys, cloud=mott_cloud, transverse_grid=16,
                                    propagation_slices=8)
        assert simulate_transfer(config, 0.0) == 0.0

    def test_transfer_bounded(self, coarse_spectroscopy):
        for delta in (-TWO_PI * 200.0, 0.0, TWO_PI * 60.0):
            fraction = simulate_transfer(coarse_spectroscopy, delta)
            assert 0.0 <= fraction <= 1.0

    def test_window_suppresses_transfer(self, coarse_spectroscopy):
        """Transfer at the window center is below the absorption peak."""
        center = simulate_transfer(coarse_spectroscopy, 0.0)
        off = simulate_transfer(coarse_spectroscopy, TWO_PI * 150.0)
        assert center < off

    def test_thin_cloud_matches_single_cell(self, eit_system, mott_cloud):
        """As alpha -> 0 propagation no longer matters."""
        thin = mott_cloud.with_peak_optical_depth(1e-6)
        config = SpectroscopyConfig(sys=eit_system, cloud=thin, transverse_grid=16,
                                    propagation_slices=8)
        delta = TWO_PI * 80.0
        assert simulate_transfer(config, delta) == pytest.approx(
            single_cell_transfer(config, delta), rel=1e-3
        )

    def test_thick_cloud_transfers_less_than_single_cell(self, coarse_spectroscopy):
        """Attenuation shields the back of the cloud."""
        delta = TWO_PI * 150.0
        assert simulate_transfer(coarse_spectroscopy, delta) < single_cell_transfer(
            coarse_spectroscopy, delta
        )

    def test_leak_background_closed_form(self, mott_cloud):
        """On exact two-photon resonance only the pi leak pumps atoms."""
        sys = LambdaSystem(
            omega_c=TWO_PI * 27e3, omega_p=TWO_PI * 3.9e3, omega_p_pi=0.2 * TWO_PI * 3.9e3
        )
        config = SpectroscopyConfig(sys=sys, cloud=mott_cloud, transverse_grid=16,
                                    propagation_slices=8)
        background = off_resonant_background(config)
        assert background > 0
        assert simulate_transfer(config, 0.0) == pytest.approx(background, rel=1e-3)

    def test_far_detuned_transfer_is_leak_background(self, coarse_spectroscopy):
        """Far outside the absorption line only the pi leak pumps."""
        far = 1000.0 * coarse_spectroscopy.sys.gamma_31
        assert simulate_transfer(coarse_spectroscopy, far) == pytest.approx(
            off_resonant_background(coarse_spectroscopy), rel=1e-3
        )

    def test_ground_decay_fills_window(self, mott_cloud):
        """Transfer at delta = 0 grows with gamma_21."""
        fractions = []
        for gamma_21 in (0.0, TWO_PI * 10.0, TWO_PI * 100.0):
            sys = LambdaSystem(
                omega_c=TWO_PI * 27e3, omega_p=TWO_PI * 3.9e3,
                omega_p_pi=0.2 * TWO_PI * 3.9e3, gamma_21=gamma_21,
            )
            config = SpectroscopyConfig(sys=sys, cloud=mott_cloud, transverse_grid=16,
                                        propagation_slices=8)
            fractions.append(simulate_transfer(config, 0.0))
        assert fractions[0] < fractions[1] < fractions[2]

    def test_transfer_grows_with_probe_duration(self, eit_system, mott_cloud):
        delta = TWO_PI * 150.0
        fractions = [
            simulate_transfer(
                SpectroscopyConfig(sys=eit_system, cloud=mott_cloud, probe_duration=duration,
                                   transverse_grid=16, propagation_slices=8),
                delta,
            )
            for duration in (0.05, 0.1, 0.2)
        ]
        assert fractions == sorted(fractions)
        assert fractions[0] < fractions[2]

    def test_transfer_grows_with_probe_power(self, mott_cloud):
        delta = TWO_PI * 150.0
        fractions = []
        for omega_p in (TWO_PI * 1.5e3, TWO_PI * 2.5e3, TWO_PI * 3.9e3):
            sys = LambdaSystem(omega_c=TWO_PI * 27e3, omega_p=omega_p,
                               omega_p_pi=0.2 * omega_p, gamma_21=TWO_PI * 10.0)
            config = SpectroscopyConfig(sys=sys, cloud=mott_cloud, transverse_grid=16,
                                        propagation_slices=8)
            fractions.append(simulate_transfer(config, delta))
        assert fractions == sorted(fractions)
        assert fractions[0] < fractions[2]

    def test_offset_probe_integrates_full_grid(self, eit_system, mott_cloud):
        """An off-center probe breaks the quadrant symmetry."""
        config = SpectroscopyConfig(
            sys=eit_system, cloud=mott_cloud, transverse_grid=16, propagation_slices=8,
            probe=BeamProfile(40e-6, center=(10e-6, 0.0)),
        )
        model = RateModel(config)
        assert np.any(model.y < 0)
        assert 0.0 < model.transfer(TWO_PI * 100.0) < 1.0


class TestLineshapeScan:
    """Tests for scans and feature extraction."""

    def test_scan_preserves_order(self, coarse_spectroscopy):
        deltas = [TWO_PI * d for d in (100.0, -100.0, 0.0)]
        scan = scan_lineshape(coarse_spectroscopy, deltas)
        np.testing.assert_array_equal(scan.detunings, deltas)
        assert len(scan) == 3

    def test_threaded_scan_identical(self, coarse_spectroscopy):
        deltas = TWO_PI * np.linspace(-150.0, 150.0, 7)
        serial = scan_lineshape(coarse_spectroscopy, deltas)
        with ScanPool(threads=3) as pool:
            threaded = scan_lineshape(coarse_spectroscopy, deltas, pool)
        np.testing.assert_array_equal(serial.transfer_fractions, threaded.transfer_fractions)

    def test_empty_scan(self, coarse_spectroscopy):
        assert len(scan_lineshape(coarse_spectroscopy, [])) == 0

    def test_fractions_validated(self):
        with pytest.raises(ParameterError):
            LineshapeScan(np.array([0.0, 1.0]), np.array([0.5, 1.5]))

    def test_window_width_of_dip(self):
        """A Lorentzian dip of known width inside a flat absorption plateau."""
        deltas, dip = _lorentzian_scan(100.0)
        fractions = 0.7 - dip
        fractions[:10] = np.linspace(0.0, 0.7, 10)
        fractions[-10:] = np.linspace(0.7, 0.0, 10)
        scan = LineshapeScan(deltas, fractions)
        assert extract_fwhm(scan, Feature.WINDOW) == pytest.approx(100.0, rel=0.05)
        assert feature_center(scan) == pytest.approx(0.0, abs=5.0)
        assert window_depth(scan) == pytest.approx(0.6, rel=0.05)

    def test_line_width(self):
        deltas, line = _lorentzian_scan(100.0)
        scan = LineshapeScan(deltas, line)
        assert extract_fwhm(scan, "line") == pytest.approx(100.0, rel=0.02)

    def test_no_window_in_single_line(self):
        deltas, line = _lorentzian_scan(100.0)
        with pytest.raises(NoFeatureError):
            extract_fwhm(LineshapeScan(deltas, line), Feature.WINDOW)

    def test_line_cut_by_scan_edge(self):
        deltas = np.linspace(0.0, 100.0, 21)
        fractions = np.linspace(0.5, 0.0, 21)
        with pytest.raises(NoFeatureError):
            extract_fwhm(LineshapeScan(deltas, fractions), Feature.LINE)

    def test_short_scan_has_no_feature(self):
        with pytest.raises(NoFeatureError, match="too short"):
            extract_fwhm(LineshapeScan(np.array([0.0, 1.0]), np.array([0.1, 0.2])))

    def test_mirrored_scan_symmetric(self, coarse_spectroscopy):
        """Scanning the probe across both sides of resonance gives the same fractions."""
        offsets = TWO_PI * np.array([40.0, 120.0, 400.0])
        positive = scan_lineshape(coarse_spectroscopy, offsets)
        negative = scan_lineshape(coarse_spectroscopy, -offsets)
        np.testing.assert_allclose(
            negative.transfer_fractions, positive.transfer_fractions, rtol=0.02
        )

    def test_flat_scan_has_no_feature(self):
        scan = LineshapeScan(np.linspace(-100.0, 100.0, 21), np.full(21, 0.3))
        with pytest.raises(NoFeatureError):
            extract_fwhm(scan, Feature.WINDOW)
        with pytest.raises(NoFeatureError):
            extract_fwhm(scan, Feature.LINE)
        with pytest.raises(NoFeatureError):
            feature_center(scan)

    def test_finely_sampled_window_width(self):
        """A 100 Hz Lorentzian dip sampled every 1 Hz."""
        deltas = np.arange(-1000.0, 1001.0)
        hwhm = 50.0
        fractions = 0.7 - 0.6 * hwhm**2 / (deltas**2 + hwhm**2)
        scan = LineshapeScan(deltas, fractions)
        assert extract_fwhm(scan, Feature.WINDOW) == pytest.approx(100.0, abs=1.0)
        assert feature_center(scan) == 0.0

    def test_center_follows_dip_on_sloped_background(self):
        """The lowest point of a sloped scan can lie outside the window."""
        deltas = np.linspace(-500.0, 500.0, 201)
        hwhm = 50.0
        fractions = (
            0.1 + 4e-4 * (deltas + 500.0)
            - 0.1 * hwhm**2 / ((deltas - 100.0) ** 2 + hwhm**2)
        )
        scan = LineshapeScan(deltas, fractions)
        assert int(np.argmin(fractions)) == 0
        assert feature_center(scan) == pytest.approx(100.0, abs=10.0)

    def test_window_of_simulated_scan(self, coarse_spectroscopy):
        deltas = TWO_PI * np.linspace(-300.0, 300.0, 31)
        scan = scan_lineshape(coarse_spectroscopy, deltas)
        assert extract_fwhm(scan) > 0
        assert abs(feature_center(scan)) <= TWO_PI * 20.0


@pytest.mark.slow
class TestPublishedWindow:
    """Full-resolution spectroscopy run."""

    def test_window_fwhm_near_measured(self, eit_system, mott_cloud):
        """The window of the weak-probe scan is about 80 Hz wide."""
        config = SpectroscopyConfig(
            sys=eit_system, cloud=mott_cloud, transverse_grid=32, propagation_slices=16
        )
        deltas = TWO_PI * np.linspace(-300.0, 300.0, 61)
        scan = scan_lineshape(config, deltas)
        width_hz = extract_fwhm(scan) / TWO_PI
        assert width_hz == pytest.approx(81.0, abs=25.0)
