"""Tests for the three-level Lambda system.

Tests cover:
- Parameter validation
- Dark-state amplitudes, normalization and spatial phase
- EIT lineshape: two-level limit, exact transparency, window width,
  symmetry in delta and continuity across resonance
- Saturation parameter, Rabi frequency from intensity and scattering rate
"""

import math

import numpy as np
import pytest

from mottlight.core.constants import RB87_D1, TWO_PI
from mottlight.core.exceptions import DegenerateStateError, ParameterError
from mottlight.physics.lambda_system import (
    LambdaSystem,
    dark_state,
    lineshape,
    rabi_frequency_from_intensity,
    saturation_parameter,
    scattering_rate,
    susceptibility_lineshape,
)

GAMMA_31 = RB87_D1.default_gamma_31


class TestLambdaSystem:
    """Tests for parameter validation."""

    def test_default_gamma_31_is_half_linewidth(self):
        sys = LambdaSystem(omega_c=1.0)
        assert sys.gamma_31 == pytest.approx(0.5 * RB87_D1.natural_linewidth)

    def test_negative_coupling_rejected(self):
        with pytest.raises(ParameterError):
            LambdaSystem(omega_c=-1.0)

    def test_leak_above_probe_rejected(self):
        with pytest.raises(ParameterError, match="omega_p_pi"):
            LambdaSystem(omega_c=1.0, omega_p=1.0, omega_p_pi=2.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError, match="finite"):
            LambdaSystem(omega_c=math.nan)

    def test_zero_gamma_31_rejected(self):
        with pytest.raises(ParameterError):
            LambdaSystem(omega_c=1.0, gamma_31=0.0)

    def test_detuned_moves_both_detunings(self, eit_system):
        shifted = eit_system.detuned(TWO_PI * 40.0)
        assert shifted.delta == shifted.delta_1p == TWO_PI * 40.0
        assert shifted.omega_c == eit_system.omega_c

    def test_pi_leak_fraction(self, eit_system):
        assert eit_system.pi_leak_fraction == pytest.approx(0.2)
        assert LambdaSystem(omega_c=1.0).pi_leak_fraction == 0.0


class TestDarkState:
    """Tests for the dark superposition of |1> and |2>."""

    def test_normalized_everywhere(self):
        positions = np.random.default_rng(1).normal(scale=1e-5, size=(50, 3))
        state = dark_state(3.0, 4.0, (1e7, 0, 0), (0, 1e7, 0), positions)
        np.testing.assert_allclose(state.norm(), 1.0, rtol=1e-12)

    def test_amplitudes(self):
        state = dark_state(3.0, 4.0, (0, 0, 0), (0, 0, 0), [(0.0, 0.0, 0.0)])
        assert state.amp_1 == pytest.approx(0.6)
        assert state.amp_2_field[0] == pytest.approx(-0.8)

    def test_phase_follows_wavevector_difference(self):
        """amp_2 carries exp(i (k_c - k_p) . r)."""
        k_c = np.array([2.0e6, 0.0, 0.0])
        position = np.array([[0.25 * math.pi / 2.0e6, 0.0, 0.0]])
        state = dark_state(1.0, 1.0, k_c, (0, 0, 0), position)
        assert np.angle(-state.amp_2_field[0]) == pytest.approx(0.25 * math.pi)

    def test_coupling_only_is_pure_state_1(self):
        state = dark_state(1.0, 0.0, (0, 0, 0), (0, 0, 0), [(0, 0, 0)])
        assert state.amp_1 == 1.0
        assert state.amp_2_field[0] == 0.0

    def test_both_fields_off_is_degenerate(self):
        with pytest.raises(DegenerateStateError):
            dark_state(0.0, 0.0, (0, 0, 0), (0, 0, 0), [(0, 0, 0)])

    def test_bad_positions_rejected(self):
        with pytest.raises(ParameterError, match="3-vectors"):
            dark_state(1.0, 1.0, (0, 0, 0), (0, 0, 0), [(0.0, 0.0)])


class TestLineshape:
    """Tests for the EIT lineshape L(delta, delta_1p)."""

    def test_two_level_resonance_is_unity(self):
        assert lineshape(0.0, 0.0, 0.0, GAMMA_31, 0.0) == pytest.approx(1j)

    def test_two_level_lorentzian(self):
        """Without coupling the absorption halves at delta_1p = gamma_31."""
        value = lineshape(GAMMA_31, GAMMA_31, 0.0, GAMMA_31, 0.0)
        assert value.imag == pytest.approx(0.5)

    def test_exact_transparency_on_two_photon_resonance(self):
        """With no ground-state decay the medium is transparent at delta = 0."""
        value = lineshape(0.0, 0.0, TWO_PI * 27e3, GAMMA_31, 0.0)
        assert value == 0

    def test_ground_decay_fills_window(self):
        value = lineshape(0.0, 0.0, TWO_PI * 27e3, GAMMA_31, TWO_PI * 10.0)
        assert 0 < value.imag < 1

    def test_window_width(self):
        """Weak-coupling window FWHM is Omega_c^2 / (2 gamma_31)."""
        omega_c = TWO_PI * 27e3
        expected = omega_c**2 / (2.0 * GAMMA_31)
        deltas = np.linspace(-5.0 * expected, 5.0 * expected, 20001)
        absorption = lineshape(deltas, deltas, omega_c, GAMMA_31, 0.0).imag
        inside = deltas[absorption <= 0.5]
        width = inside.max() - inside.min()
        assert width == pytest.approx(expected, rel=0.02)

    @pytest.mark.parametrize("gamma_21", [0.0, TWO_PI * 10.0])
    def test_symmetric_under_detuning_reversal(self, gamma_21):
        """At delta_1p = 0 absorption is even and dispersion odd in delta."""
        deltas = TWO_PI * np.linspace(1.0, 500.0, 50)
        forward = lineshape(deltas, 0.0, TWO_PI * 27e3, GAMMA_31, gamma_21)
        reverse = lineshape(-deltas, 0.0, TWO_PI * 27e3, GAMMA_31, gamma_21)
        np.testing.assert_allclose(reverse.imag, forward.imag, rtol=0, atol=1e-10)
        np.testing.assert_allclose(reverse.real, -forward.real, rtol=0, atol=1e-10)

    @pytest.mark.parametrize("gamma_21", [0.0, TWO_PI * 10.0])
    def test_continuous_across_resonance(self, gamma_21):
        omega_c = TWO_PI * 27e3
        center = lineshape(0.0, 0.0, omega_c, GAMMA_31, gamma_21)
        for delta in (-1e-3, 1e-3):
            assert abs(lineshape(delta, delta, omega_c, GAMMA_31, gamma_21) - center) < 1e-5

    def test_vectorized_shape(self):
        deltas = np.linspace(-1.0, 1.0, 7)
        assert lineshape(deltas, deltas, 1.0, GAMMA_31, 0.0).shape == (7,)

    def test_susceptibility_uses_system(self, eit_system):
        value = susceptibility_lineshape(eit_system.detuned(TWO_PI * 50.0))
        expected = lineshape(
            TWO_PI * 50.0, TWO_PI * 50.0, eit_system.omega_c, eit_system.gamma_31,
            eit_system.gamma_21,
        )
        assert value == pytest.approx(expected)


class TestScattering:
    """Tests for saturation and scattering rate."""

    def test_saturation_parameter(self):
        gamma = RB87_D1.natural_linewidth
        assert saturation_parameter(gamma / math.sqrt(2.0)) == pytest.approx(1.0)

    def test_rabi_from_saturation_intensity(self):
        """At I_sat a full-strength line has s = 1."""
        omega = TWO_PI * RB87_D1.speed_of_light / RB87_D1.probe_wavelength
        i_sat = (
            RB87_D1.reduced_planck * omega * RB87_D1.natural_linewidth
            / (2.0 * RB87_D1.resonant_cross_section)
        )
        rabi = rabi_frequency_from_intensity(i_sat)
        assert saturation_parameter(rabi) == pytest.approx(1.0)

    def test_rabi_scales_with_line_strength(self):
        full = rabi_frequency_from_intensity(100.0)
        weak = rabi_frequency_from_intensity(100.0, line_strength=0.25)
        assert weak == pytest.approx(0.5 * full)

    def test_negative_intensity_rejected(self):
        with pytest.raises(ParameterError):
            rabi_frequency_from_intensity(-1.0)

    def test_two_level_rate(self):
        """On two-level resonance R = (Gamma/2) s."""
        sys = LambdaSystem(omega_c=0.0)
        result = scattering_rate(sys, 0.01)
        assert result.rate == pytest.approx(0.5 * RB87_D1.natural_linewidth * 0.01)
        assert not result.out_of_regime
        assert float(result) == result.rate

    def test_strong_probe_flagged(self):
        result = scattering_rate(LambdaSystem(omega_c=0.0), 0.5)
        assert result.out_of_regime

    def test_dark_resonance_does_not_scatter(self, eit_system):
        sys = LambdaSystem(omega_c=eit_system.omega_c, omega_p=eit_system.omega_p)
        assert scattering_rate(sys, 1e-6).rate == 0

    def test_negative_saturation_rejected(self):
        with pytest.raises(ParameterError):
            scattering_rate(LambdaSystem(omega_c=0.0), -0.1)
