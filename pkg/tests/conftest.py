import logging

import pytest

from mottlight.cloud.sample import AtomCloud, BeamProfile
from mottlight.config import TestingConfig
from mottlight.core.constants import TWO_PI
from mottlight.physics.lambda_system import LambdaSystem
from mottlight.scenario.runner import ScenarioRunner
from mottlight.spectroscopy.rate_model import SpectroscopyConfig
from mottlight.storage.maxwell_bloch import FieldGrid
from mottlight.storage.waveforms import ProbeWaveform


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: full-resolution runs against the published parameter sets"
    )


@pytest.fixture
def clean_logging():
    """Reset logging between tests to prevent cross-test contamination."""
    original_handlers = logging.root.handlers[:]
    original_level = logging.root.level

    yield

    logging.root.handlers = original_handlers
    logging.root.level = original_level


@pytest.fixture
def eit_system():
    """Weak-probe Lambda system of the spectroscopy measurement."""
    return LambdaSystem(
        omega_c=TWO_PI * 27e3,
        omega_p=TWO_PI * 3.9e3,
        omega_p_pi=0.2 * TWO_PI * 3.9e3,
        gamma_21=TWO_PI * 10.0,
    )


@pytest.fixture
def storage_system():
    """Strong-coupling Lambda system of the storage measurements."""
    return LambdaSystem(omega_c=TWO_PI * 4.5e6, omega_p=TWO_PI * 1.5e6)


@pytest.fixture
def mott_cloud():
    """Unit-filling lattice sample with the default radii."""
    return AtomCloud()


@pytest.fixture
def probe_beam():
    return BeamProfile(waist=40e-6)


@pytest.fixture
def coarse_spectroscopy(eit_system, mott_cloud):
    """Rate model on a grid small enough for unit tests."""
    return SpectroscopyConfig(
        sys=eit_system,
        cloud=mott_cloud,
        transverse_grid=16,
        propagation_slices=8,
    )


@pytest.fixture
def coarse_grid():
    """Maxwell-Bloch grid at the minimum resolution."""
    return FieldGrid(z_points=32, dt=0.02)


@pytest.fixture
def storage_probe():
    """2.8 us probe cut off at its peak."""
    return ProbeWaveform(fwhm=2.8e-6, peak_time=0.0, truncation_time=0.0)


@pytest.fixture
def runner():
    """Single-threaded runner with the deterministic testing configuration."""
    return ScenarioRunner(TestingConfig, threads=1)
