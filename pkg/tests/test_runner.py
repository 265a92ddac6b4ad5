"""Tests for scenario orchestration and run outputs.

Tests cover:
- Derived sample quantities
- Ramsey runs, written outputs and the scenario echo
- Seeded noise and determinism
- Small spectroscopy, storage and deflection runs
- Errors wrapped with the scenario name, invalid thread counts
- Output writers: CSV tables, JSON summary, 16-bit images
"""

import json
import logging

import numpy as np
import pytest

from mottlight.config import TestingConfig
from mottlight.core.exceptions import (
    ConfigurationError,
    ScenarioRunError,
    StabilityBoundError,
)
from mottlight.scenario import writers
from mottlight.scenario.parser import load_bundled, parse_scenario
from mottlight.scenario.runner import (
    ScenarioRunner,
    add_noise,
    build_cloud,
    build_lambda_system,
    derived_quantities,
)
from mottlight.scenario.writers import Table, to_gray16, write_summary, write_table

SMALL_EIT = """
[scenario]
kind = eit-scan
name = small-eit

[scan]
detuning_start = -200 Hz
detuning_stop = 200 Hz
detuning_points = 5

[solver]
transverse_cells = 8
propagation_slices = 8
"""

SMALL_STORE = """
[scenario]
kind = store
name = small-store

[solver]
z_points = 32
time_step = 0.02
"""

SHORT_DEFLECT = """
[scenario]
kind = deflect
name = short-deflect

[gradient]
interaction_times = 0 us, 25 us, 50 us
"""


class TestBuilders:
    """Tests for turning a scenario into physics objects."""

    def test_derived_quantities_of_default_sample(self):
        derived = derived_quantities(parse_scenario("[scenario]\nkind = eit-scan\n"))
        assert derived["atom_number"] == pytest.approx(9.07e4, rel=0.05)
        assert derived["geometric_overlap"] == pytest.approx(0.19, abs=0.02)

    def test_cloud_forced_to_optical_depth(self):
        config = parse_scenario("[scenario]\nkind = store\n[cloud]\npeak_od = 20\n")
        derived = derived_quantities(config)
        assert derived["peak_optical_depth"] == pytest.approx(20.0)
        assert build_cloud(config).radii == config.radii

    def test_lambda_system_leak(self):
        sys = build_lambda_system(load_bundled("fig2"))
        assert sys.omega_p_pi == pytest.approx(0.2 * sys.omega_p)

    def test_invalid_thread_count(self):
        with pytest.raises(ValueError, match="threads"):
            ScenarioRunner(TestingConfig, threads=0)


class TestNoise:
    """Tests for synthetic measurement noise."""

    def test_zero_fraction_unchanged(self):
        values = np.array([0.1, 0.2])
        np.testing.assert_array_equal(add_noise(values, 0.0, np.random.default_rng(0)), values)

    def test_clipped(self):
        noisy = add_noise(np.full(100, 0.5), 5.0, np.random.default_rng(1), 0.0, 1.0)
        assert noisy.min() >= 0.0
        assert noisy.max() <= 1.0

    def test_same_seed_same_noise(self):
        values = np.linspace(0.0, 1.0, 10)
        first = add_noise(values, 0.1, np.random.default_rng(4))
        second = add_noise(values, 0.1, np.random.default_rng(4))
        np.testing.assert_array_equal(first, second)


class TestRamseyRun:
    """Tests for Ramsey runs with their paired storage decay, end to end."""

    def test_visibility_time(self, runner):
        report = runner.run(load_bundled("ramsey"))
        assert report.headline["visibility_time_s"] == pytest.approx(0.436, rel=1e-6)
        assert report.headline["energy_decay_time_s"] == pytest.approx(0.218, rel=1e-3)
        assert report.headline["energy_to_visibility_ratio"] == pytest.approx(0.5, rel=0.01)
        assert report.headline["factor_of_two_holds"] is True
        assert "ramsey_time_s" in report.references

    def test_outputs_written(self, runner, tmp_path):
        report = runner.run(load_bundled("ramsey"), out_dir=tmp_path / "ramsey")
        out = tmp_path / "ramsey"
        assert report.outputs == [
            "ramsey.csv", "energy_decay.csv", "scenario.scenario", "summary.json"
        ]
        for name in report.outputs:
            assert (out / name).is_file()
        header = (out / "ramsey.csv").read_text().splitlines()[0]
        assert header == "dark_time_ms,visibility"
        energy_header = (out / "energy_decay.csv").read_text().splitlines()[0]
        assert energy_header == "storage_time_ms,retrieved_energy"

    def test_summary_json(self, runner, tmp_path):
        runner.run(load_bundled("ramsey"), out_dir=tmp_path)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["scenario"]["kind"] == "ramsey"
        assert summary["provenance"]["threads"] == 1
        assert summary["headline"]["visibility_time_s"] == pytest.approx(0.436)

    def test_scenario_echo_parses_back(self, runner, tmp_path):
        config = load_bundled("ramsey")
        runner.run(config, out_dir=tmp_path)
        echo = (tmp_path / "scenario.scenario").read_text()
        assert parse_scenario(echo) == config

    def test_seeded_noise_is_reproducible(self, runner):
        text = "[scenario]\nkind = ramsey\nseed = 3\n[analysis]\nnoise_fraction = 0.01\n"
        first = runner.run(parse_scenario(text)).headline["visibility_time_s"]
        second = runner.run(parse_scenario(text)).headline["visibility_time_s"]
        assert first == second
        assert first != pytest.approx(0.436, rel=1e-9)
        assert first == pytest.approx(0.436, rel=0.2)

    def test_noise_without_seed_warns(self, runner, caplog):
        caplog.set_level(logging.WARNING, logger="mottlight.scenario")
        runner.run(parse_scenario("[scenario]\nkind = ramsey\n[analysis]\nnoise_fraction = 0.01\n"))
        assert "without a seed" in caplog.text


class TestExperimentRuns:
    """Small runs of the simulation kinds."""

    def test_eit_scan(self, runner, tmp_path):
        report = runner.run(parse_scenario(SMALL_EIT), out_dir=tmp_path)
        assert 0.0 <= report.headline["peak_transfer"] <= 1.0
        assert report.headline["pi_leak_background"] > 0
        assert report.provenance["transverse_cells"] == 8
        assert len(report.tables["lineshape"].columns[0]) == 5
        assert (tmp_path / "lineshape.csv").is_file()

    def test_store(self, runner):
        report = runner.run(parse_scenario(SMALL_STORE))
        headline = report.headline
        assert 0.0 < headline["efficiency_internal"] < 1.0
        assert headline["efficiency_total"] < headline["efficiency_internal"]
        assert report.provenance["z_points"] == 32
        assert report.provenance["dt"] == 0.02
        assert set(report.tables) == {"trace", "spinwave"}

    def test_threads_default_from_tool_config(self):
        assert ScenarioRunner(TestingConfig).threads == TestingConfig.THREADS

    def test_non_positive_configured_threads_rejected(self):
        class ZeroThreads(TestingConfig):
            THREADS = 0

        with pytest.raises(ConfigurationError, match="threads must be >= 1"):
            ScenarioRunner(ZeroThreads)

    def test_non_positive_thread_argument_rejected(self):
        with pytest.raises(ConfigurationError):
            ScenarioRunner(TestingConfig, threads=-2)

    def test_unstable_step_wrapped(self, runner):
        text = SMALL_STORE.replace("time_step = 0.02", "time_step = 5")
        with pytest.raises(ScenarioRunError, match="small-store") as excinfo:
            runner.run(parse_scenario(text))
        assert isinstance(excinfo.value.cause, StabilityBoundError)

    def test_deflection(self, runner):
        report = runner.run(parse_scenario(SHORT_DEFLECT))
        headline = report.headline
        assert 186.0 < headline["slope_urad_per_us"] < 278.0
        assert headline["gradient_hz_per_um"] == pytest.approx(349.2, rel=1e-3)
        assert headline["analytic_slope_urad_per_us"] == pytest.approx(277.6, rel=1e-3)
        assert len(report.images) == 3

    def test_deflection_independent_of_threads(self):
        config = parse_scenario(SHORT_DEFLECT)
        serial = ScenarioRunner(TestingConfig, threads=1).run(config)
        threaded = ScenarioRunner(TestingConfig, threads=2).run(config)
        assert serial.headline["slope_urad_per_us"] == threaded.headline["slope_urad_per_us"]

    def test_images_skipped_without_opencv(self, runner, tmp_path, monkeypatch):
        monkeypatch.setattr(writers, "cv2", None)
        report = runner.run(parse_scenario(SHORT_DEFLECT), out_dir=tmp_path)
        assert not list(tmp_path.glob("*.pgm"))
        assert "deflection.csv" in report.outputs


class TestWriters:
    """Tests for the output files."""

    def test_table_csv(self, tmp_path):
        table = Table(("x", "y"), (np.array([1.0, 2.0]), np.array([0.5, 0.25])))
        path = write_table(tmp_path / "t.csv", table)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        np.testing.assert_allclose(data, [[1.0, 0.5], [2.0, 0.25]])

    def test_table_columns_validated(self):
        with pytest.raises(ValueError):
            Table(("x", "y"), (np.zeros(2), np.zeros(3)))

    def test_summary_without_infinities(self, tmp_path):
        summary = {"tau": float("inf"), "value": np.float64(1.5), "array": np.arange(2)}
        data = json.loads(write_summary(tmp_path / "s.json", summary).read_text())
        assert data == {"tau": None, "value": 1.5, "array": [0, 1]}

    def test_gray16_scaling(self):
        image = to_gray16(np.array([[0.0, 1.0], [2.0, 4.0]]))
        assert image.dtype == np.uint16
        assert image.max() == 65535
        assert image[0, 0] == 0

    def test_gray16_of_dark_image(self):
        assert not to_gray16(np.zeros((4, 4))).any()
