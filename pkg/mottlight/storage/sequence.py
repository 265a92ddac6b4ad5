"""Write / dark time / read sequences, storage-time scans and Ramsey decay."""

import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from mottlight.analysis.fitting import ExponentialFit, fit_exponential
from mottlight.core.exceptions import ParameterError
from mottlight.physics.lambda_system import LambdaSystem
from mottlight.storage.maxwell_bloch import (
    FieldGrid,
    MaxwellBlochSolver,
    StorageResult,
    Trace,
    internal_efficiency,
)
from mottlight.storage.waveforms import ProbeWaveform
from mottlight.system.workers import ScanPool

logger = logging.getLogger("mottlight.storage")

# Amplitude decay rate of the ground-state coherence, 1 / (436 ms)
DEFAULT_SPIN_DECAY = 1.0 / 0.436  # 1/s
DEFAULT_READ_DURATION = 5e-6  # s
# Dark time integrated numerically before switching to the analytic decay
SETTLE_TIME_UNITS = 20.0  # units of 1/gamma_31


def to_normalized_time(t: float, sys: LambdaSystem) -> float:
    """Seconds -> units of 1/gamma_31."""
    return t * sys.gamma_31


def to_seconds(tau: float, sys: LambdaSystem) -> float:
    """Units of 1/gamma_31 -> seconds."""
    return tau / sys.gamma_31


@dataclass(frozen=True)
class WrittenPulse:
    """Medium state right after the control switch-off."""

    state: np.ndarray
    switch_off: float
    input_energy: float
    leaked_energy: float
    stored_spinwave: np.ndarray
    stored_excitation: float
    trace: tuple
    stability_bound: float
    wall_time: float


def _zero(_t):
    return 0.0


def write_pulse(
    solver: MaxwellBlochSolver, probe: ProbeWaveform, omega_c: float
) -> WrittenPulse:
    """Run the write phase: control on until the probe is cut off."""
    started = time.perf_counter()
    bound = solver.check_stability(omega_c)
    trace = Trace()
    trace.append(probe.start_time, probe.amplitude(probe.start_time), 0.0)
    state = solver.advance(
        solver.initial_state(),
        probe.start_time,
        probe.end_time,
        lambda t: omega_c,
        probe.envelope,
        trace,
    )
    return WrittenPulse(
        state=state,
        switch_off=probe.end_time,
        input_energy=solver.input_energy(state),
        leaked_energy=solver.output_energy(state),
        stored_spinwave=solver.spin_wave(state),
        stored_excitation=solver.excitation(state),
        trace=trace.as_arrays(),
        stability_bound=bound,
        wall_time=time.perf_counter() - started,
    )


def read_pulse(
    solver: MaxwellBlochSolver,
    written: WrittenPulse,
    storage_time: float,
    omega_c: float,
    read_duration: float = DEFAULT_READ_DURATION,
) -> StorageResult:
    """Dark time t_S with the control off, then retrieval with the control on.

    The first part of the dark time (at most 20 / gamma_31) is integrated
    numerically so the optical polarization can decay; the remainder is
    applied analytically as S -> S exp(-gamma_s t).
    """
    if storage_time < 0:
        raise ParameterError(f"storage time must be >= 0, got {storage_time}")
    started = time.perf_counter()
    trace = Trace()
    settle = min(storage_time, SETTLE_TIME_UNITS * solver.time_unit)
    t_dark = written.switch_off
    state = solver.advance(written.state, t_dark, t_dark + settle, _zero, _zero, trace)
    dark_loss = 0.0
    remainder = storage_time - settle
    if remainder > 0:
        state, dark_loss = solver.decay_in_dark(state, remainder)
    before_read = solver.output_energy(state)

    t_read = t_dark + storage_time
    state = solver.advance(
        state, t_read, t_read + read_duration, lambda t: omega_c, _zero, trace
    )
    retrieved = solver.output_energy(state) - before_read
    efficiency = internal_efficiency(written.input_energy, retrieved)

    write_times, write_in, write_out = written.trace
    read_times, read_in, read_out = trace.as_arrays()
    grid = solver.grid
    return StorageResult(
        input_energy=written.input_energy,
        leaked_energy=before_read,
        retrieved_energy=max(retrieved, 0.0),
        stored_spinwave=written.stored_spinwave,
        efficiency_internal=efficiency,
        efficiency_total=efficiency,
        trace_times=np.concatenate((write_times, read_times)),
        input_trace=np.concatenate((write_in, read_in)),
        output_trace=np.concatenate((write_out, read_out)),
        stored_excitation=written.stored_excitation,
        final_excitation=solver.excitation(state, omega_c),
        dark_loss=dark_loss,
        dark_time=storage_time,
        z_points=grid.z_points,
        dt=grid.dt,
        integrator=grid.integrator.value,
        stability_bound=written.stability_bound,
        wall_time=written.wall_time + time.perf_counter() - started,
    )


def store_and_retrieve(
    grid: FieldGrid,
    sys: LambdaSystem,
    od: float,
    probe: ProbeWaveform,
    t_S: float,
    gamma_s: float = DEFAULT_SPIN_DECAY,
    read_duration: float = DEFAULT_READ_DURATION,
) -> StorageResult:
    """Store the probe, wait t_S in the dark, and retrieve it.

    The control (sys.omega_c) is switched off instantly when the probe is cut
    off and switched back on after t_S. The retrieved energy scales as
    exp(-2 gamma_s t_S) once the optical polarization has decayed.

    Args:
        grid: discretization
        sys: coupling Rabi frequency, decays and detuning
        od: peak resonant intensity optical depth alpha
        probe: probe envelope; its end time is the switch-off time
        t_S: storage time (s)
        gamma_s: spin-wave amplitude decay rate (1/s)
        read_duration: length of the read window (s)
    """
    if t_S < 0:
        raise ParameterError(f"storage time must be >= 0, got {t_S}")
    solver = MaxwellBlochSolver(grid, sys, od, gamma_s)
    written = write_pulse(solver, probe, sys.omega_c)
    result = read_pulse(solver, written, t_S, sys.omega_c, read_duration)
    logger.info(
        "Storage t_S=%.4g s: efficiency %.4f (leaked %.4g, retrieved %.4g)",
        t_S, result.efficiency_internal, result.leaked_energy, result.retrieved_energy,
    )
    return result


def efficiency(
    result: StorageResult, include_geometric: bool = False, overlap: float = 1.0
) -> float:
    """Storage efficiency, optionally including the probe/cloud overlap.

    Raises:
        ParameterError: overlap outside [0, 1]
    """
    if not 0 <= overlap <= 1:
        raise ParameterError(f"overlap must lie in [0, 1], got {overlap}")
    internal = internal_efficiency(result.input_energy, result.retrieved_energy)
    return internal * overlap if include_geometric else internal


def with_overlap(result: StorageResult, overlap: float) -> StorageResult:
    """Copy of result whose efficiency_total includes the geometric overlap."""
    return replace(result, efficiency_total=efficiency(result, True, overlap))


@dataclass(frozen=True)
class StorageScan:
    """Retrieved energy versus storage time.

    Attributes:
        storage_times: t_S values (s)
        retrieved_energies: retrieved energy per t_S
        results: full StorageResult per t_S
        fit: exponential fit of retrieved energy versus t_S, if >= 3 points
    """

    storage_times: np.ndarray
    retrieved_energies: np.ndarray
    results: tuple
    fit: Optional[ExponentialFit] = None


def scan_storage_times(
    grid: FieldGrid,
    sys: LambdaSystem,
    od: float,
    probe: ProbeWaveform,
    storage_times: Sequence[float],
    gamma_s: float = DEFAULT_SPIN_DECAY,
    read_duration: float = DEFAULT_READ_DURATION,
    pool: Optional[ScanPool] = None,
) -> StorageScan:
    """Write once, then dark time and read for each t_S.

    Returns:
        StorageScan with the energy decay fitted when possible
    """
    times = [float(t) for t in storage_times]
    if any(t < 0 for t in times):
        raise ParameterError("storage times must be >= 0")
    solver = MaxwellBlochSolver(grid, sys, od, gamma_s)
    written = write_pulse(solver, probe, sys.omega_c)

    def read(t_s):
        return read_pulse(solver, written, t_s, sys.omega_c, read_duration)

    results = pool.map(read, times) if pool is not None else [read(t) for t in times]
    energies = np.array([r.retrieved_energy for r in results])
    fit = None
    if len(times) >= 3 and np.all(energies > 0):
        fit = fit_exponential(times, energies)
        logger.info("Retrieved-energy decay time %.4g s", fit.tau)
    return StorageScan(np.array(times), energies, tuple(results), fit)


@dataclass(frozen=True)
class RamseySeries:
    """Ramsey fringe visibility versus dark time."""

    dark_times: np.ndarray
    visibility: np.ndarray

    def fit(self) -> ExponentialFit:
        return fit_exponential(self.dark_times, self.visibility)


def simulate_ramsey(
    gamma_amplitude: float = DEFAULT_SPIN_DECAY, dark_times: Sequence[float] = ()
) -> RamseySeries:
    """Visibility exp(-gamma T) of the ground-state coherence amplitude.

    The stored-light energy follows |S|^2 and therefore decays twice as fast.
    """
    if gamma_amplitude < 0 or not math.isfinite(gamma_amplitude):
        raise ParameterError(f"decay rate must be >= 0, got {gamma_amplitude}")
    times = np.asarray(list(dark_times), dtype=float)
    if np.any(times < 0):
        raise ParameterError("dark times must be >= 0")
    return RamseySeries(times, np.exp(-gamma_amplitude * times))
