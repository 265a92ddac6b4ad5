"""1D Maxwell-Bloch propagation of the probe through the EIT medium.

Normalized equations (time in units of 1/gamma_31, position z in [0, 1],
coupling sqrt(d) with d = alpha / 2 for resonant intensity OD alpha):

    dE/dz = i sqrt(d) P
    dP/dt = -(gamma + i delta_1p) P + i sqrt(d) E + i (Omega_c / 2) S
    dS/dt = -gamma_s S + i (Omega_c / 2) P

E lives on cell faces and (P, S) on cell centers. The field is marched
upwind through each cell with the box rule E_j = E_{j-1} + i sqrt(d) h P_j,
and P_j is driven by the face average, which makes the semi-discrete scheme
conserve |E_in|^2 - |E_out|^2 = d/dt sum h (|P|^2 + |S|^2) exactly. (P, S)
are advanced with classical RK4 together with the running input and output
pulse energies.

The adiabatic integrator eliminates P (dP/dt = 0) and advances S only; the
field recurrence then becomes a first-order linear filter along z.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.signal import lfilter

from mottlight.core.exceptions import (
    InstabilityError,
    ParameterError,
    StabilityBoundError,
)
from mottlight.physics.lambda_system import LambdaSystem
from mottlight.storage.waveforms import ControlWaveform, ProbeWaveform

logger = logging.getLogger("mottlight.storage")

# Largest dt * spectral radius accepted for RK4
RK4_STABILITY_LIMIT = 2.5
# Relative energy growth that flags a blown-up integration
ENERGY_GROWTH_TOLERANCE = 1e-4
CHECK_INTERVAL = 2000
MAX_TRACE_POINTS = 4000


class Integrator(str, Enum):
    RK4 = "rk4"
    ADIABATIC = "adiabatic"


@dataclass(frozen=True)
class FieldGrid:
    """Discretization of the (E, P, S) fields.

    Attributes:
        z_points: cells across the medium
        dt: time step in units of 1/gamma_31
        integrator: rk4 (full) or adiabatic (P eliminated)
        lossless: zero gamma_31 and gamma_s inside the equations
    """

    z_points: int = 64
    dt: float = 0.005
    integrator: Integrator = Integrator.RK4
    lossless: bool = False

    def __post_init__(self):
        object.__setattr__(self, "integrator", Integrator(self.integrator))
        if self.z_points < 32:
            raise ParameterError(f"z_points must be >= 32, got {self.z_points}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be > 0, got {self.dt}")

    @property
    def z(self) -> np.ndarray:
        """Cell centers in OD-normalized length."""
        return (np.arange(self.z_points) + 0.5) / self.z_points

    def refined(self) -> "FieldGrid":
        """Grid with doubled z and t resolution."""
        return FieldGrid(2 * self.z_points, 0.5 * self.dt, self.integrator, self.lossless)


@dataclass
class Trace:
    """Time series of input and exit intensities |E|^2 (times in seconds)."""

    times: list = field(default_factory=list)
    input_intensity: list = field(default_factory=list)
    output_intensity: list = field(default_factory=list)

    def append(self, t, e_in, e_out):
        self.times.append(t)
        self.input_intensity.append(abs(e_in) ** 2)
        self.output_intensity.append(abs(e_out) ** 2)

    def as_arrays(self):
        return (
            np.asarray(self.times, dtype=float),
            np.asarray(self.input_intensity, dtype=float),
            np.asarray(self.output_intensity, dtype=float),
        )


@dataclass(frozen=True)
class StorageResult:
    """Energy bookkeeping and traces of one storage run.

    Energies are time-integrated |E|^2 in normalized units.

    Attributes:
        input_energy: probe energy sent into the medium
        leaked_energy: energy leaving before the read phase
        retrieved_energy: energy leaving during the read phase
        stored_spinwave: S(z) at control switch-off
        efficiency_internal: retrieved / input
        efficiency_total: internal times geometric overlap (if applied)
        trace_times: sample times (s)
        input_trace: |E(0, t)|^2
        output_trace: |E(L, t)|^2
        stored_excitation: sum h (|P|^2 + |S|^2) at switch-off
        final_excitation: excitation left in the medium at the end
        dark_loss: excitation removed by analytic dark-time decay
        dark_time: storage time t_S (s)
        z_points, dt, integrator: discretization used
        stability_bound: largest stable dt for this run (1/gamma_31)
        wall_time: seconds spent integrating
    """

    input_energy: float
    leaked_energy: float
    retrieved_energy: float
    stored_spinwave: np.ndarray
    efficiency_internal: float
    efficiency_total: float
    trace_times: np.ndarray
    input_trace: np.ndarray
    output_trace: np.ndarray
    stored_excitation: float = 0.0
    final_excitation: float = 0.0
    dark_loss: float = 0.0
    dark_time: float = 0.0
    z_points: int = 64
    dt: float = 0.005
    integrator: str = Integrator.RK4.value
    stability_bound: float = math.inf
    wall_time: float = 0.0

    @property
    def conservation_error(self) -> float:
        """|input - output - remaining - dark loss| / input."""
        if self.input_energy <= 0:
            return 0.0
        balance = (
            self.input_energy
            - self.leaked_energy
            - self.retrieved_energy
            - self.final_excitation
            - self.dark_loss
        )
        return abs(balance) / self.input_energy


class MaxwellBlochSolver:
    """Fixed-step integrator for one medium.

    Times passed to the public methods are absolute seconds; the solver
    converts them to units of 1/gamma_31 internally.

    Example:
        solver = MaxwellBlochSolver(FieldGrid(), sys, od=6.3, gamma_s=0.0)
        state = solver.initial_state()
        state = solver.advance(state, t0, t1, control_fn, probe_fn, trace)
    """

    def __init__(
        self,
        grid: FieldGrid,
        sys: LambdaSystem,
        od: float,
        gamma_s: Optional[float] = None,
    ):
        if not od > 0:
            raise ParameterError(f"optical depth must be > 0, got {od}")
        gamma_s = sys.gamma_21 if gamma_s is None else gamma_s
        if gamma_s < 0:
            raise ParameterError(f"gamma_s must be >= 0, got {gamma_s}")
        self.grid = grid
        self.sys = sys
        self.od = od
        self.gamma_s = gamma_s
        self.time_unit = 1.0 / sys.gamma_31
        self.n = grid.z_points
        self.h = 1.0 / self.n
        self.coupling = math.sqrt(0.5 * od)
        optical_decay = 0.0 if grid.lossless else 1.0
        self.decay_p = optical_decay + 1j * sys.delta_1p * self.time_unit
        self.decay_s = 0.0 if grid.lossless else gamma_s * self.time_unit
        self.adiabatic = grid.integrator is Integrator.ADIABATIC
        self.filter_gain = self.decay_p + 0.5 * self.coupling**2 * self.h
        self.size = self.n if self.adiabatic else 2 * self.n

    # state layout: [P (rk4 only), S, Q_in, Q_out]
    def initial_state(self) -> np.ndarray:
        return np.zeros(self.size + 2, dtype=complex)

    def spin_wave(self, state) -> np.ndarray:
        return state[self.size - self.n:self.size].copy()

    def input_energy(self, state) -> float:
        return float(state[-2].real)

    def output_energy(self, state) -> float:
        return float(state[-1].real)

    def _fields(self, state, omega, e_in):
        """(P, S, E_exit) for a state; omega in normalized units."""
        k = 1j * self.coupling * self.h
        if self.adiabatic:
            s = state[:self.n]
            a = 1.0 - self.coupling**2 * self.h / self.filter_gain
            x = -(self.coupling * self.h * 0.5 * omega / self.filter_gain) * s
            e_faces, _ = lfilter([1.0], [1.0, -a], x, zi=np.array([a * e_in]))
            e_prev = np.concatenate(([e_in], e_faces[:-1]))
            p = 1j * (self.coupling * e_prev + 0.5 * omega * s) / self.filter_gain
            return p, s, e_faces[-1], None
        p = state[:self.n]
        s = state[self.n:2 * self.n]
        e_faces = e_in + k * np.cumsum(p)
        e_mid = e_faces - 0.5 * k * p
        return p, s, e_faces[-1], e_mid

    def _rhs(self, state, omega, e_in):
        p, s, e_out, e_mid = self._fields(state, omega, e_in)
        derivative = np.empty_like(state)
        if self.adiabatic:
            derivative[:self.n] = -self.decay_s * s + 0.5j * omega * p
        else:
            derivative[:self.n] = (
                -self.decay_p * p + 1j * self.coupling * e_mid + 0.5j * omega * s
            )
            derivative[self.n:2 * self.n] = -self.decay_s * s + 0.5j * omega * p
        derivative[-2] = abs(e_in) ** 2
        derivative[-1] = abs(e_out) ** 2
        return derivative

    def excitation(self, state, omega: float = 0.0, e_in: complex = 0.0) -> float:
        """sum h (|P|^2 + |S|^2); omega in rad/s."""
        p, s, _, _ = self._fields(state, omega * self.time_unit, e_in)
        return float(self.h * (np.sum(np.abs(p) ** 2) + np.sum(np.abs(s) ** 2)))

    def exit_field(self, state, omega: float, e_in: complex) -> complex:
        return self._fields(state, omega * self.time_unit, e_in)[2]

    def stability_bound(self, omega_max: float) -> float:
        """Largest stable dt (units of 1/gamma_31) for a control peak omega_max."""
        omega = 0.5 * omega_max * self.time_unit
        if self.adiabatic:
            radius = omega**2 / abs(self.filter_gain) + self.decay_s
        else:
            radius = abs(self.decay_p) + self.coupling**2 + omega + self.decay_s
        return RK4_STABILITY_LIMIT / radius if radius > 0 else math.inf

    def check_stability(self, omega_max: float) -> float:
        bound = self.stability_bound(omega_max)
        if self.grid.dt > bound:
            raise StabilityBoundError(
                f"time step {self.grid.dt:.4g} exceeds stability bound {bound:.4g} "
                f"(units of 1/gamma_31) for {self.grid.integrator.value}"
            )
        return bound

    def _check_energy(self, state, omega, e_in):
        if not np.all(np.isfinite(state)):
            raise InstabilityError("non-finite field values in Maxwell-Bloch integration")
        q_in = state[-2].real
        budget = state[-1].real + self.excitation(state, omega / self.time_unit, e_in)
        if budget > q_in * (1.0 + ENERGY_GROWTH_TOLERANCE) + 1e-12:
            raise InstabilityError(
                f"energy grew during integration: out+stored={budget:.6g} > in={q_in:.6g}"
            )

    def advance(
        self,
        state: np.ndarray,
        t_start: float,
        t_end: float,
        control: Callable[[float], float],
        probe: Callable[[float], complex],
        trace: Optional[Trace] = None,
    ) -> np.ndarray:
        """Integrate from t_start to t_end (s) with smooth control and probe.

        control and probe must be continuous on [t_start, t_end]; callers
        split the run at discontinuities.

        Raises:
            InstabilityError: energy growth or non-finite values
        """
        duration = (t_end - t_start) / self.time_unit
        if duration <= 0:
            return state
        steps = max(1, int(math.ceil(duration / self.grid.dt - 1e-9)))
        dt = duration / steps
        stride = max(1, steps // MAX_TRACE_POINTS)
        unit = self.time_unit

        def omega(tau):
            return control(t_start + tau * unit) * unit

        def e_in(tau):
            return probe(t_start + tau * unit)

        y = state.copy()
        tau = 0.0
        for step in range(1, steps + 1):
            om0, om1, om2 = omega(tau), omega(tau + 0.5 * dt), omega(tau + dt)
            e0, e1, e2 = e_in(tau), e_in(tau + 0.5 * dt), e_in(tau + dt)
            k1 = self._rhs(y, om0, e0)
            k2 = self._rhs(y + 0.5 * dt * k1, om1, e1)
            k3 = self._rhs(y + 0.5 * dt * k2, om1, e1)
            k4 = self._rhs(y + dt * k3, om2, e2)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            tau = step * dt
            if trace is not None and (step % stride == 0 or step == steps):
                trace.append(t_start + tau * unit, e2, self._fields(y, om2, e2)[2])
            if step % CHECK_INTERVAL == 0 or step == steps:
                self._check_energy(y, om2, e2)
        return y

    def decay_in_dark(self, state: np.ndarray, duration: float):
        """Analytic dark-time decay S -> S exp(-gamma_s t); P is dropped.

        Returns:
            tuple: (new state, excitation removed)
        """
        before = self.excitation(state)
        y = state.copy()
        factor = math.exp(-self.decay_s * duration / self.time_unit)
        s_slice = slice(self.size - self.n, self.size)
        y[s_slice] *= factor
        if not self.adiabatic:
            y[:self.n] = 0.0
        return y, max(before - self.excitation(y), 0.0)


def _segment_function(control: ControlWaveform, t_mid: float):
    if t_mid < control.t0:
        value = control.segments[0].start_value
        return lambda t: value
    for start, end, segment in control.boundaries():
        if start <= t_mid < end:
            return lambda t, s=segment, a=start: s.value_at(t - a)
    value = control.segments[-1].end_value
    return lambda t: value


def _probe_function(probe: ProbeWaveform, t_mid: float):
    if probe.start_time <= t_mid < probe.end_time:
        return probe.envelope
    return lambda t: 0.0


def internal_efficiency(input_energy: float, retrieved_energy: float) -> float:
    if input_energy <= 0 or retrieved_energy <= 0:
        return 0.0
    return min(retrieved_energy / input_energy, 1.0)


def propagate(
    grid: FieldGrid,
    control: ControlWaveform,
    probe_in: ProbeWaveform,
    sys: LambdaSystem,
    od: float,
    gamma_s: Optional[float] = None,
) -> StorageResult:
    """Propagate a probe pulse through the medium under a control waveform.

    The run starts when the probe (or the control) starts and ends with the
    last control segment. Energy leaving before the first control switch-off
    counts as leaked, energy after it as retrieved.

    Args:
        grid: discretization
        control: Omega_c(t)
        probe_in: probe envelope at the medium entrance
        sys: decay rates and one-photon detuning; time unit 1/gamma_31
        od: peak resonant intensity optical depth alpha
        gamma_s: spin-wave amplitude decay (defaults to sys.gamma_21)

    Returns:
        StorageResult

    Raises:
        StabilityBoundError: dt above the integrator's bound
        InstabilityError: energy growth or non-finite values
    """
    started = time.perf_counter()
    solver = MaxwellBlochSolver(grid, sys, od, gamma_s)
    bound = solver.check_stability(control.peak())

    t_start = min(probe_in.start_time, control.t0)
    t_end = control.t_end
    if t_end <= t_start:
        raise ParameterError("control waveform ends before the probe starts")
    switch_off = control.switch_off_time()
    marks = {t_start, t_end, probe_in.start_time, probe_in.end_time}
    for start, end, _ in control.boundaries():
        marks.update((start, end))
    times = sorted(t for t in marks if t_start <= t <= t_end)

    state = solver.initial_state()
    trace = Trace()
    trace.append(t_start, probe_in.amplitude(t_start), 0.0)
    stored = None
    leaked = None
    stored_excitation = 0.0
    for a, b in zip(times[:-1], times[1:]):
        if switch_off is not None and stored is None and a >= switch_off:
            stored = solver.spin_wave(state)
            leaked = solver.output_energy(state)
            stored_excitation = solver.excitation(state)
        mid = 0.5 * (a + b)
        state = solver.advance(
            state, a, b, _segment_function(control, mid), _probe_function(probe_in, mid), trace
        )
    if stored is None:
        stored = solver.spin_wave(state)
        stored_excitation = solver.excitation(state)
        leaked = solver.output_energy(state)

    total_out = solver.output_energy(state)
    input_energy = solver.input_energy(state)
    retrieved = total_out - leaked
    efficiency = internal_efficiency(input_energy, retrieved)
    times_s, input_trace, output_trace = trace.as_arrays()
    result = StorageResult(
        input_energy=input_energy,
        leaked_energy=leaked,
        retrieved_energy=max(retrieved, 0.0),
        stored_spinwave=stored,
        efficiency_internal=efficiency,
        efficiency_total=efficiency,
        trace_times=times_s,
        input_trace=input_trace,
        output_trace=output_trace,
        stored_excitation=stored_excitation,
        final_excitation=solver.excitation(state, control.value(t_end)),
        z_points=grid.z_points,
        dt=grid.dt,
        integrator=grid.integrator.value,
        stability_bound=bound,
        wall_time=time.perf_counter() - started,
    )
    logger.info(
        "Propagation done: od=%.3g input=%.4g leaked=%.4g retrieved=%.4g (%.1f s)",
        od, input_energy, leaked, retrieved, result.wall_time,
    )
    return result
