"""Rate-equation model of probe-induced transfer from F=1 to F=2.

The cloud is cut into transverse columns along the probe axis (x) and each
column into propagation slices of equal atom number. Inside a slice the probe
is attenuated by exp(-OD_slice p Im L), where p is the fraction of atoms still
in |1>; atoms are pumped out of |1> at the local scattering rate times the
F=2 branching ratio. A pi-polarized leak drives the resonant two-level
transition |1> -> |F'=1, m=-1> independently of the two-photon detuning.

Each slice sees the slice-averaged intensity I_in (1 - exp(-tau)) / tau, so
the number of atoms pumped equals the number of photons absorbed and the
column-integrated optical depth obeys dX/dt = -b R_0 (1 - exp(-X)) exactly.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from mottlight.cloud.sample import (
    AtomCloud,
    BeamProfile,
    column_density,
    optical_depth_map,
    transverse_cells,
)
from mottlight.core.constants import RB87_D1, PhysicalConstants
from mottlight.core.exceptions import ConvergenceError, ParameterError
from mottlight.physics.angular import (
    f2_branching_ratio,
    pi_leak_strength_factor,
    probe_strength_factor,
)
from mottlight.physics.lambda_system import (
    WEAK_PROBE_LIMIT,
    LambdaSystem,
    saturation_parameter,
    susceptibility_lineshape,
)

logger = logging.getLogger("mottlight.spectroscopy")

DEFAULT_PROBE_WAIST = 40e-6  # m


@dataclass(frozen=True)
class SpectroscopyConfig:
    """Inputs of one rate-model lineshape.

    Attributes:
        sys: Lambda system; delta and delta_1p are overwritten per scan point
        cloud: atomic sample
        probe_duration: probe pulse length (s)
        transverse_grid: cells per transverse axis
        propagation_slices: slices per column along the probe axis
        pi_leak_fraction: Omega_p^pi / Omega_p; overrides sys.omega_p_pi
        probe: probe beam (waist and offset); the coupling beam is uniform
        rtol, atol: integrator tolerances on the |1> populations
        max_step_halvings: retries with halved maximum step before failing
        constants: supplies Gamma and sigma_0
    """

    sys: LambdaSystem
    cloud: AtomCloud = field(default_factory=AtomCloud)
    probe_duration: float = 0.2
    transverse_grid: int = 64
    propagation_slices: int = 32
    pi_leak_fraction: Optional[float] = None
    probe: BeamProfile = field(default_factory=lambda: BeamProfile(DEFAULT_PROBE_WAIST))
    rtol: float = 1e-6
    atol: float = 1e-9
    max_step_halvings: int = 6
    constants: PhysicalConstants = RB87_D1

    def __post_init__(self):
        if not self.probe_duration > 0:
            raise ParameterError(f"probe_duration must be > 0, got {self.probe_duration}")
        if self.transverse_grid < 8 or self.propagation_slices < 8:
            raise ParameterError("grid resolutions must be >= 8")
        if self.pi_leak_fraction is None:
            object.__setattr__(self, "pi_leak_fraction", self.sys.pi_leak_fraction)
        elif not 0 <= self.pi_leak_fraction <= 1:
            raise ParameterError(
                f"pi_leak_fraction must lie in [0, 1], got {self.pi_leak_fraction}"
            )
        else:
            object.__setattr__(
                self, "sys",
                replace(self.sys, omega_p_pi=self.pi_leak_fraction * self.sys.omega_p),
            )
        if not (self.rtol > 0 and self.atol > 0):
            raise ParameterError("integrator tolerances must be > 0")

    @property
    def saturation(self) -> float:
        """Probe saturation parameter at the beam center."""
        return saturation_parameter(self.sys.omega_p, self.constants)

    @property
    def out_of_regime(self) -> bool:
        return self.saturation > WEAK_PROBE_LIMIT


def _slice_average(tau):
    """(1 - exp(-tau)) / tau with the tau -> 0 limit."""
    small = tau < 1e-10
    safe = np.where(small, 1.0, tau)
    return np.where(small, 1.0 - 0.5 * tau, -np.expm1(-safe) / safe)


class RateModel:
    """Precomputed column geometry for one SpectroscopyConfig.

    A centered probe makes the problem even in y and z, in which case only
    the positive quadrant is integrated.

    Example:
        model = RateModel(config)
        fraction = model.transfer(2 * math.pi * 40.0)
    """

    def __init__(self, config: SpectroscopyConfig):
        self.config = config
        cloud = config.cloud
        yy, zz, area = transverse_cells(cloud, config.transverse_grid)
        mask = column_density(cloud, yy, zz) > 0
        if config.probe.center == (0.0, 0.0) and config.transverse_grid % 2 == 0:
            mask &= (yy > 0) & (zz > 0)
        self.y = yy[mask]
        self.z = zz[mask]
        self.atoms = column_density(cloud, self.y, self.z) * area
        self.slices = config.propagation_slices
        self.od_slice = optical_depth_map(cloud, self.y, self.z, config.constants) / self.slices

        # the leak line scales with the medium when the probe strength is rescaled
        self.pi_od_ratio = pi_leak_strength_factor() / probe_strength_factor()
        self.branching = f2_branching_ratio()

        gamma = config.constants.natural_linewidth
        profile = config.probe.relative_intensity(self.y, self.z)
        sys = config.sys
        constants = config.constants
        self.sigma_rate0 = 0.5 * gamma * saturation_parameter(sys.omega_p, constants) * profile
        self.pi_rate0 = 0.5 * gamma * saturation_parameter(sys.omega_p_pi, constants) * profile

        if config.out_of_regime:
            logger.warning(
                "Probe saturation %.3g exceeds weak-probe limit; rate model is out of regime",
                config.saturation,
            )
        logger.debug(
            "Rate model: %d columns x %d slices, peak column OD %.3f",
            self.atoms.size, self.slices, float(self.od_slice.max(initial=0.0) * self.slices),
        )

    def absorption(self, delta: float) -> float:
        """Im L for the probe scanned with the coupling laser on resonance."""
        return susceptibility_lineshape(self.config.sys.detuned(delta)).imag

    def _rhs(self, absorption):
        od = self.od_slice[:, None]
        sigma_rate = self.branching * self.sigma_rate0[:, None]
        pi_rate = self.branching * self.pi_rate0[:, None]
        shape = (self.atoms.size, self.slices)

        def rhs(_t, state):
            p = state.reshape(shape)
            tau_sigma = od * p * absorption
            entering = np.exp(-(np.cumsum(tau_sigma, axis=1) - tau_sigma))
            rate = sigma_rate * absorption * entering * _slice_average(tau_sigma)
            if self.pi_rate0.any():
                tau_pi = od * p * self.pi_od_ratio
                entering_pi = np.exp(-(np.cumsum(tau_pi, axis=1) - tau_pi))
                rate = rate + pi_rate * entering_pi * _slice_average(tau_pi)
            return (-rate * p).ravel()

        return rhs

    def populations(self, delta: float) -> np.ndarray:
        """|1> population fraction per (column, slice) at the end of the probe pulse.

        Raises:
            ConvergenceError: If the integrator fails after the step-halving bound.
        """
        config = self.config
        absorption = self.absorption(delta)
        initial = np.ones(self.atoms.size * self.slices)
        if self.atoms.size == 0:
            return initial.reshape(0, self.slices)
        rhs = self._rhs(absorption)

        max_step = config.probe_duration / 16.0
        for attempt in range(config.max_step_halvings + 1):
            solution = solve_ivp(
                rhs,
                (0.0, config.probe_duration),
                initial,
                method="RK45",
                rtol=config.rtol,
                atol=config.atol,
                max_step=max_step,
                t_eval=[config.probe_duration],
            )
            if solution.success and np.all(np.isfinite(solution.y)):
                return np.clip(solution.y[:, -1], 0.0, 1.0).reshape(
                    self.atoms.size, self.slices
                )
            logger.warning(
                "Rate integration failed at delta=%.4g rad/s (attempt %d): %s",
                delta, attempt + 1, solution.message,
            )
            max_step /= 2.0
        raise ConvergenceError(
            f"rate equations did not converge at delta={delta:.6g} rad/s "
            f"after {config.max_step_halvings} step halvings"
        )

    def transfer(self, delta: float) -> float:
        """Cloud-averaged fraction N_2/N at the end of the probe pulse."""
        if self.atoms.size == 0:
            return 0.0
        remaining = self.populations(delta).mean(axis=1)
        total = float(np.sum(self.atoms))
        n2 = float(np.sum(self.atoms * (1.0 - remaining)))
        return min(max(n2 / total, 0.0), 1.0)

    def single_cell(self, delta: float) -> float:
        """Closed-form transfer without propagation (optically thin cloud)."""
        if self.atoms.size == 0:
            return 0.0
        rate = self.branching * (self.sigma_rate0 * self.absorption(delta) + self.pi_rate0)
        transferred = -np.expm1(-rate * self.config.probe_duration)
        return float(np.sum(self.atoms * transferred) / np.sum(self.atoms))


def simulate_transfer(config: SpectroscopyConfig, delta: float) -> float:
    """Fraction of atoms transferred to F=2 at two-photon detuning delta (rad/s)."""
    return RateModel(config).transfer(delta)


def single_cell_transfer(config: SpectroscopyConfig, delta: float) -> float:
    """Transfer fraction with propagation effects removed."""
    return RateModel(config).single_cell(delta)


def off_resonant_background(config: SpectroscopyConfig) -> float:
    """Transfer due to the pi leak alone, from the column-wise closed form.

    With only one channel the column-integrated optical depth X obeys
    exp(X) - 1 = (exp(X_0) - 1) exp(-b R_0 t), so each column transfers
    (X_0 - X) / X_0 of its atoms.
    """
    model = RateModel(config)
    if model.atoms.size == 0:
        return 0.0
    x0 = model.od_slice * model.slices * model.pi_od_ratio
    exponent = model.branching * model.pi_rate0 * config.probe_duration
    thin = x0 < 1e-12
    x0_safe = np.where(thin, 1.0, x0)
    x_end = np.log1p(np.expm1(x0_safe) * np.exp(-exponent))
    per_column = np.where(thin, -np.expm1(-exponent), (x0_safe - x_end) / x0_safe)
    return float(np.sum(model.atoms * per_column) / np.sum(model.atoms))

