# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Euler-Maruyama integration of the stochastically forced Euler-Poisson system.

One step is a Lie splitting: Rusanov drift for (rho, J) with the centred
source rho E, semi-implicit relaxation J/(1 + dt), the Brownian forcing of the
momentum evaluated at the pre-step current, Ohmic boundary values, and a fresh
Poisson solve for the potential.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .choices import PathStatus
from .core.device import BoundaryData, DopingProfile
from .core.fields import FlowField
from .core.flux import characteristic_speed, extrapolate_ends, flux_divergence, rusanov_flux, viscous_term
from .core.poisson import electric_field, solve_poisson
from .core.pressure import PressureLaw
from .diagnostics import DiagnosticFrame, diagnostic_frame
from .exceptions import DomainError, SemiconductorError, StepSizeError, VacuumError
from .noise import NoiseModel
from .perturbation import (
    PerturbationState,
    PerturbationTrajectory,
    SymmetrizerWeights,
    symmetrizer_weights,
)
from .steady import SteadyState
from .streams import make_streams

logger = logging.getLogger(__name__)

# Relative slack on the CFL bound so a dt computed from the bound itself passes
CFL_SLACK = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    cfl: float = 0.4
    artificial_viscosity: float = 0.0
    t_end: float = 10.0
    snapshot_every: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise DomainError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.artificial_viscosity >= 0.0:
            raise DomainError(
                f"artificial_viscosity must be nonnegative, got {self.artificial_viscosity}"
            )
        if not self.t_end >= 0.0:
            raise DomainError(f"t_end must be nonnegative, got {self.t_end}")
        if self.snapshot_every < 0:
            raise DomainError(f"snapshot_every must be nonnegative, got {self.snapshot_every}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass(frozen=True)
class PerturbationSpec:
    amplitude: float = 0.01
    n_modes: int = 3

    def __post_init__(self):
        if not self.amplitude >= 0.0:
            raise DomainError(f"perturbation amplitude must be nonnegative, got {self.amplitude}")
        if self.n_modes < 1:
            raise DomainError(f"n_modes must be at least 1, got {self.n_modes}")


@dataclass(frozen=True, eq=False)
class SimulationContext:
    """
    Everything fixed along a path: the steady state, the device and the
    symmetrizer weights used by the diagnostics.
    """

    steady: SteadyState
    doping: DopingProfile
    boundary: BoundaryData
    weights: SymmetrizerWeights

    @classmethod
    def build(
        cls, steady: SteadyState, doping: DopingProfile, law: PressureLaw
    ) -> SimulationContext:
        """
        Time-dependent solves use Phi(1) as attained by the steady state.
        """
        return cls(
            steady=steady,
            doping=doping,
            boundary=steady.boundary_data(),
            weights=symmetrizer_weights(steady, law),
        )

    @property
    def grid(self):
        return self.steady.grid


@dataclass
class PathRecord:
    """
    Per-step diagnostics of one path plus sparse snapshots. Owned by a single
    worker while it runs.
    """

    seed: int
    frames: list[DiagnosticFrame] = field(default_factory=list)
    running_sup: list[float] = field(default_factory=list)
    snapshots: dict[int, FlowField] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    status: PathStatus = PathStatus.COMPLETE
    failure: str | None = None
    first_supersonic_time: float | None = None

    def append(self, frame: DiagnosticFrame):
        previous = self.running_sup[-1] if self.running_sup else 0.0
        self.frames.append(frame)
        self.running_sup.append(max(previous, frame.composite))

    def fail(self, error: Exception):
        self.status = PathStatus.FAILED
        self.failure = f"{type(error).__name__}: {error}"

    @property
    def failed(self) -> bool:
        return self.status == PathStatus.FAILED

    @property
    def n_steps(self) -> int:
        return max(len(self.frames) - 1, 0)

    @property
    def last_good_time(self) -> float:
        return self.frames[-1].t if self.frames else 0.0

    def column(self, name: str) -> np.ndarray:
        if name == "running_sup_composite":
            return np.asarray(self.running_sup)
        return np.array([getattr(frame, name) for frame in self.frames])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    @property
    def composite(self) -> np.ndarray:
        return self.column("composite")

    @property
    def sup_sigma(self) -> np.ndarray:
        return self.column("sup_sigma")

    def rows(self):
        for frame, sup in zip(self.frames, self.running_sup):
            yield frame.row(sup)


def cfl_dt(state: FlowField, law: PressureLaw, cfl: float) -> float:
    """
    cfl * h / max_i (|J_i/rho_i| + sqrt(P'(rho_i))).
    """
    if np.any(state.rho <= 0.0):
        raise VacuumError("cfl_dt needs a positive density")
    return cfl * state.grid.h / float(np.max(characteristic_speed(state.rho, state.J, law)))


def momentum_update(J_star, J_prev, dt: float, noise: NoiseModel, dW) -> np.ndarray:
    """
    Relaxation and forcing substeps: J_star/(1 + dt) + J_prev Y(J_prev) dW.
    Without spatial terms (J_star = J_prev) this is the scalar scheme for
    dJ = -J dt + J Y(J) dB.
    """
    relaxed = J_star / (1.0 + dt)
    if noise.is_silent:
        return relaxed
    return relaxed + noise.increment(J_prev, dW)


def step(
    state: FlowField,
    context: SimulationContext,
    law: PressureLaw,
    noise: NoiseModel,
    dt: float,
    rng: np.random.Generator | None = None,
    increments=None,
    artificial_viscosity: float = 0.0,
    update_field: bool = True,
) -> FlowField:
    """
    Advance one step of length dt. Brownian increments come from `increments`
    (shape (n_draws,)) when given, otherwise they are drawn from `rng`.
    `update_field=False` keeps the old potential (fault injection only).
    """
    grid = state.grid
    h = grid.h
    rho, J, E = state.rho, state.J, state.E
    if np.any(rho <= 0.0):
        raise VacuumError(f"density is not positive at t={state.t:.6g}")
    limit = cfl_dt(state, law, 1.0)
    if dt > limit * (1.0 + CFL_SLACK):
        raise StepSizeError(f"dt={dt:.3e} exceeds the CFL bound {limit:.3e} at t={state.t:.6g}")
    if artificial_viscosity and dt * artificial_viscosity > 0.5 * h * h * (1.0 + CFL_SLACK):
        raise StepSizeError(f"dt={dt:.3e} violates the viscous bound h**2/(2 mu)")

    inner = slice(1, -1)
    flux_rho, flux_J = rusanov_flux(rho, J, law)
    rho_new = rho.copy()
    rho_new[inner] = rho[inner] - dt * (
        flux_divergence(flux_rho, h) - viscous_term(rho, h, artificial_viscosity)
    )
    J_star = J[inner] - dt * (
        flux_divergence(flux_J, h) - viscous_term(J, h, artificial_viscosity) - rho[inner] * E[inner]
    )
    if increments is None and not noise.is_silent:
        if rng is None:
            raise ValueError("step needs an rng or explicit Brownian increments")
        increments = noise.draw(rng, dt)
    J_new = J.copy()
    J_new[inner] = momentum_update(J_star, J[inner], dt, noise, increments)

    rho_new[0] = context.boundary.rho_left
    rho_new[-1] = context.boundary.rho_right
    extrapolate_ends(J_new)
    if np.any(rho_new <= 0.0):
        raise VacuumError(
            f"density lost positivity at t={state.t + dt:.6g}; reduce cfl or the data amplitude"
        )

    if update_field:
        Phi = solve_poisson(rho_new, context.doping, context.boundary)
        E_new = electric_field(grid, Phi)
    else:
        Phi, E_new = state.Phi, state.E
    return FlowField(grid, rho_new, J_new, Phi, E_new, state.t + dt)


def steady_field(context: SimulationContext) -> FlowField:
    steady = context.steady
    return FlowField.from_density(
        steady.rho_bar,
        np.full(steady.grid.n_nodes, steady.J_bar),
        context.doping,
        context.boundary,
    )


def initial_perturbation(
    context: SimulationContext,
    spec: PerturbationSpec,
    rng: np.random.Generator,
) -> FlowField:
    """
    sigma_0 = sum c_i sin(i pi x), j_0 = sum d_i cos(i pi x) with c_i, d_i
    uniform on [-1, 1], scaled so that ||(sigma_0, j_0)||_H2 = amplitude. The end
    values satisfy the perturbation boundary conditions exactly.
    """
    steady = context.steady
    grid = steady.grid
    if spec.amplitude == 0.0:
        return steady_field(context)
    x = grid.nodes
    modes = np.arange(1, spec.n_modes + 1)
    c = rng.uniform(-1.0, 1.0, spec.n_modes)
    d = rng.uniform(-1.0, 1.0, spec.n_modes)
    sigma = c @ np.sin(np.pi * np.outer(modes, x))
    j = d @ np.cos(np.pi * np.outer(modes, x))
    sigma[0] = sigma[-1] = 0.0
    extrapolate_ends(j)
    norm = float(np.hypot(grid.h2_norm(sigma), grid.h2_norm(j)))
    if norm == 0.0:
        return steady_field(context)
    scale = spec.amplitude / norm
    return FlowField.from_density(
        steady.rho_bar + scale * sigma,
        steady.J_bar + scale * j,
        context.doping,
        context.boundary,
    )


def simulate(
    initial: FlowField,
    config: IntegratorConfig,
    law: PressureLaw,
    context: SimulationContext,
    noise: NoiseModel,
    rng: np.random.Generator | None = None,
) -> PathRecord:
    """
    Integrate to config.t_end with CFL-limited steps, recording a diagnostic
    frame every step and a snapshot every `snapshot_every` steps. Step errors
    end the path and are recorded on the returned PathRecord.
    """
    if rng is None:
        rng = make_streams(config.seed, 0).noise
    record = PathRecord(seed=config.seed)
    steady = context.steady
    state = initial
    step_index = 0
    # Remaining time below this is treated as reaching t_end
    time_slack = 1e-12 * max(1.0, config.t_end)
    try:
        record.append(diagnostic_frame(state, steady, law, context.weights))
    except SemiconductorError as e:
        record.fail(e)
        return record
    if config.snapshot_every:
        record.snapshots[0] = state

    while config.t_end - state.t > time_slack:
        try:
            dt = min(cfl_dt(state, law, config.cfl), config.t_end - state.t)
            state = step(
                state,
                context,
                law,
                noise,
                dt,
                rng=rng,
                artificial_viscosity=config.artificial_viscosity,
            )
            frame = diagnostic_frame(state, steady, law, context.weights)
        except SemiconductorError as e:
            logger.warning(f"Path {config.seed} failed at t={state.t:.6g}: {e}")
            record.fail(e)
            break
        step_index += 1
        record.append(frame)
        if frame.subsonic_margin <= 0.0 and record.first_supersonic_time is None:
            record.first_supersonic_time = frame.t
            message = f"supersonic state at t={frame.t:.6g} (margin {frame.subsonic_margin:.3e})"
            record.warnings.append(message)
            logger.warning(message)
        if config.snapshot_every and step_index % config.snapshot_every == 0:
            record.snapshots[step_index] = state

    logger.debug(
        f"Path {config.seed}: {record.n_steps} steps to t={record.last_good_time:.6g} ({record.status})"
    )
    return record


def direct_trajectory(
    initial: FlowField,
    context: SimulationContext,
    law: PressureLaw,
    noise: NoiseModel,
    increments,
    dt: float,
    artificial_viscosity: float = 0.0,
) -> PerturbationTrajectory:
    """
    Nonlinear integration with fixed dt on a frozen noise path, returned as a
    perturbation trajectory for comparison with Picard iterates.
    """
    increments = np.asarray(increments, dtype=float)
    steady = context.steady
    states = [PerturbationState.from_field(initial, steady)]
    state = initial
    for dW in increments:
        state = step(
            state,
            context,
            law,
            noise,
            dt,
            increments=dW,
            artificial_viscosity=artificial_viscosity,
        )
        states.append(PerturbationState.from_field(state, steady))
    times = initial.t + dt * np.arange(len(states))
    return PerturbationTrajectory(
        steady.grid,
        times,
        np.array([s.sigma for s in states]),
        np.array([s.j for s in states]),
        np.array([s.e_tilde for s in states]),
    )


def with_seed(config: IntegratorConfig, seed: int) -> IntegratorConfig:
    return dataclasses.replace(config, seed=int(seed))
