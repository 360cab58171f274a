# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Perturbations w = (sigma, j) around a steady state and the first-order system

    w_t + A(w) w_x + B w + C = N

with A evaluated at the full state, B and C built from steady quantities and
N defined as the exact defect, so the matrix form reproduces the discrete
drift identically. Also home to the symmetrizer weights r, r_tilde and the
frozen-coefficient Picard iteration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core.device import BoundaryData, DopingProfile
from .core.fields import FlowField
from .core.flux import characteristic_speed, extrapolate_ends, numerical_dissipation
from .core.grid import Grid, frozen_array
from .core.poisson import electric_field, solve_poisson
from .core.pressure import PressureLaw
from .exceptions import (
    StepSizeError,
    SupersonicError,
    SymmetrizerPositivityError,
    VacuumError,
)
from .noise import NoiseModel
from .steady import SteadyState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PerturbationState:
    """
    sigma = rho - rho_bar, j = J - J_bar, e_tilde = E - E_bar.

    e_tilde_x - sigma equals the steady Poisson defect, which vanishes for the
    flat steady state.
    """

    grid: Grid
    sigma: np.ndarray
    j: np.ndarray
    e_tilde: np.ndarray

    def __post_init__(self):
        for name in ("sigma", "j", "e_tilde"):
            object.__setattr__(self, name, frozen_array(self.grid.check(getattr(self, name), name)))

    @classmethod
    def zero(cls, grid: Grid) -> PerturbationState:
        z = np.zeros(grid.n_nodes)
        return cls(grid, z, z, z)

    @classmethod
    def from_field(cls, field: FlowField, steady: SteadyState) -> PerturbationState:
        return cls(
            field.grid,
            field.rho - steady.rho_bar,
            field.J - steady.J_bar,
            field.E - steady.E_bar,
        )

    @classmethod
    def from_sigma_j(
        cls,
        sigma,
        j,
        steady: SteadyState,
        doping: DopingProfile,
        bd: BoundaryData,
    ) -> PerturbationState:
        """
        Complete (sigma, j) with the field perturbation from a Poisson solve.
        """
        Phi = solve_poisson(steady.rho_bar + sigma, doping, bd)
        e_tilde = electric_field(steady.grid, Phi) - steady.E_bar
        return cls(steady.grid, sigma, j, e_tilde)

    def total_density(self, steady: SteadyState) -> np.ndarray:
        rho = steady.rho_bar + self.sigma
        if np.any(rho <= 0.0):
            raise VacuumError("rho_bar + sigma is not positive everywhere")
        return rho

    def h2_norm(self) -> float:
        return float(np.hypot(self.grid.h2_norm(self.sigma), self.grid.h2_norm(self.j)))


@dataclass(frozen=True, eq=False)
class CoefficientFields:
    """
    A, B: (n_nodes, 2, 2); C, N: (n_nodes, 2).
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    N: np.ndarray


@dataclass(frozen=True, eq=False)
class SymmetrizerWeights:
    r: np.ndarray
    s: np.ndarray
    r_tilde: np.ndarray
    s_tilde: np.ndarray


def _momentum_flux(rho, J, law: PressureLaw):
    return J * J / rho + law.pressure(rho)


def perturbation_drift(pert: PerturbationState, steady: SteadyState, law: PressureLaw):
    """
    Central-difference right-hand side (D_sigma, D_j) of the perturbed system:

        D_sigma = -j_x
        D_j = -(f - f_bar)_x - j + rho_bar e + sigma E_bar + sigma e
    """
    grid = pert.grid
    rho = pert.total_density(steady)
    J = steady.J_bar + pert.j
    f = _momentum_flux(rho, J, law)
    f_bar = _momentum_flux(steady.rho_bar, steady.J_bar, law)
    d_sigma = -grid.derivative(pert.j)
    d_j = (
        -grid.derivative(f - f_bar)
        - pert.j
        + steady.rho_bar * pert.e_tilde
        + pert.sigma * steady.E_bar
        + pert.sigma * pert.e_tilde
    )
    return d_sigma, d_j


def _principal_symbol(rho, J, law: PressureLaw) -> np.ndarray:
    A = np.zeros((len(rho), 2, 2))
    A[:, 0, 1] = 1.0
    A[:, 1, 0] = law.subsonic_margin(rho, J)
    A[:, 1, 1] = 2.0 * J / rho
    return A


def _steady_coupling(steady: SteadyState, law: PressureLaw) -> np.ndarray:
    rho_bar = steady.rho_bar
    J_bar = steady.J_bar
    rho_x = steady.grid.derivative(rho_bar)
    B = np.zeros((len(rho_bar), 2, 2))
    B[:, 1, 0] = (
        -2.0 * J_bar**2 * rho_x / rho_bar**3
        + law.pressure_derivative(rho_bar, 2) * rho_x
        - steady.E_bar
    )
    B[:, 1, 1] = -2.0 * J_bar * rho_x / rho_bar**2 + 1.0
    return B


def assemble_coefficients(
    pert: PerturbationState, steady: SteadyState, law: PressureLaw
) -> CoefficientFields:
    grid = pert.grid
    rho = pert.total_density(steady)
    J = steady.J_bar + pert.j

    A = _principal_symbol(rho, J, law)
    B = _steady_coupling(steady, law)
    C = np.zeros((grid.n_nodes, 2))
    C[:, 1] = -steady.rho_bar * pert.e_tilde

    w = np.stack([pert.sigma, pert.j], axis=-1)
    w_x = np.stack([grid.derivative(pert.sigma), grid.derivative(pert.j)], axis=-1)
    drift = np.stack(perturbation_drift(pert, steady, law), axis=-1)
    N = (
        drift
        + np.einsum("nij,nj->ni", A, w_x)
        + np.einsum("nij,nj->ni", B, w)
        + C
    )
    return CoefficientFields(A=A, B=B, C=C, N=N)


def _require_subsonic(steady: SteadyState):
    if steady.subsonic_margin <= 0.0:
        raise SupersonicError(
            f"symmetrizers need a subsonic steady state (margin {steady.subsonic_margin:.3e})"
        )


def first_order_symmetrizer(
    steady: SteadyState, law: PressureLaw, r0: float = 1.0
) -> np.ndarray:
    """
    Solve {J**2/rho**2 - P'} r_x + {3 J**2 rho_x/rho**3 + P'' rho_x - P' rho_x/rho - J/rho} r = 0
    with r(0) = r0, via r = r0 exp(-int c/a).
    """
    _require_subsonic(steady)
    grid = steady.grid
    rho = steady.rho_bar
    J_bar = steady.J_bar
    rho_x = grid.derivative(rho)
    P1 = law.pressure_derivative(rho, 1)
    P2 = law.pressure_derivative(rho, 2)
    a = J_bar**2 / rho**2 - P1
    c = 3.0 * J_bar**2 * rho_x / rho**3 + P2 * rho_x - P1 * rho_x / rho - J_bar / rho
    return r0 * np.exp(-grid.cumulative_integral(c / a))


def _second_order_coefficients(steady: SteadyState, law: PressureLaw):
    grid = steady.grid
    rho = steady.rho_bar
    J_bar = steady.J_bar
    rho_x = grid.derivative(rho)
    q = law.subsonic_margin(rho, J_bar)
    G = (
        5.0 * grid.derivative(q)
        - 2.0 * J_bar**2 * rho_x / rho**3
        + law.pressure_derivative(rho, 2) * rho_x
        - steady.E_bar
    ) / (3.0 * q)
    M = -2.0 / (3.0 * q)
    return G, M


def second_order_symmetrizer(
    steady: SteadyState, law: PressureLaw, r_tilde0: float = 1.0
) -> np.ndarray:
    """
    Exact solution of r_tilde_x + G r_tilde + M = 0 with r_tilde(0) = r_tilde0:

        r_tilde = exp(-int_0^x G) (r_tilde0 - int_0^x exp(int_0^s G) M ds)
    """
    _require_subsonic(steady)
    grid = steady.grid
    G, M = _second_order_coefficients(steady, law)
    integrating = grid.cumulative_integral(G)
    r_tilde = np.exp(-integrating) * (
        r_tilde0 - grid.cumulative_integral(np.exp(integrating) * M)
    )
    minimum = float(np.min(r_tilde))
    if minimum <= 0.0:
        raise SymmetrizerPositivityError(
            f"second-order weight reaches {minimum:.3e}; data outside the small-perturbation regime"
        )
    logger.debug(f"second-order symmetrizer: min r_tilde = {minimum:.6g}")
    return r_tilde


def symmetrizer_weights(
    steady: SteadyState,
    law: PressureLaw,
    pert: PerturbationState | None = None,
    r0: float = 1.0,
    r_tilde0: float = 1.0,
) -> SymmetrizerWeights:
    """
    r, r_tilde with their companions s = (P'(rho_bar) - J_bar**2/rho_bar**2) r and
    s_tilde = (P'(rho) - J**2/rho**2) r_tilde at the full state (steady state if
    `pert` is None).
    """
    r = first_order_symmetrizer(steady, law, r0)
    r_tilde = second_order_symmetrizer(steady, law, r_tilde0)
    s = law.subsonic_margin(steady.rho_bar, steady.J_bar) * r
    if pert is None:
        s_tilde = s / r * r_tilde
    else:
        rho = pert.total_density(steady)
        s_tilde = law.subsonic_margin(rho, steady.J_bar + pert.j) * r_tilde
    return SymmetrizerWeights(
        r=frozen_array(r),
        s=frozen_array(s),
        r_tilde=frozen_array(r_tilde),
        s_tilde=frozen_array(s_tilde),
    )


def symmetrizer_residuals(steady: SteadyState, law: PressureLaw, weights: SymmetrizerWeights):
    """
    Sup norms of the two symmetrizer ODE residuals, derivatives by the
    standard stencils.
    """
    grid = steady.grid
    rho = steady.rho_bar
    J_bar = steady.J_bar
    rho_x = grid.derivative(rho)
    P1 = law.pressure_derivative(rho, 1)
    P2 = law.pressure_derivative(rho, 2)
    a = J_bar**2 / rho**2 - P1
    c = 3.0 * J_bar**2 * rho_x / rho**3 + P2 * rho_x - P1 * rho_x / rho - J_bar / rho
    first = a * grid.derivative(weights.r) + c * weights.r
    G, M = _second_order_coefficients(steady, law)
    second = grid.derivative(weights.r_tilde) + G * weights.r_tilde + M
    return float(np.max(np.abs(first))), float(np.max(np.abs(second)))


@dataclass(frozen=True, eq=False)
class PerturbationTrajectory:
    """
    Perturbation states on a uniform time grid; arrays have shape (n_times, n_nodes).
    """

    grid: Grid
    times: np.ndarray
    sigma: np.ndarray
    j: np.ndarray
    e_tilde: np.ndarray

    def __post_init__(self):
        for name in ("times", "sigma", "j", "e_tilde"):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def state(self, k: int) -> PerturbationState:
        return PerturbationState(self.grid, self.sigma[k], self.j[k], self.e_tilde[k])

    @classmethod
    def constant(cls, pert: PerturbationState, times) -> PerturbationTrajectory:
        n = len(times)
        return cls(
            pert.grid,
            times,
            np.tile(pert.sigma, (n, 1)),
            np.tile(pert.j, (n, 1)),
            np.tile(pert.e_tilde, (n, 1)),
        )


def picard_iterate(
    prev: PerturbationTrajectory,
    steady: SteadyState,
    law: PressureLaw,
    noise: NoiseModel,
    increments,
    dt: float,
    doping: DopingProfile,
    bd: BoundaryData,
    artificial_viscosity: float = 0.0,
) -> PerturbationTrajectory:
    """
    One sweep of the linearised scheme

        dw + (A(v) w_x + B w + C(e_w)) dt = N(v) dt + (0, F(v) dW)

    where v is the previous iterate. Spatial stencils, Rusanov dissipation
    (with speeds from v), boundary handling and Poisson coupling match the
    nonlinear integrator, so a fixed point is a path of that integrator on the
    same time grid and Brownian increments. Relaxation is the only
    semi-implicit term.
    """
    grid = steady.grid
    h = grid.h
    increments = np.asarray(increments, dtype=float)
    n_steps = prev.n_steps
    if increments.shape[0] != n_steps:
        raise ValueError(
            f"noise path has {increments.shape[0]} increments for {n_steps} steps"
        )
    rho_bar = steady.rho_bar
    J_bar = steady.J_bar
    B = _steady_coupling(steady, law)
    b10 = B[:, 1, 0]
    b11 = B[:, 1, 1] - 1.0
    f_bar = _momentum_flux(rho_bar, J_bar, law)

    sigma = np.empty_like(prev.sigma)
    j = np.empty_like(prev.j)
    e_tilde = np.empty_like(prev.e_tilde)
    sigma[0], j[0], e_tilde[0] = prev.sigma[0], prev.j[0], prev.e_tilde[0]

    for k in range(n_steps):
        v_sigma, v_j, v_e = prev.sigma[k], prev.j[k], prev.e_tilde[k]
        rho_v = rho_bar + v_sigma
        if np.any(rho_v <= 0.0):
            raise VacuumError(f"previous iterate has vacuum at t={prev.times[k]:.6g}")
        J_v = J_bar + v_j
        speed = characteristic_speed(rho_v, J_v, law)
        if dt > h / float(np.max(speed)):
            raise StepSizeError(
                f"dt={dt:.3e} violates the CFL bound {h / float(np.max(speed)):.3e} at t={prev.times[k]:.6g}"
            )
        alpha = np.maximum(speed[:-1], speed[1:])

        # drift of the previous iterate without relaxation
        dv_sigma = -grid.derivative(v_j)
        dv_j = (
            -grid.derivative(_momentum_flux(rho_v, J_v, law) - f_bar)
            + rho_bar * v_e
            + v_sigma * steady.E_bar
            + v_sigma * v_e
        )

        d_sigma = sigma[k] - v_sigma
        d_j = j[k] - v_j
        d_e = e_tilde[k] - v_e
        d_sigma_x = grid.derivative(d_sigma)
        d_j_x = grid.derivative(d_j)
        a10 = law.subsonic_margin(rho_v, J_v)
        a11 = 2.0 * J_v / rho_v

        drift_sigma = dv_sigma - d_j_x
        drift_j = (
            dv_j
            - (a10 * d_sigma_x + a11 * d_j_x)
            - (b10 * d_sigma + b11 * d_j)
            + rho_bar * d_e
        )

        inner = slice(1, -1)
        U_rho = rho_bar + sigma[k]
        U_J = J_bar + j[k]
        new_sigma = sigma[k].copy()
        new_sigma[inner] += dt * (
            drift_sigma[inner] + numerical_dissipation(U_rho, alpha, h, artificial_viscosity)
        )
        new_j = j[k].copy()
        new_j[inner] = (
            j[k][inner]
            + dt * (drift_j[inner] + numerical_dissipation(U_J, alpha, h, artificial_viscosity))
        ) / (1.0 + dt)
        if not noise.is_silent:
            new_j[inner] += noise.increment(J_v, increments[k])[inner]
        new_sigma[0] = new_sigma[-1] = 0.0
        extrapolate_ends(new_j)

        rho_new = rho_bar + new_sigma
        if np.any(rho_new <= 0.0):
            raise VacuumError(f"Picard iterate loses positivity at t={prev.times[k + 1]:.6g}")
        Phi = solve_poisson(rho_new, doping, bd)
        sigma[k + 1] = new_sigma
        j[k + 1] = new_j
        e_tilde[k + 1] = electric_field(grid, Phi) - steady.E_bar

    return PerturbationTrajectory(grid, prev.times, sigma, j, e_tilde)


def iterate_distance(a: PerturbationTrajectory, b: PerturbationTrajectory) -> float:
    """
    sup over time of the H2 norm of (sigma, j) differences.
    """
    grid = a.grid
    d_sigma = grid.h2_norm(a.sigma - b.sigma)
    d_j = grid.h2_norm(a.j - b.j)
    return float(np.max(np.hypot(d_sigma, d_j)))


def picard_sequence(
    start: PerturbationTrajectory,
    n_iterates: int,
    steady: SteadyState,
    law: PressureLaw,
    noise: NoiseModel,
    increments,
    dt: float,
    doping: DopingProfile,
    bd: BoundaryData,
    artificial_viscosity: float = 0.0,
) -> list[PerturbationTrajectory]:
    """
    [w_0, w_1, ..., w_n] with w_0 = start, all sharing one frozen noise path.
    """
    iterates = [start]
    for n in range(n_iterates):
        iterates.append(
            picard_iterate(
                iterates[-1],
                steady,
                law,
                noise,
                increments,
                dt,
                doping,
                bd,
                artificial_viscosity,
            )
        )
        logger.debug(
            f"Picard iterate {n + 1}: distance {iterate_distance(iterates[-1], iterates[-2]):.3e}"
        )
    return iterates
