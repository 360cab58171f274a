# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Subsonic steady states of the Euler-Poisson system with Ohmic contacts.

The density solves the scalar elliptic equation obtained by dividing the
steady momentum equation by rho and differentiating once more:

    a(rho) rho_xx + a'(rho) rho_x**2 - (J/rho**2) rho_x - (rho - b) = 0,
    a(rho) = (P'(rho) - J**2/rho**2) / rho,
    a'(rho) = P''/rho - P'/rho**2 + 3 J**2/rho**4.

It is discretised with central differences and solved by damped Newton
iteration with the exact tridiagonal Jacobian. The potential is then
recovered from the momentum equation rather than from a second Poisson solve.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .choices import SolveMode
from .core.device import BoundaryData, DopingProfile
from .core.grid import Grid, frozen_array
from .core.pressure import PressureLaw
from .exceptions import NoBracketError, NoConvergenceError, SupersonicError

logger = logging.getLogger(__name__)

MAX_HALVINGS = 20
# Relative update size treated as roundoff when the residual cannot drop further
STAGNATION_TOLERANCE = 1e-14
VOLTAGE_TOLERANCE = 1e-9
DEFAULT_J_MAX = 0.2


@dataclass(frozen=True)
class SteadySolveReport:
    iterations: int
    residual_history: tuple[float, ...]
    mode: SolveMode
    mass_defect: float
    outer_iterations: int = 0


@dataclass(frozen=True, eq=False)
class SteadyState:
    grid: Grid
    rho_bar: np.ndarray
    J_bar: float
    Phi_bar: np.ndarray
    E_bar: np.ndarray
    subsonic_margin: float
    residual_norm: float
    report: SteadySolveReport | None = None

    def __post_init__(self):
        for name in ("rho_bar", "Phi_bar", "E_bar"):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))
        object.__setattr__(self, "J_bar", float(self.J_bar))

    @property
    def phi_right_attained(self) -> float:
        return float(self.Phi_bar[-1])

    def boundary_data(self) -> BoundaryData:
        """
        Contact data reproducing this state: Phi(1) is the attained value.
        """
        return BoundaryData(
            rho_left=float(self.rho_bar[0]),
            rho_right=float(self.rho_bar[-1]),
            phi_left=float(self.Phi_bar[0]),
            phi_right=self.phi_right_attained,
        )


def _margin(law: PressureLaw, rho, J_bar: float) -> float:
    return float(np.min(law.subsonic_margin(rho, J_bar)))


def _residual(rho, b, J_bar: float, law: PressureLaw, h: float) -> np.ndarray:
    r = rho[1:-1]
    D = (rho[2:] - rho[:-2]) / (2.0 * h)
    L = (rho[2:] - 2.0 * r + rho[:-2]) / h**2
    P1 = law.pressure_derivative(r, 1)
    P2 = law.pressure_derivative(r, 2)
    J2 = J_bar * J_bar
    a = (P1 - J2 / r**2) / r
    da = P2 / r - P1 / r**2 + 3.0 * J2 / r**4
    return a * L + da * D * D - J_bar / r**2 * D - (r - b[1:-1])


def _jacobian_bands(rho, J_bar: float, law: PressureLaw, h: float) -> np.ndarray:
    """
    Exact derivative of `_residual` with respect to the interior densities,
    in the (1, 1) banded layout used by scipy.linalg.solve_banded.
    """
    r = rho[1:-1]
    D = (rho[2:] - rho[:-2]) / (2.0 * h)
    L = (rho[2:] - 2.0 * r + rho[:-2]) / h**2
    P1 = law.pressure_derivative(r, 1)
    P2 = law.pressure_derivative(r, 2)
    P3 = law.pressure_derivative(r, 3)
    J2 = J_bar * J_bar
    a = (P1 - J2 / r**2) / r
    da = P2 / r - P1 / r**2 + 3.0 * J2 / r**4
    dda = P3 / r - 2.0 * P2 / r**2 + 2.0 * P1 / r**3 - 12.0 * J2 / r**5

    diag = da * L - 2.0 * a / h**2 + dda * D * D + 2.0 * J_bar * D / r**3 - 1.0
    upper = a / h**2 + da * D / h - J_bar / (2.0 * h * r**2)
    lower = a / h**2 - da * D / h + J_bar / (2.0 * h * r**2)

    ab = np.zeros((3, len(r)))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return ab


def _newton_density(
    law: PressureLaw,
    doping: DopingProfile,
    rho_left: float,
    rho_right: float,
    J_bar: float,
    tolerance: float,
    max_iterations: int,
):
    grid = doping.grid
    h = grid.h
    b = doping.values
    rho = np.linspace(rho_left, rho_right, grid.n_nodes)
    rho[0], rho[-1] = rho_left, rho_right

    margin = _margin(law, rho, J_bar)
    if margin <= 0.0:
        raise SupersonicError(
            f"initial guess is supersonic for J_bar={J_bar} (margin {margin:.3e})"
        )

    residual = _residual(rho, b, J_bar, law, h)
    norm = float(np.max(np.abs(residual)))
    history = [norm]
    iterations = 0
    while norm > tolerance:
        if iterations >= max_iterations:
            raise NoConvergenceError(
                f"Newton did not converge in {max_iterations} iterations (residual {norm:.3e})"
            )
        iterations += 1
        delta = solve_banded(
            (1, 1), _jacobian_bands(rho, J_bar, law, h), -residual, check_finite=False
        )
        if not np.all(np.isfinite(delta)):
            raise NoConvergenceError(f"singular Newton system at iteration {iterations}")
        step = 1.0
        accepted = False
        saw_supersonic = False
        for _ in range(MAX_HALVINGS + 1):
            trial = rho.copy()
            trial[1:-1] += step * delta
            if np.all(trial > 0.0):
                if _margin(law, trial, J_bar) > 0.0:
                    trial_residual = _residual(trial, b, J_bar, law, h)
                    trial_norm = float(np.max(np.abs(trial_residual)))
                    if trial_norm < norm:
                        accepted = True
                        break
                else:
                    saw_supersonic = True
            step *= 0.5
        update_size = float(np.max(np.abs(delta)))
        at_roundoff = update_size <= STAGNATION_TOLERANCE * float(np.max(rho))
        if not accepted:
            if at_roundoff:
                logger.warning(
                    f"Newton stopped at roundoff after {iterations} iterations "
                    f"with residual {norm:.3e} above tolerance {tolerance:.1e}"
                )
                break
            if saw_supersonic:
                raise SupersonicError(
                    f"Newton iterates leave the subsonic region for J_bar={J_bar}"
                )
            raise NoConvergenceError(
                f"line search failed after {MAX_HALVINGS} halvings at iteration {iterations}"
            )
        rho, residual, norm = trial, trial_residual, trial_norm
        history.append(norm)
        logger.debug(f"Newton iteration {iterations}: step {step:g}, residual {norm:.3e}")
        if at_roundoff and norm > tolerance:
            logger.warning(
                f"Newton update reached roundoff with residual {norm:.3e} above tolerance {tolerance:.1e}"
            )
            break
    return rho, norm, iterations, history


def solve_given_current(
    law: PressureLaw,
    doping: DopingProfile,
    rho_left: float,
    rho_right: float,
    J_bar: float,
    phi_left: float = 0.0,
    tolerance: float | None = None,
    max_iterations: int | None = None,
) -> SteadyState:
    """
    Steady state carrying the prescribed current J_bar. Phi(0) = phi_left is
    imposed and Phi(1) is an output.
    """
    if tolerance is None:
        tolerance = settings.NEWTON_TOLERANCE
    if max_iterations is None:
        max_iterations = settings.NEWTON_MAX_ITERATIONS
    BoundaryData(rho_left, rho_right)  # validates positivity
    grid = doping.grid
    J_bar = float(J_bar)

    rho, norm, iterations, history = _newton_density(
        law, doping, rho_left, rho_right, J_bar, tolerance, max_iterations
    )

    momentum_flux = J_bar * J_bar / rho + law.pressure(rho)
    E_bar = (grid.derivative(momentum_flux) + J_bar) / rho
    Phi_bar = grid.cumulative_integral(E_bar, initial=phi_left)
    report = SteadySolveReport(
        iterations=iterations,
        residual_history=tuple(history),
        mode=SolveMode.GIVEN_CURRENT,
        mass_defect=float(grid.integrate(rho - doping.values)),
    )
    logger.info(
        f"Steady state for J_bar={J_bar:.6g} converged in {iterations} iterations "
        f"(residual {norm:.3e}, Phi(1)={Phi_bar[-1]:.6g})"
    )
    return SteadyState(
        grid=grid,
        rho_bar=rho,
        J_bar=J_bar,
        Phi_bar=Phi_bar,
        E_bar=E_bar,
        subsonic_margin=_margin(law, rho, J_bar),
        residual_norm=norm,
        report=report,
    )


def solve_given_voltage(
    law: PressureLaw,
    doping: DopingProfile,
    bd: BoundaryData,
    j_max: float = DEFAULT_J_MAX,
    tolerance: float | None = None,
    max_iterations: int | None = None,
) -> tuple[SteadyState, SteadySolveReport]:
    """
    Find the current for which the steady potential reaches bd.phi_right at x = 1.

    The root of J -> Phi(1; J) - phi_right is bracketed in [-j_max, j_max] and
    located by Brent's method (bisection safeguarding secant and inverse
    quadratic steps).
    """
    solves: dict[float, SteadyState] = {}

    def solve(J: float) -> SteadyState:
        if J not in solves:
            solves[J] = solve_given_current(
                law,
                doping,
                bd.rho_left,
                bd.rho_right,
                J,
                bd.phi_left,
                tolerance=tolerance,
                max_iterations=max_iterations,
            )
        return solves[J]

    def mismatch(J: float) -> float:
        return solve(J).phi_right_attained - bd.phi_right

    lo, hi = -abs(j_max), abs(j_max)
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if f_lo * f_hi > 0.0:
        raise NoBracketError(
            f"Phi(1) - phi_right does not change sign for |J_bar| <= {abs(j_max)} "
            f"(mismatch {f_lo:.3e} at {lo}, {f_hi:.3e} at {hi})"
        )
    J_bar, result = brentq(
        mismatch, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, full_output=True
    )
    state = solve(J_bar)
    gap = abs(state.phi_right_attained - bd.phi_right)
    if not result.converged or gap > VOLTAGE_TOLERANCE:
        raise NoConvergenceError(
            f"voltage matching stopped at J_bar={J_bar} with |Phi(1) - phi_right| = {gap:.3e}"
        )
    report = dataclasses.replace(
        state.report,
        mode=SolveMode.GIVEN_VOLTAGE,
        outer_iterations=result.function_calls,
    )
    state = dataclasses.replace(state, report=report)
    logger.info(
        f"Voltage {bd.phi_right - bd.phi_left:.6g} matched by J_bar={J_bar:.12g} "
        f"after {result.function_calls} steady solves"
    )
    return state, report


def steady_residual(state: SteadyState, law: PressureLaw, doping: DopingProfile):
    """
    Sup norms of the discrete steady momentum defect
    (J**2/rho + P)_x + J - rho Phi_x and of the Poisson defect Phi_xx - (rho - b).
    """
    grid = state.grid
    rho = state.rho_bar
    J_bar = state.J_bar
    momentum = (
        grid.derivative(J_bar * J_bar / rho + law.pressure(rho)) + J_bar - rho * state.E_bar
    )
    Phi = state.Phi_bar
    lap = (Phi[2:] - 2.0 * Phi[1:-1] + Phi[:-2]) / grid.h**2
    poisson = lap - (rho[1:-1] - doping.values[1:-1])
    return float(np.max(np.abs(momentum))), float(np.max(np.abs(poisson)))
