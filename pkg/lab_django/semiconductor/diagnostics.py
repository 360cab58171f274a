# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Energy functionals and norms evaluated along trajectories.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core.fields import FlowField
from .core.pressure import PressureLaw, enthalpy_G
from .exceptions import InsufficientDataError
from .perturbation import PerturbationState, SymmetrizerWeights
from .steady import SteadyState

if TYPE_CHECKING:
    from .integrator import PathRecord

logger = logging.getLogger(__name__)

# Columns written to run.csv, in order
RUN_COLUMNS = (
    "t",
    "rel_energy",
    "h2_sigma",
    "h2_j",
    "l2_etilde",
    "composite",
    "running_sup_composite",
    "subsonic_margin",
)


@dataclass(frozen=True)
class DiagnosticFrame:
    t: float
    rel_energy: float
    h2_sigma: float
    h2_j: float
    l2_etilde: float
    weighted_first: float
    weighted_second: float
    composite: float
    subsonic_margin: float
    sup_sigma: float

    def row(self, running_sup: float) -> tuple[float, ...]:
        return (
            self.t,
            self.rel_energy,
            self.h2_sigma,
            self.h2_j,
            self.l2_etilde,
            self.composite,
            running_sup,
            self.subsonic_margin,
        )


def relative_energy(pert: PerturbationState, steady: SteadyState, law: PressureLaw) -> float:
    """
    Trapezoid integral of

        (rho_bar j - J_bar sigma)**2 / (2 rho rho_bar**2)
        + G(rho) - G(rho_bar) - G'(rho_bar) sigma + e**2/2

    with rho = rho_bar + sigma.
    """
    grid = pert.grid
    rho_bar = steady.rho_bar
    rho = pert.total_density(steady)
    G, _, _ = enthalpy_G(law, rho)
    G_bar, dG_bar, _ = enthalpy_G(law, rho_bar)
    kinetic = (rho_bar * pert.j - steady.J_bar * pert.sigma) ** 2 / (2.0 * rho * rho_bar**2)
    internal = G - G_bar - dG_bar * pert.sigma
    field = 0.5 * pert.e_tilde**2
    return float(grid.integrate(kinetic + internal + field))


def weighted_energies(pert: PerturbationState, weights: SymmetrizerWeights):
    """
    (int r |w_x|**2, int r_tilde |w_xx|**2) for w = (sigma, j).
    """
    grid = pert.grid
    sigma_x = grid.derivative(pert.sigma)
    j_x = grid.derivative(pert.j)
    sigma_xx = grid.second_derivative(pert.sigma)
    j_xx = grid.second_derivative(pert.j)
    first = grid.integrate(weights.r * (sigma_x**2 + j_x**2))
    second = grid.integrate(weights.r_tilde * (sigma_xx**2 + j_xx**2))
    return float(first), float(second)


def composite_statistic(pert: PerturbationState) -> float:
    """
    ||sigma||_H2**2 + ||j||_H2**2 + ||e||_L2**2.
    """
    grid = pert.grid
    return float(
        grid.h2_norm(pert.sigma) ** 2
        + grid.h2_norm(pert.j) ** 2
        + grid.l2_norm(pert.e_tilde) ** 2
    )


def l2_composite(pert: PerturbationState) -> float:
    """
    Zeroth-order part of the composite statistic, int (sigma**2 + j**2 + e**2).
    """
    grid = pert.grid
    return float(grid.integrate(pert.sigma**2 + pert.j**2 + pert.e_tilde**2))


def diagnostic_frame(
    field: FlowField,
    steady: SteadyState,
    law: PressureLaw,
    weights: SymmetrizerWeights,
) -> DiagnosticFrame:
    grid = field.grid
    pert = PerturbationState.from_field(field, steady)
    h2_sigma = float(grid.h2_norm(pert.sigma))
    h2_j = float(grid.h2_norm(pert.j))
    l2_etilde = float(grid.l2_norm(pert.e_tilde))
    weighted_first, weighted_second = weighted_energies(pert, weights)
    return DiagnosticFrame(
        t=field.t,
        rel_energy=relative_energy(pert, steady, law),
        h2_sigma=h2_sigma,
        h2_j=h2_j,
        l2_etilde=l2_etilde,
        weighted_first=weighted_first,
        weighted_second=weighted_second,
        composite=h2_sigma**2 + h2_j**2 + l2_etilde**2,
        subsonic_margin=float(np.min(law.subsonic_margin(field.rho, field.J))),
        sup_sigma=float(np.max(np.abs(pert.sigma))),
    )


def efield_identity_defect(path: PathRecord, steady: SteadyState) -> float:
    """
    max over interior nodes of |(e(t+dt) - e(t))/dt + j(t) - int j(t) dx|,
    taken over every pair of snapshots from consecutive steps.
    """
    steps = sorted(path.snapshots)
    pairs = [(k, k + 1) for k in steps if k + 1 in path.snapshots]
    if not pairs:
        raise InsufficientDataError(
            "field identity needs snapshots from two consecutive steps (snapshot_every = 1)"
        )
    worst = 0.0
    for k0, k1 in pairs:
        before = path.snapshots[k0]
        after = path.snapshots[k1]
        grid = before.grid
        dt = after.t - before.t
        e_rate = (after.E - before.E) / dt
        j = before.J - steady.J_bar
        defect = e_rate + j - grid.integrate(j)
        worst = max(worst, float(np.max(np.abs(defect[1:-1]))))
    return worst
