# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from __future__ import annotations

import functools

import numpy as np
from scipy.linalg import solve_banded

from ..exceptions import GridMismatchError
from .device import BoundaryData, DopingProfile
from .grid import Grid


@functools.lru_cache(maxsize=16)
def _laplacian_bands(n_interior: int) -> np.ndarray:
    """
    Banded storage of tridiag(1, -2, 1) for the interior unknowns.
    """
    ab = np.empty((3, n_interior))
    ab[0, :] = 1.0
    ab[1, :] = -2.0
    ab[2, :] = 1.0
    ab[0, 0] = 0.0
    ab[2, -1] = 0.0
    ab.setflags(write=False)
    return ab


def solve_poisson(rho, doping: DopingProfile, bd: BoundaryData) -> np.ndarray:
    """
    Solve Phi_xx = rho - b with Phi(0) = phi_left, Phi(1) = phi_right using the
    three-point Laplacian on interior nodes.
    """
    grid = doping.grid
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (grid.n_nodes,):
        raise GridMismatchError(
            f"rho has shape {rho.shape}, doping grid expects ({grid.n_nodes},)"
        )
    rhs = grid.h**2 * (rho[1:-1] - doping.values[1:-1])
    rhs[0] -= bd.phi_left
    rhs[-1] -= bd.phi_right
    phi = np.empty(grid.n_nodes)
    phi[0] = bd.phi_left
    phi[-1] = bd.phi_right
    phi[1:-1] = solve_banded(
        (1, 1), _laplacian_bands(grid.n_cells - 1), rhs, check_finite=False
    )
    return phi


def electric_field(grid: Grid, Phi) -> np.ndarray:
    """
    E = Phi_x with the standard derivative stencil.
    """
    return grid.derivative(Phi)


def poisson_residual(grid: Grid, Phi, rho, doping: DopingProfile) -> float:
    """
    Sup norm of (Phi_{i-1} - 2 Phi_i + Phi_{i+1})/h**2 - (rho_i - b_i) over interior nodes.
    """
    Phi = grid.check(Phi, "Phi")
    rho = grid.check(rho, "rho")
    lap = (Phi[2:] - 2.0 * Phi[1:-1] + Phi[:-2]) / grid.h**2
    return float(np.max(np.abs(lap - (rho[1:-1] - doping.values[1:-1])), initial=0.0))
