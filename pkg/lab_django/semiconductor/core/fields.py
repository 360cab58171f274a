# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import GridMismatchError, VacuumError
from .device import BoundaryData, DopingProfile
from .grid import Grid, frozen_array
from .poisson import electric_field, solve_poisson


@dataclass(frozen=True, eq=False)
class FlowField:
    """
    Snapshot of (rho, J, Phi, E) at time t. Arrays are read-only.
    """

    grid: Grid
    rho: np.ndarray
    J: np.ndarray
    Phi: np.ndarray
    E: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("rho", "J", "Phi", "E"):
            arr = frozen_array(getattr(self, name))
            if arr.shape != (self.grid.n_nodes,):
                raise GridMismatchError(
                    f"{name} has shape {arr.shape}, expected ({self.grid.n_nodes},)"
                )
            object.__setattr__(self, name, arr)
        if np.any(self.rho <= 0.0):
            raise VacuumError(f"density is not positive at t={self.t}")
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def from_density(
        cls,
        rho,
        J,
        doping: DopingProfile,
        bd: BoundaryData,
        t: float = 0.0,
    ) -> FlowField:
        """
        Build a field whose potential solves Poisson for the given density.
        """
        Phi = solve_poisson(rho, doping, bd)
        return cls(doping.grid, rho, J, Phi, electric_field(doping.grid, Phi), t)
