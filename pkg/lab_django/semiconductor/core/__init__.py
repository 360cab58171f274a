# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from .device import BoundaryData, DopingProfile
from .fields import FlowField
from .grid import Grid, GridCalculus, grid_calculus
from .poisson import electric_field, poisson_residual, solve_poisson
from .pressure import PressureLaw, enthalpy_G, pressure_eval

__all__ = [
    "BoundaryData",
    "DopingProfile",
    "FlowField",
    "Grid",
    "GridCalculus",
    "grid_calculus",
    "electric_field",
    "poisson_residual",
    "solve_poisson",
    "PressureLaw",
    "enthalpy_G",
    "pressure_eval",
]
