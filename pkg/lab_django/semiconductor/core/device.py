# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Device description: the doping profile b(x) and the Ohmic contact data.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..choices import DopingSource
from ..exceptions import DomainError, GridMismatchError
from .grid import Grid, frozen_array

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryData:
    """
    Dirichlet data for density and potential at x = 0 and x = 1.
    """

    rho_left: float
    rho_right: float
    phi_left: float = 0.0
    phi_right: float = 0.0

    def __post_init__(self):
        if not self.rho_left > 0.0:
            raise DomainError(f"rho_left must be positive, got {self.rho_left}")
        if not self.rho_right > 0.0:
            raise DomainError(f"rho_right must be positive, got {self.rho_right}")


@dataclass(frozen=True, eq=False)
class DopingProfile:
    grid: Grid
    values: np.ndarray
    source: DopingSource = DopingSource.CONSTANT

    def __post_init__(self):
        values = frozen_array(self.values)
        if values.shape != (self.grid.n_nodes,):
            raise GridMismatchError(
                f"doping has shape {values.shape}, expected ({self.grid.n_nodes},)"
            )
        if np.any(values <= 0.0):
            raise DomainError("doping profile must be strictly positive at every node")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> DopingProfile:
        return cls(grid, np.full(grid.n_nodes, float(value)), DopingSource.CONSTANT)

    @classmethod
    def bump(
        cls, grid: Grid, center: float, width: float, height: float, base: float
    ) -> DopingProfile:
        """
        b(x) = base + height * exp(-((x - center)/width)**2)
        """
        if not width > 0.0:
            raise DomainError(f"bump width must be positive, got {width}")
        x = grid.nodes
        values = base + height * np.exp(-(((x - center) / width) ** 2))
        return cls(grid, values, DopingSource.BUMP)

    @classmethod
    def from_csv(cls, grid: Grid, path) -> DopingProfile:
        """
        Two-column (x, b) table, resampled onto the grid by linear interpolation.
        A header line is allowed.
        """
        try:
            table = np.genfromtxt(path, delimiter=",", dtype=float, comments="#")
        except OSError as e:
            raise DomainError(f"cannot read doping table {path}: {e}") from e
        table = np.atleast_2d(table)
        if table.shape[1] < 2:
            raise DomainError(f"doping table {path} needs two columns (x, b)")
        table = table[~np.isnan(table[:, :2]).any(axis=1), :2]
        if len(table) < 2:
            raise DomainError(f"doping table {path} has fewer than two rows")
        order = np.argsort(table[:, 0])
        x, b = table[order, 0], table[order, 1]
        logger.debug(f"Loaded {len(x)} doping samples from {path}")
        return cls(grid, np.interp(grid.nodes, x, b), DopingSource.TABULATED)

    @classmethod
    def from_spec(cls, grid: Grid, spec: str, default_value: float) -> DopingProfile:
        """
        Build a profile from a config string:

        * "" -> constant default_value
        * "constant:<v>"
        * "bump:<center>:<width>:<height>[:<base>]" (base defaults to default_value)
        * "csv:<path>"
        """
        spec = (spec or "").strip()
        if not spec:
            return cls.constant(grid, default_value)
        kind, _, rest = spec.partition(":")
        if kind == DopingSource.TABULATED:
            return cls.from_csv(grid, rest)
        if kind not in (DopingSource.CONSTANT, DopingSource.BUMP):
            raise DomainError(f"unknown doping source '{kind}'")
        try:
            parts = [float(p) for p in rest.split(":")]
        except ValueError as e:
            raise DomainError(f"cannot parse doping spec '{spec}': {e}") from e
        if kind == DopingSource.CONSTANT:
            if len(parts) != 1:
                raise DomainError(f"constant doping needs one value, got '{rest}'")
            return cls.constant(grid, parts[0])
        if len(parts) == 3:
            parts.append(default_value)
        if len(parts) != 4:
            raise DomainError(f"bump doping needs 3 or 4 parameters, got '{rest}'")
        return cls.bump(grid, *parts)
