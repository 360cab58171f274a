# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Uniform collocated grid on [0, 1] and the discrete calculus shared by every
module: second-order central stencils in the interior, second-order one-sided
stencils at the ends, trapezoid quadrature and the Sobolev norms built from it.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..exceptions import DomainError, GridMismatchError, GridTooCoarseError

# Smallest grid on which the one-sided second-derivative stencil is defined
MIN_CALCULUS_CELLS = 4


def frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """
    Nodes x_i = i/N for i = 0..N with spacing h = 1/N.
    """

    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise DomainError(f"n_cells must be a positive integer, got {self.n_cells}")

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @functools.cached_property
    def nodes(self) -> np.ndarray:
        return frozen_array(np.linspace(0.0, 1.0, self.n_nodes))

    def check(self, f, name: str = "f") -> np.ndarray:
        """
        Return `f` as a float array whose last axis runs over the grid nodes.
        """
        arr = np.asarray(f, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != self.n_nodes:
            raise GridMismatchError(
                f"{name} has shape {arr.shape}, expected last axis of length {self.n_nodes}"
            )
        return arr

    def _check_calculus(self):
        if self.n_cells < MIN_CALCULUS_CELLS:
            raise GridTooCoarseError(
                f"Discrete calculus needs at least {MIN_CALCULUS_CELLS} cells, grid has {self.n_cells}"
            )

    def derivative(self, f) -> np.ndarray:
        self._check_calculus()
        return np.gradient(self.check(f), self.h, edge_order=2, axis=-1)

    def second_derivative(self, f) -> np.ndarray:
        self._check_calculus()
        f = self.check(f)
        h2 = self.h**2
        out = np.empty_like(f)
        out[..., 1:-1] = (f[..., 2:] - 2.0 * f[..., 1:-1] + f[..., :-2]) / h2
        out[..., 0] = (
            2.0 * f[..., 0] - 5.0 * f[..., 1] + 4.0 * f[..., 2] - f[..., 3]
        ) / h2
        out[..., -1] = (
            2.0 * f[..., -1] - 5.0 * f[..., -2] + 4.0 * f[..., -3] - f[..., -4]
        ) / h2
        return out

    def integrate(self, f):
        return trapezoid(self.check(f), dx=self.h, axis=-1)

    def cumulative_integral(self, f, initial: float = 0.0) -> np.ndarray:
        """
        Running trapezoid integral from x = 0, starting at `initial`.
        """
        return initial + cumulative_trapezoid(self.check(f), dx=self.h, axis=-1, initial=0.0)

    def l2_norm(self, f):
        f = self.check(f)
        return np.sqrt(self.integrate(f * f))

    def h1_norm(self, f):
        f = self.check(f)
        fx = self.derivative(f)
        return np.sqrt(self.integrate(f * f) + self.integrate(fx * fx))

    def h2_norm(self, f):
        f = self.check(f)
        fx = self.derivative(f)
        fxx = self.second_derivative(f)
        return np.sqrt(
            self.integrate(f * f) + self.integrate(fx * fx) + self.integrate(fxx * fxx)
        )

    def sup_norm(self, f):
        return np.max(np.abs(self.check(f)), axis=-1)


class GridCalculus(NamedTuple):
    f_x: np.ndarray
    f_xx: np.ndarray
    integral: float
    l2: float
    h1: float
    h2: float
    sup: float


def grid_calculus(grid: Grid, f) -> GridCalculus:
    """
    Derivatives, integral and norms of a single grid function.
    """
    f = grid.check(f)
    f_x = grid.derivative(f)
    f_xx = grid.second_derivative(f)
    sq = grid.integrate(f * f)
    sq_x = grid.integrate(f_x * f_x)
    sq_xx = grid.integrate(f_xx * f_xx)
    return GridCalculus(
        f_x=f_x,
        f_xx=f_xx,
        integral=float(grid.integrate(f)),
        l2=float(np.sqrt(sq)),
        h1=float(np.sqrt(sq + sq_x)),
        h2=float(np.sqrt(sq + sq_x + sq_xx)),
        sup=float(np.max(np.abs(f))),
    )
