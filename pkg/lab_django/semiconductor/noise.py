# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Multiplicative forcing of the momentum equation.

The forcing is sum_k a_k J Y(J) d beta_k. Every mode shares the spatial
profile J Y(J), so the K-mode sum is equal in law to one Brownian motion
scaled by (sum_k a_k**2)**0.5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .choices import NoiseReduction, NoiseShape
from .exceptions import DomainError

DEFAULT_MODES = 16


def default_mode_weights(n_modes: int = DEFAULT_MODES) -> tuple[float, ...]:
    """
    a_k = 2**(-k/2), k = 1..n_modes, so sum a_k**2 = 1 - 2**(-n_modes).
    """
    return tuple(2.0 ** (-k / 2.0) for k in range(1, n_modes + 1))


@dataclass(frozen=True)
class NoiseModel:
    amplitude: float = 0.0
    mode_weights: tuple[float, ...] = field(default_factory=default_mode_weights)
    reduction: NoiseReduction = NoiseReduction.SINGLE_BROWNIAN
    shape: NoiseShape = NoiseShape.RATIONAL

    def __post_init__(self):
        if not self.amplitude >= 0.0:
            raise DomainError(f"noise amplitude must be nonnegative, got {self.amplitude}")
        if len(self.mode_weights) == 0:
            raise DomainError("at least one noise mode is required")
        object.__setattr__(self, "mode_weights", tuple(float(a) for a in self.mode_weights))
        object.__setattr__(self, "reduction", NoiseReduction(self.reduction))
        object.__setattr__(self, "shape", NoiseShape(self.shape))

    @property
    def is_silent(self) -> bool:
        return self.amplitude == 0.0

    @property
    def n_draws(self) -> int:
        """
        Standard normals consumed per time step.
        """
        if self.reduction == NoiseReduction.K_MODES:
            return len(self.mode_weights)
        return 1

    @property
    def weight_norm_sq(self) -> float:
        return float(np.sum(np.square(self.mode_weights)))

    def shape_function(self, J):
        """
        Y(J): nu J/(1 + J**2) or nu tanh(J).
        """
        if self.shape == NoiseShape.TANH:
            return self.amplitude * np.tanh(J)
        return self.amplitude * J / (1.0 + np.square(J))

    def coefficient(self, J):
        return J * self.shape_function(J)

    def combine(self, dW) -> np.ndarray:
        """
        Collapse per-mode Brownian increments (last axis) into the scalar
        driving each node.
        """
        dW = np.asarray(dW, dtype=float)
        if self.reduction == NoiseReduction.K_MODES:
            return dW @ np.asarray(self.mode_weights)
        return dW[..., 0]

    def increment(self, J, dW) -> np.ndarray:
        """
        Momentum forcing for Brownian increments dW of shape (..., n_draws)
        acting on currents J of shape (..., n_nodes).
        """
        return self.coefficient(J) * self.combine(dW)[..., None]

    def draw(self, rng: np.random.Generator, dt: float, size: tuple = ()) -> np.ndarray:
        return rng.standard_normal(tuple(size) + (self.n_draws,)) * np.sqrt(dt)


def sample_noise_increment(
    noise: NoiseModel, J, dt: float, rng: np.random.Generator
) -> np.ndarray:
    """
    Draw the momentum increment for one step of length dt. J may carry leading
    batch axes, each batch entry getting its own Brownian increments.
    """
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    J = np.atleast_1d(np.asarray(J, dtype=float))
    return noise.increment(J, noise.draw(rng, dt, J.shape[:-1]))
