# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError, UnsupportedLawError


@dataclass(frozen=True)
class PressureLaw:
    """
    Polytropic pressure P(rho) = kappa * rho**gamma.

    The enthalpy G satisfies G'' = P'/rho and is normalised by G(1) = G'(1) = 0.
    """

    gamma: float = 2.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.gamma == 1.0:
            raise UnsupportedLawError("the isothermal law (gamma = 1) has no polytropic enthalpy")
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        if not self.kappa > 0.0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")

    def pressure(self, rho):
        return self.kappa * np.power(rho, self.gamma)

    def pressure_derivative(self, rho, order: int = 1):
        """
        d^order P / d rho^order, for order >= 1.
        """
        coefficient = self.kappa
        for k in range(order):
            coefficient *= self.gamma - k
        return coefficient * np.power(rho, self.gamma - order)

    def enthalpy(self, rho):
        g = self.gamma
        return self.kappa / (g - 1.0) * (np.power(rho, g) - g * rho + g - 1.0)

    def enthalpy_derivative(self, rho):
        g = self.gamma
        return self.kappa * g / (g - 1.0) * (np.power(rho, g - 1.0) - 1.0)

    def enthalpy_second_derivative(self, rho):
        return self.kappa * self.gamma * np.power(rho, self.gamma - 2.0)

    def sound_speed(self, rho):
        return np.sqrt(self.pressure_derivative(rho))

    def subsonic_margin(self, rho, J):
        """
        Pointwise P'(rho) - J**2/rho**2; positive where the flow is subsonic.
        """
        return self.pressure_derivative(rho) - np.square(J) / np.square(rho)


def _check_positive(rho):
    if np.any(np.asarray(rho) <= 0.0):
        raise DomainError("density must be strictly positive")


def pressure_eval(law: PressureLaw, rho):
    """
    Return (P, P', P'') at rho.
    """
    _check_positive(rho)
    return (
        law.pressure(rho),
        law.pressure_derivative(rho, 1),
        law.pressure_derivative(rho, 2),
    )


def enthalpy_G(law: PressureLaw, rho):
    """
    Return (G, G', G'') at rho.
    """
    _check_positive(rho)
    return (
        law.enthalpy(rho),
        law.enthalpy_derivative(rho),
        law.enthalpy_second_derivative(rho),
    )
