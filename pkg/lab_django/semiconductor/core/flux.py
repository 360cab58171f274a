# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Local Lax-Friedrichs (Rusanov) kernels for the conservative part
(J, J**2/rho + P(rho)) of the Euler-Poisson system.
"""

from __future__ import annotations

import numpy as np

from .pressure import PressureLaw


def characteristic_speed(rho, J, law: PressureLaw) -> np.ndarray:
    """
    Largest eigenvalue modulus |J/rho| + sqrt(P'(rho)) at each node.
    """
    return np.abs(J / rho) + law.sound_speed(rho)


def interface_speeds(rho, J, law: PressureLaw) -> np.ndarray:
    """
    alpha_{i+1/2} = max(lambda_i, lambda_{i+1}), one value per cell.
    """
    speed = characteristic_speed(rho, J, law)
    return np.maximum(speed[:-1], speed[1:])


def physical_flux(rho, J, law: PressureLaw):
    return J, J * J / rho + law.pressure(rho)


def rusanov_flux(rho, J, law: PressureLaw):
    """
    Interface fluxes F_{i+1/2} = (f_i + f_{i+1})/2 - alpha_{i+1/2}/2 (U_{i+1} - U_i)
    for the mass and momentum equations.
    """
    alpha = interface_speeds(rho, J, law)
    f_rho, f_J = physical_flux(rho, J, law)
    flux_rho = 0.5 * (f_rho[:-1] + f_rho[1:]) - 0.5 * alpha * (rho[1:] - rho[:-1])
    flux_J = 0.5 * (f_J[:-1] + f_J[1:]) - 0.5 * alpha * (J[1:] - J[:-1])
    return flux_rho, flux_J


def flux_divergence(flux, h: float) -> np.ndarray:
    """
    (F_{i+1/2} - F_{i-1/2})/h at interior nodes.
    """
    return (flux[1:] - flux[:-1]) / h


def numerical_dissipation(U, alpha, h: float, viscosity: float = 0.0) -> np.ndarray:
    """
    Dissipative part of the Rusanov update at interior nodes, plus optional
    artificial viscosity mu * U_xx.
    """
    jump = np.diff(U)
    out = (alpha[1:] * jump[1:] - alpha[:-1] * jump[:-1]) / (2.0 * h)
    return out + viscous_term(U, h, viscosity)


def viscous_term(U, h: float, viscosity: float) -> np.ndarray:
    if not viscosity:
        return np.zeros(len(U) - 2)
    return viscosity * (U[2:] - 2.0 * U[1:-1] + U[:-2]) / h**2


def extrapolate_ends(J) -> np.ndarray:
    """
    Set the end values so the one-sided second-order derivative vanishes:
    J_0 = (4 J_1 - J_2)/3 and J_N = (4 J_{N-1} - J_{N-2})/3. Modifies J in place.
    """
    J[0] = (4.0 * J[1] - J[2]) / 3.0
    J[-1] = (4.0 * J[-2] - J[-3]) / 3.0
    return J
