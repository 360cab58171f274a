# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.
import dataclasses
import logging
import unittest

import numpy as np

from .utils import LabTestCase, flat_setup
from ..core.device import DopingProfile
from ..core.grid import Grid
from ..core.pressure import PressureLaw
from ..exceptions import SupersonicError, SymmetrizerPositivityError, VacuumError
from ..integrator import PerturbationSpec, cfl_dt, direct_trajectory, initial_perturbation
from ..noise import NoiseModel
from ..perturbation import (
    PerturbationState,
    PerturbationTrajectory,
    assemble_coefficients,
    first_order_symmetrizer,
    iterate_distance,
    picard_iterate,
    picard_sequence,
    second_order_symmetrizer,
    symmetrizer_residuals,
    symmetrizer_weights,
)
from ..steady import solve_given_current

logger = logging.getLogger(__file__)
logger.setLevel(logging.INFO)


def smooth_perturbation(steady, doping, amplitude):
    x = steady.grid.nodes
    sigma = amplitude * (np.sin(np.pi * x) + 0.5 * np.sin(2 * np.pi * x))
    j = amplitude * (np.cos(np.pi * x) - 0.3 * np.cos(3 * np.pi * x))
    return PerturbationState.from_sigma_j(sigma, j, steady, doping, steady.boundary_data())


class CoefficientTests(LabTestCase):
    def test_zero_perturbation_has_zero_defect(self):
        law, _, steady, _ = flat_setup(40, 0.0)
        coefficients = assemble_coefficients(PerturbationState.zero(steady.grid), steady, law)
        self.assertClose(coefficients.N, 0.0, atol=1e-14)
        self.assertClose(coefficients.C, 0.0, atol=1e-14)

    def test_principal_symbol(self):
        law, _, steady, _ = flat_setup(20, 0.1)
        A = assemble_coefficients(PerturbationState.zero(steady.grid), steady, law).A
        self.assertEqual(A.shape, (steady.grid.n_nodes, 2, 2))
        self.assertClose(A[:, 0, 0], 0.0, atol=1e-14)
        self.assertClose(A[:, 0, 1], np.ones(steady.grid.n_nodes), rtol=1e-14)
        self.assertClose(A[:, 1, 0], np.full(steady.grid.n_nodes, 1.99), rtol=1e-12)
        self.assertClose(A[:, 1, 1], np.full(steady.grid.n_nodes, 0.2), rtol=1e-12)

    def test_defect_is_quadratic_in_amplitude(self):
        law, doping, steady, _ = flat_setup(100, 0.0)
        sizes = []
        for amplitude in (1e-3, 5e-4):
            pert = smooth_perturbation(steady, doping, amplitude)
            sizes.append(np.max(np.abs(assemble_coefficients(pert, steady, law).N)))
        self.assertTrue(3.5 <= sizes[0] / sizes[1] <= 4.5, msg=f"ratio {sizes[0] / sizes[1]}")

    def test_vacuum(self):
        law, _, steady, _ = flat_setup(20, 0.0)
        grid = steady.grid
        z = np.zeros(grid.n_nodes)
        pert = PerturbationState(grid, np.full(grid.n_nodes, -1.0), z, z)
        with self.assertRaises(VacuumError):
            assemble_coefficients(pert, steady, law)


class SymmetrizerTests(LabTestCase):
    def test_constant_state(self):
        law, _, steady, _ = flat_setup(200, 0.0)
        x = steady.grid.nodes
        self.assertClose(first_order_symmetrizer(steady, law, r0=2.0), 2.0, rtol=1e-14)
        self.assertClose(second_order_symmetrizer(steady, law, r_tilde0=1.5), 1.5 + x / 3, atol=1e-12)

    def test_uniform_current_closed_form(self):
        epsilon = 0.01
        law, _, steady, _ = flat_setup(200, epsilon)
        r = first_order_symmetrizer(steady, law)
        self.assertClose(r, np.exp(-epsilon * steady.grid.nodes / (2 - epsilon**2)), atol=1e-12)

    def test_weights_and_residuals(self):
        law = PressureLaw()
        grid = Grid(400)
        doping = DopingProfile.bump(grid, center=0.5, width=0.25, height=0.02, base=1.0)
        steady = solve_given_current(law, doping, 1.0, 1.0, 0.01)
        weights = symmetrizer_weights(steady, law)
        self.assertGreater(np.min(weights.r), 0.0)
        self.assertGreater(np.min(weights.r_tilde), 0.0)
        self.assertClose(weights.s, law.subsonic_margin(steady.rho_bar, 0.01) * weights.r, rtol=1e-14)
        first, second = symmetrizer_residuals(steady, law, weights)
        self.assertLess(first, 1e-6)
        self.assertLess(second, 1e-6)

    def test_full_state_companion(self):
        law, doping, steady, _ = flat_setup(50, 0.0)
        pert = smooth_perturbation(steady, doping, 1e-2)
        weights = symmetrizer_weights(steady, law, pert)
        rho = steady.rho_bar + pert.sigma
        expected = law.subsonic_margin(rho, pert.j) * weights.r_tilde
        self.assertClose(weights.s_tilde, expected, rtol=1e-14)

    def test_errors(self):
        law, _, steady, _ = flat_setup(20, 0.0)
        with self.assertRaises(SymmetrizerPositivityError):
            second_order_symmetrizer(steady, law, r_tilde0=-1.0)
        supersonic = dataclasses.replace(steady, subsonic_margin=-0.1)
        for solver in (first_order_symmetrizer, second_order_symmetrizer):
            with self.subTest(solver=solver.__name__):
                with self.assertRaises(SupersonicError):
                    solver(supersonic, law)


class PicardTests(LabTestCase):
    def test_zero_is_a_fixed_point(self):
        law, doping, steady, _ = flat_setup(32, 0.0)
        dt, n_steps = 0.01, 5
        start = PerturbationTrajectory.constant(
            PerturbationState.zero(steady.grid), dt * np.arange(n_steps + 1)
        )
        iterates = picard_sequence(
            start, 3, steady, law, NoiseModel(), np.zeros((n_steps, 1)), dt, doping, steady.boundary_data()
        )
        self.assertEqual(len(iterates), 4)
        for w in iterates:
            self.assertClose(w.sigma, 0.0, atol=1e-14)
            self.assertClose(w.j, 0.0, atol=1e-14)
            self.assertClose(w.e_tilde, 0.0, atol=1e-14)

    def test_nonlinear_path_is_a_fixed_point(self):
        law, doping, steady, context = flat_setup(32, 0.01)
        rng = np.random.default_rng(7)
        initial = initial_perturbation(context, PerturbationSpec(amplitude=1e-3), rng)
        noise = NoiseModel(amplitude=0.5)
        dt = cfl_dt(initial, law, 0.3)
        increments = noise.draw(rng, dt, (20,))
        direct = direct_trajectory(initial, context, law, noise, increments, dt)
        again = picard_iterate(direct, steady, law, noise, increments, dt, doping, context.boundary)
        self.assertLess(iterate_distance(direct, again), 1e-8)

    def test_iterates_approach_nonlinear_path(self):
        law, doping, steady, context = flat_setup(32, 0.01)
        rng = np.random.default_rng(11)
        initial = initial_perturbation(context, PerturbationSpec(amplitude=1e-3), rng)
        noise = NoiseModel(amplitude=0.02)
        dt = cfl_dt(initial, law, 0.2)
        increments = noise.draw(rng, dt, (10,))
        direct = direct_trajectory(initial, context, law, noise, increments, dt)
        start = PerturbationTrajectory.constant(direct.state(0), direct.times)
        iterates = picard_sequence(
            start, 4, steady, law, noise, increments, dt, doping, context.boundary
        )
        gaps = [iterate_distance(w, direct) for w in iterates]
        self.assertLess(gaps[-1], gaps[0])
        self.assertLess(gaps[-1], 1e-3 * gaps[0] + 1e-12)

    def test_increment_count_checked(self):
        law, doping, steady, _ = flat_setup(16, 0.0)
        start = PerturbationTrajectory.constant(PerturbationState.zero(steady.grid), [0.0, 0.01, 0.02])
        with self.assertRaises(ValueError):
            picard_iterate(start, steady, law, NoiseModel(), np.zeros((5, 1)), 0.01, doping, steady.boundary_data())


if __name__ == "__main__":
    unittest.main()
