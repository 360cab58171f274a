# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.
import logging
import unittest

import numpy as np

from .factories import fake
from .utils import LabTestCase, flat_setup
from ..core.fields import FlowField
from ..core.grid import Grid
from ..diagnostics import (
    RUN_COLUMNS,
    composite_statistic,
    diagnostic_frame,
    efield_identity_defect,
    l2_composite,
    relative_energy,
    weighted_energies,
)
from ..exceptions import InsufficientDataError
from ..integrator import (
    IntegratorConfig,
    PathRecord,
    PerturbationSpec,
    cfl_dt,
    initial_perturbation,
    simulate,
    step,
    steady_field,
)
from ..noise import NoiseModel
from ..perturbation import PerturbationState, SymmetrizerWeights

logger = logging.getLogger(__file__)
logger.setLevel(logging.INFO)


def unit_weights(grid: Grid) -> SymmetrizerWeights:
    ones = np.ones(grid.n_nodes)
    return SymmetrizerWeights(r=ones, s=ones, r_tilde=ones, s_tilde=ones)


class EnergyTests(LabTestCase):
    def test_zero_perturbation(self):
        law, _, steady, _ = flat_setup(40, 0.01)
        zero = PerturbationState.zero(steady.grid)
        self.assertEqual(relative_energy(zero, steady, law), 0.0)
        self.assertEqual(weighted_energies(zero, unit_weights(steady.grid)), (0.0, 0.0))
        self.assertEqual(composite_statistic(zero), 0.0)
        self.assertEqual(l2_composite(zero), 0.0)

    def test_uniform_current_perturbation(self):
        law, _, steady, _ = flat_setup(40, 0.0)
        grid = steady.grid
        c = 0.3
        z = np.zeros(grid.n_nodes)
        pert = PerturbationState(grid, z, np.full(grid.n_nodes, c), z)
        self.assertAlmostEqual(relative_energy(pert, steady, law), c**2 / 2, places=14)
        self.assertAlmostEqual(composite_statistic(pert), c**2, places=12)

    def test_energy_is_quadratic(self):
        law, doping, steady, _ = flat_setup(100, 0.01)
        x = steady.grid.nodes
        energies = []
        for amplitude in (1e-3, 5e-4):
            pert = PerturbationState.from_sigma_j(
                amplitude * np.sin(np.pi * x),
                amplitude * np.cos(2 * np.pi * x),
                steady,
                doping,
                steady.boundary_data(),
            )
            energies.append(relative_energy(pert, steady, law))
        self.assertTrue(3.8 <= energies[0] / energies[1] <= 4.2, msg=f"energies {energies}")

    def test_relative_energy_is_nonnegative(self):
        law, doping, steady, _ = flat_setup(50, 0.01)
        x = steady.grid.nodes
        modes = np.arange(1, 5)
        rng = np.random.default_rng(fake.pyint())
        for _ in range(20):
            sigma = rng.uniform(-1.0, 1.0, 4) @ np.sin(np.pi * np.outer(modes, x))
            sigma *= rng.uniform(1e-3, 0.9) / np.max(np.abs(sigma))
            j = rng.uniform(-1.0, 1.0, 4) @ np.cos(np.pi * np.outer(modes, x))
            j *= rng.uniform(1e-3, 0.5)
            pert = PerturbationState.from_sigma_j(sigma, j, steady, doping, steady.boundary_data())
            self.assertGreaterEqual(relative_energy(pert, steady, law), 0.0)

    def test_relative_energy_comparable_to_l2_composite(self):
        law, _, steady, context = flat_setup(100, 0.01)
        for seed in range(8):
            field = initial_perturbation(context, PerturbationSpec(), np.random.default_rng(seed))
            pert = PerturbationState.from_field(field, steady)
            ratio = relative_energy(pert, steady, law) / l2_composite(pert)
            with self.subTest(seed=seed):
                self.assertTrue(1.0 / 50.0 <= ratio <= 50.0, msg=f"ratio {ratio}")

    def test_deterministic_energy_decays_after_transient(self):
        law, _, _, context = flat_setup(50, 0.0)
        spec = PerturbationSpec(amplitude=1e-3, n_modes=2)
        initial = initial_perturbation(context, spec, np.random.default_rng(3))
        record = simulate(initial, IntegratorConfig(t_end=3.0), law, context, NoiseModel())
        self.assertFalse(record.failed)
        energy = record.column("rel_energy")[record.times >= 1.0]
        self.assertGreater(len(energy), 10)
        self.assertLessEqual(float(np.max(np.diff(energy))), 1e-10)
        self.assertLess(energy[-1], energy[0])

    def test_weighted_energy_of_sine(self):
        grid = Grid(200)
        x = grid.nodes
        z = np.zeros(grid.n_nodes)
        pert = PerturbationState(grid, np.sin(np.pi * x), z, z)
        first, second = weighted_energies(pert, unit_weights(grid))
        self.assertAlmostEqual(first, np.pi**2 / 2, delta=1e-3)
        self.assertAlmostEqual(second, np.pi**4 / 2, delta=0.05)

    def test_frame_of_steady_state(self):
        law, _, steady, context = flat_setup(30, 0.01)
        frame = diagnostic_frame(steady_field(context), steady, law, context.weights)
        self.assertLess(frame.composite, 1e-20)
        self.assertEqual(frame.sup_sigma, 0.0)
        self.assertAlmostEqual(frame.subsonic_margin, 2.0 - 1e-4, places=12)
        self.assertEqual(len(frame.row(0.0)), len(RUN_COLUMNS))


class FieldIdentityTests(LabTestCase):
    def test_steady_trajectory(self):
        law, _, _, context = flat_setup(40, 0.01)
        record = simulate(
            steady_field(context), IntegratorConfig(t_end=0.05, snapshot_every=1), law, context, NoiseModel()
        )
        self.assertLessEqual(efield_identity_defect(record, context.steady), 1e-8)

    def test_defect_shrinks_under_refinement(self):
        defects = []
        for n in (50, 100):
            law, _, _, context = flat_setup(n, 0.01)
            grid = context.grid
            initial = FlowField.from_density(
                context.steady.rho_bar + 1e-2 * np.sin(np.pi * grid.nodes),
                np.full(grid.n_nodes, 0.01),
                context.doping,
                context.boundary,
            )
            record = simulate(initial, IntegratorConfig(t_end=0.05, snapshot_every=1), law, context, NoiseModel())
            defects.append(efield_identity_defect(record, context.steady))
        self.assertGreater(defects[0] / defects[1], 1.9)

    def test_skipped_poisson_solve_detected(self):
        law, _, _, context = flat_setup(60, 0.01)
        x = context.grid.nodes
        start = FlowField.from_density(
            1.0 + 1e-2 * np.sin(np.pi * x),
            0.01 + 0.05 * np.cos(np.pi * x),
            context.doping,
            context.boundary,
        )
        faulty = step(start, context, law, NoiseModel(), cfl_dt(start, law, 0.4), update_field=False)
        record = PathRecord(seed=0, snapshots={0: start, 1: faulty})
        self.assertGreater(efield_identity_defect(record, context.steady), 1e-3)

    def test_needs_consecutive_snapshots(self):
        law, _, _, context = flat_setup(20, 0.0)
        record = simulate(
            steady_field(context), IntegratorConfig(t_end=0.05, snapshot_every=2), law, context, NoiseModel()
        )
        with self.assertRaises(InsufficientDataError):
            efield_identity_defect(record, context.steady)


if __name__ == "__main__":
    unittest.main()
