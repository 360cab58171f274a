# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core.device import BoundaryData, DopingProfile
from .core.fields import FlowField
from .core.pressure import PressureLaw
from .exceptions import SemiconductorError
from .integrator import (
    IntegratorConfig,
    PathRecord,
    PerturbationSpec,
    SimulationContext,
    initial_perturbation,
    simulate,
    with_seed,
)
from .noise import NoiseModel
from .runconfig import RunConfig
from .steady import SteadyState, solve_given_current, solve_given_voltage
from .streams import make_streams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Problem:
    """
    Everything a path needs: picklable, so ensemble workers receive it once.
    """

    law: PressureLaw
    context: SimulationContext
    noise: NoiseModel
    integrator: IntegratorConfig
    perturbation: PerturbationSpec

    @property
    def steady(self) -> SteadyState:
        return self.context.steady

    def initial_field(self, rng: np.random.Generator) -> FlowField:
        return initial_perturbation(self.context, self.perturbation, rng)

    def run_path(self, master_seed: int, path_index: int) -> PathRecord:
        """
        One path with streams keyed by (master_seed, path_index).
        """
        streams = make_streams(master_seed, path_index)
        config = with_seed(self.integrator, master_seed)
        try:
            initial = self.initial_field(streams.initial)
        except SemiconductorError as e:
            logger.warning(f"Path {path_index} failed at t=0: {e}")
            record = PathRecord(seed=config.seed)
            record.fail(e)
            return record
        return simulate(
            initial,
            config,
            self.law,
            self.context,
            self.noise,
            rng=streams.noise,
        )


def solve_steady(config: RunConfig) -> tuple[PressureLaw, DopingProfile, SteadyState]:
    physics = config.physics
    law = config.pressure_law()
    grid = config.make_grid()
    doping = DopingProfile.from_spec(grid, physics.doping, default_value=physics.rho_left)
    if physics.voltage_mode:
        bd = BoundaryData(physics.rho_left, physics.rho_right, physics.phi_left, physics.phi_right)
        steady, _ = solve_given_voltage(law, doping, bd, j_max=physics.j_max)
    else:
        steady = solve_given_current(
            law, doping, physics.rho_left, physics.rho_right, physics.jbar, physics.phi_left
        )
    return law, doping, steady


def build_problem(config: RunConfig) -> Problem:
    law, doping, steady = solve_steady(config)
    return Problem(
        law=law,
        context=SimulationContext.build(steady, doping, law),
        noise=config.noise_model(),
        integrator=config.integrator_config(),
        perturbation=config.perturbation_spec(),
    )
