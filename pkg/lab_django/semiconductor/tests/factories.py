# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

import factory
import factory.fuzzy
import faker
import django.conf.global_settings

from ..choices import NoiseReduction, NoiseShape
from ..core.device import BoundaryData, DopingProfile
from ..core.grid import Grid
from ..core.pressure import PressureLaw
from ..ensemble import EnsembleConfig
from ..integrator import IntegratorConfig, PerturbationSpec
from ..noise import NoiseModel, default_mode_weights

fake = faker.Faker(django.conf.global_settings.LANGUAGE_CODE)


class GridFactory(factory.Factory):
    class Meta:
        model = Grid

    n_cells = factory.Faker("pyint", min_value=16, max_value=64)


class PressureLawFactory(factory.Factory):
    class Meta:
        model = PressureLaw

    gamma = factory.fuzzy.FuzzyFloat(1.2, 3.0)
    kappa = factory.fuzzy.FuzzyFloat(0.5, 2.0)


class BoundaryDataFactory(factory.Factory):
    class Meta:
        model = BoundaryData

    rho_left = factory.fuzzy.FuzzyFloat(0.5, 2.0)
    rho_right = factory.fuzzy.FuzzyFloat(0.5, 2.0)
    phi_left = 0.0
    phi_right = 0.0


class DopingProfileFactory(factory.Factory):
    class Meta:
        model = DopingProfile

    grid = factory.SubFactory(GridFactory)
    values = factory.LazyAttribute(
        lambda o: [1.0 + 0.1 * fake.random.random()] * o.grid.n_nodes
    )


class NoiseModelFactory(factory.Factory):
    class Meta:
        model = NoiseModel

    amplitude = factory.fuzzy.FuzzyFloat(0.01, 0.5)
    mode_weights = factory.LazyFunction(lambda: default_mode_weights(fake.pyint(min_value=1, max_value=16)))
    reduction = factory.Iterator(NoiseReduction.values)
    shape = factory.Iterator(NoiseShape.values)


class IntegratorConfigFactory(factory.Factory):
    class Meta:
        model = IntegratorConfig

    cfl = factory.fuzzy.FuzzyFloat(0.1, 0.9)
    t_end = factory.fuzzy.FuzzyFloat(0.05, 0.2)
    snapshot_every = 0
    seed = factory.Faker("pyint", min_value=0, max_value=2**31)


class PerturbationSpecFactory(factory.Factory):
    class Meta:
        model = PerturbationSpec

    amplitude = factory.fuzzy.FuzzyFloat(1e-4, 1e-2)
    n_modes = factory.Faker("pyint", min_value=1, max_value=4)


class EnsembleConfigFactory(factory.Factory):
    class Meta:
        model = EnsembleConfig

    n_paths = factory.Faker("pyint", min_value=4, max_value=8)
    master_seed = factory.Faker("pyint", min_value=0, max_value=2**31)
    moment_orders = (1, 2)
    record_points = 21
    workers = 1
