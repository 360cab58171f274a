# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase, override_settings

from ..core.device import DopingProfile
from ..core.grid import Grid
from ..core.pressure import PressureLaw
from ..integrator import SimulationContext
from ..steady import solve_given_current

SMALL_CONFIG = """
physics.rho_left = 1.0
physics.rho_right = 1.0
physics.jbar = 0.01

grid.n_cells = 32

time.t_end = 0.5
time.cfl = 0.4

noise.amplitude = 0.05
noise.modes = 4

perturbation.amplitude = 0.001
perturbation.n_modes = 2

ensemble.n_paths = 4
ensemble.record_points = 21
"""


def assert_close(self, actual, expected, rtol=1e-7, atol=0.0, msg=None):
    try:
        np.testing.assert_allclose(actual, expected, rtol=rtol, atol=atol)
    except AssertionError as e:
        raise AssertionError(f"{msg}\n{e}" if msg else str(e))


def flat_setup(n_cells: int = 50, J_bar: float = 0.0, law: PressureLaw = None):
    """
    Flat doping b = 1 with rho = 1 at both contacts: the steady state is
    rho = 1, E = J_bar, Phi = J_bar x.
    """
    law = law or PressureLaw()
    grid = Grid(n_cells)
    doping = DopingProfile.constant(grid, 1.0)
    steady = solve_given_current(law, doping, 1.0, 1.0, J_bar)
    return law, doping, steady, SimulationContext.build(steady, doping, law)


class LabTestCase(SimpleTestCase):
    """
    Test case with a private output directory, used as SEMICONDUCTOR_OUTPUT_DIR.
    """

    def setUp(self):
        super().setUp()
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp_dir = tmp.name
        self.out_dir = os.path.join(self.tmp_dir, "out")
        settings_override = override_settings(SEMICONDUCTOR_OUTPUT_DIR=self.out_dir)
        settings_override.enable()
        self.addCleanup(settings_override.disable)

    def write_config(self, text: str = SMALL_CONFIG, name: str = "run.cfg", **values) -> str:
        """
        Write `text` plus extra ``section__key=value`` lines to a config file.
        """
        extra = "\n".join(f"{k.replace('__', '.')} = {v}" for k, v in values.items())
        path = os.path.join(self.tmp_dir, name)
        with open(path, "w") as f:
            f.write(text + "\n" + extra + "\n")
        return path

    def read_output(self, name: str) -> str:
        with open(os.path.join(self.out_dir, name)) as f:
            return f.read()

    def assertClose(self, actual, expected, rtol=1e-7, atol=0.0, msg=None):
        assert_close(self, actual, expected, rtol=rtol, atol=atol, msg=msg)
