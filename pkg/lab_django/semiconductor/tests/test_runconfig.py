# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.
import logging
import os
import unittest

from django.conf import settings

from .utils import SMALL_CONFIG, LabTestCase
from ..choices import NoiseReduction, NoiseShape
from ..exceptions import ConfigurationError
from ..runconfig import load_run_config, parse_run_config

logger = logging.getLogger(__file__)
logger.setLevel(logging.INFO)


def with_line(line: str) -> str:
    """
    SMALL_CONFIG with `line` replacing any existing line for the same key.
    """
    key = line.split("=", 1)[0].strip()
    kept = [existing for existing in SMALL_CONFIG.splitlines() if existing.split("=", 1)[0].strip() != key]
    return "\n".join(kept + [line]) + "\n"


class ParseTests(LabTestCase):
    def test_defaults_fill_in(self):
        config = parse_run_config(SMALL_CONFIG)
        self.assertEqual(config.grid.n_cells, 32)
        self.assertEqual(config.physics.gamma, 2.0)
        self.assertFalse(config.physics.voltage_mode)
        self.assertEqual(config.noise.reduction, NoiseReduction.SINGLE_BROWNIAN)
        self.assertEqual(config.noise.shape, NoiseShape.RATIONAL)
        self.assertEqual(config.ensemble.moment_orders, (1, 2, 3))
        self.assertEqual(config.fit_window, (0.125, 0.375))
        self.assertEqual(config.output_dir, self.out_dir)

    def test_comments_and_lists(self):
        config = parse_run_config(
            SMALL_CONFIG
            + "\n# a comment line\nensemble.moment_orders = 1, 3  # trailing\n"
            + "ensemble.delta_ladder = 1e-3,1e-2\nphysics.voltage_mode = yes\n"
        )
        self.assertEqual(config.ensemble.moment_orders, (1, 3))
        self.assertEqual(config.ensemble.delta_ladder, (1e-3, 1e-2))
        self.assertTrue(config.physics.voltage_mode)

    def test_builders(self):
        config = parse_run_config(SMALL_CONFIG, overrides={"noise.reduction": "k_modes"})
        noise = config.noise_model()
        self.assertEqual(noise.reduction, NoiseReduction.K_MODES)
        self.assertEqual(len(noise.mode_weights), 4)
        self.assertEqual(config.make_grid().n_cells, 32)
        self.assertEqual(config.integrator_config().t_end, 0.5)
        self.assertEqual(config.perturbation_spec().n_modes, 2)
        cfg = config.ensemble_config(workers=1)
        self.assertEqual((cfg.n_paths, cfg.record_points, cfg.workers), (4, 21, 1))
        self.assertEqual(cfg.fit_window, (0.125, 0.375))

    def test_overrides_win(self):
        config = parse_run_config(SMALL_CONFIG, overrides={"time.seed": 7, "ensemble.n_paths": "9"})
        self.assertEqual(config.time.seed, 7)
        self.assertEqual(config.ensemble.n_paths, 9)

    def test_output_dir_from_file(self):
        target = os.path.join(self.tmp_dir, "elsewhere")
        config = parse_run_config(SMALL_CONFIG + f"\noutput.dir = {target}\n")
        self.assertEqual(config.output_dir, target)

    def test_echo(self):
        echo = parse_run_config(SMALL_CONFIG).echo()
        self.assertEqual(echo["physics"]["rho_left"], 1.0)
        self.assertEqual(echo["ensemble"]["fit_lo"], 0.125)
        self.assertEqual(echo["ensemble"]["moment_orders"], [1, 2, 3])
        self.assertNotIn("output", echo)

    def test_shipped_fixtures_load(self):
        fixtures = os.path.dirname(settings.SEMICONDUCTOR_DEFAULT_CONFIG)
        for name in ("default.cfg", "bump.cfg"):
            with self.subTest(name=name):
                config = load_run_config(os.path.join(fixtures, name))
                self.assertGreater(config.time.t_end, 0.0)


class ErrorTests(LabTestCase):
    def assertConfigError(self, text: str, field: str, fragment: str = None):
        with self.assertRaises(ConfigurationError) as cm:
            parse_run_config(text)
        self.assertEqual(cm.exception.field, field)
        if fragment:
            self.assertIn(fragment, str(cm.exception))

    def test_repeated_key(self):
        self.assertConfigError(SMALL_CONFIG + "physics.jbar = 0.02\n", "physics.jbar", "repeated on line")

    def test_unknown_names(self):
        self.assertConfigError(SMALL_CONFIG + "physics.colour = blue\n", "physics.colour", "unknown field")
        self.assertConfigError(SMALL_CONFIG + "magic.wand = 1\n", "magic.wand", "unknown section")

    def test_malformed_lines(self):
        self.assertConfigError("physics.rho_left 1.0\n", "line 1")
        self.assertConfigError("rho_left = 1.0\n", "rho_left", "section.key")

    def test_missing_required(self):
        self.assertConfigError("physics.rho_right = 1.0\n", "physics.rho_left", "missing")

    def test_bad_types(self):
        for line, field in (
            ("grid.n_cells = ten", "grid.n_cells"),
            ("physics.voltage_mode = maybe", "physics.voltage_mode"),
            ("ensemble.moment_orders = 1, two", "ensemble.moment_orders"),
        ):
            with self.subTest(line=line):
                self.assertConfigError(with_line(line), field, "expected")

    def test_non_finite_numbers(self):
        for line, field in (
            ("physics.gamma = nan", "physics.gamma"),
            ("time.t_end = inf", "time.t_end"),
            ("noise.amplitude = -inf", "noise.amplitude"),
            ("ensemble.delta_ladder = 1e-3, nan", "ensemble.delta_ladder"),
        ):
            with self.subTest(line=line):
                self.assertConfigError(with_line(line), field, "finite")

    def test_schema_violations(self):
        for line, field in (
            ("grid.n_cells = 2", "grid.n_cells"),
            ("time.cfl = 1.5", "time.cfl"),
            ("noise.reduction = columns", "noise.reduction"),
            ("physics.doping = wave:1", "physics.doping"),
        ):
            with self.subTest(line=line):
                self.assertConfigError(with_line(line), field)

    def test_fit_window(self):
        self.assertConfigError(SMALL_CONFIG + "ensemble.fit_hi = 1.0\n", "ensemble.fit_hi", "exceeds")
        self.assertConfigError(
            SMALL_CONFIG + "ensemble.fit_lo = 0.4\nensemble.fit_hi = 0.3\n", "ensemble.fit_lo", "below"
        )

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError) as cm:
            load_run_config(os.path.join(self.tmp_dir, "absent.cfg"))
        self.assertEqual(cm.exception.field, "config")

    def test_file_overrides(self):
        path = self.write_config(time__seed=3)
        self.assertEqual(load_run_config(path).time.seed, 3)
        self.assertEqual(load_run_config(path, {"time.seed": "11"}).time.seed, 11)


if __name__ == "__main__":
    unittest.main()
