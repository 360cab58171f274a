# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

import logging

from django.core.management.base import BaseCommand, CommandError

from semiconductor.diagnostics import RUN_COLUMNS
from semiconductor.exceptions import SemiconductorError
from semiconductor.problem import build_problem
from semiconductor.reports import SNAPSHOT_COLUMNS, snapshot_rows

from ._options import EXIT_PATH, add_run_arguments, load_config, output_storage, steady_failure

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = """
    Integrate one stochastic path from a perturbed steady state and write
    run.csv plus snap_<step>.csv snapshots every time.snapshot_every steps.
    Exit codes: 0 complete, 1 invalid configuration, 2 steady failure,
    3 path failure (run.csv holds the steps up to the failure).
    """

    def add_arguments(self, parser):
        add_run_arguments(parser, seed_help="Path seed (overrides time.seed).")

    def handle(self, *args, **options):
        config = load_config(options, {"time.seed": options.get("seed")})
        try:
            problem = build_problem(config)
        except SemiconductorError as e:
            raise steady_failure(e) from e

        seed = config.time.seed
        record = problem.run_path(seed, 0)
        storage = output_storage(options, config)
        storage.write_csv("run.csv", RUN_COLUMNS, record.rows())
        for step_index, field in sorted(record.snapshots.items()):
            storage.write_csv(f"snap_{step_index}.csv", SNAPSHOT_COLUMNS, snapshot_rows(field))
        for warning in record.warnings:
            self.stdout.write(self.style.WARNING(warning))

        if record.failed:
            logger.error(f"Path with seed {seed} failed: {record.failure}")
            raise CommandError(
                f"path failed at t={record.last_good_time:.17g} (last good time): {record.failure}",
                returncode=EXIT_PATH,
            )
        self.stdout.write(
            self.style.SUCCESS(
                f"Path with seed {seed}: {record.n_steps} steps to t={record.last_good_time:.6g}; "
                f"written to {storage.location}"
            )
        )
