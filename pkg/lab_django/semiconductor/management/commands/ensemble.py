# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

import logging

from django.core.management.base import BaseCommand, CommandError

from semiconductor.ensemble import run_ensemble
from semiconductor.exceptions import DomainError, SemiconductorError
from semiconductor.problem import build_problem
from semiconductor.reports import summary_payload
from semiconductor.storages import load_schema

from ._options import (
    EXIT_CONFIG,
    EXIT_PARTIAL,
    add_run_arguments,
    load_config,
    output_storage,
    steady_failure,
)

logger = logging.getLogger(__name__)

SUMMARY_SCHEMA = load_schema("summary.json")


class Command(BaseCommand):
    help = """
    Run an ensemble of paths and write summary.json with moment curves,
    decay fits, their scaling in the moment order and invariant-measure
    statistics.
    Exit codes: 0 complete, 1 invalid configuration, 2 steady failure,
    4 more than PARTIAL_FAILURE_FRACTION of the paths failed (summary still
    written with "partial": true).
    """

    def add_arguments(self, parser):
        add_run_arguments(
            parser, seed_help="Master seed (overrides ensemble.master_seed).", with_paths=True
        )

    def handle(self, *args, **options):
        config = load_config(
            options,
            {"ensemble.master_seed": options.get("seed"), "ensemble.n_paths": options.get("paths")},
        )
        try:
            cfg = config.ensemble_config()
        except DomainError as e:
            logger.error(f"Invalid ensemble configuration: {e}")
            raise CommandError(f"invalid configuration: ensemble: {e}", returncode=EXIT_CONFIG) from e
        try:
            problem = build_problem(config)
        except SemiconductorError as e:
            raise steady_failure(e) from e

        summary = run_ensemble(cfg, problem)
        storage = output_storage(options, config)
        storage.write_json("summary.json", summary_payload(summary, config.echo()), SUMMARY_SCHEMA)

        scaling = summary.scaling
        if scaling is not None:
            ratios = ", ".join(f"m={row.m}: {row.ratio:.3f}" for row in scaling.rows)
            style = self.style.SUCCESS if scaling.consistent else self.style.WARNING
            self.stdout.write(style(f"Rate ratios zeta_m/(m zeta_1): {ratios}"))
        if summary.partial:
            logger.error(f"{len(summary.failed_paths)} of {summary.n_paths} paths failed")
            raise CommandError(
                f"partial ensemble: {len(summary.failed_paths)} of {summary.n_paths} paths failed",
                returncode=EXIT_PARTIAL,
            )
        self.stdout.write(
            self.style.SUCCESS(f"Ensemble of {summary.n_paths} paths written to {storage.location}")
        )
