# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from django.core.management.base import BaseCommand

from semiconductor.exceptions import SemiconductorError
from semiconductor.perturbation import symmetrizer_weights
from semiconductor.problem import solve_steady
from semiconductor.reports import SYMMETRIZER_COLUMNS, steady_payload, symmetrizer_rows
from semiconductor.storages import load_schema

from ._options import add_run_arguments, load_config, output_storage, steady_failure

STEADY_SCHEMA = load_schema("steady.json")


class Command(BaseCommand):
    help = """
    Solve for the subsonic steady state of the configured device and write
    steady.json and symmetrizers.csv.
    Exit codes: 0 converged, 1 invalid configuration, 2 solver failure.
    """

    def add_arguments(self, parser):
        add_run_arguments(parser)

    def handle(self, *args, **options):
        config = load_config(options, {})
        try:
            law, doping, steady = solve_steady(config)
            weights = symmetrizer_weights(steady, law)
        except SemiconductorError as e:
            raise steady_failure(e) from e

        storage = output_storage(options, config)
        storage.write_json("steady.json", steady_payload(steady, law, doping), STEADY_SCHEMA)
        storage.write_csv("symmetrizers.csv", SYMMETRIZER_COLUMNS, symmetrizer_rows(steady, weights))
        self.stdout.write(
            self.style.SUCCESS(
                f"Steady state J_bar={steady.J_bar:.12g}, Phi(1)={steady.phi_right_attained:.12g}, "
                f"margin {steady.subsonic_margin:.6g}; written to {storage.location}"
            )
        )
