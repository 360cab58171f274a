# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

import logging

from django.core.management.base import BaseCommand, CommandError

from semiconductor.verification import SUITES, run_suite

from ._options import EXIT_CONFIG

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = f"""
    Run acceptance suites and print a pass/fail table.
    Suites: {', '.join(SUITES)}, or all.
    Exits 0 only if every selected suite passes.
    """

    def add_arguments(self, parser):
        parser.add_argument("--suite", type=str, default="all", help="Suite name, or all.")

    def handle(self, *args, **options):
        name = options["suite"]
        if name == "all":
            names = list(SUITES)
        elif name in SUITES:
            names = [name]
        else:
            logger.error(f"Unknown verification suite {name}")
            raise CommandError(
                f"unknown suite '{name}' (choose from {', '.join(SUITES)}, all)",
                returncode=EXIT_CONFIG,
            )

        results = [run_suite(n) for n in names]
        self.stdout.write(f"{'suite':<18}{'result':<8}{'seconds':>9}")
        for result in results:
            style = self.style.SUCCESS if result.passed else self.style.ERROR
            verdict = "PASS" if result.passed else "FAIL"
            self.stdout.write(style(f"{result.name:<18}{verdict:<8}{result.seconds:>9.1f}"))
            for label, ok, detail in result.checks:
                self.stdout.write(f"    {'ok ' if ok else 'BAD'} {label}: {detail}")
            if result.error:
                self.stdout.write(f"    error: {result.error}")

        failed = [r.name for r in results if not r.passed]
        if failed:
            raise CommandError(f"{len(failed)} suite(s) failed: {', '.join(failed)}", returncode=1)
        self.stdout.write(self.style.SUCCESS(f"All {len(results)} suite(s) passed."))
