# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

import logging

from django.conf import settings
from django.core.management.base import CommandError

from semiconductor.core.device import DopingProfile
from semiconductor.exceptions import ConfigurationError, DomainError, SemiconductorError
from semiconductor.runconfig import RunConfig, load_run_config
from semiconductor.storages import RunOutputStorage

logger = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_STEADY = 2
EXIT_PATH = 3
EXIT_PARTIAL = 4


def add_run_arguments(parser, seed_help: str = None, with_paths: bool = False):
    parser.add_argument(
        "--config",
        type=str,
        default=None,
        help="Run configuration file (default: SEMICONDUCTOR_DEFAULT_CONFIG).",
    )
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="Output directory (default: output.dir from the config, then SEMICONDUCTOR_OUTPUT_DIR).",
    )
    if seed_help:
        parser.add_argument("--seed", type=str, default=None, help=seed_help)
    if with_paths:
        parser.add_argument(
            "--paths", type=str, default=None, help="Number of paths (overrides ensemble.n_paths)."
        )


def load_config(options, overrides: dict) -> RunConfig:
    """
    Load and validate the run configuration; any problem exits with code 1.
    """
    path = options.get("config") or settings.SEMICONDUCTOR_DEFAULT_CONFIG
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        config = load_run_config(path, overrides)
        DopingProfile.from_spec(config.make_grid(), config.physics.doping, config.physics.rho_left)
    except ConfigurationError as e:
        logger.error(f"Invalid configuration {path}: {e}")
        raise CommandError(f"invalid configuration: {e}", returncode=EXIT_CONFIG) from e
    except DomainError as e:
        logger.error(f"Invalid configuration {path}: physics.doping: {e}")
        raise CommandError(
            f"invalid configuration: physics.doping: {e}", returncode=EXIT_CONFIG
        ) from e
    return config


def steady_failure(e: SemiconductorError) -> CommandError:
    logger.error(f"Steady solve failed: {type(e).__name__}: {e}")
    return CommandError(f"steady solve failed ({type(e).__name__}): {e}", returncode=EXIT_STEADY)


def output_storage(options, config: RunConfig) -> RunOutputStorage:
    return RunOutputStorage(options.get("out") or config.output_dir)
