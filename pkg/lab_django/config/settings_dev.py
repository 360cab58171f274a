# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Development settings: debug on, console logging on, single worker by default
so tracebacks from path workers surface in the calling process.
"""

import os  # noqa: F401

from .settings_base import *  # noqa: F401, F403, E402

DEBUG = True

SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "django-insecure-dev-key")

try:
    SEMICONDUCTOR_MAX_WORKERS = int(os.environ.get("SEMICONDUCTOR_MAX_WORKERS"))
except (ValueError, TypeError):
    SEMICONDUCTOR_MAX_WORKERS = 1

LOGGING["loggers"]["semiconductor"]["level"] = "DEBUG"  # noqa: F405
for handler in LOGGING["handlers"].values():  # noqa: F405
    handler["level"] = "DEBUG"
