# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Django settings for the lab_django project.

The project has no web surface: Django provides the settings layer, the
logging configuration, the management-command CLI and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.0/ref/settings/
"""

from pathlib import Path

import os

LAB_VERSION = "1.0.0"

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Application definition

INSTALLED_APPS = [
    "semiconductor.apps.SemiconductorConfig",
]

MIDDLEWARE = []

# No persistent models: runs are described by config files and written to disk.
DATABASES = {}

# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Solver defaults
try:
    NEWTON_TOLERANCE = float(os.environ.get("SEMICONDUCTOR_NEWTON_TOLERANCE"))
except (ValueError, TypeError):
    NEWTON_TOLERANCE = 1e-10

try:
    NEWTON_MAX_ITERATIONS = int(os.environ.get("SEMICONDUCTOR_NEWTON_MAX_ITERATIONS"))
except (ValueError, TypeError):
    NEWTON_MAX_ITERATIONS = 50

# Ensemble execution
try:
    SEMICONDUCTOR_MAX_WORKERS = int(os.environ.get("SEMICONDUCTOR_MAX_WORKERS"))
except (ValueError, TypeError):
    SEMICONDUCTOR_MAX_WORKERS = os.cpu_count() or 1

# An ensemble with more failed paths than this is flagged as partial
PARTIAL_FAILURE_FRACTION = 0.05

# Output files
SEMICONDUCTOR_OUTPUT_DIR = os.environ.get("SEMICONDUCTOR_OUTPUT_DIR", os.getcwd())
SEMICONDUCTOR_DEFAULT_CONFIG = os.environ.get(
    "SEMICONDUCTOR_DEFAULT_CONFIG",
    str(BASE_DIR / "semiconductor" / "fixtures" / "default.cfg"),
)

# Logging
# Ensemble paths run in worker processes, so file records carry the process id.
SEMICONDUCTOR_LOG_DIR = os.environ.get("DJANGO_LOG_DIR", str(BASE_DIR / ".logs"))
os.makedirs(SEMICONDUCTOR_LOG_DIR, exist_ok=True)
level = os.environ.get(
    "DJANGO_LOG_LEVEL", "DEBUG" if os.environ.get("DJANGO_DEBUG") else "INFO"
)
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "filters": {
        "require_debug_true": {
            "()": "django.utils.log.RequireDebugTrue",
        },
    },
    "formatters": {
        "run": {
            "format": "{levelname} {asctime} pid={process:d} {name}:{funcName} {message}",
            "style": "{",
        },
        "short": {
            "format": "[{levelname}] {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": level,
            "filters": ["require_debug_true"],
            "class": "logging.StreamHandler",
            "formatter": "short",
        },
        "run_file": {
            "level": level,
            "class": "logging.handlers.RotatingFileHandler",
            "formatter": "run",
            "filename": os.path.join(SEMICONDUCTOR_LOG_DIR, "semiconductor.log"),
            "maxBytes": 1024 * 1024 * 50,
            "backupCount": 5,
        },
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
        },
        "semiconductor": {
            "handlers": ["console", "run_file"],
            "level": level,
        },
    },
}
