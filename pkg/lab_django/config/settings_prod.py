# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Batch settings used for production runs (ensembles on workstations and
cluster nodes).
"""

import os  # noqa: F401

from .settings_base import *  # noqa: F401, F403, E402

# Nothing is signed or served, the key only has to be non-empty.
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "euler-poisson-lab-batch")

DEBUG = os.environ.get("DJANGO_DEBUG", "False") == "True"
