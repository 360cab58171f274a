# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from django.apps import AppConfig


class SemiconductorConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "semiconductor"
    verbose_name = "Stochastic Euler-Poisson semiconductor lab"
