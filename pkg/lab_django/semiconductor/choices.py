# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from django.db import models


class SolveMode(models.TextChoices):
    GIVEN_CURRENT = "given_current"
    GIVEN_VOLTAGE = "given_voltage"


class NoiseReduction(models.TextChoices):
    """
    How the cylindrical Wiener process is realised in the momentum equation.
    Every mode shares the spatial profile J·Y(J), so both reductions agree in law.
    """

    SINGLE_BROWNIAN = "single_brownian"
    K_MODES = "k_modes"


class NoiseShape(models.TextChoices):
    RATIONAL = "rational"
    TANH = "tanh"


class DopingSource(models.TextChoices):
    CONSTANT = "constant"
    BUMP = "bump"
    TABULATED = "csv"


class PathStatus(models.TextChoices):
    COMPLETE = "COMPLETE"
    FAILED = "FAILED"
