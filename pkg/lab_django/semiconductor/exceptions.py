# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.


class SemiconductorError(Exception):
    pass


class DomainError(SemiconductorError, ValueError):
    pass


class UnsupportedLawError(SemiconductorError):
    pass


class GridMismatchError(SemiconductorError, ValueError):
    pass


class GridTooCoarseError(SemiconductorError):
    pass


class VacuumError(SemiconductorError):
    pass


class SupersonicError(SemiconductorError):
    pass


class NoConvergenceError(SemiconductorError):
    pass


class NoBracketError(SemiconductorError):
    pass


class SymmetrizerPositivityError(SemiconductorError):
    pass


class StepSizeError(SemiconductorError):
    pass


class InsufficientDataError(SemiconductorError):
    pass


class LogDomainError(SemiconductorError, ValueError):
    pass


class ReferenceMissingError(SemiconductorError):
    pass


class ConfigurationError(SemiconductorError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
