"""Errors for the dispatch harness."""

from __future__ import annotations


class DispatchCalcError(Exception):
    """Raised when a domain operation cannot be completed."""


class UsageError(DispatchCalcError):
    """Raised when the harness is invoked with an unusable combination of options."""


class SystemDataError(DispatchCalcError):
    """Raised when a system file contains a malformed or invalid record"""

    def __init__(self, message: str, row: int | None = None, field: str | None = None):
        self.row = row
        self.field = field
        self.reason = message
        location = []
        if row is not None:
            location.append(f"row {row}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)


class DimensionError(DispatchCalcError, ValueError):
    """Raised when a dispatch vector does not match the number of units"""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Dispatch has {actual} entries, power system has {expected} units"
        )


class InfeasibleDemandError(DispatchCalcError):
    """Raised when a demand lies outside [pd_min, pd_max]"""

    def __init__(self, pd: float, pd_min: float, pd_max: float):
        self.pd = pd
        self.pd_min = pd_min
        self.pd_max = pd_max
        if pd < pd_min:
            self.bound_name = "pd_min"
            self.bound = pd_min
            relation = "below"
        else:
            self.bound_name = "pd_max"
            self.bound = pd_max
            relation = "above"
        super().__init__(
            f"Demand {pd:g} MW is {relation} {self.bound_name} = {self.bound:g} MW "
            f"(feasible range {pd_min:g}..{pd_max:g} MW)"
        )


class GaConfigurationError(DispatchCalcError):
    """Raised when the genetic algorithm is configured incorrectly"""


class FewShotError(DispatchCalcError):
    """Raised when a few-shot example set violates its invariants"""


class ScenarioConfigurationError(DispatchCalcError):
    """Raised when few-shot and evaluation demands are not usable"""


class RunConfigurationError(UsageError):
    """Raised when a benchmark run config file is invalid"""
