from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from ..const import Binding
from ..errors import DimensionError, SystemDataError


@dataclass(frozen=True)
class GeneratorUnit:
    """One dispatchable unit with box limits (MW) and quadratic cost a*P^2 + b*P + c"""

    bus_id: int
    p_min: float
    p_max: float
    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        for name in ("p_min", "p_max", "a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise SystemDataError("value must be a finite number", field=name)
        if self.p_min < 0:
            raise SystemDataError(
                f"p_min must not be negative, got {self.p_min:g}", field="p_min"
            )
        if self.p_min > self.p_max:
            raise SystemDataError(
                f"p_min ({self.p_min:g}) is greater than p_max ({self.p_max:g})",
                field="p_min",
            )
        if self.a < 0:
            raise SystemDataError(
                f"quadratic coefficient must not be negative, got {self.a:g}",
                field="a",
            )

    def marginal_cost(self, pg: float) -> float:
        return self.b + 2 * self.a * pg


@dataclass(frozen=True)
class PowerSystem:
    """Ordered set of generator units. Unit order is the index order of every Dispatch."""

    units: tuple[GeneratorUnit, ...]
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))
        if not self.units:
            raise SystemDataError("power system must contain at least one unit")

    def __len__(self) -> int:
        return len(self.units)

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def pd_min(self) -> float:
        return float(sum(unit.p_min for unit in self.units))

    @property
    def pd_max(self) -> float:
        return float(sum(unit.p_max for unit in self.units))

    @property
    def bus_ids(self) -> tuple[int, ...]:
        return tuple(unit.bus_id for unit in self.units)

    @cached_property
    def p_min(self) -> np.ndarray:
        return self._column("p_min")

    @cached_property
    def p_max(self) -> np.ndarray:
        return self._column("p_max")

    @cached_property
    def a(self) -> np.ndarray:
        return self._column("a")

    @cached_property
    def b(self) -> np.ndarray:
        return self._column("b")

    @cached_property
    def c(self) -> np.ndarray:
        return self._column("c")

    def _column(self, name: str) -> np.ndarray:
        column = np.array([getattr(unit, name) for unit in self.units], dtype=float)
        column.setflags(write=False)
        return column

    def check_dispatch(self, dispatch: Dispatch) -> None:
        """Raise DimensionError when the dispatch does not belong to this system"""
        if len(dispatch.pg) != self.n_units:
            raise DimensionError(self.n_units, len(dispatch.pg))

    def min_dispatch(self, pd: float | None = None) -> Dispatch:
        return Dispatch.from_array(self.p_min, self.pd_min if pd is None else pd)

    def max_dispatch(self, pd: float | None = None) -> Dispatch:
        return Dispatch.from_array(self.p_max, self.pd_max if pd is None else pd)

    def is_feasible_demand(self, pd: float, tol: float = 0.0) -> bool:
        return self.pd_min - tol <= pd <= self.pd_max + tol


@dataclass(frozen=True)
class Dispatch:
    """Per-unit generation (MW) in canonical unit order, paired with its target demand"""

    pg: tuple[float, ...]
    pd: float

    def __post_init__(self) -> None:
        pg = tuple(float(value) for value in self.pg)
        if not all(math.isfinite(value) for value in pg):
            raise ValueError("Dispatch entries must be finite numbers")
        if not math.isfinite(self.pd):
            raise ValueError("Target demand must be a finite number")
        object.__setattr__(self, "pg", pg)
        object.__setattr__(self, "pd", float(self.pd))

    @classmethod
    def from_array(cls, values: np.ndarray | Iterable[float], pd: float) -> Dispatch:
        return cls(tuple(np.asarray(values, dtype=float).tolist()), pd)

    def as_array(self) -> np.ndarray:
        return np.array(self.pg, dtype=float)

    @property
    def total(self) -> float:
        return float(math.fsum(self.pg))

    def __len__(self) -> int:
        return len(self.pg)


@dataclass(frozen=True)
class EdSolution:
    """Optimal dispatch of the lossless ED problem with its cost and marginal price (lambda)"""

    dispatch: Dispatch
    cost: float
    marginal_price: float
    include_constants: bool = False
    iterations: int = 0
    binding: tuple[Binding, ...] = field(default_factory=tuple)

    def marginal_costs(self, system: PowerSystem) -> tuple[float, ...]:
        """Incremental cost b + 2*a*pg of every unit at the optimum"""
        system.check_dispatch(self.dispatch)
        pg = self.dispatch.as_array()
        return tuple((system.b + 2 * system.a * pg).tolist())

    def as_dict(self, system: PowerSystem | None = None) -> dict:
        data = {
            "pd": self.dispatch.pd,
            "cost": self.cost,
            "lambda": self.marginal_price,
            "include_constants": self.include_constants,
            "iterations": self.iterations,
            "pg": list(self.dispatch.pg),
            "binding": [b.value for b in self.binding],
        }
        if system is not None:
            data["bus"] = list(system.bus_ids)
            data["marginal_costs"] = list(self.marginal_costs(system))
        return data
