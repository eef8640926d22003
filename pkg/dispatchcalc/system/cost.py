from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import Dispatch, PowerSystem


class Violations(NamedTuple):
    gen_violation: float
    balance_violation: float


def total_cost(
    dispatch: Dispatch, system: PowerSystem, include_constants: bool = False
) -> float:
    """
    Generation cost in $/h: sum of a*P^2 + b*P over all units.
    The fixed terms c are only added when include_constants is set.
    """
    system.check_dispatch(dispatch)
    pg = dispatch.as_array()
    cost = float(np.sum(system.a * pg**2 + system.b * pg))
    if include_constants:
        cost += constant_cost(system)
    return cost


def constant_cost(system: PowerSystem) -> float:
    return float(np.sum(system.c))


def violations(dispatch: Dispatch, system: PowerSystem) -> Violations:
    """Total MW outside the unit boxes and the absolute power balance mismatch"""
    system.check_dispatch(dispatch)
    pg = dispatch.as_array()
    below = np.maximum(system.p_min - pg, 0.0)
    above = np.maximum(pg - system.p_max, 0.0)
    return Violations(
        gen_violation=float(np.sum(below) + np.sum(above)),
        balance_violation=abs(dispatch.total - dispatch.pd),
    )
