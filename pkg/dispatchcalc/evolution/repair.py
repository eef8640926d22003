from __future__ import annotations

import logging
import math

import numpy as np

from ..const import REPAIR_TOL
from ..errors import InfeasibleDemandError
from ..system.model import Dispatch, PowerSystem

MAX_REPAIR_ROUNDS = 50

_LOGGER = logging.getLogger(__name__)


def repair_balance(
    dispatch: Dispatch, system: PowerSystem, tol: float = REPAIR_TOL
) -> Dispatch:
    """
    Move a dispatch onto the power balance Σpg = pd while keeping every unit inside its box.

    A deficit is spread over the units in proportion to their headroom up to p_max,
    a surplus in proportion to their room down to p_min. Rounds repeat until the
    mismatch is within tol.
    """
    system.check_dispatch(dispatch)
    pd = dispatch.pd
    if not system.is_feasible_demand(pd):
        raise InfeasibleDemandError(pd, system.pd_min, system.pd_max)

    original = dispatch.as_array()
    pg = np.clip(original, system.p_min, system.p_max)
    if np.array_equal(pg, original) and abs(math.fsum(pg) - pd) <= tol:
        return dispatch

    for _ in range(MAX_REPAIR_ROUNDS):
        imbalance = math.fsum(pg) - pd
        if abs(imbalance) <= tol:
            break
        if imbalance < 0:
            room = system.p_max - pg
        else:
            room = pg - system.p_min
        total_room = math.fsum(room)
        if total_room <= 0:
            break
        share = min(abs(imbalance) / total_room, 1.0)
        pg = np.clip(pg - math.copysign(share, imbalance) * room, system.p_min, system.p_max)

    pg = _settle_leftover(pg, pd, system)
    return Dispatch.from_array(pg, pd)


def _settle_leftover(pg: np.ndarray, pd: float, system: PowerSystem) -> np.ndarray:
    """Assign the last floating point residue to units in index order"""
    leftover = pd - math.fsum(pg)
    if leftover == 0:
        return pg
    pg = pg.copy()
    for index in range(len(pg)):
        adjusted = min(max(pg[index] + leftover, system.p_min[index]), system.p_max[index])
        leftover -= adjusted - pg[index]
        pg[index] = adjusted
        if leftover == 0:
            break
    return pg


def random_feasible_dispatch(
    system: PowerSystem, pd: float, rng: np.random.Generator
) -> Dispatch:
    """Draw a uniform point in the unit boxes and repair it onto the balance"""
    pg = rng.uniform(system.p_min, system.p_max)
    return repair_balance(Dispatch.from_array(pg, pd), system)
