from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from ..const import BALANCE_TOL, KKT_TOL, Binding
from ..errors import DispatchCalcError, InfeasibleDemandError
from .cost import total_cost
from .model import Dispatch, EdSolution, PowerSystem

MAX_ITERATIONS = 200
# Relative bracket width at which bisection stops narrowing lambda
LAMBDA_EPS = 1e-15

_LOGGER = logging.getLogger(__name__)


class KktResiduals(NamedTuple):
    """Worst violation of every optimality condition of an ED solution"""

    balance: float
    bounds: float
    stationarity: float
    upper: float
    lower: float

    def is_satisfied(self, balance_tol: float = BALANCE_TOL, kkt_tol: float = KKT_TOL) -> bool:
        return (
            self.balance <= balance_tol
            and self.bounds == 0.0
            and self.stationarity <= kkt_tol
            and self.upper <= kkt_tol
            and self.lower <= kkt_tol
        )


def solve_ed(
    system: PowerSystem,
    pd: float,
    include_constants: bool = False,
    balance_tol: float = BALANCE_TOL,
) -> EdSolution:
    """
    Solve the lossless economic dispatch exactly by equal incremental cost.

    Every unit follows pg_i(lambda) = clamp((lambda - b_i) / (2 a_i), p_min_i, p_max_i);
    lambda is bisected until its bracket collapses; the outputs at both ends of the
    bracket are blended to meet pd, and the dispatch is accepted when it balances
    within balance_tol.
    """
    if not system.is_feasible_demand(pd, balance_tol):
        raise InfeasibleDemandError(pd, system.pd_min, system.pd_max)

    iterations = 0
    if pd <= system.pd_min:
        pg = system.p_min.copy()
        marginal_price = float(np.min(system.b + 2 * system.a * system.p_min))
    elif pd >= system.pd_max:
        pg = system.p_max.copy()
        marginal_price = float(np.max(system.b + 2 * system.a * system.p_max))
    else:
        pg, marginal_price, iterations = _bisect(system, pd, balance_tol)

    dispatch = Dispatch.from_array(pg, pd)
    solution = EdSolution(
        dispatch=dispatch,
        cost=total_cost(dispatch, system, include_constants),
        marginal_price=marginal_price,
        include_constants=include_constants,
        iterations=iterations,
        binding=binding_of(pg, system),
    )
    _LOGGER.debug(
        "Solved ED for %g MW: cost=%.4f lambda=%.6f after %d iterations",
        pd,
        solution.cost,
        marginal_price,
        iterations,
    )
    return solution


def dispatch_at(system: PowerSystem, marginal_price: float) -> np.ndarray:
    """Unit outputs at a given lambda. Units with a = 0 sit at p_min up to and including lambda = b."""
    a, b = system.a, system.b
    quadratic = a > 0
    denominator = np.where(quadratic, 2 * a, 1.0)
    unconstrained = np.where(
        quadratic,
        (marginal_price - b) / denominator,
        np.where(marginal_price > b, system.p_max, system.p_min),
    )
    return np.clip(unconstrained, system.p_min, system.p_max)


def _bisect(
    system: PowerSystem, pd: float, balance_tol: float
) -> tuple[np.ndarray, float, int]:
    # Total output is p_min at low and p_max just above high, so pd is bracketed.
    low = float(np.min(system.b))
    high = float(np.max(system.b + 2 * system.a * system.p_max)) + 1.0
    pg_low, pg_high = dispatch_at(system, low), dispatch_at(system, high)
    total_low, total_high = math.fsum(pg_low), math.fsum(pg_high)

    iterations = 0
    while iterations < MAX_ITERATIONS and high - low > LAMBDA_EPS * max(1.0, abs(high)):
        middle = 0.5 * (low + high)
        if not low < middle < high:
            break
        iterations += 1
        pg = dispatch_at(system, middle)
        total = math.fsum(pg)
        if total == pd:
            return _settle(system, pg, pd, balance_tol), middle, iterations
        if total < pd:
            low, pg_low, total_low = middle, pg, total
        else:
            high, pg_high, total_high = middle, pg, total

    # Units whose output still moves inside the collapsed bracket (flat or nearly
    # flat cost) share the remaining demand in proportion to that movement.
    span = total_high - total_low
    share = min(max((pd - total_low) / span, 0.0), 1.0) if span > 0 else 0.0
    pg = pg_low + share * (pg_high - pg_low)

    flat = (system.a == 0) & (system.b >= low) & (system.b <= high)
    marginal_price = float(np.min(system.b[flat])) if np.any(flat) else 0.5 * (low + high)
    return _settle(system, pg, pd, balance_tol), marginal_price, iterations


def _settle(
    system: PowerSystem, pg: np.ndarray, pd: float, balance_tol: float
) -> np.ndarray:
    """Put the floating point leftover on interior units, largest room first."""
    pg = np.clip(pg, system.p_min, system.p_max)
    leftover = pd - math.fsum(pg)
    if leftover == 0:
        return pg

    room = system.p_max - pg if leftover > 0 else pg - system.p_min
    candidates = np.flatnonzero((pg > system.p_min) & (pg < system.p_max))
    if not candidates.size:
        candidates = np.arange(len(pg))
    for index in sorted(candidates, key=lambda index: -room[index]):
        leftover = pd - math.fsum(pg)
        if leftover == 0:
            break
        pg[index] = min(max(pg[index] + leftover, system.p_min[index]), system.p_max[index])

    leftover = pd - math.fsum(pg)
    if abs(leftover) > balance_tol:
        raise DispatchCalcError(
            f"Lambda bisection did not reach power balance for {pd:g} MW "
            f"(residual {leftover:.3g} MW)"
        )
    return pg


def binding_of(pg: np.ndarray, system: PowerSystem) -> tuple[Binding, ...]:
    binding = []
    for value, p_min, p_max in zip(pg, system.p_min, system.p_max):
        if value <= p_min:
            binding.append(Binding.MIN)
        elif value >= p_max:
            binding.append(Binding.MAX)
        else:
            binding.append(Binding.INTERIOR)
    return tuple(binding)


def kkt_residuals(solution: EdSolution, system: PowerSystem) -> KktResiduals:
    """
    Check the optimality certificate of a solution.

    Interior units must share the marginal price, units at p_max must not be
    more expensive at the margin and units at p_min must not be cheaper.
    Units with p_min == p_max are fixed and carry no condition.
    """
    system.check_dispatch(solution.dispatch)
    pg = solution.dispatch.as_array()
    marginal = system.b + 2 * system.a * pg
    price = solution.marginal_price

    free = system.p_min < system.p_max
    at_min = free & (pg <= system.p_min)
    at_max = free & (pg >= system.p_max)
    interior = free & ~at_min & ~at_max

    below = np.maximum(system.p_min - pg, 0.0)
    above = np.maximum(pg - system.p_max, 0.0)

    return KktResiduals(
        balance=abs(solution.dispatch.total - solution.dispatch.pd),
        bounds=float(np.sum(below) + np.sum(above)),
        stationarity=_worst(np.abs(marginal - price)[interior]),
        upper=_worst(np.maximum(marginal - price, 0.0)[at_max]),
        lower=_worst(np.maximum(price - marginal, 0.0)[at_min]),
    )


def _worst(values: np.ndarray) -> float:
    return float(np.max(values)) if values.size else 0.0
