from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from ..const import DEFAULT_EVAL_PDS, DEFAULT_FEW_SHOT_PDS
from ..errors import FewShotError, InfeasibleDemandError, ScenarioConfigurationError
from ..system.cost import total_cost
from ..system.model import Dispatch, PowerSystem
from ..system.solver import solve_ed

# Maximum |sum(pg) - pd| of an in-context example
FEW_SHOT_BALANCE_TOL = 1e-6
PROMPT_DECIMALS = 2

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class FewShotExample:
    pd: float
    cost: float
    dispatch: Dispatch


@dataclass(frozen=True)
class FewShotSet:
    """Solved (pd, cost, dispatch) triples shown to the model as in-context examples"""

    examples: tuple[FewShotExample, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "examples", tuple(self.examples))
        if not self.examples:
            raise FewShotError("A few-shot set needs at least one example")
        for example in self.examples:
            mismatch = abs(example.dispatch.total - example.pd)
            if mismatch > FEW_SHOT_BALANCE_TOL:
                raise FewShotError(
                    f"Example for {example.pd:g} MW does not sum to its demand (off by {mismatch:g} MW)"
                )
        pds = self.pds
        if any(later <= earlier for earlier, later in zip(pds, pds[1:])):
            raise FewShotError(f"Few-shot demands must be strictly increasing, got {list(pds)}")

    @classmethod
    def from_dispatches(
        cls,
        system: PowerSystem,
        dispatches: Iterable[Dispatch],
        include_constants: bool = False,
    ) -> FewShotSet:
        """Use dispatches taken from elsewhere (e.g. a previously published prompt) as examples"""
        return cls(
            tuple(
                FewShotExample(
                    pd=dispatch.pd,
                    cost=total_cost(dispatch, system, include_constants),
                    dispatch=dispatch,
                )
                for dispatch in dispatches
            )
        )

    @property
    def pds(self) -> tuple[float, ...]:
        return tuple(example.pd for example in self.examples)

    @property
    def dispatches(self) -> tuple[Dispatch, ...]:
        return tuple(example.dispatch for example in self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[FewShotExample]:
        return iter(self.examples)


@dataclass(frozen=True)
class ScenarioSpec:
    """Demands used as in-context examples and the disjoint demands the models are evaluated on"""

    few_shot_pds: tuple[float, ...]
    eval_pds: tuple[float, ...]

    @classmethod
    def create(
        cls,
        system: PowerSystem,
        few_shot_pds: Sequence[float] = DEFAULT_FEW_SHOT_PDS,
        eval_pds: Sequence[float] = DEFAULT_EVAL_PDS,
    ) -> ScenarioSpec:
        few_shot = tuple(float(pd) for pd in few_shot_pds)
        evaluation = tuple(float(pd) for pd in eval_pds)
        if not few_shot:
            raise ScenarioConfigurationError("few_shot_pds must not be empty")
        if not evaluation:
            raise ScenarioConfigurationError("eval_pds must not be empty")
        if len(set(evaluation)) != len(evaluation):
            raise ScenarioConfigurationError(f"eval_pds contains duplicates: {list(evaluation)}")
        for pd in few_shot + evaluation:
            if not system.is_feasible_demand(pd):
                raise InfeasibleDemandError(pd, system.pd_min, system.pd_max)
        overlap = sorted(set(few_shot) & set(evaluation))
        if overlap:
            raise ScenarioConfigurationError(
                f"Evaluation demands must differ from the few-shot demands, both contain {overlap}"
            )
        return cls(few_shot_pds=few_shot, eval_pds=evaluation)


def random_eval_pds(
    system: PowerSystem,
    count: int,
    rng: np.random.Generator,
    exclude: Iterable[float] = (),
) -> tuple[float, ...]:
    """Draw distinct whole-MW demands uniformly between pd_min and pd_max, sorted ascending"""
    low = math.ceil(system.pd_min)
    high = math.floor(system.pd_max)
    excluded = {float(pd) for pd in exclude}
    candidates = [pd for pd in range(low, high + 1) if float(pd) not in excluded]
    if count > len(candidates):
        raise ScenarioConfigurationError(
            f"Cannot draw {count} distinct demands between {low} and {high} MW"
        )
    drawn = rng.choice(len(candidates), size=count, replace=False)
    return tuple(sorted(float(candidates[index]) for index in drawn))


def round_dispatch(
    dispatch: Dispatch, system: PowerSystem, decimals: int = PROMPT_DECIMALS
) -> Dispatch:
    """
    Round every unit output to the given number of decimals while keeping the exact
    total and the unit limits.

    Outputs are floored on the decimal grid, then the missing steps are handed out by
    largest remainder (ties by ascending index).
    """
    system.check_dispatch(dispatch)
    scale = 10**decimals
    scaled = dispatch.as_array() * scale
    low = np.ceil(system.p_min * scale - 1e-9)
    high = np.floor(system.p_max * scale + 1e-9)
    steps = np.clip(np.floor(scaled + 1e-9), low, high)
    remainder = scaled - steps

    shortfall = int(round(dispatch.pd * scale)) - int(round(float(np.sum(steps))))
    if shortfall:
        direction = 1 if shortfall > 0 else -1
        order = np.argsort(-direction * remainder, kind="stable")
        while shortfall:
            moved = False
            for index in order:
                if shortfall == 0:
                    break
                if low[index] <= steps[index] + direction <= high[index]:
                    steps[index] += direction
                    shortfall -= direction
                    moved = True
            if not moved:
                raise FewShotError(
                    f"Cannot round the dispatch for {dispatch.pd:g} MW to {decimals} decimals within the unit limits"
                )

    return Dispatch.from_array(steps / scale, dispatch.pd)


def build_few_shot_set(
    system: PowerSystem,
    pds: Sequence[float] = DEFAULT_FEW_SHOT_PDS,
    rounded: bool = True,
) -> FewShotSet:
    """
    Solve every demand exactly and keep (pd, cost without constants, dispatch).
    With rounded set, dispatches are rounded to the decimals shown in the prompt and
    the cost is that of the rounded dispatch, so the prompt stays self-consistent.
    """
    examples = []
    for pd in pds:
        solution = solve_ed(system, pd)
        dispatch = solution.dispatch
        if rounded:
            dispatch = round_dispatch(dispatch, system)
        examples.append(
            FewShotExample(pd=float(pd), cost=total_cost(dispatch, system), dispatch=dispatch)
        )
        _LOGGER.debug("Few-shot example %g MW with cost %.2f", pd, examples[-1].cost)
    return FewShotSet(tuple(examples))
