from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from ..const import REPAIR_TOL, CrossoverMode, SelectionSource
from ..errors import GaConfigurationError, InfeasibleDemandError
from ..system.cost import total_cost, violations
from ..system.model import Dispatch, PowerSystem
from .repair import repair_balance

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    """
    Settings of the classical genetic algorithm.

    mutation_sigma is the standard deviation of the Gaussian mutation as a
    fraction of each unit's range (p_max - p_min); mutation_rate is the
    probability that a single gene is mutated.
    """

    population_target: int = 10
    generations: int = 200
    mutation_sigma: float = 0.05
    mutation_rate: float = 0.1
    crossover_mode: CrossoverMode = CrossoverMode.UNIFORM
    seed: int = 42
    repair: bool = True
    elitism: bool = True
    selection_source: SelectionSource = SelectionSource.PARENTS
    include_constants: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "crossover_mode", CrossoverMode(self.crossover_mode))
        object.__setattr__(
            self, "selection_source", SelectionSource(self.selection_source)
        )
        if self.population_target < 2:
            raise GaConfigurationError("population_target must be at least 2")
        if self.generations < 0:
            raise GaConfigurationError("generations must not be negative")
        if not 0 < self.mutation_sigma <= 1:
            raise GaConfigurationError("mutation_sigma must be in (0, 1]")
        if not 0 <= self.mutation_rate <= 1:
            raise GaConfigurationError("mutation_rate must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise GaConfigurationError("seed must be an unsigned 64-bit integer")

    @classmethod
    def single_pass(cls, **overrides) -> GaConfig:
        """One pass producing ten candidates from the provided dispatches, as the prompt asks"""
        settings = dict(
            population_target=10,
            generations=1,
            elitism=False,
            selection_source=SelectionSource.PARENTS,
        )
        settings.update(overrides)
        return cls(**settings)

    def with_seed(self, seed: int) -> GaConfig:
        return replace(self, seed=seed)

    def as_dict(self) -> dict:
        data = asdict(self)
        data["crossover_mode"] = self.crossover_mode.value
        data["selection_source"] = self.selection_source.value
        return data


@dataclass(frozen=True)
class GaResult:
    best: Dispatch
    best_cost: float
    history: tuple[float, ...]
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "pd": self.best.pd,
            "best_cost": self.best_cost,
            "pg": list(self.best.pg),
            "history": list(self.history),
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class _Candidate:
    dispatch: Dispatch
    cost: float
    violation: float
    # Values handed to crossover: a parent as given, a child as repaired
    genes: np.ndarray = field(compare=False, repr=False)

    @property
    def feasible(self) -> bool:
        return self.violation <= REPAIR_TOL

    def rank(self) -> tuple[bool, float, float]:
        if self.feasible:
            return (False, 0.0, self.cost)
        return (True, self.violation, self.cost)


def evolve(
    system: PowerSystem,
    pd: float,
    parents: Sequence[Dispatch],
    config: GaConfig | None = None,
) -> GaResult:
    """
    Search a dispatch for pd by selection, crossover and mutation of the given dispatches.

    Every generation draws two members of the mating pool (with replacement), combines
    them gene by gene, mutates the offspring and (optionally) repairs it to exact power
    balance, until population_target candidates exist. Parents are scored after repair to
    pd but crossover combines their values as given. The mating pool is either the
    provided parents (plus the best candidate so far when elitism is on) or the surviving
    population.
    """
    config = config or GaConfig()
    if not parents:
        raise GaConfigurationError("At least one parent dispatch is required")
    for parent in parents:
        system.check_dispatch(parent)
    if not system.is_feasible_demand(pd):
        raise InfeasibleDemandError(pd, system.pd_min, system.pd_max)

    rng = np.random.default_rng(config.seed)
    evaluations = 0

    def evaluate(values: np.ndarray, keep_genes: bool = False) -> _Candidate:
        nonlocal evaluations
        evaluations += 1
        dispatch = Dispatch.from_array(values, pd)
        if config.repair:
            dispatch = repair_balance(dispatch, system)
        gen_violation, balance_violation = violations(dispatch, system)
        return _Candidate(
            dispatch=dispatch,
            cost=total_cost(dispatch, system, config.include_constants),
            violation=gen_violation + balance_violation,
            genes=values if keep_genes else dispatch.as_array(),
        )

    parent_pool = [evaluate(parent.as_array(), keep_genes=True) for parent in parents]
    population = sorted(parent_pool, key=_Candidate.rank)
    best = population[0]
    history = [best.cost]
    _LOGGER.debug(
        "GA start for %g MW with %d parents, best cost %.4f", pd, len(parents), best.cost
    )

    spread = config.mutation_sigma * (system.p_max - system.p_min)
    for generation in range(1, config.generations + 1):
        if config.selection_source == SelectionSource.POPULATION:
            mating_pool = population
        elif config.elitism:
            mating_pool = parent_pool + [best]
        else:
            mating_pool = parent_pool

        children = []
        for _ in range(config.population_target):
            first, second = rng.choice(len(mating_pool), size=2)
            child = _crossover(
                mating_pool[first].genes,
                mating_pool[second].genes,
                config.crossover_mode,
                rng,
            )
            child = _mutate(child, spread, config.mutation_rate, rng)
            child = np.clip(child, system.p_min, system.p_max)
            children.append(evaluate(child))

        children.sort(key=_Candidate.rank)
        if config.elitism:
            population = sorted(population + children, key=_Candidate.rank)[
                : config.population_target
            ]
            if children[0].rank() < best.rank():
                best = children[0]
        else:
            population = children
            best = children[0]
        history.append(best.cost)
        _LOGGER.debug("GA generation %d: best cost %.4f", generation, best.cost)

    if not best.feasible:
        _LOGGER.warning(
            "GA for %g MW found no feasible candidate, least violation %.6f MW",
            pd,
            best.violation,
        )

    return GaResult(
        best=best.dispatch,
        best_cost=total_cost(best.dispatch, system, config.include_constants),
        history=tuple(history),
        evaluations=evaluations,
    )


def _crossover(
    first: np.ndarray,
    second: np.ndarray,
    mode: CrossoverMode,
    rng: np.random.Generator,
) -> np.ndarray:
    if mode == CrossoverMode.SINGLE_POINT:
        point = int(rng.integers(1, len(first))) if len(first) > 1 else 0
        return np.concatenate([first[:point], second[point:]])
    mask = rng.random(len(first)) < 0.5
    return np.where(mask, first, second)


def _mutate(
    values: np.ndarray,
    spread: np.ndarray,
    rate: float,
    rng: np.random.Generator,
) -> np.ndarray:
    mask = rng.random(len(values)) < rate
    return values + mask * rng.normal(0.0, 1.0, len(values)) * spread
