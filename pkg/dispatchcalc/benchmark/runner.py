from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import pandas

from .. import config
from ..const import GA_BASELINE_MODEL, PromptStrategy
from ..evolution.genetic import GaConfig, evolve
from ..llm.backend import LlmBackend, ModelTarget
from ..llm.errors import LlmError
from ..prompt.few_shot import FewShotSet, ScenarioSpec, build_few_shot_set
from ..prompt.parser import ParsedResponse, parse_response
from ..prompt.template import PromptBundle, render_prompt
from ..system.cost import total_cost, violations
from ..system.model import Dispatch, EdSolution, PowerSystem
from ..system.solver import solve_ed

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioResult:
    """Score of one (demand, model, strategy) cell. Metric fields are None when parsing failed."""

    pd: float
    model: str
    strategy: PromptStrategy
    parsed: ParsedResponse
    exact_cost: float
    llm_cost: float | None = None
    rel_error_pct: float | None = None
    gen_violation: float | None = None
    balance_violation: float | None = None
    prompt_fingerprint: str = ""
    latency_s: float | None = None
    error: str | None = None

    @property
    def parse_ok(self) -> bool:
        return self.parsed.ok

    def as_dict(self) -> dict:
        return {
            "pd": self.pd,
            "model": self.model,
            "strategy": self.strategy.value,
            "parse_ok": self.parse_ok,
            "exact_cost": self.exact_cost,
            "llm_cost": self.llm_cost,
            "rel_error_pct": self.rel_error_pct,
            "gen_violation": self.gen_violation,
            "balance_violation": self.balance_violation,
            "prompt_fingerprint": self.prompt_fingerprint,
            "latency_s": self.latency_s,
            "error": self.error,
            "parsed": self.parsed.as_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> ScenarioResult:
        parsed = data["parsed"]
        dispatch = None
        if parsed.get("pg") is not None:
            dispatch = Dispatch(tuple(parsed["pg"]), data["pd"])
        return cls(
            pd=float(data["pd"]),
            model=data["model"],
            strategy=PromptStrategy(data["strategy"]),
            parsed=ParsedResponse(
                dispatch=dispatch,
                claimed_cost=parsed.get("claimed_cost"),
                diagnostics=tuple(parsed.get("diagnostics", ())),
                vector_lengths=tuple(parsed.get("vector_lengths", ())),
            ),
            exact_cost=float(data["exact_cost"]),
            llm_cost=data.get("llm_cost"),
            rel_error_pct=data.get("rel_error_pct"),
            gen_violation=data.get("gen_violation"),
            balance_violation=data.get("balance_violation"),
            prompt_fingerprint=data.get("prompt_fingerprint", ""),
            latency_s=data.get("latency_s"),
            error=data.get("error"),
        )


@dataclass(frozen=True)
class BenchmarkReport:
    """
    All scored cells of a run in canonical order (strategy, demand, model).

    Means are taken over the cells that could be parsed; the number of scored and
    failed cells is always reported next to them.
    """

    results: tuple[ScenarioResult, ...]
    models: tuple[str, ...]
    strategies: tuple[PromptStrategy, ...]
    exact_dispatches: dict[float, tuple[float, ...]] = field(default_factory=dict)
    bus_ids: tuple[int, ...] = ()
    include_constants: bool = False

    def __post_init__(self) -> None:
        models = list(self.models)
        for result in self.results:
            if result.model not in models:
                models.append(result.model)
        strategies = list(PromptStrategy(strategy) for strategy in self.strategies)
        for result in self.results:
            if result.strategy not in strategies:
                strategies.append(result.strategy)
        object.__setattr__(self, "models", tuple(models))
        object.__setattr__(self, "strategies", tuple(strategies))
        object.__setattr__(
            self,
            "results",
            tuple(
                sorted(
                    self.results,
                    key=lambda result: (
                        strategies.index(result.strategy),
                        result.pd,
                        models.index(result.model),
                    ),
                )
            ),
        )

    @property
    def scored_count(self) -> int:
        return sum(1 for result in self.results if result.parse_ok)

    @property
    def failure_count(self) -> int:
        return len(self.results) - self.scored_count

    def frame(self) -> pandas.DataFrame:
        columns = [
            "strategy",
            "pd",
            "model",
            "parse_ok",
            "exact_cost",
            "llm_cost",
            "rel_error_pct",
            "gen_violation",
            "balance_violation",
        ]
        rows = [
            {
                "strategy": result.strategy.value,
                "pd": result.pd,
                "model": result.model,
                "parse_ok": result.parse_ok,
                "exact_cost": result.exact_cost,
                "llm_cost": result.llm_cost,
                "rel_error_pct": result.rel_error_pct,
                "gen_violation": result.gen_violation,
                "balance_violation": result.balance_violation,
            }
            for result in self.results
        ]
        frame = pandas.DataFrame(rows, columns=columns)
        for column in columns[4:]:
            frame[column] = frame[column].astype(float)
        return frame

    def error_table(self, strategy: PromptStrategy) -> pandas.DataFrame:
        """Relative cost error (%) with one row per demand and one column per model"""
        frame = self.frame()
        frame = frame[frame["strategy"] == PromptStrategy(strategy).value]
        table = frame.pivot(index="pd", columns="model", values="rel_error_pct")
        table = table.reindex(
            columns=[model for model in self.models if model in table.columns]
        )
        table.columns.name = None
        return table.sort_index()

    def violation_means(self) -> pandas.DataFrame:
        """Mean generation and balance violation per (strategy, model) over the parsed cells"""
        frame = self.frame()
        rows = []
        for strategy in self.strategies:
            for model in self.models:
                cells = frame[(frame["strategy"] == strategy.value) & (frame["model"] == model)]
                if cells.empty:
                    continue
                scored = cells[cells["parse_ok"].astype(bool)]
                rows.append(
                    {
                        "strategy": strategy.value,
                        "model": model,
                        "mean_gen_violation": scored["gen_violation"].mean(),
                        "mean_balance_violation": scored["balance_violation"].mean(),
                        "scored": len(scored),
                        "failed": len(cells) - len(scored),
                        "total": len(cells),
                    }
                )
        return pandas.DataFrame(
            rows,
            columns=[
                "strategy",
                "model",
                "mean_gen_violation",
                "mean_balance_violation",
                "scored",
                "failed",
                "total",
            ],
        )

    def strategy_summary(self) -> pandas.DataFrame:
        frame = self.frame()
        rows = []
        for strategy in self.strategies:
            cells = frame[frame["strategy"] == strategy.value]
            scored = cells[cells["parse_ok"].astype(bool)]
            rows.append(
                {
                    "strategy": strategy.value,
                    "mean_rel_error_pct": scored["rel_error_pct"].mean(),
                    "max_rel_error_pct": scored["rel_error_pct"].max(),
                    "scored": len(scored),
                    "failed": len(cells) - len(scored),
                    "total": len(cells),
                }
            )
        return pandas.DataFrame(
            rows,
            columns=[
                "strategy",
                "mean_rel_error_pct",
                "max_rel_error_pct",
                "scored",
                "failed",
                "total",
            ],
        )

    def as_dict(self) -> dict:
        return {
            "models": list(self.models),
            "strategies": [strategy.value for strategy in self.strategies],
            "include_constants": self.include_constants,
            "bus_ids": list(self.bus_ids),
            "exact_dispatches": [
                {"pd": demand, "pg": list(pg)}
                for demand, pg in sorted(self.exact_dispatches.items())
            ],
            "results": [result.as_dict() for result in self.results],
        }

    @classmethod
    def from_dict(cls, data: dict) -> BenchmarkReport:
        return cls(
            results=tuple(ScenarioResult.from_dict(result) for result in data["results"]),
            models=tuple(data.get("models", ())),
            strategies=tuple(PromptStrategy(value) for value in data.get("strategies", ())),
            exact_dispatches={
                float(entry["pd"]): tuple(entry["pg"])
                for entry in data.get("exact_dispatches", ())
            },
            bus_ids=tuple(data.get("bus_ids", ())),
            include_constants=data.get("include_constants", False),
        )


def score_dispatch(
    system: PowerSystem,
    parsed: ParsedResponse,
    exact: EdSolution,
    model: str,
    strategy: PromptStrategy,
    include_constants: bool = False,
    **details,
) -> ScenarioResult:
    """Score a parsed answer against the exact optimum. The model's own cost claim is ignored."""
    pd = exact.dispatch.pd
    if not parsed.ok:
        return ScenarioResult(
            pd=pd,
            model=model,
            strategy=strategy,
            parsed=parsed,
            exact_cost=exact.cost,
            **details,
        )

    dispatch = Dispatch(parsed.dispatch.pg, pd)
    llm_cost = total_cost(dispatch, system, include_constants)
    gen_violation, balance_violation = violations(dispatch, system)
    return ScenarioResult(
        pd=pd,
        model=model,
        strategy=strategy,
        parsed=parsed,
        exact_cost=exact.cost,
        llm_cost=llm_cost,
        rel_error_pct=relative_error_pct(llm_cost, exact.cost),
        gen_violation=gen_violation,
        balance_violation=balance_violation,
        **details,
    )


def relative_error_pct(cost: float, exact_cost: float) -> float | None:
    """Undefined (None) when the exact cost is zero and the answer costs anything"""
    if exact_cost == 0:
        return 0.0 if cost == 0 else None
    return abs(cost - exact_cost) / abs(exact_cost) * 100


def run_benchmark(
    system: PowerSystem,
    scenario: ScenarioSpec,
    models: Sequence[ModelTarget],
    strategies: Sequence[PromptStrategy],
    backend: LlmBackend,
    include_constants: bool = False,
    ga_config: GaConfig | None = None,
    few_shot: FewShotSet | None = None,
    max_in_flight: int = config.LLM_MAX_IN_FLIGHT,
) -> BenchmarkReport:
    """
    Query every model with every prompt strategy for every evaluation demand and score
    the answers. A failing cell is recorded in the report and never stops the run.

    With ga_config set, the classical genetic algorithm is scored as an extra model
    under the evolutionary strategy.
    """
    models = list(models)
    strategies = [PromptStrategy(strategy) for strategy in strategies]
    backend.check_ready(models)

    few_shot = few_shot or build_few_shot_set(system, scenario.few_shot_pds)
    exact = {
        pd: solve_ed(system, pd, include_constants=include_constants)
        for pd in scenario.eval_pds
    }
    bundles = {
        (pd, strategy): render_prompt(system, few_shot, pd, strategy)
        for strategy in strategies
        for pd in scenario.eval_pds
    }
    cells = [
        (pd, target, strategy)
        for strategy in strategies
        for pd in scenario.eval_pds
        for target in models
    ]
    _LOGGER.info(
        "Running %d cells (%d demands, %d models, %d strategies)",
        len(cells),
        len(scenario.eval_pds),
        len(models),
        len(strategies),
    )

    def run_cell(cell: tuple[float, ModelTarget, PromptStrategy]) -> ScenarioResult:
        pd, target, strategy = cell
        return _run_cell(
            system,
            bundles[(pd, strategy)],
            target,
            backend,
            exact[pd],
            include_constants,
        )

    with ThreadPoolExecutor(max_workers=max(max_in_flight, 1)) as executor:
        results = list(executor.map(run_cell, cells))

    model_names = [target.name for target in models]
    if ga_config is not None:
        if PromptStrategy.EVOLUTIONARY in strategies:
            results += _run_ga_baseline(
                system, scenario, few_shot, exact, ga_config, include_constants
            )
            model_names.append(GA_BASELINE_MODEL)
        else:
            _LOGGER.warning(
                "GA baseline skipped, the evolutionary strategy is not part of the run"
            )

    report = BenchmarkReport(
        results=tuple(results),
        models=tuple(model_names),
        strategies=tuple(strategies),
        exact_dispatches={pd: solution.dispatch.pg for pd, solution in exact.items()},
        bus_ids=system.bus_ids,
        include_constants=include_constants,
    )
    _LOGGER.info(
        "Scored %d of %d cells, %d failed",
        report.scored_count,
        len(report.results),
        report.failure_count,
    )
    return report


def _run_cell(
    system: PowerSystem,
    bundle: PromptBundle,
    target: ModelTarget,
    backend: LlmBackend,
    exact: EdSolution,
    include_constants: bool,
) -> ScenarioResult:
    try:
        exchange = backend.complete(bundle, target)
    except LlmError as err:
        _LOGGER.warning(
            "No answer from %s for %g MW (%s): %s",
            target.name,
            bundle.target_pd,
            bundle.strategy.value,
            err,
        )
        return score_dispatch(
            system,
            ParsedResponse(dispatch=None, diagnostics=(str(err),)),
            exact,
            target.name,
            bundle.strategy,
            include_constants,
            prompt_fingerprint=bundle.fingerprint,
            error=str(err),
        )

    parsed = parse_response(exchange.raw_response, system.n_units, bundle.target_pd)
    if not parsed.ok:
        _LOGGER.warning(
            "Could not parse the answer of %s for %g MW (%s): %s",
            target.name,
            bundle.target_pd,
            bundle.strategy.value,
            "; ".join(parsed.diagnostics),
        )
    return score_dispatch(
        system,
        parsed,
        exact,
        target.name,
        bundle.strategy,
        include_constants,
        prompt_fingerprint=bundle.fingerprint,
        latency_s=exchange.latency_s,
    )


def _run_ga_baseline(
    system: PowerSystem,
    scenario: ScenarioSpec,
    few_shot: FewShotSet,
    exact: dict[float, EdSolution],
    ga_config: GaConfig,
    include_constants: bool,
) -> list[ScenarioResult]:
    results = []
    for pd in scenario.eval_pds:
        outcome = evolve(system, pd, few_shot.dispatches, ga_config)
        parsed = ParsedResponse(dispatch=outcome.best, claimed_cost=outcome.best_cost)
        results.append(
            score_dispatch(
                system,
                parsed,
                exact[pd],
                GA_BASELINE_MODEL,
                PromptStrategy.EVOLUTIONARY,
                include_constants,
            )
        )
    return results
