"""Replay stores holding exact-solver answers, for offline demos and tests."""

from __future__ import annotations

import logging
from typing import Callable, Sequence

from ..const import PromptStrategy
from ..llm.backend import LlmExchange, utc_timestamp
from ..llm.replay import ReplayStore
from ..prompt.few_shot import FewShotSet, ScenarioSpec, build_few_shot_set
from ..prompt.template import render_prompt
from ..system.model import Dispatch, PowerSystem
from ..system.solver import solve_ed

_LOGGER = logging.getLogger(__name__)

# Receives (pd, model, strategy, exact dispatch) and returns the dispatch to answer with
AnswerHook = Callable[[float, str, PromptStrategy, Dispatch], Dispatch]


def oracle_response(dispatch: Dispatch, cost: float) -> str:
    """A model-style answer carrying the dispatch at full precision"""
    vector = ", ".join(repr(value) for value in dispatch.pg)
    return (
        f"After evaluating the candidates, the best dispatch for PD = {dispatch.pd:g} MW is:\n"
        f"PG = [{vector}]\n"
        f"Cost = {cost:.2f}\n"
    )


def record_oracle_exchanges(
    system: PowerSystem,
    store: ReplayStore,
    scenario: ScenarioSpec,
    models: Sequence[str],
    strategies: Sequence[PromptStrategy] = tuple(PromptStrategy),
    few_shot: FewShotSet | None = None,
    answer: AnswerHook | None = None,
) -> int:
    """
    Put one exact answer per (demand, model, strategy) cell into the store.
    answer may alter the dispatch of single cells, e.g. to inject a known error.
    """
    few_shot = few_shot or build_few_shot_set(system, scenario.few_shot_pds)
    count = 0
    for pd in scenario.eval_pds:
        solution = solve_ed(system, pd)
        for strategy in strategies:
            bundle = render_prompt(system, few_shot, pd, strategy)
            for model in models:
                dispatch = solution.dispatch
                if answer is not None:
                    dispatch = answer(pd, model, PromptStrategy(strategy), dispatch)
                store.put(
                    LlmExchange(
                        prompt_fingerprint=bundle.fingerprint,
                        model=model,
                        raw_response=oracle_response(dispatch, solution.cost),
                        latency_s=0.0,
                        transport_meta={"source": "oracle"},
                        recorded_at=utc_timestamp(),
                    )
                )
                count += 1
    _LOGGER.info("Recorded %d oracle exchanges in %s", count, store.path)
    return count
