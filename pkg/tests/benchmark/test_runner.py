import json
import logging

import pytest

from dispatchcalc.benchmark.fixtures import oracle_response, record_oracle_exchanges
from dispatchcalc.benchmark.runner import (
    BenchmarkReport,
    relative_error_pct,
    run_benchmark,
    score_dispatch,
)
from dispatchcalc.const import DEFAULT_MODELS, GA_BASELINE_MODEL, PromptStrategy
from dispatchcalc.evolution.genetic import GaConfig
from dispatchcalc.llm.backend import ModelTarget
from dispatchcalc.llm.errors import CredentialMissingError
from dispatchcalc.llm.openai import OpenAICompatibleBackend
from dispatchcalc.llm.replay import ReplayBackend, ReplayStore
from dispatchcalc.prompt.few_shot import ScenarioSpec
from dispatchcalc.prompt.parser import ParsedResponse, parse_response
from dispatchcalc.system.model import Dispatch
from dispatchcalc.system.solver import solve_ed

# Unit at bus 89 is between its limits at every evaluation demand above 3000 MW
INTERIOR_UNIT = 15


def _targets(names=DEFAULT_MODELS) -> list[ModelTarget]:
    return [ModelTarget(name=name) for name in names]


def _run(system, few_shot, store, scenario, models=DEFAULT_MODELS, **kwargs):
    kwargs.setdefault("strategies", tuple(PromptStrategy))
    return run_benchmark(
        system,
        scenario,
        _targets(models),
        backend=ReplayBackend(store),
        few_shot=few_shot,
        **kwargs,
    )


def test_perfect_answers_score_zero(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system)
    record_oracle_exchanges(system, replay_store, scenario, DEFAULT_MODELS, few_shot=few_shot)

    report = _run(system, few_shot, replay_store, scenario)

    assert len(report.results) == 80
    assert report.scored_count == 80
    assert report.failure_count == 0
    for result in report.results:
        assert result.rel_error_pct == 0
        assert result.gen_violation == 0
        assert result.balance_violation <= 1e-6
        assert result.llm_cost == result.exact_cost
    assert report.models == DEFAULT_MODELS
    assert report.strategies == tuple(PromptStrategy)
    assert sorted(report.exact_dispatches) == list(scenario.eval_pds)
    assert report.bus_ids == system.bus_ids


def test_missing_fixture_fails_one_cell(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system)
    record_oracle_exchanges(system, replay_store, scenario, DEFAULT_MODELS, few_shot=few_shot)
    lines = replay_store.path.read_text(encoding="utf-8").splitlines()
    replay_store.path.write_text("\n".join(lines[1:]) + "\n", encoding="utf-8")
    missing = json.loads(lines[0])

    report = _run(system, few_shot, ReplayStore.open(replay_store.path), scenario)

    assert report.scored_count == 79
    assert report.failure_count == 1
    (failed,) = [result for result in report.results if not result.parse_ok]
    assert failed.model == missing["model"]
    assert failed.prompt_fingerprint == missing["fingerprint"]
    assert "No recorded response" in failed.error
    assert failed.rel_error_pct is None

    summary = report.strategy_summary().set_index("strategy")
    assert summary["scored"].sum() == 79
    assert summary["failed"].sum() == 1
    assert summary["mean_rel_error_pct"].tolist() == [0, 0]


def test_injected_imbalance_is_measured(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system, eval_pds=[3747])

    def shift(pd, model, strategy, dispatch):
        pg = list(dispatch.pg)
        pg[INTERIOR_UNIT] += 10
        return Dispatch(tuple(pg), pd)

    record_oracle_exchanges(
        system, replay_store, scenario, ["o1"], few_shot=few_shot, answer=shift
    )

    report = _run(system, few_shot, replay_store, scenario, models=["o1"])

    for result in report.results:
        assert result.balance_violation == pytest.approx(10, abs=1e-6)
        assert result.gen_violation == 0
        assert result.rel_error_pct > 0


def test_results_are_in_canonical_order(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system, eval_pds=[5627, 727])
    record_oracle_exchanges(system, replay_store, scenario, ["b", "a"], few_shot=few_shot)

    report = _run(system, few_shot, replay_store, scenario, models=["b", "a"])

    keys = [(result.strategy, result.pd, result.model) for result in report.results]
    assert keys == [
        (PromptStrategy.NON_EVOLUTIONARY, 727, "b"),
        (PromptStrategy.NON_EVOLUTIONARY, 727, "a"),
        (PromptStrategy.NON_EVOLUTIONARY, 5627, "b"),
        (PromptStrategy.NON_EVOLUTIONARY, 5627, "a"),
        (PromptStrategy.EVOLUTIONARY, 727, "b"),
        (PromptStrategy.EVOLUTIONARY, 727, "a"),
        (PromptStrategy.EVOLUTIONARY, 5627, "b"),
        (PromptStrategy.EVOLUTIONARY, 5627, "a"),
    ]


def test_report_is_permutation_invariant(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system, eval_pds=[727, 3747])
    record_oracle_exchanges(system, replay_store, scenario, ["a", "b"], few_shot=few_shot)
    report = _run(system, few_shot, replay_store, scenario, models=["a", "b"])

    shuffled = BenchmarkReport(
        results=tuple(reversed(report.results)),
        models=report.models,
        strategies=report.strategies,
        exact_dispatches=report.exact_dispatches,
        bus_ids=report.bus_ids,
    )

    assert shuffled == report
    assert shuffled.violation_means().equals(report.violation_means())


def test_report_survives_json(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system, eval_pds=[727])
    record_oracle_exchanges(system, replay_store, scenario, ["a"], few_shot=few_shot)
    report = _run(system, few_shot, replay_store, scenario, models=["a", "b"])

    restored = BenchmarkReport.from_dict(json.loads(json.dumps(report.as_dict())))

    assert restored == report


def test_error_table_and_violation_means(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system, eval_pds=[727, 3747])
    record_oracle_exchanges(system, replay_store, scenario, ["a"], few_shot=few_shot)

    report = _run(system, few_shot, replay_store, scenario, models=["a", "b"])

    table = report.error_table(PromptStrategy.EVOLUTIONARY)
    assert list(table.columns) == ["a", "b"]
    assert list(table.index) == [727, 3747]
    assert table["a"].tolist() == [0, 0]
    assert table["b"].isna().all()

    means = report.violation_means().set_index("model")
    assert means.loc["a", "scored"].tolist() == [2, 2]
    assert means.loc["b", "failed"].tolist() == [2, 2]
    assert means.loc["b", "mean_gen_violation"].isna().all()


def test_constants_keep_the_error_at_zero(system, few_shot, replay_store):
    scenario = ScenarioSpec.create(system, eval_pds=[2802])
    record_oracle_exchanges(system, replay_store, scenario, ["a"], few_shot=few_shot)

    report = _run(system, few_shot, replay_store, scenario, models=["a"], include_constants=True)

    assert report.include_constants
    for result in report.results:
        assert result.exact_cost == pytest.approx(solve_ed(system, 2802).cost + 2730)
        assert result.rel_error_pct == 0


def test_ga_baseline_is_scored_under_the_evolutionary_strategy(
    system, few_shot, replay_store
):
    scenario = ScenarioSpec.create(system, eval_pds=[727, 3747])
    record_oracle_exchanges(system, replay_store, scenario, ["a"], few_shot=few_shot)

    report = _run(
        system,
        few_shot,
        replay_store,
        scenario,
        models=["a"],
        ga_config=GaConfig(generations=5),
    )

    baseline = [result for result in report.results if result.model == GA_BASELINE_MODEL]
    assert report.models == ("a", GA_BASELINE_MODEL)
    assert len(baseline) == 2
    for result in baseline:
        assert result.strategy == PromptStrategy.EVOLUTIONARY
        assert result.rel_error_pct >= 0
        assert result.balance_violation <= 1e-9
        assert result.gen_violation == 0


def test_ga_baseline_needs_the_evolutionary_strategy(system, few_shot, replay_store, caplog):
    caplog.set_level(logging.WARNING)
    scenario = ScenarioSpec.create(system, eval_pds=[727])
    record_oracle_exchanges(
        system,
        replay_store,
        scenario,
        ["a"],
        strategies=[PromptStrategy.NON_EVOLUTIONARY],
        few_shot=few_shot,
    )

    report = _run(
        system,
        few_shot,
        replay_store,
        scenario,
        models=["a"],
        strategies=[PromptStrategy.NON_EVOLUTIONARY],
        ga_config=GaConfig(generations=1),
    )

    assert report.models == ("a",)
    assert "GA baseline skipped" in caplog.text


def test_missing_credential_stops_the_run_before_any_request(system, few_shot, monkeypatch):
    monkeypatch.delenv("DISPATCHCALC_MISSING_KEY", raising=False)
    target = ModelTarget(
        name="o1", endpoint="http://127.0.0.1:9", api_key_env="DISPATCHCALC_MISSING_KEY"
    )

    with pytest.raises(CredentialMissingError):
        run_benchmark(
            system,
            ScenarioSpec.create(system, eval_pds=[727]),
            [target],
            tuple(PromptStrategy),
            OpenAICompatibleBackend(),
            few_shot=few_shot,
        )


def test_score_unparsable_answer(system):
    exact = solve_ed(system, 727)

    result = score_dispatch(
        system,
        parse_response("I am not sure.", 19, 727),
        exact,
        "o1",
        PromptStrategy.NON_EVOLUTIONARY,
    )

    assert not result.parse_ok
    assert result.exact_cost == exact.cost
    assert result.llm_cost is None
    assert result.gen_violation is None


def test_score_ignores_the_claimed_cost(system):
    exact = solve_ed(system, 727)
    raw = oracle_response(exact.dispatch, 1.0)

    result = score_dispatch(
        system, parse_response(raw, 19, 727), exact, "o1", PromptStrategy.EVOLUTIONARY
    )

    assert result.parsed.claimed_cost == 1.0
    assert result.llm_cost == exact.cost
    assert result.rel_error_pct == 0


def test_score_measures_limit_violations(system):
    exact = solve_ed(system, 727)
    pg = list(exact.dispatch.pg)
    pg[0] -= 20
    pg[INTERIOR_UNIT] += 20
    parsed = ParsedResponse(dispatch=Dispatch(tuple(pg), 727))

    result = score_dispatch(system, parsed, exact, "o1", PromptStrategy.EVOLUTIONARY)

    assert result.gen_violation == pytest.approx(20)
    assert result.balance_violation == pytest.approx(0, abs=1e-6)


@pytest.mark.parametrize(
    "cost,exact_cost,expected",
    [(101, 100, 1), (99, 100, 1), (100, 100, 0), (0, 0, 0)],
)
def test_relative_error_pct(cost, exact_cost, expected):
    assert relative_error_pct(cost, exact_cost) == pytest.approx(expected)


def test_relative_error_against_a_free_optimum_is_undefined():
    assert relative_error_pct(1, 0) is None
