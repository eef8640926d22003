import pytest

from dispatchcalc.benchmark.run_config import load_run_config, parse_run_config
from dispatchcalc.const import (
    DEFAULT_EVAL_PDS,
    DEFAULT_FEW_SHOT_PDS,
    BackendType,
    CrossoverMode,
    PromptStrategy,
    SelectionSource,
)
from dispatchcalc.errors import RunConfigurationError, UsageError

from ..common import system_csv, write_run_config

TOML_CONFIG = """
seed = 7
backend = "live"
record = true
replay_path = "fixtures/replay.jsonl"
output_dir = "out"
eval_pds = [727, 3747]
strategies = ["evolutionary"]
ga_baseline = true

[ga]
generations = 50
crossover_mode = "single-point"
selection_source = "population"

[[models]]
name = "o3-mini"
endpoint = "https://api.example.com/v1"
api_key_env = "OPENAI_API_KEY"
max_tokens = 8000
extra = { reasoning_effort = "high" }

[[models]]
name = "deepseek-r1"
endpoint = "https://api.deepseek.example/v1"
temperature = 0.6
"""


def test_json_config_with_defaults(tmp_path):
    path = write_run_config(tmp_path)

    run_config = load_run_config(path)

    assert run_config.backend == BackendType.REPLAY
    assert run_config.replay_path == tmp_path.resolve() / "replay.jsonl"
    assert run_config.output_dir == tmp_path.resolve() / "output"
    assert run_config.system_path is None
    assert run_config.few_shot_pds == DEFAULT_FEW_SHOT_PDS
    assert run_config.eval_pds == (727.0, 3747.0)
    assert run_config.strategies == tuple(PromptStrategy)
    assert [model.name for model in run_config.models] == ["model-a", "model-b"]
    assert run_config.seed == 42
    assert run_config.ga.seed == 42
    assert not run_config.record
    assert not run_config.ga_baseline
    assert not run_config.include_constants


def test_toml_config(tmp_path):
    path = tmp_path / "bench.toml"
    path.write_text(TOML_CONFIG, encoding="utf-8")

    run_config = load_run_config(path)

    assert run_config.backend == BackendType.LIVE
    assert run_config.record
    assert run_config.replay_path == tmp_path.resolve() / "fixtures" / "replay.jsonl"
    assert run_config.strategies == (PromptStrategy.EVOLUTIONARY,)
    assert run_config.ga_baseline
    assert run_config.ga.generations == 50
    assert run_config.ga.seed == 7
    assert run_config.ga.crossover_mode == CrossoverMode.SINGLE_POINT
    assert run_config.ga.selection_source == SelectionSource.POPULATION

    o3_mini, deepseek = run_config.models
    assert o3_mini.api_key_env == "OPENAI_API_KEY"
    assert o3_mini.max_tokens == 8000
    assert o3_mini.extra == {"reasoning_effort": "high"}
    assert o3_mini.temperature == 1.0
    assert deepseek.temperature == 0.6
    assert deepseek.api_key_env is None


def test_echo_is_the_validated_config(tmp_path):
    run_config = load_run_config(write_run_config(tmp_path))

    assert run_config.echo["eval_pds"] == [727.0, 3747.0]
    assert run_config.echo["models"][0]["endpoint"] == ""
    assert run_config.echo["ga"] == {"single_pass": False}


def test_single_pass_ga_preset(tmp_path):
    run_config = load_run_config(
        write_run_config(tmp_path, ga={"single_pass": True, "seed": 3})
    )

    assert run_config.ga.generations == 1
    assert not run_config.ga.elitism
    assert run_config.ga.seed == 3


def test_constants_reach_the_ga(tmp_path):
    run_config = load_run_config(write_run_config(tmp_path, include_constants=True))

    assert run_config.ga.include_constants


def test_random_evaluation_demands(tmp_path, system):
    run_config = load_run_config(write_run_config(tmp_path, eval_pds=10, seed=5))

    scenario = run_config.scenario(system)

    assert run_config.eval_pds == 10
    assert len(scenario.eval_pds) == 10
    assert scenario == run_config.scenario(system)
    assert not set(scenario.eval_pds) & set(DEFAULT_FEW_SHOT_PDS)


def test_default_scenario(tmp_path, system):
    run_config = load_run_config(write_run_config(tmp_path, eval_pds=list(DEFAULT_EVAL_PDS)))

    assert run_config.scenario(system).eval_pds == DEFAULT_EVAL_PDS


def test_custom_system_file(tmp_path):
    (tmp_path / "systems").mkdir()
    (tmp_path / "systems" / "two.csv").write_bytes(
        system_csv("1,10,100,0.01,20,5", "2,0,50,0.02,25,0")
    )
    run_config = load_run_config(write_run_config(tmp_path, system="systems/two.csv"))

    assert run_config.load_system().n_units == 2


def test_bundled_system_by_default(tmp_path):
    assert load_run_config(write_run_config(tmp_path)).load_system().n_units == 19


@pytest.mark.parametrize(
    "overrides",
    [
        {"models": []},
        {"models": [{"name": ""}]},
        {"models": [{"name": "a"}, {"name": "a"}]},
        {"backend": "carrier-pigeon"},
        {"replay_path": None},
        {"record": True},
        {"backend": "live", "models": [{"name": "a"}]},
        {
            "backend": "live",
            "record": True,
            "replay_path": None,
            "models": [{"name": "a", "endpoint": "http://llm"}],
        },
        {"strategies": ["chain-of-thought"]},
        {"strategies": []},
        {"eval_pds": 0},
        {"eval_pds": []},
        {"ga": {"generations": -1}},
        {"ga": {"mutation_sigma": 0}},
        {"ga": {"unknown": 1}},
        {"models": [{"name": "a", "timeout": 0}]},
        {"unknown": True},
    ],
)
def test_invalid_config(tmp_path, overrides):
    with pytest.raises(RunConfigurationError):
        load_run_config(write_run_config(tmp_path, **overrides))


def test_config_errors_are_usage_errors():
    assert issubclass(RunConfigurationError, UsageError)


def test_missing_models_key():
    with pytest.raises(RunConfigurationError):
        parse_run_config({"backend": "replay", "replay_path": "replay.jsonl"})


def test_unreadable_config(tmp_path):
    with pytest.raises(RunConfigurationError):
        load_run_config(tmp_path / "missing.toml")


def test_malformed_toml(tmp_path):
    path = tmp_path / "bench.toml"
    path.write_text("models = [", encoding="utf-8")

    with pytest.raises(RunConfigurationError):
        load_run_config(path)
