from __future__ import annotations

import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .. import config
from ..const import (
    CONF_API_KEY_ENV,
    CONF_BACKEND,
    CONF_ENDPOINT,
    CONF_EVAL_PDS,
    CONF_EXTRA,
    CONF_FEW_SHOT_PDS,
    CONF_GA,
    CONF_GA_BASELINE,
    CONF_INCLUDE_CONSTANTS,
    CONF_MAX_IN_FLIGHT,
    CONF_MAX_TOKENS,
    CONF_MODELS,
    CONF_NAME,
    CONF_OUTPUT_DIR,
    CONF_SINGLE_PASS,
    CONF_RECORD,
    CONF_REPLAY_PATH,
    CONF_SEED,
    CONF_STRATEGIES,
    CONF_SYSTEM,
    CONF_TEMPERATURE,
    CONF_TIMEOUT,
    DEFAULT_EVAL_PDS,
    DEFAULT_FEW_SHOT_PDS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SEED,
    BackendType,
    CrossoverMode,
    PromptStrategy,
    SelectionSource,
)
from ..errors import GaConfigurationError, RunConfigurationError
from ..evolution.genetic import GaConfig
from ..llm.backend import ModelTarget
from ..llm.const import DEFAULT_TEMPERATURE
from ..prompt.few_shot import ScenarioSpec, random_eval_pds
from ..system.loader import load_bundled_system, load_system
from ..system.model import PowerSystem

_LOGGER = logging.getLogger(__name__)

MODEL_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_NAME): vol.All(str, vol.Length(min=1)),
        vol.Optional(CONF_ENDPOINT, default=""): str,
        vol.Optional(CONF_API_KEY_ENV, default=None): vol.Any(None, str),
        vol.Optional(CONF_TEMPERATURE, default=DEFAULT_TEMPERATURE): vol.Coerce(float),
        vol.Optional(CONF_MAX_TOKENS, default=None): vol.Any(
            None, vol.All(int, vol.Range(min=1))
        ),
        vol.Optional(CONF_TIMEOUT, default=config.LLM_TIMEOUT): vol.All(
            vol.Coerce(float), vol.Range(min=0, min_included=False)
        ),
        vol.Optional(CONF_EXTRA, default=dict): dict,
    }
)

GA_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_SINGLE_PASS, default=False): bool,
        vol.Optional("population_target"): vol.All(int, vol.Range(min=2)),
        vol.Optional("generations"): vol.All(int, vol.Range(min=0)),
        vol.Optional("mutation_sigma"): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1, min_included=False)
        ),
        vol.Optional("mutation_rate"): vol.All(vol.Coerce(float), vol.Range(min=0, max=1)),
        vol.Optional("crossover_mode"): vol.In([mode.value for mode in CrossoverMode]),
        vol.Optional("selection_source"): vol.In(
            [source.value for source in SelectionSource]
        ),
        vol.Optional("seed"): vol.All(int, vol.Range(min=0)),
        vol.Optional("repair"): bool,
        vol.Optional("elitism"): bool,
    }
)

RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_SYSTEM, default=None): vol.Any(None, str),
        vol.Optional(CONF_FEW_SHOT_PDS, default=list(DEFAULT_FEW_SHOT_PDS)): vol.All(
            [vol.Coerce(float)], vol.Length(min=1)
        ),
        # Either explicit demands or the number of demands to draw at random
        vol.Optional(CONF_EVAL_PDS, default=list(DEFAULT_EVAL_PDS)): vol.Any(
            vol.All(int, vol.Range(min=1)),
            vol.All([vol.Coerce(float)], vol.Length(min=1)),
        ),
        vol.Optional(
            CONF_STRATEGIES, default=[strategy.value for strategy in PromptStrategy]
        ): vol.All([vol.In([strategy.value for strategy in PromptStrategy])], vol.Length(min=1)),
        vol.Optional(CONF_BACKEND, default=BackendType.REPLAY.value): vol.In(
            [backend.value for backend in BackendType]
        ),
        vol.Optional(CONF_REPLAY_PATH, default=None): vol.Any(None, str),
        vol.Optional(CONF_RECORD, default=False): bool,
        vol.Optional(CONF_OUTPUT_DIR, default=DEFAULT_OUTPUT_DIR): str,
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(int, vol.Range(min=0)),
        vol.Optional(CONF_MAX_IN_FLIGHT, default=config.LLM_MAX_IN_FLIGHT): vol.All(
            int, vol.Range(min=1)
        ),
        vol.Optional(CONF_INCLUDE_CONSTANTS, default=False): bool,
        vol.Optional(CONF_GA_BASELINE, default=False): bool,
        vol.Optional(CONF_GA, default=dict): GA_SCHEMA,
        vol.Required(CONF_MODELS): vol.All([MODEL_SCHEMA], vol.Length(min=1)),
    }
)


@dataclass(frozen=True)
class RunConfig:
    """A validated benchmark run config. Paths are absolute."""

    system_path: Path | None
    few_shot_pds: tuple[float, ...]
    eval_pds: tuple[float, ...] | int
    strategies: tuple[PromptStrategy, ...]
    backend: BackendType
    replay_path: Path | None
    record: bool
    output_dir: Path
    seed: int
    max_in_flight: int
    include_constants: bool
    ga_baseline: bool
    ga: GaConfig
    models: tuple[ModelTarget, ...]
    echo: dict[str, Any]

    def load_system(self) -> PowerSystem:
        if self.system_path is None:
            return load_bundled_system()
        return load_system(self.system_path)

    def scenario(self, system: PowerSystem) -> ScenarioSpec:
        eval_pds = self.eval_pds
        if isinstance(eval_pds, int):
            eval_pds = random_eval_pds(
                system,
                eval_pds,
                np.random.default_rng(self.seed),
                exclude=self.few_shot_pds,
            )
            _LOGGER.info("Drew evaluation demands %s", [f"{pd:g}" for pd in eval_pds])
        return ScenarioSpec.create(system, self.few_shot_pds, eval_pds)


def load_run_config(path: str | os.PathLike) -> RunConfig:
    """Read a TOML or JSON run config; relative paths in it are relative to its directory"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise RunConfigurationError(f"Cannot read run config {path}: {err}") from err

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as err:
        raise RunConfigurationError(f"Run config {path} is not valid: {err}") from err

    return parse_run_config(data, path.resolve().parent)


def parse_run_config(data: Any, base_dir: str | os.PathLike = ".") -> RunConfig:
    base_dir = Path(base_dir)
    try:
        validated = RUN_CONFIG_SCHEMA(data)
    except vol.Invalid as err:
        raise RunConfigurationError(f"Invalid run config: {err}") from err

    backend = BackendType(validated[CONF_BACKEND])
    replay_path = _resolve(base_dir, validated[CONF_REPLAY_PATH])
    if backend == BackendType.REPLAY and replay_path is None:
        raise RunConfigurationError("The replay backend needs a replay_path")
    if validated[CONF_RECORD] and backend != BackendType.LIVE:
        raise RunConfigurationError("record is only possible with the live backend")
    if validated[CONF_RECORD] and replay_path is None:
        raise RunConfigurationError("record needs a replay_path to write to")

    models = []
    for model in validated[CONF_MODELS]:
        if backend == BackendType.LIVE and not model[CONF_ENDPOINT]:
            raise RunConfigurationError(f"Model {model[CONF_NAME]} has no endpoint")
        models.append(
            ModelTarget(
                name=model[CONF_NAME],
                endpoint=model[CONF_ENDPOINT],
                api_key_env=model[CONF_API_KEY_ENV],
                temperature=model[CONF_TEMPERATURE],
                max_tokens=model[CONF_MAX_TOKENS],
                timeout=model[CONF_TIMEOUT],
                extra=model[CONF_EXTRA],
            )
        )
    names = [model.name for model in models]
    if len(set(names)) != len(names):
        raise RunConfigurationError(f"Model names must be unique, got {names}")

    eval_pds = validated[CONF_EVAL_PDS]
    if not isinstance(eval_pds, int):
        eval_pds = tuple(eval_pds)

    return RunConfig(
        system_path=_resolve(base_dir, validated[CONF_SYSTEM]),
        few_shot_pds=tuple(validated[CONF_FEW_SHOT_PDS]),
        eval_pds=eval_pds,
        strategies=tuple(PromptStrategy(value) for value in validated[CONF_STRATEGIES]),
        backend=backend,
        replay_path=replay_path,
        record=validated[CONF_RECORD],
        output_dir=_resolve(base_dir, validated[CONF_OUTPUT_DIR]),
        seed=validated[CONF_SEED],
        max_in_flight=validated[CONF_MAX_IN_FLIGHT],
        include_constants=validated[CONF_INCLUDE_CONSTANTS],
        ga_baseline=validated[CONF_GA_BASELINE],
        ga=_ga_config(
            validated[CONF_GA], validated[CONF_SEED], validated[CONF_INCLUDE_CONSTANTS]
        ),
        models=tuple(models),
        echo=validated,
    )


def _ga_config(settings: dict, seed: int, include_constants: bool) -> GaConfig:
    settings = dict(settings)
    single_pass = settings.pop(CONF_SINGLE_PASS)
    settings.setdefault("seed", seed)
    settings["include_constants"] = include_constants
    try:
        if single_pass:
            return GaConfig.single_pass(**settings)
        return GaConfig(**settings)
    except GaConfigurationError as err:
        raise RunConfigurationError(f"Invalid [ga] settings: {err}") from err


def _resolve(base_dir: Path, value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value).expanduser()
    return path if path.is_absolute() else (base_dir / path).resolve()
