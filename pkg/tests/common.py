from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from dispatchcalc.system.model import Dispatch, GeneratorUnit, PowerSystem

# In-context examples of the published prompt: demand -> (printed cost, printed dispatch)
PROMPT_EXAMPLES: dict[float, tuple[float, list[float]]] = {
    700.0: (
        18077.53,
        [50, 10, 20, 40, 5, 5, 30, 10, 50, 20, 40, 80, 100, 60, 2, 50, 108, 10, 10],
    ),
    2150.0: (
        44448.51,
        [59.42, 10, 20, 485, 5, 20, 223, 10, 85.55, 195, 40, 80, 100, 71.85, 2, 70.18, 653, 10, 10],
    ),
    3600.0: (
        81779.65,
        [505, 10, 20, 485, 17, 20, 223, 16.85, 308, 195, 40, 80, 100, 453.41, 2, 451.74, 653, 10, 10],
    ),
    5050.0: (
        127038.67,
        [505, 10, 221, 485, 17, 20, 223, 53, 308, 195, 45.41, 530.98, 503.42, 509, 10, 637, 653, 108, 16.19],
    ),
    6500.0: (
        189132.65,
        [505, 70, 221, 485, 17, 20, 223, 53, 308, 195, 441, 784, 1182, 509, 10, 637, 653, 108, 79],
    ),
}

BUNDLED_PD_MIN = 652.0
BUNDLED_PD_MAX = 6515.0
BUNDLED_CONSTANTS = 2730.0

SYSTEM_CSV_HEADER = "bus,p_min,p_max,a,b,c"


def prompt_dispatch(pd: float) -> Dispatch:
    return Dispatch(tuple(PROMPT_EXAMPLES[pd][1]), pd)


def prompt_dispatches() -> list[Dispatch]:
    return [prompt_dispatch(pd) for pd in sorted(PROMPT_EXAMPLES)]


def create_system(*units: tuple[int, float, float, float, float, float]) -> PowerSystem:
    """Build a system from (bus, p_min, p_max, a, b, c) tuples"""
    return PowerSystem(tuple(GeneratorUnit(*unit) for unit in units), name="test")


def system_csv(*rows: str) -> bytes:
    return "\n".join([SYSTEM_CSV_HEADER, *rows, ""]).encode("utf-8")


def write_run_config(directory: Path, **overrides: Any) -> Path:
    """Write a JSON run config for an offline run with two models"""
    data: dict[str, Any] = {
        "eval_pds": [727, 3747],
        "backend": "replay",
        "replay_path": "replay.jsonl",
        "output_dir": "output",
        "models": [{"name": "model-a"}, {"name": "model-b"}],
    }
    data.update(overrides)
    path = directory / "bench.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
