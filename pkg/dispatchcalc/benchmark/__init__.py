"""Benchmark runs over evaluation demands, models and prompt strategies."""

from .fixtures import oracle_response, record_oracle_exchanges
from .report import build_manifest, emit_report, load_results
from .run_config import RunConfig, load_run_config, parse_run_config
from .runner import BenchmarkReport, ScenarioResult, run_benchmark, score_dispatch

__all__ = [
    "BenchmarkReport",
    "RunConfig",
    "ScenarioResult",
    "build_manifest",
    "emit_report",
    "load_results",
    "load_run_config",
    "oracle_response",
    "parse_run_config",
    "record_oracle_exchanges",
    "run_benchmark",
    "score_dispatch",
]
