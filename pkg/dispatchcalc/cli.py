"""Command line entry point: solve, prompt, ga, bench and report."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import Any, Sequence

from . import __version__, config
from .benchmark.report import build_manifest, emit_report, load_results, summary_table
from .benchmark.run_config import load_run_config
from .benchmark.runner import run_benchmark
from .const import (
    DEFAULT_FEW_SHOT_PDS,
    CrossoverMode,
    PromptStrategy,
    SelectionSource,
)
from .errors import (
    DispatchCalcError,
    GaConfigurationError,
    InfeasibleDemandError,
    UsageError,
)
from .evolution.genetic import GaConfig, evolve
from .llm.errors import CredentialMissingError, LlmError
from .llm.factory import LlmBackendFactory
from .prompt.few_shot import build_few_shot_set
from .prompt.template import render_prompt
from .system.loader import load_bundled_system, load_system
from .system.model import PowerSystem
from .system.solver import kkt_residuals, solve_ed

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

_LOGGER = logging.getLogger(__name__)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.getLevelName(args.log_level.upper()),
        format="%(asctime)s [%(levelname)s] %(message)s",
    )

    try:
        return args.handler(args)
    except (UsageError, CredentialMissingError) as err:
        _report_error(parser, err)
        return EXIT_USAGE_ERROR
    except (DispatchCalcError, LlmError, OSError) as err:
        _report_error(parser, err)
        return EXIT_DOMAIN_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispatchcalc",
        description="Exact economic dispatch, few-shot LLM prompts and benchmark scoring",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=str(config.LOG_LEVEL).upper(),
        type=str.upper,
        choices=LOG_LEVELS,
        help="Log level of the messages written to stderr",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    solve = subparsers.add_parser("solve", help="Solve the economic dispatch for one demand")
    _add_system_argument(solve)
    solve.add_argument("--pd", type=float, required=True, help="Total demand in MW")
    solve.add_argument(
        "--include-constants",
        action="store_true",
        help="Add the fixed cost terms c to the reported cost",
    )
    solve.add_argument(
        "--check", action="store_true", help="Also print the optimality (KKT) certificate"
    )
    solve.set_defaults(handler=cmd_solve)

    prompt = subparsers.add_parser("prompt", help="Render a few-shot prompt")
    _add_system_argument(prompt)
    prompt.add_argument(
        "--strategy",
        choices=[strategy.value for strategy in PromptStrategy],
        default=PromptStrategy.NON_EVOLUTIONARY.value,
        help="Task instruction to use",
    )
    prompt.add_argument("--pd", type=float, required=True, help="Target demand in MW")
    _add_few_shot_argument(prompt)
    prompt.add_argument("--out", help="Write the prompt text to this file instead of stdout")
    prompt.add_argument(
        "--json",
        action="store_true",
        help="Print the prompt record (strategy, target_pd, text, fingerprint) as JSON",
    )
    prompt.set_defaults(handler=cmd_prompt)

    ga = subparsers.add_parser("ga", help="Run the classical genetic algorithm baseline")
    _add_system_argument(ga)
    ga.add_argument("--pd", type=float, required=True, help="Target demand in MW")
    _add_few_shot_argument(ga)
    defaults = GaConfig()
    ga.add_argument("--generations", type=int, help=f"Default {defaults.generations}")
    ga.add_argument("--population", type=int, help=f"Default {defaults.population_target}")
    ga.add_argument(
        "--mutation-sigma",
        type=float,
        help=f"Mutation spread as a fraction of each unit range (default {defaults.mutation_sigma})",
    )
    ga.add_argument(
        "--mutation-rate",
        type=float,
        help=f"Probability of mutating a unit (default {defaults.mutation_rate})",
    )
    ga.add_argument("--crossover", choices=[mode.value for mode in CrossoverMode])
    ga.add_argument(
        "--selection-source",
        choices=[source.value for source in SelectionSource],
        help="Draw parents from the given dispatches or from the evolving population",
    )
    ga.add_argument("--seed", type=int, help=f"Default {defaults.seed}")
    ga.add_argument("--no-repair", action="store_true", help="Do not repair power balance")
    ga.add_argument("--no-elitism", action="store_true", help="Do not carry the best candidate")
    ga.add_argument(
        "--single-pass",
        "--paper-faithful",
        dest="single_pass",
        action="store_true",
        help="One pass of ten candidates drawn from the given dispatches, as the prompt asks",
    )
    ga.add_argument("--include-constants", action="store_true")
    ga.set_defaults(handler=cmd_ga)

    bench = subparsers.add_parser("bench", help="Run a benchmark from a run config")
    bench.add_argument("--config", required=True, help="TOML or JSON run config")
    bench.add_argument("--output-dir", help="Override the output_dir of the config")
    bench.set_defaults(handler=cmd_bench)

    report = subparsers.add_parser("report", help="Write report files from a results.json")
    report.add_argument("--results", required=True, help="results.json of a benchmark run")
    report.add_argument("--out", required=True, help="Output directory")
    report.set_defaults(handler=cmd_report)

    return parser


def cmd_solve(args: argparse.Namespace) -> int:
    system = _load_system(args.system)
    solution = solve_ed(system, args.pd, include_constants=args.include_constants)
    data = solution.as_dict(system)
    if args.check:
        residuals = kkt_residuals(solution, system)
        data["kkt"] = residuals._asdict()
        data["kkt_satisfied"] = residuals.is_satisfied()
    _print_json(data)
    return EXIT_OK


def cmd_prompt(args: argparse.Namespace) -> int:
    system = _load_system(args.system)
    if not system.is_feasible_demand(args.pd):
        raise InfeasibleDemandError(args.pd, system.pd_min, system.pd_max)
    few_shot = build_few_shot_set(system, args.few_shot)
    bundle = render_prompt(system, few_shot, args.pd, PromptStrategy(args.strategy))

    if args.out:
        bundle.write_text(args.out)
        _LOGGER.info("Wrote prompt %s to %s", bundle.fingerprint[:12], args.out)
    if args.json:
        _print_json(bundle.to_record())
    elif not args.out:
        sys.stdout.write(bundle.text)
    return EXIT_OK


def cmd_ga(args: argparse.Namespace) -> int:
    system = _load_system(args.system)
    few_shot = build_few_shot_set(system, args.few_shot)

    settings: dict[str, Any] = {"include_constants": args.include_constants}
    for option, name in (
        ("generations", "generations"),
        ("population", "population_target"),
        ("mutation_sigma", "mutation_sigma"),
        ("mutation_rate", "mutation_rate"),
        ("crossover", "crossover_mode"),
        ("selection_source", "selection_source"),
        ("seed", "seed"),
    ):
        value = getattr(args, option)
        if value is not None:
            settings[name] = value
    if args.no_repair:
        settings["repair"] = False
    if args.no_elitism:
        settings["elitism"] = False
    try:
        if args.single_pass:
            ga_config = GaConfig.single_pass(**settings)
        else:
            ga_config = GaConfig(**settings)
    except GaConfigurationError as err:
        raise UsageError(str(err)) from err

    result = evolve(system, args.pd, few_shot.dispatches, ga_config)
    exact = solve_ed(system, args.pd, include_constants=args.include_constants)
    data = result.as_dict()
    data["exact_cost"] = exact.cost
    data["gap_pct"] = (result.best_cost - exact.cost) / exact.cost * 100 if exact.cost else 0.0
    data["config"] = ga_config.as_dict()
    _print_json(data)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config)
    system = run_config.load_system()
    scenario = run_config.scenario(system)
    output_dir = args.output_dir or run_config.output_dir

    factory = LlmBackendFactory(
        replay_path=run_config.replay_path,
        record=run_config.record,
        max_in_flight=run_config.max_in_flight,
    )
    with factory.create(run_config.backend) as backend:
        report = run_benchmark(
            system,
            scenario,
            run_config.models,
            run_config.strategies,
            backend,
            include_constants=run_config.include_constants,
            ga_config=run_config.ga if run_config.ga_baseline else None,
            max_in_flight=run_config.max_in_flight,
        )

    files = emit_report(report, output_dir, build_manifest(report, run_config.echo))
    sys.stderr.write(summary_table(report) + "\n")
    _print_json(
        {
            "output_dir": str(output_dir),
            "files": [str(path) for path in files],
            "cells": len(report.results),
            "scored": report.scored_count,
            "failed": report.failure_count,
            "summary": _records(report.strategy_summary()),
        }
    )
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = load_results(args.results)
    files = emit_report(report, args.out)
    sys.stderr.write(summary_table(report) + "\n")
    _print_json({"output_dir": args.out, "files": [str(path) for path in files]})
    return EXIT_OK


def _add_system_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--system",
        help="System file (CSV or JSON); the bundled IEEE 118-bus units when omitted",
    )


def _add_few_shot_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--few-shot",
        type=float,
        nargs="+",
        default=list(DEFAULT_FEW_SHOT_PDS),
        metavar="PD",
        help="Demands of the in-context examples in MW",
    )


def _load_system(path: str | None) -> PowerSystem:
    return load_system(path) if path else load_bundled_system()


def _records(frame) -> list[dict]:
    records = frame.to_dict(orient="records")
    return [
        {
            key: None if isinstance(value, float) and math.isnan(value) else value
            for key, value in record.items()
        }
        for record in records
    ]


def _print_json(data: Any) -> None:
    sys.stdout.write(json.dumps(data, indent=2, default=_json_default) + "\n")


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    return str(value)


def _report_error(parser: argparse.ArgumentParser, err: Exception) -> None:
    _LOGGER.debug("Command failed", exc_info=err)
    sys.stderr.write(f"{parser.prog}: error: {err}\n")
