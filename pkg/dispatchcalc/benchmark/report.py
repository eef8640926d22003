from __future__ import annotations

import json
import logging
import math
import os
from pathlib import Path
from typing import Any

import pandas

from .. import __version__
from ..errors import DispatchCalcError
from ..prompt.template import TEMPLATE_VERSION, format_number
from .runner import BenchmarkReport

ERROR_FLOAT_FORMAT = "%.2f"
VIOLATION_FLOAT_FORMAT = "%.6f"
DISPATCH_FLOAT_FORMAT = "%.4f"
MISSING = "-"

RESULTS_FILE = "results.json"
MANIFEST_FILE = "run_manifest.json"
VIOLATIONS_FILE = "violations.csv"
DISPATCH_SERIES_FILE = "dispatch_series.csv"
EXACT_SERIES = "exact"

_LOGGER = logging.getLogger(__name__)


def emit_report(
    report: BenchmarkReport,
    output_dir: str | os.PathLike,
    manifest: dict[str, Any] | None = None,
) -> list[Path]:
    """
    Write the relative error tables (CSV and Markdown per strategy), the violation
    means, the dispatch series for plotting and the raw results.
    The manifest is only written when given.
    """
    if not report.results:
        raise DispatchCalcError("Cannot emit a report without results")

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []

    for strategy in report.strategies:
        table = _labelled_error_table(report, strategy)
        csv_path = output_dir / f"report_{strategy.value}.csv"
        table.to_csv(csv_path, index=False, float_format=ERROR_FLOAT_FORMAT, na_rep="")
        markdown_path = output_dir / f"report_{strategy.value}.md"
        markdown_path.write_text(_markdown(table) + "\n", encoding="utf-8")
        written += [csv_path, markdown_path]

    violations_path = output_dir / VIOLATIONS_FILE
    report.violation_means().to_csv(
        violations_path, index=False, float_format=VIOLATION_FLOAT_FORMAT, na_rep=""
    )
    written.append(violations_path)

    series_path = output_dir / DISPATCH_SERIES_FILE
    dispatch_series(report).to_csv(
        series_path, index=False, float_format=DISPATCH_FLOAT_FORMAT
    )
    written.append(series_path)

    results_path = output_dir / RESULTS_FILE
    _write_json(results_path, report.as_dict())
    written.append(results_path)

    if manifest is not None:
        manifest_path = output_dir / MANIFEST_FILE
        _write_json(manifest_path, manifest)
        written.append(manifest_path)

    for path in written:
        _LOGGER.info("Wrote %s", path)
    return written


def load_results(path: str | os.PathLike) -> BenchmarkReport:
    """Read a results.json written by emit_report"""
    try:
        with open(path, "r", encoding="utf-8") as file:
            data = json.load(file)
        return BenchmarkReport.from_dict(data)
    except (KeyError, TypeError, ValueError) as err:
        raise DispatchCalcError(f"{path} is not a results file: {err}") from err


def build_manifest(report: BenchmarkReport, config_echo: dict[str, Any]) -> dict[str, Any]:
    fingerprints = sorted(
        {
            (result.strategy.value, result.pd, result.prompt_fingerprint)
            for result in report.results
            if result.prompt_fingerprint
        }
    )
    return {
        "package_version": __version__,
        "template_version": TEMPLATE_VERSION,
        "config": config_echo,
        "prompt_fingerprints": [
            {"strategy": strategy, "pd": pd, "fingerprint": fingerprint}
            for strategy, pd, fingerprint in fingerprints
        ],
        "cells": len(report.results),
        "scored": report.scored_count,
        "failed": report.failure_count,
    }


def dispatch_series(report: BenchmarkReport) -> pandas.DataFrame:
    """Long table (pd, strategy, series, bus, pg) of the exact dispatch and every parsed answer"""
    rows = []
    for demand, pg in sorted(report.exact_dispatches.items()):
        rows += _series_rows(demand, "", EXACT_SERIES, pg, report.bus_ids)
    for result in report.results:
        if result.parse_ok:
            rows += _series_rows(
                result.pd,
                result.strategy.value,
                result.model,
                result.parsed.dispatch.pg,
                report.bus_ids,
            )
    return pandas.DataFrame(rows, columns=["pd", "strategy", "series", "bus", "pg"])


def summary_table(report: BenchmarkReport) -> str:
    """Human readable per-strategy summary"""
    summary = report.strategy_summary()
    return _markdown(_formatted(summary, ERROR_FLOAT_FORMAT))


def _series_rows(demand, strategy, series, pg, bus_ids) -> list[dict]:
    buses = bus_ids or range(1, len(pg) + 1)
    return [
        {
            "pd": format_number(demand),
            "strategy": strategy,
            "series": series,
            "bus": bus,
            "pg": value,
        }
        for bus, value in zip(buses, pg)
    ]


def _labelled_error_table(report: BenchmarkReport, strategy) -> pandas.DataFrame:
    table = report.error_table(strategy)
    table.index = [format_number(demand) for demand in table.index]
    table.index.name = "pd"
    return table.reset_index()


def _formatted(frame: pandas.DataFrame, float_format: str) -> pandas.DataFrame:
    def cell(value):
        if isinstance(value, float):
            return MISSING if math.isnan(value) else float_format % value
        return str(value)

    return frame.apply(lambda column: column.map(cell))


def _markdown(frame: pandas.DataFrame) -> str:
    return _formatted(frame, ERROR_FLOAT_FORMAT).to_markdown(
        index=False, disable_numparse=True
    )


def _write_json(path: Path, data: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(data, file, indent=2)
        file.write("\n")
