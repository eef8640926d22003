from __future__ import annotations

import csv
import io
import json
import logging
import os
from importlib import resources
from typing import IO, Any, Union

from ..const import BUNDLED_SYSTEM_FILE, SYSTEM_FIELDS
from ..errors import SystemDataError
from .model import GeneratorUnit, PowerSystem

SystemSource = Union[bytes, str, os.PathLike, IO[bytes]]

_LOGGER = logging.getLogger(__name__)


def load_system(source: SystemSource, name: str | None = None) -> PowerSystem:
    """
    Load a power system from a CSV file (header bus,p_min,p_max,a,b,c) or its JSON mirror.

    source may be a binary stream, raw bytes or a filesystem path.
    Rows are numbered from 1 (first unit) in error messages.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as file:
            raw = file.read()
        name = name or os.path.basename(os.fspath(source))
    elif isinstance(source, bytes):
        raw = source
    else:
        raw = source.read()

    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as err:
        raise SystemDataError(f"system file is not valid UTF-8: {err}")

    if text.lstrip().startswith(("{", "[")):
        records = _read_json_records(text)
    else:
        records = _read_csv_records(text)

    units = [_build_unit(row, record) for row, record in enumerate(records, start=1)]
    if not units:
        raise SystemDataError("system file contains no generator units")

    system = PowerSystem(tuple(units), name=name or "")
    _LOGGER.debug(
        "Loaded power system %s: %d units, pd range %g..%g MW",
        system.name,
        system.n_units,
        system.pd_min,
        system.pd_max,
    )
    return system


def load_bundled_system() -> PowerSystem:
    """Load the IEEE 118-bus system with 19 dispatchable units shipped with the package"""
    data = resources.files("dispatchcalc").joinpath("data", BUNDLED_SYSTEM_FILE)
    return load_system(data.read_bytes(), name=BUNDLED_SYSTEM_FILE)


def _read_csv_records(text: str) -> list[dict[str, Any]]:
    reader = csv.DictReader(io.StringIO(text))
    header = [column.strip() for column in reader.fieldnames or []]
    if tuple(header) != SYSTEM_FIELDS:
        raise SystemDataError(
            f"expected header {','.join(SYSTEM_FIELDS)}, got {','.join(header) or 'nothing'}"
        )
    records = []
    for row, record in enumerate(reader, start=1):
        if None in record or any(value is None for value in record.values()):
            raise SystemDataError(
                f"expected {len(SYSTEM_FIELDS)} columns", row=row
            )
        records.append({key.strip(): value for key, value in record.items()})
    return records


def _read_json_records(text: str) -> list[dict[str, Any]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SystemDataError(f"invalid JSON: {err}")

    if isinstance(data, dict):
        data = data.get("units")
    if not isinstance(data, list):
        raise SystemDataError("JSON system file must contain a list of units")

    for row, record in enumerate(data, start=1):
        if not isinstance(record, dict):
            raise SystemDataError("unit record must be an object", row=row)
    return data


def _build_unit(row: int, record: dict[str, Any]) -> GeneratorUnit:
    values: dict[str, Any] = {}
    for field in SYSTEM_FIELDS:
        if field not in record:
            raise SystemDataError("missing value", row=row, field=field)
        raw = record[field]
        if isinstance(raw, bool):
            raise SystemDataError(f"not a number: {raw!r}", row=row, field=field)
        try:
            number = float(str(raw).strip())
        except ValueError:
            raise SystemDataError(f"not a number: {raw!r}", row=row, field=field)
        if field == "bus":
            if not number.is_integer():
                raise SystemDataError(
                    f"bus id must be an integer, got {raw!r}", row=row, field=field
                )
            values["bus_id"] = int(number)
        else:
            values[field] = number

    try:
        return GeneratorUnit(**values)
    except SystemDataError as err:
        raise SystemDataError(err.reason, row=row, field=err.field)
