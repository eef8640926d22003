from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field

from ..system.model import Dispatch

_LOGGER = logging.getLogger(__name__)

_FENCE = re.compile(r"^\s*```[\w+-]*\s*$", re.MULTILINE)
_LATEX_SPACING = re.compile(r"\\[;,:!]|\\quad|\\left|\\right")
_VECTOR = re.compile(r"\[([^\[\]]*)\]")
_NUMBER = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_THOUSANDS_SPLIT = re.compile(r",\s+|;")
_COST = re.compile(
    r"cost\b[^0-9\-\n\[\]]{0,40}?(-?\d{1,3}(?:,\d{3})+(?:\.\d+)?|-?\d+(?:\.\d+)?)",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class ParsedResponse:
    """Dispatch and claimed cost found in a model answer. A missing dispatch means a parse failure."""

    dispatch: Dispatch | None
    claimed_cost: float | None = None
    diagnostics: tuple[str, ...] = field(default_factory=tuple)
    vector_lengths: tuple[int, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.dispatch is not None

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "pg": list(self.dispatch.pg) if self.dispatch else None,
            "claimed_cost": self.claimed_cost,
            "diagnostics": list(self.diagnostics),
            "vector_lengths": list(self.vector_lengths),
        }


def parse_response(raw: str, n_units: int, pd: float | None = None) -> ParsedResponse:
    """
    Extract the last bracketed numeric vector with n_units entries and the last
    cost-labelled number from a free-form answer.

    The returned dispatch targets pd; without pd the vector's own total is used.
    """
    if not raw or not raw.strip():
        return ParsedResponse(dispatch=None, diagnostics=("empty response",))

    text = _clean(raw)
    claimed_cost = _claimed_cost(text)

    vectors = []
    for match in _VECTOR.finditer(text):
        values = _parse_vector(match.group(1), n_units)
        if values is not None:
            vectors.append(values)
    lengths = tuple(len(values) for values in vectors)
    matching = [values for values in vectors if len(values) == n_units]

    if not matching:
        if lengths:
            note = f"no vector with {n_units} entries found; vector lengths seen: {list(lengths)}"
        else:
            note = "no bracketed numeric vector found"
        _LOGGER.debug("Parse failure: %s", note)
        return ParsedResponse(
            dispatch=None,
            claimed_cost=claimed_cost,
            diagnostics=(note,),
            vector_lengths=lengths,
        )

    diagnostics = []
    if len(matching) > 1:
        diagnostics.append(f"{len(matching)} vectors with {n_units} entries, using the last one")
    if claimed_cost is None:
        diagnostics.append("no claimed cost found")

    pg = matching[-1]
    return ParsedResponse(
        dispatch=Dispatch(tuple(pg), math.fsum(pg) if pd is None else pd),
        claimed_cost=claimed_cost,
        diagnostics=tuple(diagnostics),
        vector_lengths=lengths,
    )


def _clean(raw: str) -> str:
    text = _FENCE.sub("", raw)
    return _LATEX_SPACING.sub(" ", text)


def _parse_vector(body: str, n_units: int) -> list[float] | None:
    """Numbers of one bracket body, trying thousands separators when the plain split misses n_units"""
    plain = _numbers(body.split(","))
    if plain is not None and len(plain) == n_units:
        return plain
    if "," in body:
        grouped = _numbers(
            token.replace(",", "") for token in _THOUSANDS_SPLIT.split(body)
        )
        if grouped is not None and len(grouped) == n_units:
            return grouped
    return plain


def _numbers(tokens) -> list[float] | None:
    tokens = [token.strip() for token in tokens]
    if tokens and tokens[-1] == "":
        tokens.pop()
    if not tokens or not all(_NUMBER.match(token) for token in tokens):
        return None
    values = [float(token) for token in tokens]
    if not all(math.isfinite(value) for value in values):
        return None
    return values


def _claimed_cost(text: str) -> float | None:
    matches = _COST.findall(text)
    if not matches:
        return None
    return float(matches[-1].replace(",", ""))
