from __future__ import annotations

import json
import logging
import os
import threading
from pathlib import Path

from ..prompt.template import PromptBundle
from .backend import LlmBackend, LlmExchange, ModelTarget
from .errors import FixtureMissError, ReplayStoreNotFoundError

_LOGGER = logging.getLogger(__name__)


class ReplayStore:
    """
    Append-only JSONL log of exchanges keyed by (prompt fingerprint, model).

    A key written twice keeps both lines; lookups return the latest one.
    Lines that cannot be read are skipped with a warning.
    """

    def __init__(self, path: str | os.PathLike) -> None:
        self._path = Path(path)
        self._records: dict[tuple[str, str], LlmExchange] = {}
        self._lock = threading.Lock()
        if self._path.exists():
            self._load()

    @classmethod
    def open(cls, path: str | os.PathLike, create: bool = False) -> ReplayStore:
        path = Path(path)
        if not path.is_file():
            if not create:
                raise ReplayStoreNotFoundError(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.touch()
        return cls(path)

    @property
    def path(self) -> Path:
        return self._path

    def _load(self) -> None:
        with open(self._path, "r", encoding="utf-8") as file:
            for line_number, line in enumerate(file, start=1):
                if not line.strip():
                    continue
                try:
                    exchange = LlmExchange.from_record(json.loads(line))
                except (ValueError, KeyError, TypeError, AttributeError) as err:
                    _LOGGER.warning(
                        "Skipping corrupt line %d in replay store %s: %s",
                        line_number,
                        self._path,
                        err,
                    )
                    continue
                self._records[(exchange.prompt_fingerprint, exchange.model)] = exchange
        _LOGGER.debug("Loaded %d exchanges from %s", len(self._records), self._path)

    def get(self, fingerprint: str, model: str) -> LlmExchange | None:
        return self._records.get((fingerprint, model))

    def put(self, exchange: LlmExchange) -> None:
        line = json.dumps(exchange.to_record(), sort_keys=True, ensure_ascii=False)
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as file:
                file.write(line + "\n")
            self._records[(exchange.prompt_fingerprint, exchange.model)] = exchange

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._records

    def __len__(self) -> int:
        return len(self._records)


class ReplayBackend(LlmBackend):
    """Serve recorded answers; never touches the network"""

    def __init__(self, store: ReplayStore) -> None:
        self._store = store

    def complete(self, bundle: PromptBundle, target: ModelTarget) -> LlmExchange:
        exchange = self._store.get(bundle.fingerprint, target.name)
        if exchange is None:
            raise FixtureMissError(bundle.fingerprint, target.name)
        return exchange
