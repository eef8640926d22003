from __future__ import annotations

import logging
import os

from .. import config
from ..const import BackendType
from .backend import LlmBackend
from .errors import LlmError
from .openai import OpenAICompatibleBackend
from .replay import ReplayBackend, ReplayStore

_LOGGER = logging.getLogger(__name__)


class LlmBackendFactory:
    def __init__(
        self,
        replay_path: str | os.PathLike | None = None,
        record: bool = False,
        max_in_flight: int = config.LLM_MAX_IN_FLIGHT,
    ) -> None:
        self._replay_path = replay_path
        self._record = record
        self._max_in_flight = max_in_flight

    def live(self) -> OpenAICompatibleBackend:
        record_store = None
        if self._record:
            if self._replay_path is None:
                raise LlmError("Recording requires a replay store path")
            record_store = ReplayStore.open(self._replay_path, create=True)
            _LOGGER.info("Recording exchanges to %s", record_store.path)
        return OpenAICompatibleBackend(
            max_in_flight=self._max_in_flight, record_store=record_store
        )

    def replay(self) -> ReplayBackend:
        if self._replay_path is None:
            raise LlmError("The replay backend requires a replay store path")
        return ReplayBackend(ReplayStore.open(self._replay_path))

    def create(self, backend_type: BackendType | str) -> LlmBackend:
        """Create the backend object"""
        factories = {
            BackendType.LIVE: self.live,
            BackendType.REPLAY: self.replay,
        }
        try:
            factory = factories[BackendType(backend_type)]
        except ValueError:
            raise LlmError(f"Could not find a factory for {backend_type}") from None

        return factory()
