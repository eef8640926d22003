from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from .. import config
from ..errors import UsageError
from ..prompt.template import PromptBundle
from .const import DEFAULT_TEMPERATURE


@dataclass(frozen=True)
class ModelTarget:
    """
    A chat-completion model to query.

    api_key_env names the environment variable holding the API key; the key itself is
    never part of a target. extra is passed through unchanged into the request body.
    """

    name: str
    endpoint: str = ""
    api_key_env: str | None = None
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int | None = None
    timeout: float = config.LLM_TIMEOUT
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise UsageError("Model name must not be empty")
        if self.timeout <= 0:
            raise UsageError(f"Timeout of model {self.name} must be positive")
        object.__setattr__(self, "extra", dict(self.extra))

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "endpoint": self.endpoint,
            "api_key_env": self.api_key_env,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "timeout": self.timeout,
            "extra": dict(self.extra),
        }


@dataclass(frozen=True)
class LlmExchange:
    prompt_fingerprint: str
    model: str
    raw_response: str
    latency_s: float
    transport_meta: dict[str, Any] = field(default_factory=dict)
    recorded_at: str = ""

    def to_record(self) -> dict:
        return {
            "fingerprint": self.prompt_fingerprint,
            "model": self.model,
            "raw_response": self.raw_response,
            "latency_s": self.latency_s,
            "recorded_at": self.recorded_at,
            "transport_meta": dict(self.transport_meta),
        }

    @classmethod
    def from_record(cls, record: dict) -> LlmExchange:
        if not isinstance(record.get("raw_response"), str):
            raise ValueError("raw_response must be a string")
        if not isinstance(record["fingerprint"], str) or not isinstance(record["model"], str):
            raise ValueError("fingerprint and model must be strings")
        return cls(
            prompt_fingerprint=record["fingerprint"],
            model=record["model"],
            raw_response=record["raw_response"],
            latency_s=float(record.get("latency_s", 0.0)),
            transport_meta=dict(record.get("transport_meta") or {}),
            recorded_at=str(record.get("recorded_at", "")),
        )


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


class LlmBackend(ABC):
    @abstractmethod
    def complete(self, bundle: PromptBundle, target: ModelTarget) -> LlmExchange:
        """Obtain one answer of the target model to the prompt"""
        pass

    def check_ready(self, targets: list[ModelTarget]) -> None:
        """Raise before any request is made when the backend cannot serve the targets"""
        pass

    def close(self) -> None:
        pass

    def __enter__(self) -> LlmBackend:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
