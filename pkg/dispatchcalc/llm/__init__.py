"""Chat-completion backends and the record/replay store."""

from .backend import LlmBackend, LlmExchange, ModelTarget
from .errors import (
    CredentialMissingError,
    FixtureMissError,
    LlmAuthError,
    LlmError,
    LlmRateLimitError,
    LlmTimeoutError,
    LlmTransportError,
    ReplayStoreNotFoundError,
)
from .factory import LlmBackendFactory
from .openai import OpenAICompatibleBackend
from .replay import ReplayBackend, ReplayStore

__all__ = [
    "CredentialMissingError",
    "FixtureMissError",
    "LlmAuthError",
    "LlmBackend",
    "LlmBackendFactory",
    "LlmError",
    "LlmExchange",
    "LlmRateLimitError",
    "LlmTimeoutError",
    "LlmTransportError",
    "ModelTarget",
    "OpenAICompatibleBackend",
    "ReplayBackend",
    "ReplayStore",
    "ReplayStoreNotFoundError",
]
