from __future__ import annotations

import logging
import threading
import time
from typing import Any

import requests
from decouple import config as decouple_config

from .. import config
from ..prompt.template import PromptBundle
from .backend import LlmBackend, LlmExchange, ModelTarget, utc_timestamp
from .const import AUTH_FAILURE_STATUSES, CHAT_COMPLETIONS_PATH, RATE_LIMIT_STATUS
from .errors import (
    CredentialMissingError,
    LlmAuthError,
    LlmRateLimitError,
    LlmTimeoutError,
    LlmTransportError,
)
from .replay import ReplayStore

_LOGGER = logging.getLogger(__name__)


class OpenAICompatibleBackend(LlmBackend):
    """
    Query any endpoint speaking the OpenAI chat-completions protocol.

    The whole prompt is sent as one user message. Only rate-limit answers (HTTP 429)
    are retried, with exponential back-off; every attempt is logged.
    """

    def __init__(
        self,
        max_in_flight: int = config.LLM_MAX_IN_FLIGHT,
        max_retries: int = config.LLM_MAX_RETRIES,
        backoff_initial: float = config.LLM_BACKOFF_INITIAL,
        backoff_max: float = config.LLM_BACKOFF_MAX,
        record_store: ReplayStore | None = None,
        session: requests.Session | None = None,
    ) -> None:
        self._semaphore = threading.BoundedSemaphore(max(max_in_flight, 1))
        self._max_retries = max_retries
        self._backoff_initial = backoff_initial
        self._backoff_max = backoff_max
        self._record_store = record_store
        self._session = session or requests.Session()

    def check_ready(self, targets: list[ModelTarget]) -> None:
        for target in targets:
            self._api_key(target)

    def complete(self, bundle: PromptBundle, target: ModelTarget) -> LlmExchange:
        api_key = self._api_key(target)
        url = f"{target.endpoint.rstrip('/')}/{CHAT_COMPLETIONS_PATH}"
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = self._payload(bundle, target)

        with self._semaphore:
            attempt = 0
            while True:
                attempt += 1
                _LOGGER.info(
                    "Requesting %s for prompt %s (attempt %d)",
                    target.name,
                    bundle.fingerprint[:12],
                    attempt,
                )
                start = time.perf_counter()
                try:
                    response = self._session.post(
                        url, json=payload, headers=headers, timeout=target.timeout
                    )
                except requests.Timeout as err:
                    raise LlmTimeoutError(
                        f"No answer within {target.timeout:g} s", target.name
                    ) from err
                except requests.RequestException as err:
                    raise LlmTransportError(str(err), target.name) from err
                latency = time.perf_counter() - start

                if response.status_code == RATE_LIMIT_STATUS:
                    if attempt > self._max_retries:
                        raise LlmRateLimitError(
                            f"Still rate limited after {attempt} attempts", target.name
                        )
                    delay = self._backoff(attempt, response)
                    _LOGGER.warning(
                        "%s is rate limited, retrying in %.1f s (%d/%d)",
                        target.name,
                        delay,
                        attempt,
                        self._max_retries,
                    )
                    time.sleep(delay)
                    continue
                break

        if response.status_code in AUTH_FAILURE_STATUSES:
            raise LlmAuthError(
                f"Endpoint rejected the credentials (HTTP {response.status_code})",
                target.name,
            )
        if response.status_code >= 400:
            raise LlmTransportError(
                f"HTTP {response.status_code}: {response.text[:200]}", target.name
            )

        try:
            body = response.json()
            choice = body["choices"][0]
            content = choice["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as err:
            raise LlmTransportError("Unexpected JSON response format", target.name) from err

        exchange = LlmExchange(
            prompt_fingerprint=bundle.fingerprint,
            model=target.name,
            raw_response=content or "",
            latency_s=latency,
            transport_meta={
                "status": response.status_code,
                "attempts": attempt,
                "response_id": body.get("id"),
                "finish_reason": choice.get("finish_reason"),
            },
            recorded_at=utc_timestamp(),
        )
        if self._record_store is not None:
            self._record_store.put(exchange)
        return exchange

    def close(self) -> None:
        self._session.close()

    @staticmethod
    def _payload(bundle: PromptBundle, target: ModelTarget) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "model": target.name,
            "messages": [{"role": "user", "content": bundle.text}],
            "temperature": target.temperature,
        }
        if target.max_tokens is not None:
            payload["max_tokens"] = target.max_tokens
        payload.update(target.extra)
        return payload

    @staticmethod
    def _api_key(target: ModelTarget) -> str | None:
        if not target.api_key_env:
            return None
        api_key = decouple_config(target.api_key_env, default="")
        if not api_key:
            raise CredentialMissingError(target.api_key_env, target.name)
        return api_key

    def _backoff(self, attempt: int, response: requests.Response) -> float:
        delay = self._backoff_initial * 2 ** (attempt - 1)
        retry_after = response.headers.get("Retry-After")
        if retry_after:
            try:
                delay = max(delay, float(retry_after))
            except ValueError:
                pass
        return min(delay, self._backoff_max)
