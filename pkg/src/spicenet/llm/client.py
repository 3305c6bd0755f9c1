"""LLM transports: an HTTP chat-completion client and a fixture replay client."""

from __future__ import annotations

import json
import logging
import os
import time
from collections.abc import Callable, Sequence
from pathlib import Path

import httpx

from .prompts import ChatMessage

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "LLM_API_KEY"
RETRY_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})


class TransportError(RuntimeError):
    """Any failure to obtain a reply from the model."""


class ReplayExhausted(TransportError):
    pass


class LlmClient:
    """Minimal chat interface: ordered messages in, one assistant text out."""

    concurrent_safe = True

    def complete(self, messages: Sequence[ChatMessage], temperature: float | None = None) -> str:
        raise NotImplementedError


class HttpClient(LlmClient):
    """POSTs ``{model, messages, temperature}`` to ``<base_url>/chat/completions``.

    Works with any OpenAI-compatible endpoint. Connection errors and
    retryable status codes are retried with exponential backoff.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        temperature: float = 0.0,
        timeout: float = 60.0,
        retries: int = 3,
        backoff: float = 1.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.url = base_url.rstrip("/") + "/chat/completions"
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(api_key_env)
        self.temperature = temperature
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleep
        self._http = httpx.Client(timeout=timeout, transport=transport)

    def _payload(self, messages: Sequence[ChatMessage], temperature: float) -> dict:
        out = []
        for m in messages:
            if m.image and m.role == "user":
                content = [
                    {"type": "text", "text": m.content},
                    {"type": "image_url", "image_url": {"url": m.image}},
                ]
                out.append({"role": m.role, "content": content})
            else:
                out.append(m.to_json())
        return {"model": self.model, "messages": out, "temperature": temperature}

    def complete(self, messages: Sequence[ChatMessage], temperature: float | None = None) -> str:
        temp = self.temperature if temperature is None else temperature
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        payload = self._payload(messages, temp)
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._http.post(self.url, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last = exc
                log.warning("request to %s failed (%s), attempt %d", self.url, exc, attempt + 1)
                continue
            if resp.status_code in RETRY_STATUS:
                last = TransportError(f"HTTP {resp.status_code}")
                log.warning("HTTP %d from %s, attempt %d", resp.status_code, self.url, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed completion payload: {exc}") from exc
        raise TransportError(f"giving up after {self.retries + 1} attempts: {last}") from last

    def close(self) -> None:
        self._http.close()


class ReplayClient(LlmClient):
    """Returns scripted replies in order; records every prompt it receives.

    Fixture lines are JSON strings or objects with a ``content`` field.
    """

    concurrent_safe = False

    def __init__(self, responses: Sequence[str]):
        self.responses = list(responses)
        self.calls: list[list[ChatMessage]] = []

    @classmethod
    def from_file(cls, path: str | Path) -> ReplayClient:
        responses = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            item = json.loads(line)
            responses.append(item if isinstance(item, str) else item["content"])
        return cls(responses)

    @property
    def consumed(self) -> int:
        return len(self.calls)

    def complete(self, messages: Sequence[ChatMessage], temperature: float | None = None) -> str:
        if self.consumed >= len(self.responses):
            raise ReplayExhausted(f"replay fixture exhausted after {len(self.responses)} responses")
        self.calls.append(list(messages))
        return self.responses[self.consumed - 1]
