"""Provider-agnostic chat-completion access.

Speaks the common JSON chat-completions convention (a messages array of
role/content objects) against a configurable base URL, so any compatible
provider or local server works. A deterministic mock provider stands in
for the network during tests; no request leaves the process when it is
used.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import httpx

__all__ = [
    "AuthFailure",
    "HttpChatProvider",
    "MalformedResponse",
    "MockProvider",
    "ProviderConfig",
    "ProviderError",
    "ProviderTimeout",
    "RateLimited",
    "complete_chat",
    "mock_provider",
]

ENV_API_KEY = "GP4NLDR_LLM_API_KEY"
ENV_BASE_URL = "GP4NLDR_LLM_BASE_URL"
ENV_MODEL = "GP4NLDR_LLM_MODEL"

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-3.5-turbo"

_ROLE_MAP = {"human": "user", "ai": "assistant", "user": "user", "assistant": "assistant", "system": "system"}
_BACKOFF_SECONDS = (1.0, 4.0)


class ProviderError(Exception):
    """Base class for chat-provider failures."""


class AuthFailure(ProviderError):
    """The provider rejected the API key."""


class RateLimited(ProviderError):
    """The provider throttled the request and retries were exhausted."""


class ProviderTimeout(ProviderError):
    """No response within the configured timeout, after retries."""


class MalformedResponse(ProviderError):
    """The provider answered with something that is not a chat completion."""


@dataclass(frozen=True)
class ProviderConfig:
    """Connection settings; the API key is kept out of reprs and exports."""

    api_key: str = field(repr=False, default="")
    base_url: str = DEFAULT_BASE_URL
    model_id: str = DEFAULT_MODEL
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 2

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")

    @classmethod
    def from_env(cls, **overrides) -> "ProviderConfig":
        settings = {
            "api_key": os.environ.get(ENV_API_KEY, ""),
            "base_url": os.environ.get(ENV_BASE_URL, DEFAULT_BASE_URL),
            "model_id": os.environ.get(ENV_MODEL, DEFAULT_MODEL),
        }
        settings.update(overrides)
        return cls(**settings)


def _wire_messages(messages: Sequence) -> list[dict]:
    wire = []
    for entry in messages:
        if isinstance(entry, dict):
            role, text = entry["role"], entry["content"]
        else:
            role, text = entry
        mapped = _ROLE_MAP.get(role)
        if mapped is None:
            raise ValueError(f"unknown message role {role!r}")
        wire.append({"role": mapped, "content": str(text)})
    return wire


def complete_chat(
    cfg: ProviderConfig,
    messages: Sequence,
    *,
    transport: httpx.BaseTransport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """Send one chat request and return the assistant's reply text.

    Transient failures (timeouts, 429, 5xx) are retried with backoff up to
    ``cfg.max_retries`` times; other failures raise immediately. The
    ``transport`` hook exists so tests can answer requests in-process.
    """
    if not messages:
        raise ValueError("messages must be non-empty")
    wire = _wire_messages(messages)
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    payload = {"model": cfg.model_id, "messages": wire, "temperature": cfg.temperature}
    headers = {"Authorization": f"Bearer {cfg.api_key}", "Content-Type": "application/json"}

    last_error: ProviderError | None = None
    for attempt in range(cfg.max_retries + 1):
        if attempt > 0:
            sleep(_BACKOFF_SECONDS[min(attempt - 1, len(_BACKOFF_SECONDS) - 1)])
        try:
            with httpx.Client(timeout=cfg.timeout, transport=transport) as client:
                response = client.post(url, json=payload, headers=headers)
        except httpx.TimeoutException as exc:
            last_error = ProviderTimeout(f"request timed out after {cfg.timeout}s")
            last_error.__cause__ = exc
            continue
        except httpx.HTTPError as exc:
            last_error = ProviderError(f"transport failure: {exc}")
            continue

        if response.status_code in (401, 403):
            raise AuthFailure(f"provider rejected the API key (HTTP {response.status_code})")
        if response.status_code == 429:
            last_error = RateLimited("provider throttled the request (HTTP 429)")
            continue
        if response.status_code >= 500:
            last_error = ProviderError(f"provider error (HTTP {response.status_code})")
            continue
        if response.status_code != 200:
            raise ProviderError(f"unexpected HTTP {response.status_code}: {response.text[:200]}")

        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise MalformedResponse(f"could not parse completion: {exc}") from exc
        if not isinstance(content, str):
            raise MalformedResponse("completion content is not text")
        return content

    assert last_error is not None
    raise last_error


class HttpChatProvider:
    """Bind a ProviderConfig to the provider protocol used by chat sessions."""

    def __init__(self, cfg: ProviderConfig, *, transport: httpx.BaseTransport | None = None):
        self.cfg = cfg
        self._transport = transport

    def complete(self, messages: Sequence) -> str:
        return complete_chat(self.cfg, messages, transport=self._transport)


class MockProvider:
    """Deterministic stand-in: canned answers or an echo of the prompt.

    Every request is recorded on ``requests`` so tests can assert on the
    exact prompt the session layer produced.
    """

    def __init__(self, script: Iterable[str] | None = None, *, echo: bool = False):
        self.script = list(script) if script is not None else None
        self.echo = echo or self.script is None
        self.requests: list[list[dict]] = []

    def complete(self, messages: Sequence) -> str:
        wire = _wire_messages(messages)
        self.requests.append(wire)
        if self.script:
            return self.script.pop(0)
        if self.script is not None and not self.echo:
            raise ProviderError("mock script exhausted")
        final = wire[-1]["content"] if wire else ""
        return f"[mock answer to {len(wire)} message(s)]\n{final}"


def mock_provider(script: Iterable[str] | None = None, *, echo: bool = False) -> MockProvider:
    """Build a MockProvider; with no script it echoes the received prompt."""
    return MockProvider(script, echo=echo)
