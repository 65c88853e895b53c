"""Chat-completion client for OpenAI-compatible endpoints.

Transport failures never raise: after the retry budget is spent the reply is
``failed=True`` with empty text, which the validator scores as an empty path.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

import httpx

from gridbench.errors import ConfigError
from gridbench.prompt_kit import RenderedPrompt

log = logging.getLogger(__name__)

TRANSIENT_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class ModelEndpoint:
    base_url: str
    model_id: str
    credential_ref: str | None = None  # name of the env var holding the API key
    temperature: float = 0.0
    max_tokens: int = 2048
    timeout_s: float = 120.0
    max_retries: int = 3
    parallelism: int = 4
    backoff_s: float = 1.0
    debug_wire: bool = False

    def validate(self) -> None:
        if self.timeout_s <= 0:
            raise ConfigError("timeout_s must be > 0")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if not self.base_url:
            raise ConfigError("base_url is required")

    @property
    def url(self) -> str:
        base = self.base_url.rstrip("/")
        return base if base.endswith("/chat/completions") else base + "/chat/completions"

    def headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.credential_ref:
            key = os.environ.get(self.credential_ref)
            if not key:
                raise ConfigError(f"credential variable {self.credential_ref} is not set")
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def identity(self) -> dict[str, Any]:
        """Fields that change results; excludes the credential and transport tuning."""
        return {
            "base_url": self.base_url,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class ModelReply:
    text: str
    latency_s: float
    attempt_count: int
    failed: bool


def chat_payload(endpoint: ModelEndpoint, prompt: RenderedPrompt) -> dict[str, Any]:
    return {
        "model": endpoint.model_id,
        "messages": [{"role": "user", "content": prompt.text}],
        "temperature": endpoint.temperature,
        "max_tokens": endpoint.max_tokens,
        "n": 1,
    }


def reply_text(body: dict[str, Any]) -> str:
    choices = body.get("choices") or []
    if not choices:
        raise ValueError("response has no choices")
    content = (choices[0].get("message") or {}).get("content")
    if not isinstance(content, str):
        raise ValueError("response message has no text content")
    return content


def complete(
    endpoint: ModelEndpoint,
    prompt: RenderedPrompt,
    client: httpx.Client | None = None,
) -> ModelReply:
    """One chat completion with exponential-backoff retries.

    ``latency_s`` covers the final attempt only, request sent to body read;
    backoff sleeps are excluded.
    """
    headers = endpoint.headers()
    payload = chat_payload(endpoint, prompt)
    own_client = client is None
    if own_client:
        client = httpx.Client(timeout=endpoint.timeout_s)
    try:
        attempts = 0
        latency = 0.0
        while True:
            attempts += 1
            transient = False
            t0 = time.perf_counter()
            try:
                if endpoint.debug_wire:
                    log.debug("request %s -> %s", prompt.case_id, json.dumps(payload))
                resp = client.post(endpoint.url, json=payload, headers=headers, timeout=endpoint.timeout_s)
                body_bytes = resp.content
                latency = time.perf_counter() - t0
                if endpoint.debug_wire:
                    log.debug("response %s [%d] %s", prompt.case_id, resp.status_code, body_bytes[:4000])
                if resp.status_code == 200:
                    return ModelReply(reply_text(json.loads(body_bytes)), latency, attempts, False)
                transient = resp.status_code in TRANSIENT_STATUS
                log.warning("%s: HTTP %d (attempt %d)", prompt.case_id, resp.status_code, attempts)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                latency = time.perf_counter() - t0
                transient = True
                log.warning("%s: %s (attempt %d)", prompt.case_id, type(exc).__name__, attempts)
            except ValueError as exc:
                latency = time.perf_counter() - t0
                log.warning("%s: malformed response: %s", prompt.case_id, exc)
            if not transient or attempts > endpoint.max_retries:
                return ModelReply("", latency, attempts, True)
            time.sleep(endpoint.backoff_s * 2 ** (attempts - 1))
    finally:
        if own_client:
            client.close()


def complete_many(endpoint: ModelEndpoint, prompts: Sequence[RenderedPrompt]):
    """Yield replies in prompt order with at most ``parallelism`` requests in flight."""
    endpoint.validate()
    endpoint.headers()  # fail fast on a missing credential
    limits = httpx.Limits(max_connections=endpoint.parallelism)
    with httpx.Client(timeout=endpoint.timeout_s, limits=limits) as client:
        with ThreadPoolExecutor(max_workers=endpoint.parallelism) as pool:
            yield from pool.map(lambda p: complete(endpoint, p, client), prompts)
