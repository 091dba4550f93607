"""Chat-completion backends.

Two implementations of one small interface: a scripted mock whose replies
are keyed by (prompt hash, seed) for fully reproducible tests, and a live
HTTP client speaking the common chat-completions JSON protocol with
bounded concurrency and retry.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

from .prompting import PromptBundle

# Separates system from user text inside the hash preimage; a record
# separator cannot appear in either part, so the pair is unambiguous.
_HASH_SEP = "\n\x1e\n"

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_S = (1.0, 2.0, 4.0)


class BackendError(RuntimeError):
    """Generation failed; carries one log line per attempt."""

    def __init__(self, message: str, attempts: Optional[list[str]] = None):
        self.attempts = list(attempts or [])
        super().__init__(message)


class ScriptMissError(BackendError):
    """The mock script has no entry for the requested (hash, seed)."""


def prompt_hash(bundle: PromptBundle) -> str:
    preimage = bundle.system + _HASH_SEP + bundle.user
    return hashlib.sha256(preimage.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationRequest:
    bundle: PromptBundle
    temperature: float
    seed_hint: int = 0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.seed_hint < 0:
            raise ValueError("seed_hint must be >= 0")


@dataclass(frozen=True)
class GenerationResult:
    raw_text: str
    backend_id: str
    latency_ms: int = 0


class LlmBackend(Protocol):
    def generate(self, request: GenerationRequest) -> GenerationResult: ...


class MockBackend:
    """Deterministic scripted backend.

    The script is JSONL, one object per line:
    ``{"prompt_sha256": ..., "seed": ..., "response": ...}``. Lookup is by
    the exact prompt hash plus the caller's seed hint, so any change to
    prompt assembly shows up as a loud script miss instead of a silently
    different reply.
    """

    backend_id = "mock"

    def __init__(self, script_path: Optional[str] = None):
        self._responses: dict[tuple[str, int], str] = {}
        if script_path:
            self.load_script(script_path)

    def load_script(self, path: str) -> None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    key = (str(entry["prompt_sha256"]), int(entry["seed"]))
                    response = str(entry["response"])
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise BackendError(f"bad script line {lineno} in {path}: {exc}") from None
                self._responses[key] = response

    def add(self, bundle: PromptBundle, seed: int, response: str) -> None:
        self._responses[(prompt_hash(bundle), seed)] = response

    def add_hash(self, sha: str, seed: int, response: str) -> None:
        self._responses[(sha, seed)] = response

    def save_script(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for (sha, seed), response in sorted(self._responses.items()):
                fh.write(
                    json.dumps(
                        {"prompt_sha256": sha, "seed": seed, "response": response},
                        ensure_ascii=False,
                    )
                    + "\n"
                )

    def __len__(self) -> int:
        return len(self._responses)

    def generate(self, request: GenerationRequest) -> GenerationResult:
        key = (prompt_hash(request.bundle), request.seed_hint)
        try:
            response = self._responses[key]
        except KeyError:
            raise ScriptMissError(
                f"no scripted response for prompt {key[0]} seed {key[1]}"
            ) from None
        return GenerationResult(raw_text=response, backend_id=self.backend_id)


def _default_transport(url: str, headers: dict, payload: dict, timeout: float):
    import requests

    resp = requests.post(url, headers=headers, json=payload, timeout=timeout)
    return resp.status_code, resp.json()


class HttpBackend:
    """Live client for an OpenAI-compatible chat-completions endpoint.

    Transport and sleep are injectable so retry behavior is testable
    without a network. A semaphore caps concurrent in-flight requests.
    """

    backend_id = "live"

    def __init__(
        self,
        model: str,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "OPENAI_API_KEY",
        max_in_flight: int = 4,
        timeout_s: float = 120.0,
        transport: Optional[Callable] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.model = model
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self._transport = transport or _default_transport
        self._sleep = sleep
        self._gate = threading.Semaphore(max_in_flight)

    def _headers(self) -> dict:
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise BackendError(f"environment variable {self.api_key_env} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def generate(self, request: GenerationRequest) -> GenerationResult:
        with self._gate:
            return self._generate_once_gated(request)

    def _generate_once_gated(self, request: GenerationRequest) -> GenerationResult:
        url = f"{self.base_url}/chat/completions"
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.bundle.system},
                {"role": "user", "content": request.bundle.user},
            ],
            "temperature": request.temperature,
        }
        headers = self._headers()
        attempts: list[str] = []
        for attempt in range(RETRY_ATTEMPTS):
            start = time.monotonic()
            try:
                status, body = self._transport(url, headers, payload, self.timeout_s)
                if status != 200:
                    raise BackendError(f"HTTP {status}: {str(body)[:200]}")
                text = body["choices"][0]["message"]["content"]
                if not text:
                    raise BackendError("empty completion text")
                latency = int((time.monotonic() - start) * 1000)
                return GenerationResult(text, self.backend_id, latency)
            except Exception as exc:  # noqa: BLE001 - every failure is retryable here
                attempts.append(f"attempt {attempt + 1}: {exc}")
                if attempt + 1 < RETRY_ATTEMPTS:
                    self._sleep(RETRY_BACKOFF_S[attempt])
        raise BackendError(
            f"generation failed after {RETRY_ATTEMPTS} attempts", attempts
        )
