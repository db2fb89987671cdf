"""Model backends: recorded replay and a live chat endpoint.

The mock backend keys replies by (stage, payload hash) rather than by
the full prompt text, so prompt template wording can evolve without
invalidating recorded fixtures.  Replay misses either raise or echo,
depending on the configured fallback; the default raises, because a
silent echo hides missing fixtures.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests

from .parsing import key_for

__all__ = [
    "Backend",
    "BackendConfig",
    "BackendError",
    "BackendRequest",
    "LiveBackend",
    "MockBackend",
    "make_backend",
]

DEFAULT_TEMPERATURE = 0.2
FIXTURES_DIR = Path(__file__).parent / "fixtures"


class BackendError(RuntimeError):
    """The backend could not produce a reply."""


@dataclass(frozen=True)
class BackendRequest:
    """One completion request.

    `prompt` is the full text sent to a live model.  `key_material` is
    the canonical stage payload used for replay lookup; it must not
    depend on template wording.
    """

    stage: int
    prompt: str
    key_material: str

    @property
    def key(self) -> str:
        return key_for(self.key_material)


class Backend(Protocol):
    def complete(self, request: BackendRequest) -> str: ...


@dataclass(frozen=True)
class BackendConfig:
    backend: str = "mock"
    api_url: str = ""
    api_key: str = ""
    model: str = ""
    temperature: float = DEFAULT_TEMPERATURE
    timeout: float = 60.0
    fixtures_dir: Path = field(default=FIXTURES_DIR)
    fallback: str = "error"

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "BackendConfig":
        env = os.environ if environ is None else environ
        return cls(
            backend=env.get("SF_BACKEND", "mock"),
            api_url=env.get("SF_API_URL", ""),
            api_key=env.get("SF_API_KEY", ""),
            model=env.get("SF_MODEL", ""),
            temperature=float(env.get("SF_TEMPERATURE", DEFAULT_TEMPERATURE)),
        )


class MockBackend:
    """Replays recorded replies from fixture files.

    Each fixture is a JSON file {"stage": n, "key": "...", "reply": "..."}.
    Every *.json file in the directory is loaded; file names carry no
    meaning beyond keeping fixtures apart.
    """

    def __init__(self, fixtures_dir: Path | str | None = None, fallback: str = "error"):
        if fallback not in ("error", "echo"):
            raise ValueError(f"fallback must be 'error' or 'echo', got {fallback!r}")
        self.fallback = fallback
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else FIXTURES_DIR
        self._replies: dict[tuple[int, str], str] = {}
        if self.fixtures_dir.is_dir():
            for path in sorted(self.fixtures_dir.glob("*.json")):
                if path.name.endswith(".pscript.json"):
                    continue
                try:
                    data = json.loads(path.read_text(encoding="utf-8"))
                    self._replies[(int(data["stage"]), str(data["key"]))] = str(data["reply"])
                except (KeyError, ValueError, TypeError) as exc:
                    raise BackendError(f"bad mock fixture {path}: {exc}") from exc

    def complete(self, request: BackendRequest) -> str:
        reply = self._replies.get((request.stage, request.key))
        if reply is not None:
            return reply
        if self.fallback == "echo":
            return request.prompt
        raise BackendError(
            f"no recorded reply for stage {request.stage} key {request.key} "
            f"(fixtures: {self.fixtures_dir})"
        )


class LiveBackend:
    """Chat-completions style HTTP backend."""

    def __init__(self, config: BackendConfig):
        if not config.api_url:
            raise BackendError("live backend needs SF_API_URL")
        self.config = config

    def complete(self, request: BackendRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        payload = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": request.prompt}],
        }
        try:
            response = requests.post(
                self.config.api_url,
                json=payload,
                headers=headers,
                timeout=self.config.timeout,
            )
            response.raise_for_status()
            data = response.json()
        except requests.RequestException as exc:
            raise BackendError(f"live backend request failed: {exc}") from exc
        except ValueError as exc:
            raise BackendError(f"live backend returned invalid JSON: {exc}") from exc
        reply = _extract_reply(data)
        if reply is None:
            raise BackendError("live backend reply had no recognizable content field")
        return reply


def _extract_reply(data: object) -> str | None:
    if isinstance(data, dict):
        choices = data.get("choices")
        if isinstance(choices, list) and choices:
            first = choices[0]
            if isinstance(first, dict):
                message = first.get("message")
                if isinstance(message, dict) and isinstance(message.get("content"), str):
                    return message["content"]
                if isinstance(first.get("text"), str):
                    return first["text"]
        for key in ("content", "completion", "reply", "text"):
            if isinstance(data.get(key), str):
                return data[key]
    return None


def make_backend(config: BackendConfig) -> Backend:
    if config.backend == "mock":
        return MockBackend(config.fixtures_dir, config.fallback)
    if config.backend == "live":
        return LiveBackend(config)
    raise BackendError(f"unknown backend {config.backend!r}; expected 'mock' or 'live'")
