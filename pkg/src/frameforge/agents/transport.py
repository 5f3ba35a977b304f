"""Remote transports: HTTP chat completion, file-backed fixtures, recording."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from ..errors import AuthError, RemoteTimeout, TransportError
from .profiles import ModelProfile

ENV_URL = "FRAMEFORGE_API_URL"
ENV_KEY = "FRAMEFORGE_API_KEY"


@dataclass(frozen=True)
class TransportReply:
    text: str
    input_tokens: int
    output_tokens: int


class HttpTransport:
    """OpenAI-compatible chat-completion endpoint."""

    def __init__(self, base_url: str, api_key: str = ""):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key

    @classmethod
    def from_env(cls) -> "HttpTransport":
        url = os.environ.get(ENV_URL)
        if not url:
            raise TransportError(f"{ENV_URL} not set")
        return cls(url, os.environ.get(ENV_KEY, ""))

    def send(self, role: str, prompt: str, profile: ModelProfile) -> TransportReply:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": profile.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        try:
            resp = requests.post(f"{self.base_url}/chat/completions",
                                 json=body, headers=headers,
                                 timeout=profile.timeout_s)
        except requests.Timeout as exc:
            raise RemoteTimeout(f"{role}: no response within {profile.timeout_s}s") from exc
        except requests.RequestException as exc:
            raise TransportError(f"{role}: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"{role}: HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise TransportError(f"{role}: HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            payload = resp.json()
            text = payload["choices"][0]["message"]["content"]
            usage = payload.get("usage", {})
        except (ValueError, KeyError, IndexError) as exc:
            raise TransportError(f"{role}: malformed completion payload") from exc
        return TransportReply(text=text,
                              input_tokens=int(usage.get("prompt_tokens", 0)),
                              output_tokens=int(usage.get("completion_tokens", 0)))


class FixtureTransport:
    """Replays recorded exchanges from one JSON file per (role, attempt).

    Files are named ``<role>_<attempt>.json`` with 1-based attempts; when an
    attempt has no file the highest recorded attempt for that role repeats,
    so a single file models an agent that keeps producing the same output.
    A file may carry {"error": "timeout"|"transport"|"auth"} instead of text.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self._attempts: dict[str, int] = {}

    def _path(self, role: str, attempt: int) -> Path:
        return self.directory / f"{role}_{attempt:02d}.json"

    def send(self, role: str, prompt: str, profile: ModelProfile) -> TransportReply:
        attempt = self._attempts.get(role, 0) + 1
        self._attempts[role] = attempt
        path = self._path(role, attempt)
        while attempt > 1 and not path.exists():
            attempt -= 1
            path = self._path(role, attempt)
        if not path.exists():
            raise TransportError(f"no fixture for role {role!r} in {self.directory}")
        doc = json.loads(path.read_text())
        if "error" in doc:
            kind = doc["error"]
            if kind == "timeout":
                raise RemoteTimeout(f"{role}: fixture timeout")
            if kind == "auth":
                raise AuthError(f"{role}: fixture auth failure")
            raise TransportError(f"{role}: fixture transport failure")
        return TransportReply(text=doc["text"],
                              input_tokens=int(doc.get("input_tokens", 0)),
                              output_tokens=int(doc.get("output_tokens", 0)))


class RecordingTransport:
    """Wraps a transport and writes each exchange as a fixture file."""

    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._attempts: dict[str, int] = {}

    def send(self, role: str, prompt: str, profile: ModelProfile) -> TransportReply:
        reply = self.inner.send(role, prompt, profile)
        attempt = self._attempts.get(role, 0) + 1
        self._attempts[role] = attempt
        path = self.directory / f"{role}_{attempt:02d}.json"
        path.write_text(json.dumps({
            "text": reply.text,
            "input_tokens": reply.input_tokens,
            "output_tokens": reply.output_tokens,
        }, indent=2))
        return reply


def invoke_remote(transport, role: str, prompt: str, profile: ModelProfile,
                  max_attempts: int = 3, backoff_s: float = 0.5) -> TransportReply:
    """One remote call with bounded exponential backoff on transport faults.

    Timeouts and auth failures raise immediately; schema problems are the
    caller's checkpoint logic, never retried here.
    """
    attempt = 0
    while True:
        attempt += 1
        try:
            return transport.send(role, prompt, profile)
        except TransportError:
            if attempt >= max_attempts:
                raise
            time.sleep(backoff_s * 2 ** (attempt - 1))
