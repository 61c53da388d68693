"""Reading, question-generation, and parsing backends.

Three wire protocols, all JSON-over-HTTP POST with an ``id`` echo:

* ``/v1/answer``            {id, question, context} -> {id, answer, score}
* ``/v1/generate_question`` {id, decomposition: [step, ...]} -> {id, question}
* ``/v1/parse_qdmr``        {id, question} -> {id, decomposition: [step, ...]}

Tests and offline runs use stub backends that answer by exact-match lookup
in a fixture file instead of a model. The reading-comprehension fixture file
is a JSON list of ``{"question", "context_sha256", "answer"}`` objects; a
``context_sha256`` of ``"*"`` matches any context.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import requests


class BackendError(Exception):
    """Base class for backend failures."""


class BackendUnavailable(BackendError):
    """The backend cannot be reached, or kept failing after retries."""


class BackendMalformedReply(BackendError):
    """The backend replied, but not with the expected shape."""


class FixtureMissing(BackendError):
    """A strict stub backend had no fixture for the query."""


class RCBackend(Protocol):
    def answer(self, question: str, context: str) -> tuple[str, float]:
        """Answer ``question`` against ``context``; returns (text, score)."""


class QGBackend(Protocol):
    def generate(self, steps: Sequence[str]) -> str:
        """Render a decomposition's step texts into one question."""


class ParseBackend(Protocol):
    def parse(self, question: str) -> list[str]:
        """Decompose ``question``; returns the list of step texts."""


_WS_RE = re.compile(r"\s+")


def normalize_question(question: str) -> str:
    """Lookup key for fixture matching: case, spacing, and the final ? or .
    are insignificant."""
    q = _WS_RE.sub(" ", question.strip()).lower()
    return q.rstrip("?. ").strip()


def context_digest(context: str) -> str:
    return hashlib.sha256(context.encode("utf-8")).hexdigest()


ANY_CONTEXT = "*"


def load_rc_fixtures(path: str | Path) -> list[dict]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError(f"{path}: fixture file must hold a JSON list")
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or not {"question", "context_sha256", "answer"} <= set(entry):
            raise ValueError(f"{path}: entry {i} missing question/context_sha256/answer")
    return data


@dataclass
class StubRCBackend:
    """Answers by exact-match lookup on (normalized question, context digest).

    In strict mode a miss raises :class:`FixtureMissing`; otherwise the miss
    is recorded on :attr:`misses` and ``default_answer`` comes back with a
    zero score. Hits score 1.0.
    """

    entries: list[dict]
    strict: bool = False
    default_answer: str = ""
    misses: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._table: dict[tuple[str, str], str] = {}
        for entry in self.entries:
            key = (normalize_question(entry["question"]), entry["context_sha256"])
            self._table.setdefault(key, str(entry["answer"]))

    def answer(self, question: str, context: str) -> tuple[str, float]:
        key = normalize_question(question)
        hit = self._table.get((key, context_digest(context)))
        if hit is None:
            hit = self._table.get((key, ANY_CONTEXT))
        if hit is not None:
            return hit, 1.0
        if self.strict:
            raise FixtureMissing(f"no fixture for question {question!r}")
        self.misses.append((question, context_digest(context)))
        return self.default_answer, 0.0


def stub_backend(
    fixtures: str | Path | list[dict], strict: bool = False, default_answer: str = ""
) -> StubRCBackend:
    entries = fixtures if isinstance(fixtures, list) else load_rc_fixtures(fixtures)
    return StubRCBackend(entries=entries, strict=strict, default_answer=default_answer)


def serialize_steps(steps: Sequence[str]) -> str:
    return " ;".join(f"return {s.strip()}" for s in steps)


@dataclass
class StubQGBackend:
    """Question generation by lookup on the serialized decomposition.

    Fixture entries are ``{"decomposition": <serialized or list>, "question"}``.
    A lenient miss falls back to phrasing the root step.
    """

    entries: list[dict]
    strict: bool = False

    def __post_init__(self) -> None:
        self._table: dict[str, str] = {}
        for entry in self.entries:
            dec = entry["decomposition"]
            key = serialize_steps(dec) if isinstance(dec, list) else str(dec)
            self._table.setdefault(key, str(entry["question"]))

    def generate(self, steps: Sequence[str]) -> str:
        key = serialize_steps(steps)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        if self.strict:
            raise FixtureMissing(f"no fixture for decomposition {key!r}")
        return f"What is {steps[-1].strip()}?"


def load_qg_fixtures(path: str | Path) -> StubQGBackend:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError(f"{path}: fixture file must hold a JSON list")
    return StubQGBackend(entries=data)


class _HttpClient:
    """Shared POST-with-retries plumbing for the wire protocols."""

    def __init__(
        self,
        base_url: str,
        timeout: float = 30.0,
        retries: int = 2,
        backoff: float = 0.2,
        session: requests.Session | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self._ids = itertools.count(1)

    def next_id(self, prefix: str) -> str:
        return f"{prefix}-{next(self._ids)}"

    def post(self, route: str, payload: dict) -> dict:
        url = f"{self.base_url}{route}"
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                reply = self.session.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
            else:
                if reply.status_code >= 500:
                    last_error = BackendUnavailable(f"{url} replied {reply.status_code}")
                elif reply.status_code >= 400:
                    raise BackendMalformedReply(f"{url} rejected the request: {reply.status_code}")
                else:
                    try:
                        body = reply.json()
                    except ValueError as exc:
                        raise BackendMalformedReply(f"{url} returned non-JSON body") from exc
                    if body.get("id") != payload["id"]:
                        raise BackendMalformedReply(f"{url} did not echo the request id")
                    return body
            if attempt < self.retries and self.backoff > 0:
                time.sleep(self.backoff * (attempt + 1))
        raise BackendUnavailable(f"{url} unreachable after {self.retries + 1} attempts") from last_error


class HttpRCBackend:
    """Reading backend speaking the ``/v1/answer`` protocol."""

    def __init__(self, base_url: str, **kwargs) -> None:
        self._client = _HttpClient(base_url, **kwargs)

    def answer(self, question: str, context: str) -> tuple[str, float]:
        payload = {"id": self._client.next_id("rc"), "question": question, "context": context}
        body = self._client.post("/v1/answer", payload)
        answer = body.get("answer")
        if not isinstance(answer, str):
            raise BackendMalformedReply("reply lacks a string 'answer'")
        score = body.get("score", 0.0)
        return answer, float(score) if isinstance(score, (int, float)) else 0.0


class HttpQGBackend:
    """Question-generation backend speaking ``/v1/generate_question``."""

    def __init__(self, base_url: str, **kwargs) -> None:
        self._client = _HttpClient(base_url, **kwargs)

    def generate(self, steps: Sequence[str]) -> str:
        payload = {"id": self._client.next_id("qg"), "decomposition": list(steps)}
        body = self._client.post("/v1/generate_question", payload)
        question = body.get("question")
        if not isinstance(question, str):
            raise BackendMalformedReply("reply lacks a string 'question'")
        return question


class HttpParseBackend:
    """Decomposition backend speaking ``/v1/parse_qdmr``."""

    def __init__(self, base_url: str, **kwargs) -> None:
        self._client = _HttpClient(base_url, **kwargs)

    def parse(self, question: str) -> list[str]:
        payload = {"id": self._client.next_id("parse"), "question": question}
        body = self._client.post("/v1/parse_qdmr", payload)
        steps = body.get("decomposition")
        if not isinstance(steps, list) or not all(isinstance(s, str) for s in steps):
            raise BackendMalformedReply("reply lacks a 'decomposition' list of strings")
        return steps
