"""The HTTP service: three model endpoints plus health, JSON over POST.

Routes (every reply echoes the request ``id`` unchanged):

* ``POST /v1/answer``            {id, question, context} -> {id, answer, score}
* ``POST /v1/generate_question`` {id, decomposition: [step, ...]} -> {id, question}
* ``POST /v1/parse_qdmr``        {id, question} -> {id, decomposition: [step, ...]}
* ``GET  /healthz``              -> {status: "ok"} once models are loaded

Status codes: 400 malformed request, 404 endpoint without a configured model
or strict fixture miss, 500 model failure, 503 while models are loading.

Two ways to stand the service up: :func:`serve` loads the configured model
runners, :func:`echo_mode` answers from a fixture file instead (the same
fixture formats, lookup rules, and miss behavior as the in-process stub
backends shipped with ``bpb``, so both sides of a contract test see
identical replies).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from bpb.backends import (
    FixtureMissing,
    StubQGBackend,
    StubRCBackend,
    normalize_question,
)
from bpb.qdmr import parse_decomposition

from .config import AdapterConfig
from .runners import ParseRunner, QGRunner, RCRunner, load_runner

__version__ = "0.1.0"


class AnswerRequest(BaseModel):
    id: str
    question: str
    context: str


class GenerateQuestionRequest(BaseModel):
    id: str
    decomposition: list[str] = Field(min_length=1)


class ParseRequest(BaseModel):
    id: str
    question: str


@dataclass
class FixtureParseBackend:
    """Decomposition lookup keyed on the normalized question text.

    Fixture entries are ``{"question", "decomposition"}`` where the
    decomposition is a list of step texts or one canonical string. A lenient
    miss returns no steps; a strict miss raises :class:`FixtureMissing`.
    """

    entries: list[dict]
    strict: bool = False

    def __post_init__(self) -> None:
        self._table: dict[str, list[str]] = {}
        for entry in self.entries:
            steps = entry["decomposition"]
            if isinstance(steps, str):
                steps = [s.text for s in parse_decomposition(steps).steps]
            self._table.setdefault(normalize_question(entry["question"]), list(steps))

    def parse(self, question: str) -> list[str]:
        hit = self._table.get(normalize_question(question))
        if hit is not None:
            return list(hit)
        if self.strict:
            raise FixtureMissing(f"no fixture for question {question!r}")
        return []


@dataclass
class ServiceState:
    """Loaded runners plus the readiness flag the handlers consult."""

    rc: RCRunner | None = None
    qg: QGRunner | None = None
    parser: ParseRunner | None = None
    ready: threading.Event = field(default_factory=threading.Event)
    load_error: str | None = None
    # Model invocations are serialized; runners that batch do so internally
    # (max_batch is handed to their factories).
    lock: threading.Lock = field(default_factory=threading.Lock)


def create_app(state: ServiceState) -> FastAPI:
    """The FastAPI application over ``state`` (shared by serve and echo)."""
    app = FastAPI(title="bpb model adapter", version=__version__)
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request, exc):  # noqa: ANN001 - fastapi signature
        detail = [
            {
                "loc": [str(part) for part in error.get("loc", ())],
                "msg": str(error.get("msg", "")),
                "type": str(error.get("type", "")),
            }
            for error in exc.errors()
        ]
        return JSONResponse(
            status_code=400, content={"error": "schema violation", "detail": detail}
        )

    def not_ready() -> JSONResponse | None:
        if state.ready.is_set():
            return None
        if state.load_error is not None:
            message = f"model load failed: {state.load_error}"
        else:
            message = "models loading"
        return JSONResponse(status_code=503, content={"error": message})

    def run_model(request_id: str, runner_name: str, runner, call) -> JSONResponse | dict:
        if runner is None:
            return JSONResponse(
                status_code=404,
                content={"id": request_id, "error": f"no {runner_name} model configured"},
            )
        try:
            with state.lock:
                return call(runner)
        except FixtureMissing as exc:
            return JSONResponse(status_code=404, content={"id": request_id, "error": str(exc)})
        except Exception as exc:  # model code is user-supplied; report, don't crash
            return JSONResponse(
                status_code=500,
                content={"id": request_id, "error": f"model failure: {exc}"},
            )

    @app.post("/v1/answer")
    def answer(req: AnswerRequest):
        if (busy := not_ready()) is not None:
            return busy

        def call(runner):
            text, score = runner.answer(req.question, req.context)
            return {"id": req.id, "answer": str(text), "score": float(score)}

        return run_model(req.id, "reading", state.rc, call)

    @app.post("/v1/generate_question")
    def generate_question(req: GenerateQuestionRequest):
        if (busy := not_ready()) is not None:
            return busy

        def call(runner):
            return {"id": req.id, "question": str(runner.generate(req.decomposition))}

        return run_model(req.id, "question-generation", state.qg, call)

    @app.post("/v1/parse_qdmr")
    def parse_qdmr(req: ParseRequest):
        if (busy := not_ready()) is not None:
            return busy

        def call(runner):
            steps = [str(step) for step in runner.parse(req.question)]
            return {"id": req.id, "decomposition": steps}

        return run_model(req.id, "parsing", state.parser, call)

    @app.get("/healthz")
    def healthz():
        if (busy := not_ready()) is not None:
            return busy
        return {"status": "ok"}

    return app


def build_state(config: AdapterConfig, *, background: bool = True) -> ServiceState:
    """Load the configured runners, by default on a background thread.

    Until loading finishes every endpoint replies 503; a load failure leaves
    the service in that state with the error in the body.
    """
    state = ServiceState()

    def load() -> None:
        try:
            if config.rc_model_id:
                state.rc = load_runner(config.rc_model_id, max_batch=config.max_batch)
            if config.qg_model_id:
                state.qg = load_runner(config.qg_model_id, max_batch=config.max_batch)
            if config.parser_model_id:
                state.parser = load_runner(
                    config.parser_model_id, max_batch=config.max_batch
                )
        except Exception as exc:  # surfaced via /healthz, not a crash
            state.load_error = str(exc)
        else:
            state.ready.set()

    if background:
        threading.Thread(target=load, daemon=True, name="bpb-adapter-loader").start()
    else:
        load()
    return state


def serve(config: AdapterConfig, *, host: str = "127.0.0.1", block: bool = True) -> FastAPI:
    """Stand up the model-backed service; blocks in uvicorn unless told not to."""
    app = create_app(build_state(config))
    if block:
        import uvicorn

        uvicorn.run(app, host=host, port=config.port)
    return app


def _check_entries(entries: object, required: tuple[str, ...], label: str) -> list[dict]:
    if not isinstance(entries, list):
        raise ValueError(f"{label} fixtures must be a JSON list")
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or not set(required) <= set(entry):
            raise ValueError(f"{label} fixture entry {i} must have {'/'.join(required)}")
    return entries


def load_fixture_sections(path: str | Path) -> dict[str, list[dict]]:
    """Read an echo fixture file.

    Either a bare JSON list of reading fixtures (``{"question",
    "context_sha256", "answer"}``, the same file the in-process stub reads)
    or an object with any of the sections ``rc``, ``qg``
    (``{"decomposition", "question"}``), and ``parse`` (``{"question",
    "decomposition"}``).
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(raw, list):
        raw = {"rc": raw}
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: fixture file must be a JSON list or object")
    unknown = sorted(set(raw) - {"rc", "qg", "parse"})
    if unknown:
        raise ValueError(f"{path}: unknown fixture sections: {', '.join(unknown)}")
    return {
        "rc": _check_entries(raw.get("rc", []), ("question", "context_sha256", "answer"), "rc"),
        "qg": _check_entries(raw.get("qg", []), ("decomposition", "question"), "qg"),
        "parse": _check_entries(raw.get("parse", []), ("question", "decomposition"), "parse"),
    }


def echo_mode(fixtures: str | Path, *, strict: bool = False) -> FastAPI:
    """The service answering from fixtures instead of models.

    Lookup and miss behavior match the in-process stub backends exactly:
    lenient misses reply 200 with an empty answer (or the stub's fallback
    question), strict misses reply 404.
    """
    sections = load_fixture_sections(fixtures)
    state = ServiceState(
        rc=StubRCBackend(entries=sections["rc"], strict=strict),
        qg=StubQGBackend(entries=sections["qg"], strict=strict),
        parser=FixtureParseBackend(entries=sections["parse"], strict=strict),
    )
    state.ready.set()
    return create_app(state)
