"""HTTP service exposing the pipeline, validator and evaluator.

All endpoints live under /api/v1.  Request and response bodies are plain
JSON; errors use one shape everywhere:

    {"error": {"code": "...", "message": "...", "location": "..."}}

with "location" present only when the failure can be pinned to a JSON
path or pipeline stage.  /api/v1/validate returns byte-identical output
to ``scriptflow validate --json`` so the two routes can be diffed.
"""
from __future__ import annotations

import asyncio
import json
import threading
import uuid
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .agents.backends import Backend, BackendConfig, make_backend
from .agents.pipeline import StageError, run_pipeline, transcript_to_json
from .diagnostics import diagnostic_to_json
from .evaluator import evaluate, result_to_json
from .graph import GraphCycleError
from .lint import apply_repairs, render_diagnostics_json, select_compatible, validate
from .registry import Catalog, catalog_to_json, load_catalog
from .wire import (
    ParseError,
    ScriptDocument,
    document_to_json,
    dumps_canonical,
    parse_document_strict,
)

_MEDIA = "application/json"


def _error(status: int, code: str, message: str, location: str | None = None) -> JSONResponse:
    body: dict[str, Any] = {"error": {"code": code, "message": message}}
    if location is not None:
        body["error"]["location"] = location
    return JSONResponse(body, status_code=status)


class SessionStore:
    """In-memory documents keyed by short opaque ids.  Thread-safe: the
    generate endpoint writes from a worker thread."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._docs: dict[str, ScriptDocument] = {}

    def create(self, document: ScriptDocument | None = None) -> str:
        session_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._docs[session_id] = document if document is not None else ScriptDocument()
        return session_id

    def get(self, session_id: str) -> ScriptDocument | None:
        with self._lock:
            return self._docs.get(session_id)

    def put(self, session_id: str, document: ScriptDocument) -> bool:
        with self._lock:
            if session_id not in self._docs:
                return False
            self._docs[session_id] = document
            return True

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._docs.pop(session_id, None) is not None

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._docs)


async def _read_json(request: Request) -> Any:
    try:
        return await request.json()
    except (ValueError, UnicodeDecodeError) as exc:
        raise ParseError(f"request body is not JSON: {exc}") from exc


def _document_from_body(raw: bytes) -> tuple[ScriptDocument, dict | None]:
    """Accepts either a bare document or {"document": ..., ...extras}.

    A valid document never carries a "document" key, so the shapes cannot
    collide.  Bare bodies are parsed from the raw text, which keeps
    duplicate-key detection intact; wrapped ones are re-canonicalized
    first.  Returns the wrapper (or None) alongside the document.
    """
    text = raw.decode("utf-8")
    try:
        probe = json.loads(text)
    except ValueError:
        probe = None
    if isinstance(probe, dict) and "document" in probe:
        return parse_document_strict(dumps_canonical(probe["document"])), probe
    return parse_document_strict(text), None


def create_app(
    config: BackendConfig | None = None,
    catalog: Catalog | None = None,
    frontend: Path | None = None,
    generate_timeout: float = 120.0,
    backend: Backend | None = None,
) -> FastAPI:
    config = config if config is not None else BackendConfig.from_env()
    catalog = catalog if catalog is not None else load_catalog()
    resolved_backend = backend if backend is not None else make_backend(config)
    sessions = SessionStore()

    app = FastAPI(title="scriptflow", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.sessions = sessions
    app.state.catalog = catalog

    @app.post("/api/v1/generate")
    async def generate(request: Request) -> Response:
        try:
            payload = await _read_json(request)
        except ParseError as exc:
            return _error(422, "invalid-request", str(exc))
        if not isinstance(payload, dict) or not isinstance(payload.get("prompt"), str):
            return _error(422, "invalid-request", 'body must be {"prompt": "..."}')
        prompt = payload["prompt"]
        session_id = payload.get("session")
        if session_id is not None and sessions.get(session_id) is None:
            return _error(404, "session-not-found", f"no session {session_id!r}")
        loop = asyncio.get_running_loop()
        try:
            result = await asyncio.wait_for(
                loop.run_in_executor(
                    None, lambda: run_pipeline(prompt, resolved_backend, catalog)
                ),
                timeout=generate_timeout,
            )
        except asyncio.TimeoutError:
            return _error(504, "generate-timeout",
                          f"generation exceeded {generate_timeout:g}s")
        except StageError as exc:
            return _error(502, "stage-failure", str(exc), location=f"stage{exc.stage}")
        if session_id is not None:
            sessions.put(session_id, result.document)
        body = {
            "document": document_to_json(result.document),
            "transcript": transcript_to_json(result.transcript, include_timing=True),
            "notes": [
                {"rule": d.rule, "severity": d.severity, "message": d.message}
                for d in result.diagnostics
            ],
        }
        return JSONResponse(body)

    @app.post("/api/v1/validate")
    async def validate_document(request: Request) -> Response:
        raw = await request.body()
        try:
            document, _ = _document_from_body(raw)
        except (ValueError, UnicodeDecodeError) as exc:
            location = getattr(exc, "path", None)
            return _error(422, "invalid-document", str(exc), location=location)
        diagnostics = validate(document, catalog)
        return Response(render_diagnostics_json(diagnostics), media_type=_MEDIA)

    @app.post("/api/v1/repair")
    async def repair_document(request: Request) -> Response:
        raw = await request.body()
        try:
            document, wrapper = _document_from_body(raw)
        except (ValueError, UnicodeDecodeError) as exc:
            return _error(422, "invalid-document", str(exc),
                          location=getattr(exc, "path", None))
        suggested = [
            d.repair for d in validate(document, catalog) if d.repair is not None
        ]
        if wrapper is not None and "repair_ids" in wrapper:
            wanted = wrapper["repair_ids"]
            if (not isinstance(wanted, list)
                    or any(not isinstance(i, str) for i in wanted)):
                return _error(422, "invalid-request",
                              '"repair_ids" must be a list of repair id strings')
            known = {r.id for r in suggested}
            missing = [i for i in wanted if i not in known]
            if missing:
                return _error(422, "unknown-repair",
                              f"no suggested repair with id {missing[0]!r}")
            suggested = [r for r in suggested if r.id in set(wanted)]
        applied = select_compatible(suggested)
        repaired = apply_repairs(document, applied) if applied else document
        return JSONResponse({
            "schema_version": 1,
            "applied": [r.to_json() for r in applied],
            "document": document_to_json(repaired),
            "diagnostics": [
                diagnostic_to_json(d) for d in validate(repaired, catalog)
            ],
        })

    @app.post("/api/v1/evaluate")
    async def evaluate_document(request: Request) -> Response:
        try:
            payload = await _read_json(request)
        except ParseError as exc:
            return _error(422, "invalid-request", str(exc))
        if not isinstance(payload, dict) or "document" not in payload:
            return _error(422, "invalid-request", 'body must be {"document": {...}}')
        try:
            document = parse_document_strict(dumps_canonical(payload["document"]))
        except ValueError as exc:
            return _error(422, "invalid-document", str(exc),
                          location=getattr(exc, "path", None))
        overrides: dict[int, float] = {}
        raw_overrides = payload.get("overrides") or {}
        if not isinstance(raw_overrides, dict):
            return _error(422, "invalid-request", '"overrides" must be an object')
        for key, value in raw_overrides.items():
            try:
                overrides[int(key)] = float(value)
            except (TypeError, ValueError):
                return _error(422, "invalid-request",
                              f"override {key!r}: {value!r} is not numeric")
        meshes = bool(payload.get("meshes", True))
        try:
            result = evaluate(document, catalog, overrides)
        except GraphCycleError as exc:
            return _error(422, "cyclic-document", str(exc))
        return JSONResponse(result_to_json(result, meshes=meshes))

    @app.get("/api/v1/registry")
    async def registry() -> Response:
        return Response(dumps_canonical(catalog_to_json(catalog)) + "\n", media_type=_MEDIA)

    @app.post("/api/v1/session")
    async def create_session(request: Request) -> Response:
        body = await request.body()
        document: ScriptDocument | None = None
        if body.strip():
            try:
                document, _ = _document_from_body(body)
            except (ValueError, UnicodeDecodeError) as exc:
                return _error(422, "invalid-document", str(exc),
                              location=getattr(exc, "path", None))
        session_id = sessions.create(document)
        return JSONResponse({"id": session_id}, status_code=201)

    @app.get("/api/v1/session/{session_id}")
    async def get_session(session_id: str) -> Response:
        document = sessions.get(session_id)
        if document is None:
            return _error(404, "session-not-found", f"no session {session_id!r}")
        return JSONResponse({"id": session_id, "document": document_to_json(document)})

    @app.put("/api/v1/session/{session_id}")
    async def put_session(session_id: str, request: Request) -> Response:
        raw = await request.body()
        try:
            document = parse_document_strict(raw.decode("utf-8"))
        except (ParseError, UnicodeDecodeError) as exc:
            return _error(422, "invalid-document", str(exc),
                          location=getattr(exc, "path", None))
        if not sessions.put(session_id, document):
            return _error(404, "session-not-found", f"no session {session_id!r}")
        return JSONResponse({"id": session_id, "document": document_to_json(document)})

    @app.delete("/api/v1/session/{session_id}")
    async def delete_session(session_id: str) -> Response:
        if not sessions.delete(session_id):
            return _error(404, "session-not-found", f"no session {session_id!r}")
        return JSONResponse({"id": session_id, "deleted": True})

    if frontend is not None and frontend.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend), html=True), name="frontend")

    return app
