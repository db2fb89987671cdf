"""Three-stage generation: prompt -> brief -> chain -> document.

Each stage retries up to three times on malformed replies before the
whole run fails with a StageError naming the stage.  Transcripts record
replay keys, attempt counts and raw replies; wall-clock timings stay
in memory and are deliberately excluded from the canonical JSON so two
replayed runs serialize byte-identically.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, TypeVar

from ..diagnostics import Diagnostic
from ..registry import Catalog, builtin_catalog
from ..wire import ParseError, ScriptDocument, document_to_json, dumps_canonical, serialize
from ..wire import parse_document_tolerant
from .backends import Backend, BackendError, BackendRequest
from .parsing import (
    AgentParseError,
    ComponentChain,
    DesignBrief,
    canonical_prompt,
    extract_json,
    parse_brief,
    parse_chain,
)
from .templates import stage1_prompt, stage2_prompt, stage3_prompt

__all__ = [
    "MAX_ATTEMPTS",
    "PipelineResult",
    "PipelineTranscript",
    "StageError",
    "StageRecord",
    "persist_run",
    "run_pipeline",
    "transcript_to_json",
]

MAX_ATTEMPTS = 3

T = TypeVar("T")


class StageError(RuntimeError):
    def __init__(self, stage: int, attempts: int, message: str):
        self.stage = stage
        self.attempts = attempts
        super().__init__(f"stage {stage} failed after {attempts} attempt(s): {message}")


@dataclass(frozen=True)
class StageRecord:
    stage: int
    key: str
    attempts: int
    reply: str


@dataclass(frozen=True)
class PipelineTranscript:
    prompt: str
    stages: tuple[StageRecord, ...]
    document: ScriptDocument
    timing: dict[str, float]


@dataclass(frozen=True)
class PipelineResult:
    document: ScriptDocument
    transcript: PipelineTranscript
    diagnostics: tuple[Diagnostic, ...]
    brief: DesignBrief
    chain: ComponentChain


def _attempt(
    backend: Backend,
    request: BackendRequest,
    parse: Callable[[str], T],
) -> tuple[T, StageRecord]:
    last = "no attempt made"
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            reply = backend.complete(request)
        except BackendError as exc:
            last = str(exc)
            continue
        try:
            value = parse(reply)
        except (AgentParseError, ParseError) as exc:
            last = f"unusable reply: {exc}"
            continue
        return value, StageRecord(request.stage, request.key, attempt, reply)
    raise StageError(request.stage, MAX_ATTEMPTS, last)


def run_pipeline(
    prompt: str,
    backend: Backend,
    catalog: Catalog | None = None,
) -> PipelineResult:
    """Generate a document from a natural-language prompt.

    Raises StageError when a stage exhausts its retries.  The returned
    diagnostics are tolerant-parse notes from reading the final stage's
    JSON (repairs the parser had to apply), not validation results.
    """
    if not prompt.strip():
        raise StageError(1, 0, "prompt must be non-empty")
    catalog = catalog or builtin_catalog()
    timing: dict[str, float] = {}

    started = time.perf_counter()
    brief, record1 = _attempt(
        backend,
        BackendRequest(1, stage1_prompt(prompt), canonical_prompt(prompt)),
        parse_brief,
    )
    timing["stage1"] = time.perf_counter() - started

    started = time.perf_counter()
    chain, record2 = _attempt(
        backend,
        BackendRequest(2, stage2_prompt(brief, catalog), brief.key_material()),
        parse_chain,
    )
    timing["stage2"] = time.perf_counter() - started

    started = time.perf_counter()
    parsed: dict[str, Any] = {}

    def parse_stage3(reply: str) -> ScriptDocument:
        document, notes = parse_document_tolerant(extract_json(reply))
        parsed["notes"] = notes
        return document

    document, record3 = _attempt(
        backend,
        BackendRequest(3, stage3_prompt(chain, catalog), chain.key_material()),
        parse_stage3,
    )
    timing["stage3"] = time.perf_counter() - started

    document = document.with_prompt(prompt)
    transcript = PipelineTranscript(prompt, (record1, record2, record3), document, timing)
    return PipelineResult(document, transcript, tuple(parsed.get("notes", ())), brief, chain)


def transcript_to_json(
    transcript: PipelineTranscript, include_timing: bool = False
) -> dict[str, Any]:
    """Canonical transcript encoding; timing only on request."""
    data: dict[str, Any] = {
        "schema_version": 1,
        "prompt": transcript.prompt,
        "stages": [
            {"stage": r.stage, "key": r.key, "attempts": r.attempts, "reply": r.reply}
            for r in transcript.stages
        ],
        "document": document_to_json(transcript.document),
    }
    if include_timing:
        data["timing"] = dict(transcript.timing)
    return data


def persist_run(run_dir: Path | str, result: PipelineResult) -> tuple[Path, Path]:
    """Write transcript.json and script.pscript.json into run_dir."""
    directory = Path(run_dir)
    directory.mkdir(parents=True, exist_ok=True)
    transcript_path = directory / "transcript.json"
    script_path = directory / "script.pscript.json"
    transcript_path.write_text(
        dumps_canonical(transcript_to_json(result.transcript)) + "\n", encoding="utf-8"
    )
    script_path.write_text(serialize(result.document) + "\n", encoding="utf-8")
    return transcript_path, script_path
