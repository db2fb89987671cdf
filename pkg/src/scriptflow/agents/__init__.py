"""Staged text-to-script generation.

Three model calls separate concerns: understand the request (design
brief), plan the dataflow (component chain), emit the wire document.
Backends are pluggable; the mock backend replays recorded replies and
never touches the network.
"""
from __future__ import annotations

from .backends import (
    Backend,
    BackendConfig,
    BackendError,
    BackendRequest,
    LiveBackend,
    MockBackend,
    make_backend,
)
from .parsing import (
    AgentParseError,
    BriefInput,
    ChainBinding,
    ChainStep,
    ComponentChain,
    DesignBrief,
    canonical_prompt,
    extract_json,
    parse_brief,
    parse_chain,
    render_brief,
    render_chain,
)
from .pipeline import (
    PipelineResult,
    PipelineTranscript,
    StageError,
    StageRecord,
    persist_run,
    run_pipeline,
    transcript_to_json,
)

__all__ = [
    "AgentParseError",
    "Backend",
    "BackendConfig",
    "BackendError",
    "BackendRequest",
    "BriefInput",
    "ChainBinding",
    "ChainStep",
    "ComponentChain",
    "DesignBrief",
    "LiveBackend",
    "MockBackend",
    "PipelineResult",
    "PipelineTranscript",
    "StageError",
    "StageRecord",
    "canonical_prompt",
    "extract_json",
    "make_backend",
    "parse_brief",
    "parse_chain",
    "persist_run",
    "render_brief",
    "render_chain",
    "run_pipeline",
    "transcript_to_json",
]
