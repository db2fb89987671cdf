"""Text-to-parametric-script toolkit.

Turns natural-language briefs into executable dataflow scripts through
a staged language-model pipeline, then validates, repairs, evaluates
and renders them.  See the README for the CLI and HTTP surfaces.
"""
from __future__ import annotations

from .diagnostics import Diagnostic, count_errors, diagnostic_to_json, sort_diagnostics
from .evaluator import EvalResult, evaluate, result_to_json
from .graph import GraphCycleError, ScriptGraph, build_graph
from .lint import Repair, apply_repairs, infer_kinds, validate
from .registry import (
    Catalog,
    CatalogError,
    ComponentSpec,
    PortSpec,
    builtin_catalog,
    catalog_to_json,
    is_coercible,
    load_catalog,
    normalize,
    port_of,
    resolve_name,
)
from .wire import (
    ParseError,
    Position,
    ScriptDocument,
    ScriptEdge,
    ScriptNode,
    SliderPin,
    parse_document_strict,
    parse_document_tolerant,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CatalogError",
    "ComponentSpec",
    "Diagnostic",
    "EvalResult",
    "GraphCycleError",
    "ParseError",
    "PortSpec",
    "Position",
    "Repair",
    "ScriptDocument",
    "ScriptEdge",
    "ScriptGraph",
    "ScriptNode",
    "SliderPin",
    "__version__",
    "apply_repairs",
    "build_graph",
    "builtin_catalog",
    "catalog_to_json",
    "count_errors",
    "diagnostic_to_json",
    "evaluate",
    "infer_kinds",
    "is_coercible",
    "load_catalog",
    "normalize",
    "parse_document_strict",
    "parse_document_tolerant",
    "port_of",
    "resolve_name",
    "result_to_json",
    "serialize",
    "sort_diagnostics",
    "validate",
]
