"""Script document wire format: parsing, canonical serialization, auto-layout.

A script document is the JSON interchange form of a dataflow graph
(file extension `.pscript.json`).  Two parsers cover the two producers:

* parse_document_strict — for files and API payloads; rejects unknown
  keys and reports errors with a JSON path or byte offset.
* parse_document_tolerant — for model output; strips code fences,
  removes trailing commas, coerces string-encoded numbers, ignores
  unknown keys and fills in missing positions with a topological grid
  layout.  Every repair is reported as a Diagnostic.

Serialization is canonical: fixed key order, nodes sorted by id, edges
sorted by (to, from), so equal documents produce identical bytes.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .diagnostics import Diagnostic
from .registry import normalize

SCHEMA_VERSION = 1
FILE_SUFFIX = ".pscript.json"
LAYOUT_COLUMN = 220.0
LAYOUT_ROW = 120.0

__all__ = [
    "SCHEMA_VERSION",
    "FILE_SUFFIX",
    "LAYOUT_COLUMN",
    "LAYOUT_ROW",
    "ParseError",
    "Position",
    "SliderPin",
    "PinValue",
    "ScriptNode",
    "ScriptEdge",
    "ScriptDocument",
    "parse_document_strict",
    "parse_document_tolerant",
    "serialize",
    "document_to_json",
    "dumps_canonical",
]


class ParseError(ValueError):
    """Document rejected; carries a JSON path and/or byte offset when known."""

    def __init__(self, message: str, path: str | None = None, offset: int | None = None):
        self.path = path
        self.offset = offset
        where = ""
        if path is not None:
            where = f" at {path}"
        if offset is not None:
            where += f" (byte offset {offset})"
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self) -> None:
        # keep positions float so canonical serialization is byte-stable
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class SliderPin:
    """Bounded slider value; only Number Slider nodes may carry one."""

    min: float
    max: float
    value: float

    def __post_init__(self) -> None:
        if not self.min <= self.value <= self.max:
            raise ValueError(
                f"slider value {self.value} outside [{self.min}, {self.max}]"
            )

    def clamp(self, value: float) -> float:
        return min(max(value, self.min), self.max)


PinValue = float | int | str | SliderPin


@dataclass(frozen=True)
class ScriptNode:
    id: int
    component: str
    position: Position = Position(0.0, 0.0)
    pins: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"node id must be non-negative, got {self.id}")
        if not self.component.strip():
            raise ValueError(f"node {self.id}: component name must be non-empty")
        for port, value in self.pins.items():
            if not port:
                raise ValueError(f"node {self.id}: pin port names must be non-empty")
            if isinstance(value, SliderPin) and normalize(self.component) != "numberslider":
                raise ValueError(
                    f"node {self.id}: slider pins are only valid on Number Slider "
                    f"nodes, not {self.component!r}"
                )
            if not isinstance(value, (int, float, str, SliderPin)) or isinstance(value, bool):
                raise ValueError(
                    f"node {self.id}: pin {port!r} must be a number, text or slider"
                )


@dataclass(frozen=True)
class ScriptEdge:
    from_id: int
    from_port: str
    to_id: int
    to_port: str

    def __post_init__(self) -> None:
        if self.from_id == self.to_id:
            raise ValueError(f"edge may not connect node {self.from_id} to itself")
        if not self.from_port or not self.to_port:
            raise ValueError("edge ports must be non-empty")

    def sort_key(self) -> tuple:
        return (self.to_id, self.to_port, self.from_id, self.from_port)


@dataclass(frozen=True)
class ScriptDocument:
    """Structurally-validated document; nodes and edges are kept in canonical order."""

    nodes: tuple[ScriptNode, ...] = ()
    edges: tuple[ScriptEdge, ...] = ()
    prompt: str | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate node ids: {dupes}")
        known = set(ids)
        for edge in self.edges:
            for endpoint in (edge.from_id, edge.to_id):
                if endpoint not in known:
                    raise ValueError(f"edge endpoint {endpoint} is not a node in the document")
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=ScriptEdge.sort_key)))

    def node(self, node_id: int) -> ScriptNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(f"no node with id {node_id}")

    def with_prompt(self, prompt: str | None) -> "ScriptDocument":
        return ScriptDocument(self.nodes, self.edges, prompt, self.schema_version)


# ---------------------------------------------------------------------------
# parsing

_FENCE_RE = re.compile(r"^\s*```[a-zA-Z]*\s*\n(.*?)\n?\s*```\s*$", re.DOTALL)


def _loads(text: str) -> object:
    def reject_constant(name: str):
        raise ParseError(f"non-finite number {name} is not allowed")

    def check_duplicates(pairs):
        seen = set()
        for key, _ in pairs:
            if key in seen:
                raise ParseError(f"duplicate JSON key {key!r}")
            seen.add(key)
        return dict(pairs)

    return json.loads(text, parse_constant=reject_constant, object_pairs_hook=check_duplicates)


def _strip_trailing_commas(text: str) -> tuple[str, list[int]]:
    """Remove commas directly before ] or }, outside of strings."""
    out: list[str] = []
    removed: list[int] = []
    in_string = False
    escaped = False
    i = 0
    while i < len(text):
        ch = text[i]
        if in_string:
            out.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            i += 1
            continue
        if ch == '"':
            in_string = True
            out.append(ch)
            i += 1
            continue
        if ch == ",":
            j = i + 1
            while j < len(text) and text[j] in " \t\r\n":
                j += 1
            if j < len(text) and text[j] in "]}":
                removed.append(i)
                i += 1
                continue
        out.append(ch)
        i += 1
    return "".join(out), removed


class _Mapper:
    """Shared JSON -> document mapping; strict raises, lenient repairs and records."""

    def __init__(self, lenient: bool):
        self.lenient = lenient
        self.diagnostics: list[Diagnostic] = []

    def fail(self, message: str, path: str) -> None:
        raise ParseError(message, path=path)

    def note(self, rule: str, message: str, node: int | None = None) -> None:
        self.diagnostics.append(Diagnostic(rule, "info", message, node=node))

    def check_keys(self, obj: dict, allowed: set[str], required: set[str], path: str,
                   node: int | None = None) -> None:
        for key in required:
            if key not in obj:
                self.fail(f"missing required key {key!r}", path)
        for key in obj:
            if key not in allowed:
                if not self.lenient:
                    self.fail(f"unknown key {key!r}", f"{path}.{key}")
                self.note("tolerant-key", f"ignored unknown key {key!r} at {path}", node)

    def integer(self, value: object, path: str, node: int | None = None) -> int:
        if isinstance(value, bool):
            self.fail("expected an integer, got a boolean", path)
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            if not self.lenient:
                self.fail(f"expected an integer, got {value!r}", path)
            self.note("tolerant-number", f"coerced {value!r} to integer at {path}", node)
            return int(value)
        if isinstance(value, str) and self.lenient:
            try:
                number = int(value)
            except ValueError:
                self.fail(f"expected an integer, got {value!r}", path)
            self.note("tolerant-number", f"coerced string {value!r} to integer at {path}", node)
            return number
        self.fail(f"expected an integer, got {type(value).__name__}", path)
        raise AssertionError  # unreachable

    def number(self, value: object, path: str, node: int | None = None) -> float | int:
        if isinstance(value, bool):
            self.fail("expected a number, got a boolean", path)
        if isinstance(value, (int, float)):
            return value
        if isinstance(value, str) and self.lenient:
            try:
                number = float(value)
            except ValueError:
                self.fail(f"expected a number, got {value!r}", path)
            self.note("tolerant-number", f"coerced string {value!r} to number at {path}", node)
            return int(number) if number.is_integer() else number
        self.fail(f"expected a number, got {type(value).__name__}", path)
        raise AssertionError

    def text(self, value: object, path: str) -> str:
        if not isinstance(value, str):
            self.fail(f"expected a string, got {type(value).__name__}", path)
        return value  # type: ignore[return-value]

    def pin(self, value: object, path: str, node: int) -> object:
        if isinstance(value, bool):
            self.fail("pins must be numbers, text or slider objects", path)
        if isinstance(value, (int, float, str)):
            return value
        if isinstance(value, dict):
            if set(value) != {"slider"} and "slider" not in value:
                self.fail("pin objects must have the form {\"slider\": {...}}", path)
            self.check_keys(value, {"slider"}, {"slider"}, path, node)
            body = value["slider"]
            if not isinstance(body, dict):
                self.fail("slider pin body must be an object", f"{path}.slider")
            self.check_keys(body, {"min", "max", "value"}, {"min", "max", "value"},
                            f"{path}.slider", node)
            try:
                return SliderPin(
                    self.number(body["min"], f"{path}.slider.min", node),
                    self.number(body["max"], f"{path}.slider.max", node),
                    self.number(body["value"], f"{path}.slider.value", node),
                )
            except ValueError as exc:
                self.fail(str(exc), f"{path}.slider")
        self.fail(f"pins must be numbers, text or slider objects, got {type(value).__name__}", path)
        raise AssertionError

    def node_entry(self, entry: object, index: int, needs_layout: list[int]) -> ScriptNode:
        path = f"nodes[{index}]"
        if not isinstance(entry, dict):
            self.fail(f"expected a node object, got {type(entry).__name__}", path)
        self.check_keys(entry, {"id", "component", "position", "pins"}, {"id", "component"}, path)
        node_id = self.integer(entry["id"], f"{path}.id")
        component = self.text(entry["component"], f"{path}.component")
        if not component.strip():
            self.fail("component name must be non-empty", f"{path}.component")
        if "position" in entry:
            pos_obj = entry["position"]
            if not isinstance(pos_obj, dict):
                self.fail("position must be an object", f"{path}.position")
            self.check_keys(pos_obj, {"x", "y"}, {"x", "y"}, f"{path}.position", node_id)
            position = Position(
                float(self.number(pos_obj["x"], f"{path}.position.x", node_id)),
                float(self.number(pos_obj["y"], f"{path}.position.y", node_id)),
            )
        elif self.lenient:
            needs_layout.append(node_id)
            position = Position(0.0, 0.0)
        else:
            self.fail("missing required key 'position'", path)
            raise AssertionError
        pins: dict[str, object] = {}
        if "pins" in entry:
            pins_obj = entry["pins"]
            if not isinstance(pins_obj, dict):
                self.fail("pins must be an object", f"{path}.pins")
            for port, raw in pins_obj.items():
                if not port:
                    self.fail("pin port names must be non-empty", f"{path}.pins")
                pins[port] = self.pin(raw, f"{path}.pins.{port}", node_id)
        try:
            return ScriptNode(node_id, component, position, pins)
        except ValueError as exc:
            self.fail(str(exc), path)
            raise AssertionError

    def endpoint(self, entry: object, path: str) -> tuple[int, str]:
        if not isinstance(entry, dict):
            self.fail(f"expected an endpoint object, got {type(entry).__name__}", path)
        self.check_keys(entry, {"id", "port"}, {"id", "port"}, path)
        port = self.text(entry["port"], f"{path}.port")
        if not port:
            self.fail("edge ports must be non-empty", f"{path}.port")
        return self.integer(entry["id"], f"{path}.id"), port

    def edge_entry(self, entry: object, index: int) -> ScriptEdge:
        path = f"edges[{index}]"
        if not isinstance(entry, dict):
            self.fail(f"expected an edge object, got {type(entry).__name__}", path)
        self.check_keys(entry, {"from", "to"}, {"from", "to"}, path)
        from_id, from_port = self.endpoint(entry["from"], f"{path}.from")
        to_id, to_port = self.endpoint(entry["to"], f"{path}.to")
        try:
            return ScriptEdge(from_id, from_port, to_id, to_port)
        except ValueError as exc:
            self.fail(str(exc), path)
            raise AssertionError

    def document(self, data: object) -> ScriptDocument:
        if not isinstance(data, dict):
            raise ParseError(f"document must be a JSON object, got {type(data).__name__}", path="$")
        self.check_keys(data, {"schema_version", "prompt", "nodes", "edges"},
                        {"schema_version", "nodes", "edges"}, "$")
        version = self.integer(data["schema_version"], "schema_version")
        if version != SCHEMA_VERSION:
            self.fail(f"unsupported schema_version {version}", "schema_version")
        prompt = None
        if "prompt" in data and data["prompt"] is not None:
            prompt = self.text(data["prompt"], "prompt")
        if not isinstance(data["nodes"], list):
            self.fail("nodes must be an array", "nodes")
        if not isinstance(data["edges"], list):
            self.fail("edges must be an array", "edges")
        needs_layout: list[int] = []
        nodes = [self.node_entry(e, i, needs_layout) for i, e in enumerate(data["nodes"])]
        edges = [self.edge_entry(e, i) for i, e in enumerate(data["edges"])]
        ids = [n.id for n in nodes]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ParseError(f"duplicate node ids: {dupes}", path="nodes")
        known = set(ids)
        for i, edge in enumerate(edges):
            if edge.from_id not in known:
                raise ParseError(f"edge endpoint {edge.from_id} is not a node",
                                 path=f"edges[{i}].from.id")
            if edge.to_id not in known:
                raise ParseError(f"edge endpoint {edge.to_id} is not a node",
                                 path=f"edges[{i}].to.id")
        if needs_layout:
            nodes = _auto_layout(nodes, edges, set(needs_layout), self)
        return ScriptDocument(tuple(nodes), tuple(edges), prompt, version)


def _topo_depths(nodes: list[ScriptNode], edges: list[ScriptEdge]) -> dict[int, int]:
    """Longest-path layer per node via Kahn; cycle members land one past the end."""
    ids = [n.id for n in nodes]
    indegree = {i: 0 for i in ids}
    outgoing: dict[int, list[int]] = {i: [] for i in ids}
    for edge in edges:
        indegree[edge.to_id] += 1
        outgoing[edge.from_id].append(edge.to_id)
    depth = {i: 0 for i in ids}
    ready = sorted(i for i in ids if indegree[i] == 0)
    seen = 0
    while ready:
        current = ready.pop(0)
        seen += 1
        for target in outgoing[current]:
            depth[target] = max(depth[target], depth[current] + 1)
            indegree[target] -= 1
            if indegree[target] == 0:
                ready.append(target)
        ready.sort()
    if seen != len(ids):
        overflow = (max(depth.values()) if depth else 0) + 1
        for i in ids:
            if indegree[i] > 0:
                depth[i] = overflow
    return depth


def _auto_layout(nodes: list[ScriptNode], edges: list[ScriptEdge],
                 missing: set[int], mapper: _Mapper) -> list[ScriptNode]:
    depth = _topo_depths(nodes, edges)
    rows: dict[int, int] = {}
    by_depth: dict[int, list[int]] = {}
    for node in sorted(nodes, key=lambda n: n.id):
        bucket = by_depth.setdefault(depth[node.id], [])
        rows[node.id] = len(bucket)
        bucket.append(node.id)
    placed = []
    for node in nodes:
        if node.id in missing:
            position = Position(depth[node.id] * LAYOUT_COLUMN, rows[node.id] * LAYOUT_ROW)
            mapper.note(
                "tolerant-position",
                f"node {node.id} had no position; placed at column {depth[node.id]}, "
                f"row {rows[node.id]}",
                node.id,
            )
            placed.append(ScriptNode(node.id, node.component, position, node.pins))
        else:
            placed.append(node)
    return placed


def parse_document_strict(text: str) -> ScriptDocument:
    """Parse exact wire-format JSON.  Unknown keys and malformed values are errors."""
    try:
        data = _loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", offset=exc.pos) from exc
    return _Mapper(lenient=False).document(data)


def parse_document_tolerant(text: str) -> tuple[ScriptDocument, list[Diagnostic]]:
    """Parse model output on a best-effort basis.

    Returns the document plus one diagnostic per repair applied.  Input
    that strict parsing accepts comes back identical with an empty
    diagnostic list.  Structural violations (duplicate ids, dangling
    edges, slider pins off Number Slider nodes) stay hard errors.
    """
    mapper = _Mapper(lenient=True)
    body = text
    fence = _FENCE_RE.match(body)
    if fence:
        body = fence.group(1)
        mapper.note("tolerant-fence", "stripped a surrounding code fence")
    try:
        data = _loads(body)
    except json.JSONDecodeError:
        repaired, removed = _strip_trailing_commas(body)
        for offset in removed:
            mapper.note("tolerant-comma", f"removed trailing comma at byte offset {offset}")
        try:
            data = _loads(repaired)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"unrecoverable JSON: {exc.msg}", offset=exc.pos
            ) from exc
    document = mapper.document(data)
    return document, mapper.diagnostics


# ---------------------------------------------------------------------------
# serialization

def _pin_json(value: object):
    if isinstance(value, SliderPin):
        return {"slider": {"min": value.min, "max": value.max, "value": value.value}}
    return value


def document_to_json(doc: ScriptDocument) -> dict:
    """Plain-dict form of the canonical wire format (fixed key order)."""
    out: dict = {"schema_version": doc.schema_version}
    if doc.prompt is not None:
        out["prompt"] = doc.prompt
    out["nodes"] = []
    for node in doc.nodes:
        entry: dict = {
            "id": node.id,
            "component": node.component,
            "position": {"x": node.position.x, "y": node.position.y},
        }
        if node.pins:
            entry["pins"] = {port: _pin_json(node.pins[port]) for port in sorted(node.pins)}
        out["nodes"].append(entry)
    out["edges"] = [
        {
            "from": {"id": e.from_id, "port": e.from_port},
            "to": {"id": e.to_id, "port": e.to_port},
        }
        for e in doc.edges
    ]
    return out


def dumps_canonical(data: object) -> str:
    """Compact deterministic JSON used for all persisted artifacts."""
    return json.dumps(data, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def serialize(doc: ScriptDocument) -> str:
    """Canonical document bytes; parse(serialize(d)) == d."""
    return dumps_canonical(document_to_json(doc))
