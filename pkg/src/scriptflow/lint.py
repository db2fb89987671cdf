"""Static validation rules and mechanical repairs.

Rule catalog (rule ids are part of the wire contract):

  R1  unknown component                      error
  R2  unknown port on a resolved component   error
  R3  type mismatch (edge or pinned value)   error
  R4  required input with no source          error
  R5  lost node (sink that draws nothing)    warning
  R6  group that never reaches a drawable    warning
  R7  several edges into a scalar port       warning

Checks run on inferred kinds, not declared ones: Move propagates the
kind of whatever it moves, List Item yields its list's element kind,
and Merge unifies its two feeds.  Without that pass a Circle moved by
a vector would read as "geometry-any" and legitimate downstream edges
would be rejected.

Each diagnostic carries at most one suggested repair.  Applying every
suggested repair must keep the document strict-parseable and must not
increase the number of error diagnostics; the test suite enforces
both properties.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

from .diagnostics import Diagnostic, diagnostic_to_json, sort_diagnostics
from .geometry import Number, TextV
from .graph import GraphCycleError, ScriptGraph, build_graph
from .registry import Catalog, edit_distance, is_coercible, normalize, port_of
from .wire import (
    ScriptDocument,
    ScriptEdge,
    ScriptNode,
    SliderPin,
    dumps_canonical,
    parse_document_strict,
    serialize,
)

__all__ = [
    "Repair",
    "apply_repairs",
    "infer_kinds",
    "render_diagnostics_json",
    "select_compatible",
    "unify_kinds",
    "validate",
]

DRAWABLE = frozenset({"point", "curve", "surface"})
# components whose inputs accept any value kind at runtime; edge type
# checks are skipped for them and their output kind is inferred
UNIVERSAL_SINKS = frozenset({"merge", "listitem"})
REPAIR_KINDS = ("rename_component", "rename_port", "insert_default", "delete_edge", "retarget_edge")
_SUGGEST_DISTANCE = 3

EdgeKey = tuple[tuple[int, str], tuple[int, str]]


def _edge_key(edge: ScriptEdge) -> EdgeKey:
    return ((edge.from_id, edge.from_port), (edge.to_id, edge.to_port))


@dataclass(frozen=True)
class Repair:
    """One mechanical document edit.

    Exactly which fields are set depends on `kind`:
      rename_component: node, component
      rename_port:      node, port, new_port      (renames a pinned port)
      insert_default:   node, port, value         (adds a pin)
      delete_edge:      edge
      retarget_edge:    edge, side, new_port      (respells one endpoint port)
    """

    id: str
    kind: str
    node: int | None = None
    edge: EdgeKey | None = None
    side: str | None = None
    component: str | None = None
    port: str | None = None
    new_port: str | None = None
    value: float | int | str | None = None

    def __post_init__(self) -> None:
        if self.kind not in REPAIR_KINDS:
            raise ValueError(f"unknown repair kind {self.kind!r}; expected one of {REPAIR_KINDS}")
        if self.side not in (None, "from", "to"):
            raise ValueError(f"repair side must be 'from' or 'to', got {self.side!r}")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "kind": self.kind}
        if self.node is not None:
            out["node"] = self.node
        if self.edge is not None:
            (fi, fp), (ti, tp) = self.edge
            out["edge"] = {"from": {"id": fi, "port": fp}, "to": {"id": ti, "port": tp}}
        if self.side is not None:
            out["side"] = self.side
        if self.component is not None:
            out["component"] = self.component
        if self.port is not None:
            out["port"] = self.port
        if self.new_port is not None:
            out["new_port"] = self.new_port
        if self.value is not None:
            out["value"] = self.value
        return out


def unify_kinds(kinds: list[str]) -> str | None:
    """Single kind if the feeds agree, geometry-any for any mix."""
    unique = set(kinds)
    if not unique:
        return None
    if len(unique) == 1:
        return unique.pop()
    return "geometry-any"


def infer_kinds(graph: ScriptGraph) -> dict[tuple[int, str], str]:
    """Forward pass mapping (node id, output port) to a value kind."""
    kinds: dict[tuple[int, str], str] = {}

    def feeds(node_id: int, port: str, restrict_to: str | None) -> list[str]:
        found = []
        for edge in graph.in_edges(node_id, port):
            if not edge.from_known:
                continue
            kind = kinds.get((edge.from_id, edge.from_port))
            if kind is None:
                continue
            if restrict_to is not None and not is_coercible(kind, restrict_to):
                continue
            found.append(kind)
        return found

    for node_id in graph.order:
        gnode = graph.nodes[node_id]
        spec = gnode.spec
        if spec is None:
            continue
        for out in spec.outputs:
            inferred = out.kind
            if spec.name == "Move" and out.name == "Geometry":
                # moving k yields k; feeds that are statically invalid
                # (R3) do not poison the estimate
                port_kind = spec.input("Geometry").kind
                inferred = unify_kinds(feeds(node_id, "Geometry", port_kind)) or inferred
            elif spec.name == "List Item" and out.name == "Item":
                inferred = unify_kinds(feeds(node_id, "List", None)) or inferred
            elif spec.name == "Merge" and out.name == "Result":
                both = feeds(node_id, "A", None) + feeds(node_id, "B", None)
                inferred = unify_kinds(both) or inferred
            kinds[(node_id, out.name)] = inferred
    return kinds


def _pin_kind(value: object) -> str:
    if isinstance(value, SliderPin):
        return "number"
    if isinstance(value, str):
        return "text"
    return "number"


def _nearest_unique(raw: str, nearest: tuple, distance_cap: int = _SUGGEST_DISTANCE):
    """The single closest candidate, or None when tied or too far.

    The registry ranks candidates but drops their distances, so they are
    recomputed here; aliases count toward closeness.
    """
    if not nearest:
        return None
    target = normalize(raw)
    distances = [
        min(edit_distance(target, normalize(n)) for n in (spec.name, *spec.aliases))
        for spec in nearest
    ]
    best = min(distances)
    if best > distance_cap:
        return None
    if distances.count(best) > 1:
        return None
    return nearest[distances.index(best)]


def _components_of(graph: ScriptGraph) -> list[set[int]]:
    parent = {node_id: node_id for node_id in graph.nodes}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for edge in graph.edges:
        a, b = find(edge.from_id), find(edge.to_id)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, set[int]] = {}
    for node_id in graph.nodes:
        groups.setdefault(find(node_id), set()).add(node_id)
    return list(groups.values())


def _check_nodes(graph: ScriptGraph, found: list[Diagnostic]) -> None:
    for node_id in graph.order:
        gnode = graph.nodes[node_id]
        res = gnode.resolution
        if res.kind == "unknown":
            message = f"unknown component {gnode.node.component!r}"
            if res.nearest:
                names = ", ".join(spec.name for spec in res.nearest)
                message += f" (nearest: {names})"
            target = _nearest_unique(gnode.node.component, res.nearest)
            repair = None
            if target is not None:
                repair = Repair("", "rename_component", node=node_id, component=target.name)
            found.append(Diagnostic("R1", "error", message, node=node_id, repair=repair))
            continue
        spec = res.spec
        assert spec is not None
        for raw in gnode.unknown_pins:
            port_res = port_of(spec, "in", raw)
            message = f"{spec.name} has no input port {raw!r}"
            if port_res.nearest:
                names = ", ".join(p.name for p in port_res.nearest)
                message += f" (nearest: {names})"
            target = _nearest_unique(raw, port_res.nearest)
            repair = None
            if target is not None:
                repair = Repair("", "rename_port", node=node_id, port=raw, new_port=target.name)
            found.append(Diagnostic("R2", "error", message, node=node_id, port=raw, repair=repair))


def _check_edges(
    graph: ScriptGraph, kinds: dict[tuple[int, str], str], found: list[Diagnostic]
) -> None:
    for edge in graph.edges:
        source = graph.nodes[edge.from_id]
        target = graph.nodes[edge.to_id]
        for gnode, side, known, raw in (
            (source, "out", edge.from_known, edge.source.from_port),
            (target, "in", edge.to_known, edge.source.to_port),
        ):
            if known or gnode.spec is None:
                continue
            spec = gnode.spec
            port_res = port_of(spec, side, raw)
            direction = "output" if side == "out" else "input"
            message = f"{spec.name} has no {direction} port {raw!r}"
            if port_res.nearest:
                names = ", ".join(p.name for p in port_res.nearest)
                message += f" (nearest: {names})"
            nearest = _nearest_unique(raw, port_res.nearest)
            repair = None
            if nearest is not None:
                repair = Repair(
                    "",
                    "retarget_edge",
                    edge=_edge_key(edge.source),
                    side="from" if side == "out" else "to",
                    new_port=nearest.name,
                )
            found.append(
                Diagnostic(
                    "R2",
                    "error",
                    message,
                    node=gnode.id,
                    port=raw,
                    edge=_edge_key(edge.source),
                    repair=repair,
                )
            )
        if not (edge.from_known and edge.to_known):
            continue
        if target.spec is None or source.spec is None:
            continue
        if normalize(target.spec.name) in UNIVERSAL_SINKS:
            continue
        source_kind = kinds.get((edge.from_id, edge.from_port))
        port_spec = target.spec.input(edge.to_port)
        if source_kind is None or port_spec is None:
            continue
        if not is_coercible(source_kind, port_spec.kind):
            found.append(
                Diagnostic(
                    "R3",
                    "error",
                    f"type mismatch: {source_kind} output {edge.from_port!r} of node "
                    f"{edge.from_id} cannot feed {port_spec.kind} port {edge.to_port!r} "
                    f"of {target.spec.name}",
                    node=edge.to_id,
                    port=edge.to_port,
                    edge=_edge_key(edge.source),
                    repair=Repair("", "delete_edge", edge=_edge_key(edge.source)),
                )
            )


def _check_pins(graph: ScriptGraph, found: list[Diagnostic]) -> None:
    for node_id in graph.order:
        gnode = graph.nodes[node_id]
        spec = gnode.spec
        if spec is None or normalize(spec.name) in UNIVERSAL_SINKS:
            continue
        for port_name, value in sorted(gnode.pins.items()):
            port_spec = spec.input(port_name)
            if port_spec is None:
                continue  # unknown pin, already R2
            pin_kind = _pin_kind(value)
            if not is_coercible(pin_kind, port_spec.kind):
                found.append(
                    Diagnostic(
                        "R3",
                        "error",
                        f"type mismatch: pinned value {value!r} is {pin_kind}, but port "
                        f"{port_name!r} of {spec.name} expects {port_spec.kind}",
                        node=node_id,
                        port=port_name,
                    )
                )


def _check_required(graph: ScriptGraph, found: list[Diagnostic]) -> None:
    for node_id in graph.order:
        gnode = graph.nodes[node_id]
        spec = gnode.spec
        if spec is None:
            continue
        for port_spec in spec.inputs:
            if not port_spec.required:
                continue
            feeding = [e for e in graph.in_edges(node_id, port_spec.name) if e.from_known]
            if feeding or port_spec.name in gnode.pins:
                continue
            default = graph.catalog.repair_default(spec.name, port_spec.name)
            repair = None
            if isinstance(default, (Number, TextV)):
                # only pin-encodable defaults can be inserted mechanically
                repair = Repair(
                    "", "insert_default", node=node_id, port=port_spec.name, value=default.value
                )
            found.append(
                Diagnostic(
                    "R4",
                    "error",
                    f"required input {port_spec.name!r} of {spec.name} has no source",
                    node=node_id,
                    port=port_spec.name,
                    repair=repair,
                )
            )


def _useful_sink(graph: ScriptGraph, kinds: dict[tuple[int, str], str], node_id: int) -> bool:
    """Sink that justifies its group: draws geometry or displays text."""
    if graph.out_edges(node_id):
        return False
    gnode = graph.nodes[node_id]
    if gnode.spec is None:
        return False
    if normalize(gnode.spec.name) == "panel":
        return True
    for out in gnode.spec.outputs:
        kind = kinds.get((node_id, out.name), out.kind)
        if kind in DRAWABLE or kind == "geometry-any":
            return True
    return False


def _check_flow(
    graph: ScriptGraph, kinds: dict[tuple[int, str], str], found: list[Diagnostic]
) -> None:
    starved: set[int] = set()
    for group in _components_of(graph):
        if any(_useful_sink(graph, kinds, node_id) for node_id in group):
            continue
        anchor = min(group)
        starved |= group
        noun = "node" if len(group) == 1 else "nodes"
        found.append(
            Diagnostic(
                "R6",
                "warning",
                f"group of {len(group)} {noun} never reaches a drawable sink",
                node=anchor,
            )
        )
    for node_id in graph.order:
        if node_id in starved or graph.out_edges(node_id):
            continue
        gnode = graph.nodes[node_id]
        if gnode.spec is None or _useful_sink(graph, kinds, node_id):
            continue
        found.append(
            Diagnostic(
                "R5",
                "warning",
                f"lost node: outputs of {gnode.spec.name} feed nothing and are not drawable",
                node=node_id,
            )
        )


def _check_duplicates(graph: ScriptGraph, found: list[Diagnostic]) -> None:
    fan_in: dict[tuple[int, str], list] = {}
    for edge in graph.edges:
        if not edge.to_known:
            continue
        spec = graph.nodes[edge.to_id].spec
        if spec is None:
            continue
        port_spec = spec.input(edge.to_port)
        if port_spec is None or port_spec.cardinality != "scalar":
            continue
        fan_in.setdefault((edge.to_id, edge.to_port), []).append(edge)
    for (node_id, port), edges in sorted(fan_in.items()):
        if len(edges) < 2:
            continue
        edges = sorted(edges, key=lambda e: (e.from_id, e.from_port))
        found.append(
            Diagnostic(
                "R7",
                "warning",
                f"{len(edges)} edges feed scalar port {port!r} of node {node_id}; "
                "their values will be merged into a list",
                node=node_id,
                port=port,
                repair=Repair("", "delete_edge", edge=_edge_key(edges[-1].source)),
            )
        )


def validate(document: ScriptDocument, catalog: Catalog) -> list[Diagnostic]:
    """All diagnostics for a document, sorted, with repair ids assigned."""
    try:
        graph = build_graph(document, catalog)
    except GraphCycleError as exc:
        return [
            Diagnostic(
                "cycle", "error", str(exc), node=min(exc.cycle) if exc.cycle else None
            )
        ]
    found: list[Diagnostic] = list(graph.diagnostics)
    kinds = infer_kinds(graph)
    _check_nodes(graph, found)
    _check_edges(graph, kinds, found)
    _check_pins(graph, found)
    _check_required(graph, found)
    _check_flow(graph, kinds, found)
    _check_duplicates(graph, found)
    ordered = sort_diagnostics(found)
    counter = 0
    final: list[Diagnostic] = []
    for diag in ordered:
        if diag.repair is not None:
            repair = dataclasses.replace(diag.repair, id=f"r{counter}")
            counter += 1
            diag = dataclasses.replace(diag, repair=repair)
        final.append(diag)
    return final


def render_diagnostics_json(diagnostics: list[Diagnostic]) -> str:
    """Canonical diagnostics payload, shared by the CLI and the HTTP API.

    Both surfaces must emit these exact bytes so that saved output is
    comparable regardless of where it came from.
    """
    payload = {
        "schema_version": 1,
        "diagnostics": [diagnostic_to_json(d) for d in sort_diagnostics(diagnostics)],
    }
    return dumps_canonical(payload) + "\n"


def select_compatible(repairs: list[Repair]) -> list[Repair]:
    """Greedy prefix of repairs that do not touch the same target.

    Suggested repairs can collide (both endpoints of one edge being
    respelled, say); applying a compatible subset keeps apply_repairs
    total for callers that just want "fix what you can".
    """
    kept: list[Repair] = []
    for candidate in repairs:
        if all(not _conflict(candidate, existing) for existing in kept):
            kept.append(candidate)
    return kept


def _conflict(a: Repair, b: Repair) -> bool:
    if a.kind == "rename_component" and b.kind == "rename_component":
        return a.node == b.node
    if a.edge is not None and b.edge is not None:
        return a.edge == b.edge
    pin_kinds = ("rename_port", "insert_default")
    if a.kind in pin_kinds and b.kind in pin_kinds:
        a_key = a.new_port if a.kind == "rename_port" else a.port
        b_key = b.new_port if b.kind == "rename_port" else b.port
        return a.node == b.node and a_key == b_key
    return False


def apply_repairs(document: ScriptDocument, repairs: list[Repair]) -> ScriptDocument:
    """Apply repairs and return the rebuilt document.

    Raises ValueError when two repairs touch the same target or when a
    repair no longer matches the document.  The result is re-serialized
    and strict-parsed before being returned, so a successful call can
    never hand back a structurally broken document.
    """
    for i, first in enumerate(repairs):
        for second in repairs[i + 1:]:
            if _conflict(first, second):
                raise ValueError(
                    f"conflicting repairs: {first.id or first.kind!r} and "
                    f"{second.id or second.kind!r} touch the same target"
                )
    nodes: dict[int, dict[str, Any]] = {
        n.id: {"component": n.component, "position": n.position, "pins": dict(n.pins)}
        for n in document.nodes
    }
    edges: list[ScriptEdge] = list(document.edges)

    def locate(repair: Repair) -> int:
        assert repair.edge is not None
        for index, edge in enumerate(edges):
            if _edge_key(edge) == repair.edge:
                return index
        raise ValueError(f"repair {repair.id or repair.kind!r}: edge {repair.edge} not found")

    for repair in repairs:
        if repair.kind == "rename_component":
            if repair.node not in nodes:
                raise ValueError(f"repair {repair.id!r}: node {repair.node} not found")
            nodes[repair.node]["component"] = repair.component
        elif repair.kind == "rename_port":
            pins = nodes.get(repair.node, {}).get("pins")
            if pins is None or repair.port not in pins:
                raise ValueError(
                    f"repair {repair.id!r}: node {repair.node} has no pin {repair.port!r}"
                )
            pins[repair.new_port] = pins.pop(repair.port)
        elif repair.kind == "insert_default":
            if repair.node not in nodes:
                raise ValueError(f"repair {repair.id!r}: node {repair.node} not found")
            nodes[repair.node]["pins"][repair.port] = repair.value
        elif repair.kind == "delete_edge":
            edges.pop(locate(repair))
        elif repair.kind == "retarget_edge":
            index = locate(repair)
            old = edges[index]
            if repair.side == "from":
                edges[index] = ScriptEdge(old.from_id, repair.new_port, old.to_id, old.to_port)
            else:
                edges[index] = ScriptEdge(old.from_id, old.from_port, old.to_id, repair.new_port)
    rebuilt = ScriptDocument(
        nodes=tuple(
            ScriptNode(
                id=node_id,
                component=data["component"],
                position=data["position"],
                pins=data["pins"],
            )
            for node_id, data in sorted(nodes.items())
        ),
        edges=tuple(edges),
        prompt=document.prompt,
    )
    return parse_document_strict(serialize(rebuilt))
