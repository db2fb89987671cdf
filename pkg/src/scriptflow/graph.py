"""Resolve a script document against a catalog into an executable DAG.

Component and port names are resolved here (exact or fuzzy; fuzzy
resolutions are reported as info diagnostics).  Unknown components stay
in the graph as placeholder nodes so the validator can flag them and
the evaluator can confine the damage.  Cycles are a hard error: the
wire format has no state, so feedback loops cannot mean anything.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .diagnostics import Diagnostic
from .registry import Catalog, ComponentSpec, PortSpec, Resolution, port_of, resolve_name
from .wire import ScriptDocument, ScriptEdge, ScriptNode, SliderPin

__all__ = ["GraphCycleError", "GraphNode", "GraphEdge", "ScriptGraph", "build_graph", "topo_order"]


class GraphCycleError(ValueError):
    """The document contains a feedback loop; `cycle` lists the node ids on it."""

    def __init__(self, cycle: list[int]):
        self.cycle = cycle
        loop = " -> ".join(str(i) for i in cycle + cycle[:1])
        super().__init__(f"document contains a cycle: {loop}")


@dataclass(frozen=True)
class GraphNode:
    node: ScriptNode
    resolution: Resolution
    pins: dict[str, object] = field(default_factory=dict)
    unknown_pins: tuple[str, ...] = ()

    @property
    def id(self) -> int:
        return self.node.id

    @property
    def spec(self) -> ComponentSpec | None:
        return self.resolution.spec

    @property
    def placeholder(self) -> bool:
        return self.resolution.spec is None

    @property
    def component(self) -> str:
        return self.resolution.spec.name if self.resolution.spec else self.node.component


@dataclass(frozen=True)
class GraphEdge:
    """Document edge with port names resolved to their canonical spelling."""

    source: ScriptEdge
    from_port: str
    to_port: str
    from_known: bool
    to_known: bool

    @property
    def from_id(self) -> int:
        return self.source.from_id

    @property
    def to_id(self) -> int:
        return self.source.to_id


@dataclass(frozen=True)
class ScriptGraph:
    document: ScriptDocument
    catalog: Catalog
    nodes: dict[int, GraphNode]
    edges: tuple[GraphEdge, ...]
    diagnostics: tuple[Diagnostic, ...]
    order: tuple[int, ...]

    def in_edges(self, node_id: int, port: str | None = None) -> list[GraphEdge]:
        found = [
            e for e in self.edges
            if e.to_id == node_id and e.to_known and (port is None or e.to_port == port)
        ]
        return sorted(found, key=lambda e: (e.from_id, e.from_port))

    def out_edges(self, node_id: int) -> list[GraphEdge]:
        return [e for e in self.edges if e.from_id == node_id]

    def input_spec(self, node_id: int, port: str) -> PortSpec | None:
        spec = self.nodes[node_id].spec
        return spec.input(port) if spec else None


def _resolve_ports(
    graph_nodes: dict[int, GraphNode],
    edge: ScriptEdge,
    diagnostics: list[Diagnostic],
) -> GraphEdge:
    def resolve(node_id: int, side: str, raw: str) -> tuple[str, bool]:
        spec = graph_nodes[node_id].spec
        if spec is None:
            return raw, False
        res = port_of(spec, side, raw)
        if res.kind == "exact":
            return res.port.name, True
        if res.kind == "fuzzy":
            diagnostics.append(
                Diagnostic(
                    "fuzzy-port",
                    "info",
                    f"resolved port {raw!r} to {res.port.name!r} on {spec.name} "
                    f"(edit distance {res.distance})",
                    node=node_id,
                    port=res.port.name,
                )
            )
            return res.port.name, True
        return raw, False

    from_port, from_known = resolve(edge.from_id, "out", edge.from_port)
    to_port, to_known = resolve(edge.to_id, "in", edge.to_port)
    return GraphEdge(edge, from_port, to_port, from_known, to_known)


def _resolve_pins(
    node: ScriptNode, spec: ComponentSpec | None, diagnostics: list[Diagnostic]
) -> tuple[dict[str, object], tuple[str, ...]]:
    if spec is None:
        return dict(node.pins), tuple(node.pins)
    pins: dict[str, object] = {}
    unknown: list[str] = []
    for raw, value in sorted(node.pins.items()):
        res = port_of(spec, "in", raw)
        if res.kind == "unknown":
            unknown.append(raw)
            pins[raw] = value
            continue
        if res.kind == "fuzzy":
            diagnostics.append(
                Diagnostic(
                    "fuzzy-port",
                    "info",
                    f"resolved pinned port {raw!r} to {res.port.name!r} on {spec.name} "
                    f"(edit distance {res.distance})",
                    node=node.id,
                    port=res.port.name,
                )
            )
        pins[res.port.name] = value
    return pins, tuple(unknown)


def _find_cycle(remaining: set[int], outgoing: dict[int, list[int]]) -> list[int]:
    start = min(remaining)
    path: list[int] = []
    seen: dict[int, int] = {}
    current = start
    while current not in seen:
        seen[current] = len(path)
        path.append(current)
        current = min(t for t in outgoing[current] if t in remaining)
    return path[seen[current]:]


def topo_order(nodes: list[int], edges: list[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm with a min-heap so ties break by ascending node id."""
    indegree = {i: 0 for i in nodes}
    outgoing: dict[int, list[int]] = {i: [] for i in nodes}
    for source, target in edges:
        indegree[target] += 1
        outgoing[source].append(target)
    heap = [i for i in nodes if indegree[i] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        current = heapq.heappop(heap)
        order.append(current)
        for target in sorted(outgoing[current]):
            indegree[target] -= 1
            if indegree[target] == 0:
                heapq.heappush(heap, target)
    if len(order) != len(nodes):
        remaining = {i for i in nodes if i not in set(order)}
        raise GraphCycleError(_find_cycle(remaining, outgoing))
    return order


def build_graph(document: ScriptDocument, catalog: Catalog) -> ScriptGraph:
    """Resolve names and compute execution order.

    Raises GraphCycleError for cyclic documents.  Unknown components
    become placeholders (the validator reports them as R1); fuzzy name
    matches resolve with an info diagnostic.
    """
    diagnostics: list[Diagnostic] = []
    graph_nodes: dict[int, GraphNode] = {}
    for node in document.nodes:
        resolution = resolve_name(catalog, node.component)
        if resolution.kind == "fuzzy":
            diagnostics.append(
                Diagnostic(
                    "fuzzy-component",
                    "info",
                    f"resolved component {node.component!r} to {resolution.spec.name!r} "
                    f"(edit distance {resolution.distance})",
                    node=node.id,
                )
            )
        pins, unknown_pins = _resolve_pins(node, resolution.spec, diagnostics)
        graph_nodes[node.id] = GraphNode(node, resolution, pins, unknown_pins)
    edges = tuple(_resolve_ports(graph_nodes, e, diagnostics) for e in document.edges)
    order = topo_order(
        [n.id for n in document.nodes],
        [(e.from_id, e.to_id) for e in document.edges],
    )
    return ScriptGraph(document, catalog, graph_nodes, edges, tuple(diagnostics), tuple(order))
