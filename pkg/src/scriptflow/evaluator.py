"""Dataflow evaluation of a resolved script graph.

Nodes run in topological order (ties broken by ascending node id).
Per input port the value is chosen in priority order: slider override,
feeding edges, pinned value, declared default.  A required port with
none of those short-circuits the node with an error value.

Error values confine failures instead of aborting the run: an error on
a required port propagates unchanged (so its origin stays at the node
that actually failed), an error on an optional port falls back to the
port default, and error items inside mapped lists pass through item by
item.  Scalar ports fed with lists map the kernel pointwise over the
longest input list, repeating the last item of shorter ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping

from .diagnostics import Diagnostic, diagnostic_to_json
from .geometry import (
    ErrorV,
    GeomValue,
    ListV,
    Number,
    TextV,
    is_curve,
    is_surface,
    kernel_for,
    mesh_to_json,
    sample_mesh,
    value_to_json,
)
from .geometry.values import Point
from .graph import GraphNode, ScriptGraph, build_graph
from .registry import Catalog, ComponentSpec, PortSpec, normalize
from .wire import ScriptDocument, SliderPin

__all__ = ["EvalResult", "evaluate", "result_to_json"]

Overrides = Mapping[int, float]


@dataclass(frozen=True)
class EvalResult:
    """Outputs per node plus derived failure and display information.

    failures: nodes whose every output is an error (or that could not
       run at all); drawables: (node id, value) pairs for geometry
       reaching nodes with no outgoing edges, in node id order.
    """

    per_node: dict[int, dict[str, GeomValue]]
    order: tuple[int, ...]
    failures: tuple[int, ...]
    drawables: tuple[tuple[int, GeomValue], ...]
    notes: tuple[Diagnostic, ...]

    def outputs(self, node_id: int) -> dict[str, GeomValue]:
        return self.per_node[node_id]

    def origins(self) -> tuple[int, ...]:
        """Distinct origin node ids of every error value, ascending."""
        found: set[int] = set()

        def scan(value: GeomValue) -> None:
            if isinstance(value, ErrorV):
                found.add(value.origin)
            elif isinstance(value, ListV):
                for item in value.items:
                    scan(item)

        for outputs in self.per_node.values():
            for value in outputs.values():
                scan(value)
        return tuple(sorted(found))


class _ShortCircuit:
    """Gathering verdict: skip the kernel, emit `error` on every output."""

    __slots__ = ("error",)

    def __init__(self, error: ErrorV):
        self.error = error


def _is_geometry_value(value: GeomValue) -> bool:
    return isinstance(value, Point) or is_curve(value) or is_surface(value)


def _pin_value(pin: object) -> GeomValue:
    if isinstance(pin, SliderPin):
        return Number(float(pin.value))
    if isinstance(pin, str):
        return TextV(pin)
    return Number(float(pin))  # type: ignore[arg-type]


def _as_list(node_id: int, values: list[GeomValue]) -> GeomValue:
    """Flatten one level and build a homogeneous list."""
    items: list[GeomValue] = []
    for value in values:
        if isinstance(value, ListV):
            items.extend(value.items)
        else:
            items.append(value)
    try:
        return ListV(tuple(items))
    except ValueError as exc:
        return ErrorV(node_id, f"cannot gather inputs: {exc}")


def _first_error(value: GeomValue) -> ErrorV | None:
    if isinstance(value, ErrorV):
        return value
    if isinstance(value, ListV):
        for item in value.items:
            if isinstance(item, ErrorV):
                return item
    return None


def _gather(
    graph: ScriptGraph,
    gnode: GraphNode,
    port: PortSpec,
    per_node: dict[int, dict[str, GeomValue]],
    override: Number | None,
) -> GeomValue | _ShortCircuit | None:
    node_id = gnode.id
    if override is not None and port.name == "N":
        return override
    values: list[GeomValue] = []
    for edge in graph.in_edges(node_id, port.name):
        source = graph.nodes[edge.from_id]
        if source.spec is None:
            values.append(ErrorV(edge.from_id, f"unknown component {source.node.component!r}"))
        elif edge.from_known:
            values.append(per_node[edge.from_id][edge.from_port])
        # an edge naming a port the source does not have delivers nothing
    if values:
        if port.cardinality == "list" or len(values) > 1:
            value = _as_list(node_id, values)
        else:
            value = values[0]
    else:
        pin = gnode.pins.get(port.name)
        if pin is not None:
            value = _pin_value(pin)
        elif port.default is not None:
            value = port.default
        elif port.required:
            return _ShortCircuit(
                ErrorV(node_id, f"missing required input {port.name!r}")
            )
        else:
            return None
    poison = value if isinstance(value, ErrorV) else None
    if poison is None and port.cardinality == "list":
        poison = _first_error(value)
    if poison is not None:
        if port.required:
            return _ShortCircuit(poison)
        return port.default  # may be None: optional input simply absent
    return value


def _call(
    kernel: Callable[[int, dict[str, GeomValue]], dict[str, GeomValue]],
    spec: ComponentSpec,
    node_id: int,
    inputs: dict[str, GeomValue],
) -> dict[str, GeomValue]:
    try:
        result = kernel(node_id, inputs)
    except (KeyError, TypeError, ValueError, ZeroDivisionError, OverflowError) as exc:
        error = ErrorV(node_id, f"kernel failure: {exc}")
        return {out.name: error for out in spec.outputs}
    return {
        out.name: result.get(out.name, ErrorV(node_id, f"kernel produced no {out.name!r}"))
        for out in spec.outputs
    }


def _run_kernel(
    kernel: Callable[[int, dict[str, GeomValue]], dict[str, GeomValue]],
    spec: ComponentSpec,
    node_id: int,
    inputs: dict[str, GeomValue],
) -> dict[str, GeomValue]:
    mapped = {
        name: value
        for name, value in inputs.items()
        if isinstance(value, ListV)
        and (spec.input(name) is not None and spec.input(name).cardinality == "scalar")
    }
    if not mapped:
        return _call(kernel, spec, node_id, inputs)
    lengths = [len(value.items) for value in mapped.values()]
    if min(lengths) == 0:
        # nothing to repeat from an empty list: map to empty outputs
        return {out.name: ListV(()) for out in spec.outputs}
    collected: dict[str, list[GeomValue]] = {out.name: [] for out in spec.outputs}
    for index in range(max(lengths)):
        item_inputs = dict(inputs)
        poison: ErrorV | None = None
        for name, value in mapped.items():
            item = value.items[min(index, len(value.items) - 1)]
            if poison is None and isinstance(item, ErrorV):
                poison = item
            item_inputs[name] = item
        if poison is not None:
            for out in spec.outputs:
                collected[out.name].append(poison)
            continue
        result = _call(kernel, spec, node_id, item_inputs)
        for out in spec.outputs:
            value = result[out.name]
            if isinstance(value, ListV):
                collected[out.name].extend(value.items)
            else:
                collected[out.name].append(value)
    final: dict[str, GeomValue] = {}
    for name, items in collected.items():
        try:
            final[name] = ListV(tuple(items))
        except ValueError as exc:
            final[name] = ErrorV(node_id, f"inconsistent mapped results: {exc}")
    return final


def _slider_override(
    gnode: GraphNode, overrides: Overrides, notes: list[Diagnostic]
) -> Number | None:
    if gnode.id not in overrides:
        return None
    value = float(overrides[gnode.id])
    pin = gnode.pins.get("N")
    if isinstance(pin, SliderPin):
        clamped = pin.clamp(value)
        if clamped != value:
            notes.append(
                Diagnostic(
                    "override-clamped",
                    "info",
                    f"override {value:g} clamped to [{pin.min:g}, {pin.max:g}]",
                    node=gnode.id,
                )
            )
        value = clamped
    return Number(value)


def _drawable_view(value: GeomValue) -> GeomValue | None:
    if _is_geometry_value(value):
        return value
    if isinstance(value, ListV):
        kept = tuple(item for item in value.items if not isinstance(item, ErrorV))
        if kept and all(_is_geometry_value(item) for item in kept):
            return ListV(kept)
    return None


def _collect_drawables(
    graph: ScriptGraph, per_node: dict[int, dict[str, GeomValue]]
) -> tuple[tuple[int, GeomValue], ...]:
    found: list[tuple[int, GeomValue]] = []
    for node_id in sorted(per_node):
        if graph.out_edges(node_id):
            continue
        gnode = graph.nodes[node_id]
        if gnode.spec is None:
            continue
        for out in gnode.spec.outputs:
            value = per_node[node_id].get(out.name)
            if value is None:
                continue
            view = _drawable_view(value)
            if view is not None:
                found.append((node_id, view))
    return tuple(found)


def evaluate(
    document: ScriptDocument,
    catalog: Catalog,
    overrides: Overrides | None = None,
) -> EvalResult:
    """Run the document.  Raises GraphCycleError for cyclic documents.

    `overrides` maps Number Slider node ids to replacement values; an
    override on a slider with a range pin is clamped into the range.
    Overrides on anything else are ignored with a warning note.
    """
    overrides = dict(overrides or {})
    graph = build_graph(document, catalog)
    notes: list[Diagnostic] = []
    for node_id in sorted(overrides):
        gnode = graph.nodes.get(node_id)
        if gnode is None:
            notes.append(
                Diagnostic(
                    "override-ignored",
                    "warning",
                    f"override for unknown node {node_id}",
                    node=node_id,
                )
            )
        elif gnode.spec is None or normalize(gnode.spec.name) != "numberslider":
            notes.append(
                Diagnostic(
                    "override-ignored",
                    "warning",
                    f"override targets {gnode.component!r}; only Number Slider "
                    "values can be overridden",
                    node=node_id,
                )
            )
    per_node: dict[int, dict[str, GeomValue]] = {}
    failures: list[int] = []
    for node_id in graph.order:
        gnode = graph.nodes[node_id]
        spec = gnode.spec
        if spec is None:
            per_node[node_id] = {}
            failures.append(node_id)
            continue
        override = _slider_override(gnode, overrides, notes)
        outputs: dict[str, GeomValue] | None = None
        inputs: dict[str, GeomValue] = {}
        for port in spec.inputs:
            gathered = _gather(graph, gnode, port, per_node, override)
            if isinstance(gathered, _ShortCircuit):
                outputs = {out.name: gathered.error for out in spec.outputs}
                break
            if gathered is not None:
                inputs[port.name] = gathered
        if outputs is None:
            try:
                kernel = kernel_for(spec.name)
            except KeyError:
                error = ErrorV(node_id, f"no runtime kernel for component {spec.name!r}")
                outputs = {out.name: error for out in spec.outputs}
            else:
                outputs = _run_kernel(kernel, spec, node_id, inputs)
        per_node[node_id] = outputs
        if outputs and all(isinstance(v, ErrorV) for v in outputs.values()):
            failures.append(node_id)
    drawables = _collect_drawables(graph, per_node)
    return EvalResult(per_node, graph.order, tuple(failures), drawables, tuple(notes))


def result_to_json(
    result: EvalResult,
    meshes: bool = True,
    u_count: int = 32,
    v_count: int = 16,
) -> dict[str, Any]:
    """JSON encoding of an evaluation; surfaces carry sampled meshes."""
    mesh_for = None
    if meshes:
        mesh_for = lambda surface: mesh_to_json(sample_mesh(surface, u_count, v_count))
    nodes: dict[str, Any] = {}
    for node_id in result.order:
        outputs = result.per_node.get(node_id, {})
        nodes[str(node_id)] = {
            port: value_to_json(value, mesh_for) for port, value in outputs.items()
        }
    return {
        "schema_version": 1,
        "order": list(result.order),
        "nodes": nodes,
        "failures": list(result.failures),
        "origins": list(result.origins()),
        "drawables": [
            {"node": node_id, "value": value_to_json(value, mesh_for)}
            for node_id, value in result.drawables
        ],
        "notes": [diagnostic_to_json(note) for note in result.notes],
    }
