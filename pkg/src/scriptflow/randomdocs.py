"""Random document generators for fuzz and property tests.

Two very different distributions:

* random_wire_document: structurally valid but otherwise arbitrary
  documents (weird names, unicode, stray pins) for serialization
  round-trips.  No semantic guarantees at all.

* random_clean_document: documents that validate with zero errors AND
  evaluate with zero failures.  Every numeric pin is kept in a range
  that cannot trip runtime domain checks (no zero divisors, no empty
  series, no degenerate radii), every edge is kind-correct, and every
  required port is fed.  inject_type_mismatch then grafts exactly one
  bad edge onto such a document to give the checks a known single
  defect to find.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .registry import Catalog, builtin_catalog
from .wire import Position, ScriptDocument, ScriptEdge, ScriptNode, SliderPin

__all__ = ["inject_type_mismatch", "random_clean_document", "random_wire_document"]

_WEIRD_NAMES = (
    "Number Slider", "Circle", "Poly Line", "extrude linear", "MERGE", "Lien",
    "Construct  Point", "Δpolice", "zzz", "Unit A", "series", "LIST-ITEM",
)
_WORDS = ("alpha", "beta", "Pt", "N", "Out", "värde", "θ", "x", "Radius", "S")


def _random_text(rng: random.Random) -> str:
    pool = "abcXYZ 0123\"\\\nüπ—🪁"
    return "".join(rng.choice(pool) for _ in range(rng.randint(0, 12)))


def _random_pin(rng: random.Random, sliderish: bool) -> object:
    roll = rng.random()
    if sliderish and roll < 0.4:
        low = rng.uniform(-5, 5)
        high = low + rng.uniform(0, 10)
        return SliderPin(low, high, low + rng.random() * (high - low))
    if roll < 0.6:
        return rng.uniform(-1e4, 1e4)
    if roll < 0.75:
        return rng.randint(-100, 100)
    return _random_text(rng)


def random_wire_document(rng: random.Random) -> ScriptDocument:
    """Arbitrary structurally-valid document for round-trip fuzzing."""
    count = rng.randint(0, 12)
    ids = rng.sample(range(0, 500), count)
    nodes = []
    for node_id in ids:
        component = rng.choice(_WEIRD_NAMES)
        sliderish = component.casefold().replace(" ", "") == "numberslider"
        pins = {}
        for _ in range(rng.randint(0, 3)):
            port = rng.choice(_WORDS) + str(rng.randint(0, 9))
            pins[port] = _random_pin(rng, sliderish)
        nodes.append(
            ScriptNode(
                node_id,
                component,
                Position(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000)),
                pins,
            )
        )
    edges = []
    if count >= 2:
        for _ in range(rng.randint(0, 2 * count)):
            a, b = rng.sample(ids, 2)
            edges.append(ScriptEdge(a, rng.choice(_WORDS), b, rng.choice(_WORDS)))
    prompt = None
    if rng.random() < 0.5:
        prompt = "fuzz " + _random_text(rng)
    return ScriptDocument(tuple(nodes), tuple(edges), prompt)


@dataclass
class _Entry:
    node: int
    port: str
    kind: str
    is_list: bool
    positive: bool


@dataclass
class _Builder:
    rng: random.Random
    nodes: list[ScriptNode] = field(default_factory=list)
    edges: list[ScriptEdge] = field(default_factory=list)
    pool: list[_Entry] = field(default_factory=list)

    def add(self, component: str, pins: dict[str, object]) -> int:
        node_id = len(self.nodes) + 1
        self.nodes.append(
            ScriptNode(node_id, component, Position(node_id * 220.0, 0.0), pins)
        )
        return node_id

    def wire(self, entry: _Entry, node_id: int, port: str) -> None:
        self.edges.append(ScriptEdge(entry.node, entry.port, node_id, port))

    def pick(
        self,
        kind: str,
        lists_ok: bool = True,
        scalars_ok: bool = True,
        positive_only: bool = False,
    ) -> _Entry | None:
        found = [
            e for e in self.pool
            if e.kind == kind
            and (lists_ok or not e.is_list)
            and (scalars_ok or e.is_list)
            and (not positive_only or e.positive)
        ]
        return self.rng.choice(found) if found else None

    def offer(self, node: int, port: str, kind: str, is_list: bool, positive: bool) -> None:
        self.pool.append(_Entry(node, port, kind, is_list, positive))


def _positive_pin(rng: random.Random) -> float:
    return round(rng.uniform(0.5, 5.0), 3)


def _add_slider(b: _Builder) -> None:
    value = _positive_pin(b.rng)
    node = b.add("Number Slider", {"N": SliderPin(0.5, 10.0, value)})
    b.offer(node, "N", "number", False, True)


def _feed_number(
    b: _Builder, node: int, port: str, pins: dict[str, object], positive: bool
) -> bool:
    """Wire a number source or pin a literal; returns True if fed."""
    entry = b.pick("number", lists_ok=False, positive_only=positive)
    if entry is not None and b.rng.random() < 0.7:
        b.wire(entry, node, port)
        return True
    pins[port] = _positive_pin(b.rng) if positive else round(b.rng.uniform(-5, 5), 3)
    return True


def _add_construct_point(b: _Builder) -> None:
    pins: dict[str, object] = {}
    node_id = len(b.nodes) + 1
    used_list = False
    for axis in ("X", "Y", "Z"):
        roll = b.rng.random()
        if roll < 0.35:
            entry = b.pick("number", lists_ok=not used_list)
            if entry is not None:
                b.edges.append(ScriptEdge(entry.node, entry.port, node_id, axis))
                used_list = used_list or entry.is_list
                continue
        if roll < 0.8:
            pins[axis] = round(b.rng.uniform(-5, 5), 3)
    node = b.add("Construct Point", pins)
    assert node == node_id
    b.offer(node, "Pt", "point", used_list, False)


def _add_unit_vector(b: _Builder) -> None:
    component = b.rng.choice(("Unit X", "Unit Y", "Unit Z"))
    pins: dict[str, object] = {}
    node_id = len(b.nodes) + 1
    _feed_number(b, node_id, "Factor", pins, positive=True)
    node = b.add(component, pins)
    b.offer(node, "V", "vector", False, False)


def _add_vector_xyz(b: _Builder) -> None:
    pins = {axis: _positive_pin(b.rng) for axis in ("X", "Y", "Z")}
    node = b.add("Vector XYZ", pins)
    b.offer(node, "V", "vector", False, False)


def _add_line(b: _Builder) -> None:
    start = b.pick("point")
    end = b.pick("point")
    if start is None or end is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(start.node, start.port, node_id, "Start"))
    b.edges.append(ScriptEdge(end.node, end.port, node_id, "End"))
    node = b.add("Line", {})
    b.offer(node, "L", "curve", start.is_list or end.is_list, False)


def _add_line_sdl(b: _Builder) -> None:
    start = b.pick("point")
    direction = b.pick("vector")
    if start is None or direction is None:
        return
    node_id = len(b.nodes) + 1
    pins: dict[str, object] = {}
    b.edges.append(ScriptEdge(start.node, start.port, node_id, "Start"))
    b.edges.append(ScriptEdge(direction.node, direction.port, node_id, "Direction"))
    _feed_number(b, node_id, "Length", pins, positive=True)
    node = b.add("Line SDL", pins)
    b.offer(node, "L", "curve", start.is_list, False)


def _add_series(b: _Builder) -> None:
    node_id = len(b.nodes) + 1
    pins: dict[str, object] = {"Count": b.rng.randint(2, 6)}
    _feed_number(b, node_id, "Start", pins, positive=True)
    _feed_number(b, node_id, "Step", pins, positive=True)
    node = b.add("Series", pins)
    b.offer(node, "Series", "number", True, True)


def _add_range(b: _Builder) -> None:
    node_id = len(b.nodes) + 1
    pins: dict[str, object] = {"Steps": b.rng.randint(2, 6), "End": _positive_pin(b.rng) + 3}
    _feed_number(b, node_id, "Start", pins, positive=True)
    node = b.add("Range", pins)
    b.offer(node, "Range", "number", True, True)


def _add_circle(b: _Builder) -> None:
    node_id = len(b.nodes) + 1
    pins: dict[str, object] = {}
    is_list = False
    center = b.pick("point")
    if center is not None and b.rng.random() < 0.6:
        b.edges.append(ScriptEdge(center.node, center.port, node_id, "Center"))
        is_list = center.is_list
    radius = b.pick("number", positive_only=True)
    if radius is not None and b.rng.random() < 0.7:
        b.edges.append(ScriptEdge(radius.node, radius.port, node_id, "Radius"))
        is_list = is_list or radius.is_list
    else:
        pins["Radius"] = _positive_pin(b.rng)
    node = b.add("Circle", pins)
    b.offer(node, "C", "curve", is_list, False)


def _add_polyline_like(b: _Builder) -> None:
    points = b.pick("point", scalars_ok=False)
    if points is None:
        return
    component = b.rng.choice(("Polyline", "Nurbs Curve", "Interpolate Curve"))
    node_id = len(b.nodes) + 1
    pins: dict[str, object] = {}
    if component != "Polyline":
        pins["Degree"] = b.rng.randint(2, 3)
    b.edges.append(ScriptEdge(points.node, points.port, node_id, "Vertices"))
    out = {"Polyline": "Pl", "Nurbs Curve": "Curve", "Interpolate Curve": "Curve"}[component]
    node = b.add(component, pins)
    b.offer(node, out, "curve", False, False)


def _add_divide_curve(b: _Builder) -> None:
    curve = b.pick("curve")
    if curve is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(curve.node, curve.port, node_id, "Curve"))
    node = b.add("Divide Curve", {"Count": b.rng.randint(2, 6)})
    b.offer(node, "Points", "point", True, False)


def _add_move(b: _Builder) -> None:
    geometry = b.pick(b.rng.choice(("point", "curve", "surface")))
    motion = b.pick("vector")
    if geometry is None or motion is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(geometry.node, geometry.port, node_id, "Geometry"))
    b.edges.append(ScriptEdge(motion.node, motion.port, node_id, "Motion"))
    node = b.add("Move", {})
    b.offer(node, "Geometry", geometry.kind, geometry.is_list, False)


def _add_extrude(b: _Builder) -> None:
    profile = b.pick("curve")
    axis = b.pick("vector")
    if profile is None or axis is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(profile.node, profile.port, node_id, "Profile"))
    b.edges.append(ScriptEdge(axis.node, axis.port, node_id, "Axis"))
    node = b.add("Extrude Linear", {})
    b.offer(node, "Surface", "surface", profile.is_list, False)


def _add_loft(b: _Builder) -> None:
    sections = b.pick("curve", scalars_ok=False)
    if sections is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(sections.node, sections.port, node_id, "Curves"))
    node = b.add("Loft", {})
    b.offer(node, "Surface", "surface", False, False)


def _add_math(b: _Builder) -> None:
    component = b.rng.choice(("Addition", "Multiplication", "Division", "Subtraction"))
    node_id = len(b.nodes) + 1
    pins: dict[str, object] = {}
    _feed_number(b, node_id, "A", pins, positive=True)
    _feed_number(b, node_id, "B", pins, positive=True)
    node = b.add(component, pins)
    b.offer(node, "Result", "number", False, component != "Subtraction")


def _add_list_item(b: _Builder) -> None:
    source = b.pick("point", scalars_ok=False) or b.pick("number", scalars_ok=False)
    if source is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(source.node, source.port, node_id, "List"))
    node = b.add("List Item", {"Index": b.rng.randint(0, 4)})
    b.offer(node, "Item", source.kind, False, source.positive)


def _add_merge(b: _Builder) -> None:
    kind = b.rng.choice(("point", "curve", "number"))
    first = b.pick(kind, scalars_ok=False)
    second = b.pick(kind, scalars_ok=False)
    if first is None or second is None:
        return
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(first.node, first.port, node_id, "A"))
    b.edges.append(ScriptEdge(second.node, second.port, node_id, "B"))
    node = b.add("Merge", {})
    b.offer(node, "Result", kind, True, first.positive and second.positive)


def _add_panel(b: _Builder) -> None:
    entry = b.rng.choice(b.pool)
    node_id = len(b.nodes) + 1
    b.edges.append(ScriptEdge(entry.node, entry.port, node_id, "Content"))
    b.add("Panel", {})


_GROWERS = (
    _add_construct_point,
    _add_construct_point,
    _add_unit_vector,
    _add_vector_xyz,
    _add_line,
    _add_line_sdl,
    _add_series,
    _add_series,
    _add_range,
    _add_circle,
    _add_circle,
    _add_polyline_like,
    _add_divide_curve,
    _add_move,
    _add_extrude,
    _add_loft,
    _add_math,
    _add_list_item,
    _add_merge,
    _add_panel,
)


def random_clean_document(rng: random.Random, catalog: Catalog | None = None) -> ScriptDocument:
    """A document with zero error diagnostics and zero runtime failures."""
    del catalog  # grows against the built-in components by construction
    b = _Builder(rng)
    for _ in range(rng.randint(1, 3)):
        _add_slider(b)
    _add_construct_point(b)
    for _ in range(rng.randint(3, 12)):
        rng.choice(_GROWERS)(b)
    return ScriptDocument(tuple(b.nodes), tuple(b.edges))


def inject_type_mismatch(
    document: ScriptDocument, rng: random.Random
) -> tuple[ScriptDocument, int]:
    """Add one Move node whose Motion is wired to a number output.

    Statically that edge is a type mismatch; at runtime the new node is
    the only failure origin.  Returns (document, new node id).  The
    document must contain a Number Slider and a Construct Point, which
    random_clean_document guarantees.
    """
    slider = next(n for n in document.nodes if n.component == "Number Slider")
    geometry = next(n for n in document.nodes if n.component == "Construct Point")
    new_id = max(n.id for n in document.nodes) + 1
    nodes = document.nodes + (
        ScriptNode(new_id, "Move", Position(new_id * 220.0, 240.0)),
    )
    edges = document.edges + (
        ScriptEdge(geometry.id, "Pt", new_id, "Geometry"),
        ScriptEdge(slider.id, "N", new_id, "Motion"),
    )
    del rng  # placement is deterministic; the signature allows future variety
    return ScriptDocument(nodes, edges, document.prompt), new_id
