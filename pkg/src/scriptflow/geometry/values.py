"""Evaluation value types: numbers, points, vectors, curves, surfaces, lists, errors.

Every value that can travel along a graph edge is one of the frozen
dataclasses below.  Constructors enforce the structural invariants
(positive circle radius, nonzero extrusion direction, list homogeneity)
and raise ValueError when violated; evaluation code catches those and
converts them into ErrorV values instead of crashing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

__all__ = [
    "GeomValue",
    "Number",
    "TextV",
    "Point",
    "Vector",
    "LineSeg",
    "PolylineCurve",
    "CircleCurve",
    "NurbsCurve",
    "Extrusion",
    "LoftSurface",
    "ListV",
    "ErrorV",
    "Curve",
    "Surface",
    "kind_of",
    "is_geometry",
    "is_curve",
    "is_surface",
    "translate",
    "value_to_json",
    "format_value",
]


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class TextV:
    value: str


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    z: float = 0.0


@dataclass(frozen=True)
class Vector:
    x: float
    y: float
    z: float = 0.0

    def length(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_zero(self, eps: float = 1e-12) -> bool:
        return self.length() < eps


@dataclass(frozen=True)
class LineSeg:
    a: Point
    b: Point


@dataclass(frozen=True)
class PolylineCurve:
    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ValueError("polyline needs at least 2 vertices")


@dataclass(frozen=True)
class CircleCurve:
    center: Point
    normal: Vector
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"circle radius must be strictly positive, got {self.radius}")
        if self.normal.is_zero():
            raise ValueError("circle normal must be nonzero")


@dataclass(frozen=True)
class NurbsCurve:
    """Clamped, non-rational B-spline through `control` with uniform interior knots."""

    control: tuple[Point, ...]
    degree: int

    def __post_init__(self) -> None:
        if len(self.control) < 2:
            raise ValueError("nurbs curve needs at least 2 control points")
        if self.degree < 1:
            raise ValueError(f"nurbs degree must be >= 1, got {self.degree}")
        if self.degree > len(self.control) - 1:
            raise ValueError(
                f"nurbs degree {self.degree} exceeds control count {len(self.control)} - 1"
            )


Curve = Union[LineSeg, PolylineCurve, CircleCurve, NurbsCurve]


@dataclass(frozen=True)
class Extrusion:
    profile: Curve
    direction: Vector

    def __post_init__(self) -> None:
        if self.direction.is_zero():
            raise ValueError("extrusion direction must be nonzero")


@dataclass(frozen=True)
class LoftSurface:
    sections: tuple[Curve, ...]

    def __post_init__(self) -> None:
        if len(self.sections) < 2:
            raise ValueError("loft needs at least 2 sections")


Surface = Union[Extrusion, LoftSurface]


@dataclass(frozen=True)
class ErrorV:
    """Failure marker.  `origin` is the node id where the failure happened."""

    origin: int
    message: str


@dataclass(frozen=True)
class ListV:
    """Flat homogeneous list.  ErrorV items are admitted anywhere.

    `kind` is the shared kind of the non-error items.  Mixed geometry
    (points next to curves, as produced by Merge) is homogeneous under
    the umbrella kind "geometry-any".  An empty list has kind None.
    """

    items: tuple["GeomValue", ...]
    kind: str | None = field(default=None)

    def __post_init__(self) -> None:
        kinds = {kind_of(v) for v in self.items if not isinstance(v, ErrorV)}
        if not kinds:
            unified: str | None = None
        elif len(kinds) == 1:
            unified = kinds.pop()
        elif kinds <= {"point", "curve", "surface", "geometry-any"}:
            unified = "geometry-any"
        else:
            raise ValueError(f"list items must share one kind, got {sorted(kinds)}")
        if self.kind is None:
            object.__setattr__(self, "kind", unified)
        elif unified is not None and unified != self.kind and self.kind != "geometry-any":
            raise ValueError(f"list declared kind {self.kind!r} but items are {unified!r}")

    def __len__(self) -> int:
        return len(self.items)


GeomValue = Union[
    Number,
    TextV,
    Point,
    Vector,
    LineSeg,
    PolylineCurve,
    CircleCurve,
    NurbsCurve,
    Extrusion,
    LoftSurface,
    ListV,
    ErrorV,
]

_CURVE_TYPES = (LineSeg, PolylineCurve, CircleCurve, NurbsCurve)
_SURFACE_TYPES = (Extrusion, LoftSurface)


def is_curve(value: object) -> bool:
    return isinstance(value, _CURVE_TYPES)


def is_surface(value: object) -> bool:
    return isinstance(value, _SURFACE_TYPES)


def kind_of(value: GeomValue) -> str:
    """Map a runtime value to its port-kind name."""
    if isinstance(value, Number):
        return "number"
    if isinstance(value, TextV):
        return "text"
    if isinstance(value, Point):
        return "point"
    if isinstance(value, Vector):
        return "vector"
    if is_curve(value):
        return "curve"
    if is_surface(value):
        return "surface"
    if isinstance(value, ListV):
        return "list"
    if isinstance(value, ErrorV):
        return "error"
    raise TypeError(f"not a geometry value: {value!r}")


def is_geometry(value: GeomValue) -> bool:
    """True for values a viewport can draw: points, curves, surfaces."""
    return isinstance(value, Point) or is_curve(value) or is_surface(value)


def translate(value: GeomValue, motion: Vector) -> GeomValue:
    """Translate a geometric value by `motion`.  Vectors are unaffected."""
    if isinstance(value, Point):
        return Point(value.x + motion.x, value.y + motion.y, value.z + motion.z)
    if isinstance(value, LineSeg):
        return LineSeg(translate(value.a, motion), translate(value.b, motion))
    if isinstance(value, PolylineCurve):
        return PolylineCurve(tuple(translate(p, motion) for p in value.vertices))
    if isinstance(value, CircleCurve):
        return CircleCurve(translate(value.center, motion), value.normal, value.radius)
    if isinstance(value, NurbsCurve):
        return NurbsCurve(tuple(translate(p, motion) for p in value.control), value.degree)
    if isinstance(value, Extrusion):
        return Extrusion(translate(value.profile, motion), value.direction)
    if isinstance(value, LoftSurface):
        return LoftSurface(tuple(translate(s, motion) for s in value.sections))
    if isinstance(value, ListV):
        return ListV(tuple(v if isinstance(v, ErrorV) else translate(v, motion) for v in value.items))
    raise TypeError(f"cannot translate a value of kind {kind_of(value)!r}")


def _point_json(p: Point) -> list[float]:
    return [p.x, p.y, p.z]


def value_to_json(value: GeomValue, mesh_for=None) -> dict:
    """Typed JSON encoding used by the wire format, eval results and the HTTP API.

    `mesh_for` is an optional callable(surface) -> mesh-json dict; when given,
    surface values carry a sampled mesh under the "mesh" key.
    """
    if isinstance(value, Number):
        return {"kind": "number", "value": value.value}
    if isinstance(value, TextV):
        return {"kind": "text", "value": value.value}
    if isinstance(value, Point):
        return {"kind": "point", "xyz": _point_json(value)}
    if isinstance(value, Vector):
        return {"kind": "vector", "xyz": [value.x, value.y, value.z]}
    if isinstance(value, LineSeg):
        return {"kind": "line", "a": _point_json(value.a), "b": _point_json(value.b)}
    if isinstance(value, PolylineCurve):
        return {"kind": "polyline", "vertices": [_point_json(p) for p in value.vertices]}
    if isinstance(value, CircleCurve):
        return {
            "kind": "circle",
            "center": _point_json(value.center),
            "normal": [value.normal.x, value.normal.y, value.normal.z],
            "radius": value.radius,
        }
    if isinstance(value, NurbsCurve):
        return {
            "kind": "nurbs",
            "control": [_point_json(p) for p in value.control],
            "degree": value.degree,
        }
    if isinstance(value, Extrusion):
        out = {
            "kind": "extrusion",
            "profile": value_to_json(value.profile),
            "direction": [value.direction.x, value.direction.y, value.direction.z],
        }
        if mesh_for is not None:
            out["mesh"] = mesh_for(value)
        return out
    if isinstance(value, LoftSurface):
        out = {
            "kind": "loft",
            "sections": [value_to_json(s) for s in value.sections],
        }
        if mesh_for is not None:
            out["mesh"] = mesh_for(value)
        return out
    if isinstance(value, ListV):
        return {
            "kind": "list",
            "item_kind": value.kind,
            "items": [value_to_json(v, mesh_for) for v in value.items],
        }
    if isinstance(value, ErrorV):
        return {"kind": "error", "origin": value.origin, "message": value.message}
    raise TypeError(f"not a geometry value: {value!r}")


def format_value(value: GeomValue) -> str:
    """Short human-readable rendering, used by panels and CLI summaries."""
    if isinstance(value, Number):
        return f"{value.value:g}"
    if isinstance(value, TextV):
        return value.value
    if isinstance(value, Point):
        return f"({value.x:g}, {value.y:g}, {value.z:g})"
    if isinstance(value, Vector):
        return f"<{value.x:g}, {value.y:g}, {value.z:g}>"
    if isinstance(value, LineSeg):
        return f"line {format_value(value.a)} -> {format_value(value.b)}"
    if isinstance(value, PolylineCurve):
        return f"polyline[{len(value.vertices)}]"
    if isinstance(value, CircleCurve):
        return f"circle r={value.radius:g} at {format_value(value.center)}"
    if isinstance(value, NurbsCurve):
        return f"nurbs[{len(value.control)} pts, degree {value.degree}]"
    if isinstance(value, Extrusion):
        return f"extrusion of {format_value(value.profile)}"
    if isinstance(value, LoftSurface):
        return f"loft[{len(value.sections)} sections]"
    if isinstance(value, ListV):
        return "[" + ", ".join(format_value(v) for v in value.items) + "]"
    if isinstance(value, ErrorV):
        return f"error(node {value.origin}): {value.message}"
    return repr(value)
