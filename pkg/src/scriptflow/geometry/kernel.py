"""Per-component evaluation functions.

Each kernel receives already-gathered port values (scalars on scalar
ports, ListV on list ports) and returns a mapping from output port name
to value.  Kernels never raise on bad data: runtime type and domain
problems come back as ErrorV so evaluation can continue elsewhere in
the graph.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .curves import basis_matrix, divide_points, greville_abscissae
from .values import (
    CircleCurve,
    ErrorV,
    GeomValue,
    LineSeg,
    ListV,
    Number,
    NurbsCurve,
    Point,
    PolylineCurve,
    TextV,
    Vector,
    Extrusion,
    LoftSurface,
    format_value,
    is_curve,
    is_geometry,
    kind_of,
    translate,
)

Kernel = Callable[[int, dict[str, GeomValue]], dict[str, GeomValue]]

__all__ = ["KERNELS", "kernel_for"]


def _num(value: GeomValue) -> float | None:
    return value.value if isinstance(value, Number) else None


def _int(value: GeomValue) -> int | None:
    if isinstance(value, Number):
        return int(round(value.value))
    return None


def _point(value: GeomValue) -> Point | None:
    return value if isinstance(value, Point) else None


def _vector(value: GeomValue) -> Vector | None:
    return value if isinstance(value, Vector) else None


def _bad(node: int, message: str, out: str) -> dict[str, GeomValue]:
    return {out: ErrorV(node, message)}


def _number_slider(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    x = _num(v["N"])
    if x is None:
        return _bad(node, f"Number Slider carries a number, got {kind_of(v['N'])}", "N")
    return {"N": Number(x)}


def _panel(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    content = v["Content"]
    items = content.items if isinstance(content, ListV) else (content,)
    return {"Content": TextV("\n".join(format_value(item) for item in items))}


def _construct_point(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    coords = []
    for port in ("X", "Y", "Z"):
        x = _num(v[port])
        if x is None:
            return _bad(node, f"Construct Point coordinate {port} must be a number, got {kind_of(v[port])}", "Pt")
        coords.append(x)
    return {"Pt": Point(*coords)}


def _unit(axis: tuple[float, float, float]) -> Kernel:
    def kernel(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
        f = _num(v["Factor"])
        if f is None:
            return _bad(node, f"unit vector factor must be a number, got {kind_of(v['Factor'])}", "V")
        return {"V": Vector(axis[0] * f, axis[1] * f, axis[2] * f)}

    return kernel


def _vector_xyz(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    coords = []
    for port in ("X", "Y", "Z"):
        x = _num(v[port])
        if x is None:
            return _bad(node, f"Vector XYZ component {port} must be a number, got {kind_of(v[port])}", "V")
        coords.append(x)
    return {"V": Vector(*coords)}


def _line(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    a, b = _point(v["Start"]), _point(v["End"])
    if a is None:
        return _bad(node, f"Line start must be a point, got {kind_of(v['Start'])}", "L")
    if b is None:
        return _bad(node, f"Line end must be a point, got {kind_of(v['End'])}", "L")
    return {"L": LineSeg(a, b)}


def _line_sdl(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    start = _point(v["Start"])
    direction = _vector(v["Direction"])
    length = _num(v["Length"])
    if start is None:
        return _bad(node, f"Line SDL start must be a point, got {kind_of(v['Start'])}", "L")
    if direction is None:
        return _bad(node, f"Line SDL requires a direction vector, got {kind_of(v['Direction'])}", "L")
    if length is None:
        return _bad(node, f"Line SDL length must be a number, got {kind_of(v['Length'])}", "L")
    norm = direction.length()
    if norm < 1e-12:
        return _bad(node, "Line SDL direction must be nonzero", "L")
    scale = length / norm
    end = Point(start.x + direction.x * scale, start.y + direction.y * scale, start.z + direction.z * scale)
    return {"L": LineSeg(start, end)}


def _collect_points(node: int, value: GeomValue, label: str) -> list[Point] | ErrorV:
    items = value.items if isinstance(value, ListV) else (value,)
    points: list[Point] = []
    for item in items:
        if isinstance(item, ErrorV):
            return item
        p = _point(item)
        if p is None:
            return ErrorV(node, f"{label} must be points, got {kind_of(item)}")
        points.append(p)
    return points


def _polyline(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    pts = _collect_points(node, v["Vertices"], "Polyline vertices")
    if isinstance(pts, ErrorV):
        return {"Pl": pts}
    if len(pts) < 2:
        return _bad(node, f"Polyline needs at least 2 vertices, got {len(pts)}", "Pl")
    return {"Pl": PolylineCurve(tuple(pts))}


def _circle(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    center = _point(v["Center"])
    normal = _vector(v["Normal"])
    radius = _num(v["Radius"])
    if center is None:
        return _bad(node, f"Circle center must be a point, got {kind_of(v['Center'])}", "C")
    if normal is None:
        return _bad(node, f"Circle normal must be a vector, got {kind_of(v['Normal'])}", "C")
    if radius is None:
        return _bad(node, f"Circle radius must be a number, got {kind_of(v['Radius'])}", "C")
    try:
        return {"C": CircleCurve(center, normal, radius)}
    except ValueError as exc:
        return _bad(node, str(exc), "C")


def _series(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    start, step, count = _num(v["Start"]), _num(v["Step"]), _int(v["Count"])
    if start is None or step is None:
        return _bad(node, "Series start and step must be numbers", "Series")
    if count is None:
        return _bad(node, f"Series count must be a number, got {kind_of(v['Count'])}", "Series")
    if count < 0:
        return _bad(node, f"Series count must be >= 0, got {count}", "Series")
    return {"Series": ListV(tuple(Number(start + i * step) for i in range(count)))}


def _range(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    start, end, steps = _num(v["Start"]), _num(v["End"]), _int(v["Steps"])
    if start is None or end is None:
        return _bad(node, "Range start and end must be numbers", "Range")
    if steps is None or steps < 1:
        return _bad(node, f"Range needs a step count >= 1, got {format_value(v['Steps'])}", "Range")
    width = (end - start) / steps
    return {"Range": ListV(tuple(Number(start + i * width) for i in range(steps + 1)))}


def _divide_curve(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    curve = v["Curve"]
    count = _int(v["Count"])
    if not is_curve(curve):
        return _bad(node, f"Divide Curve requires a curve, got {kind_of(curve)}", "Points")
    if count is None:
        return _bad(node, f"Divide Curve count must be a number, got {kind_of(v['Count'])}", "Points")
    try:
        pts = divide_points(curve, count)
    except ValueError as exc:
        return _bad(node, str(exc), "Points")
    return {"Points": ListV(tuple(pts))}


def _move(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    geometry, motion = v["Geometry"], v["Motion"]
    if not isinstance(motion, Vector):
        return _bad(node, "Move requires a vector input", "Geometry")
    if not is_geometry(geometry) and not isinstance(geometry, ListV):
        return _bad(node, f"Move requires geometry to move, got {kind_of(geometry)}", "Geometry")
    try:
        return {"Geometry": translate(geometry, motion)}
    except TypeError as exc:
        return _bad(node, str(exc), "Geometry")


def _extrude_linear(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    profile, axis = v["Profile"], v["Axis"]
    if not is_curve(profile):
        return _bad(node, f"Extrude Linear requires a curve profile, got {kind_of(profile)}", "Surface")
    if isinstance(axis, Number):
        return _bad(node, "Extrude Linear requires an axis vector, not a number", "Surface")
    if not isinstance(axis, Vector):
        return _bad(node, f"Extrude Linear requires an axis vector, got {kind_of(axis)}", "Surface")
    try:
        return {"Surface": Extrusion(profile, axis)}
    except ValueError as exc:
        return _bad(node, str(exc), "Surface")


def _loft(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    value = v["Curves"]
    items = value.items if isinstance(value, ListV) else (value,)
    sections = []
    for item in items:
        if isinstance(item, ErrorV):
            return {"Surface": item}
        if not is_curve(item):
            return _bad(node, f"Loft sections must be curves, got {kind_of(item)}", "Surface")
        sections.append(item)
    if len(sections) < 2:
        return _bad(node, f"Loft needs at least 2 section curves, got {len(sections)}", "Surface")
    return {"Surface": LoftSurface(tuple(sections))}


def _effective_degree(requested: int, count: int) -> int:
    return max(1, min(requested, count - 1))


def _nurbs_curve(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    pts = _collect_points(node, v["Vertices"], "Nurbs Curve control points")
    if isinstance(pts, ErrorV):
        return {"Curve": pts}
    degree = _int(v["Degree"])
    if degree is None:
        return _bad(node, f"Nurbs Curve degree must be a number, got {kind_of(v['Degree'])}", "Curve")
    if len(pts) < 2:
        return _bad(node, f"Nurbs Curve needs at least 2 control points, got {len(pts)}", "Curve")
    return {"Curve": NurbsCurve(tuple(pts), _effective_degree(degree, len(pts)))}


def _interpolate_curve(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    pts = _collect_points(node, v["Vertices"], "Interpolate Curve points")
    if isinstance(pts, ErrorV):
        return {"Curve": pts}
    degree = _int(v["Degree"])
    if degree is None:
        return _bad(node, f"Interpolate Curve degree must be a number, got {kind_of(v['Degree'])}", "Curve")
    if len(pts) < 2:
        return _bad(node, f"Interpolate Curve needs at least 2 points, got {len(pts)}", "Curve")
    n = len(pts)
    p = _effective_degree(degree, n)
    if p == 1:
        return {"Curve": NurbsCurve(tuple(pts), 1)}
    # solve for control points so the spline passes through pts at the
    # Greville parameters (always a nonsingular collocation system)
    params = greville_abscissae(n, p)
    matrix = basis_matrix(n, p, params)
    target = np.array([[q.x, q.y, q.z] for q in pts])
    control = np.linalg.solve(matrix, target)
    return {"Curve": NurbsCurve(tuple(Point(*map(float, row)) for row in control), p)}


def _binary_math(name: str, op: Callable[[float, float], float]) -> Kernel:
    def kernel(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
        a, b = _num(v["A"]), _num(v["B"])
        if a is None:
            return _bad(node, f"{name} operand A must be a number, got {kind_of(v['A'])}", "Result")
        if b is None:
            return _bad(node, f"{name} operand B must be a number, got {kind_of(v['B'])}", "Result")
        if name == "Division" and b == 0.0:
            return _bad(node, "division by zero", "Result")
        value = op(a, b)
        if not math.isfinite(value):
            return _bad(node, f"{name} produced a non-finite result", "Result")
        return {"Result": Number(value)}

    return kernel


def _negative(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    x = _num(v["Value"])
    if x is None:
        return _bad(node, f"Negative requires a number, got {kind_of(v['Value'])}", "Result")
    return {"Result": Number(-x)}


def _merge(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    items: list[GeomValue] = []
    for port in ("A", "B"):
        value = v[port]
        items.extend(value.items if isinstance(value, ListV) else (value,))
    try:
        return {"Result": ListV(tuple(items))}
    except ValueError as exc:
        return _bad(node, f"cannot merge: {exc}", "Result")


def _list_item(node: int, v: dict[str, GeomValue]) -> dict[str, GeomValue]:
    value = v["List"]
    items = value.items if isinstance(value, ListV) else (value,)
    index = _int(v["Index"])
    if index is None:
        return _bad(node, f"List Item index must be a number, got {kind_of(v['Index'])}", "Item")
    if not items:
        return _bad(node, "cannot take an item from an empty list", "Item")
    # out-of-range indexes clamp to the list bounds rather than failing
    return {"Item": items[min(max(index, 0), len(items) - 1)]}


KERNELS: dict[str, Kernel] = {
    "Number Slider": _number_slider,
    "Panel": _panel,
    "Construct Point": _construct_point,
    "Unit X": _unit((1.0, 0.0, 0.0)),
    "Unit Y": _unit((0.0, 1.0, 0.0)),
    "Unit Z": _unit((0.0, 0.0, 1.0)),
    "Vector XYZ": _vector_xyz,
    "Line": _line,
    "Line SDL": _line_sdl,
    "Polyline": _polyline,
    "Circle": _circle,
    "Series": _series,
    "Range": _range,
    "Divide Curve": _divide_curve,
    "Move": _move,
    "Extrude Linear": _extrude_linear,
    "Loft": _loft,
    "Nurbs Curve": _nurbs_curve,
    "Interpolate Curve": _interpolate_curve,
    "Addition": _binary_math("Addition", lambda a, b: a + b),
    "Subtraction": _binary_math("Subtraction", lambda a, b: a - b),
    "Multiplication": _binary_math("Multiplication", lambda a, b: a * b),
    "Division": _binary_math("Division", lambda a, b: a / b),
    "Negative": _negative,
    "Merge": _merge,
    "List Item": _list_item,
}


def kernel_for(component: str) -> Kernel:
    try:
        return KERNELS[component]
    except KeyError:
        raise KeyError(
            f"no kernel for component {component!r}; known: {', '.join(sorted(KERNELS))}"
        ) from None
