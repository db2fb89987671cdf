"""Geometry kernel: value types, curve sampling, component ops, meshing."""
from .values import (
    CircleCurve,
    Curve,
    ErrorV,
    Extrusion,
    GeomValue,
    LineSeg,
    ListV,
    LoftSurface,
    Number,
    NurbsCurve,
    Point,
    PolylineCurve,
    Surface,
    TextV,
    Vector,
    format_value,
    is_curve,
    is_geometry,
    is_surface,
    kind_of,
    translate,
    value_to_json,
)
from .curves import (
    arc_length,
    basis_matrix,
    divide_points,
    greville_abscissae,
    is_closed,
    knot_vector,
    point_at,
    point_at_fraction,
    points_at,
    sample_polyline,
)
from .kernel import KERNELS, kernel_for
from .meshing import (
    DEFAULT_U,
    DEFAULT_V,
    Mesh,
    drawables_to_obj,
    mesh_area,
    mesh_to_json,
    sample_mesh,
    surface_point,
)

__all__ = [
    "CircleCurve", "Curve", "ErrorV", "Extrusion", "GeomValue", "LineSeg",
    "ListV", "LoftSurface", "Number", "NurbsCurve", "Point", "PolylineCurve",
    "Surface", "TextV", "Vector", "format_value", "is_curve", "is_geometry",
    "is_surface", "kind_of", "translate", "value_to_json",
    "arc_length", "basis_matrix", "divide_points", "greville_abscissae",
    "is_closed", "knot_vector", "point_at", "point_at_fraction", "points_at",
    "sample_polyline", "KERNELS", "kernel_for",
    "DEFAULT_U", "DEFAULT_V", "Mesh", "drawables_to_obj", "mesh_area",
    "mesh_to_json", "sample_mesh", "surface_point",
]
