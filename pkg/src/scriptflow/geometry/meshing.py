"""Surface sampling into triangle meshes, mesh measures and exports."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import point_at, point_at_fraction, sample_polyline
from .values import (
    Extrusion,
    GeomValue,
    ListV,
    LoftSurface,
    Point,
    Surface,
    is_curve,
    is_surface,
)

DEFAULT_U = 32
DEFAULT_V = 16
_DEGENERATE_AREA = 1e-12

__all__ = [
    "Mesh",
    "surface_point",
    "sample_mesh",
    "mesh_area",
    "mesh_to_json",
    "drawables_to_obj",
]


@dataclass(frozen=True)
class Mesh:
    """Triangle mesh: vertex coordinates plus index triples into them."""

    vertices: tuple[tuple[float, float, float], ...]
    faces: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        n = len(self.vertices)
        for tri in self.faces:
            if any(i < 0 or i >= n for i in tri):
                raise ValueError(f"face {tri} references a vertex outside 0..{n - 1}")


def surface_point(surface: Surface, u: float, v: float) -> Point:
    """Sample a surface at normalized (u, v) in [0, 1] x [0, 1].

    Extrusions evaluate the profile at u and slide it along the axis by v.
    Lofts evaluate each section at the matched arc-length fraction u and
    interpolate linearly between the two sections bracketing v.
    """
    if isinstance(surface, Extrusion):
        p = point_at(surface.profile, u)
        d = surface.direction
        return Point(p.x + v * d.x, p.y + v * d.y, p.z + v * d.z)
    if isinstance(surface, LoftSurface):
        sections = surface.sections
        span = v * (len(sections) - 1)
        i = min(int(span), len(sections) - 2)
        local = span - i
        a = point_at_fraction(sections[i], u)
        b = point_at_fraction(sections[i + 1], u)
        return Point(
            a.x + local * (b.x - a.x),
            a.y + local * (b.y - a.y),
            a.z + local * (b.z - a.z),
        )
    raise TypeError(f"not a surface: {surface!r}")


def sample_mesh(surface: Surface, u_count: int = DEFAULT_U, v_count: int = DEFAULT_V) -> Mesh:
    """Triangulate a (u_count x v_count) sample grid of the surface.

    Produces 2*(u_count-1)*(v_count-1) triangles in deterministic order,
    minus any zero-area triangles (collapsed grid cells are dropped).
    """
    if u_count < 2 or v_count < 2:
        raise ValueError("mesh sampling needs at least a 2x2 grid")
    grid = np.empty((u_count, v_count, 3))
    for iu in range(u_count):
        u = iu / (u_count - 1)
        for iv in range(v_count):
            p = surface_point(surface, u, iv / (v_count - 1))
            grid[iu, iv] = (p.x, p.y, p.z)
    vertices = tuple(
        (float(x), float(y), float(z)) for x, y, z in grid.reshape(-1, 3)
    )
    faces: list[tuple[int, int, int]] = []
    coords = grid.reshape(-1, 3)
    for iu in range(u_count - 1):
        for iv in range(v_count - 1):
            a = iu * v_count + iv
            b = (iu + 1) * v_count + iv
            c = (iu + 1) * v_count + iv + 1
            d = iu * v_count + iv + 1
            for tri in ((a, b, c), (a, c, d)):
                va, vb, vc = coords[tri[0]], coords[tri[1]], coords[tri[2]]
                area = 0.5 * np.linalg.norm(np.cross(vb - va, vc - va))
                if area > _DEGENERATE_AREA:
                    faces.append(tri)
    return Mesh(vertices, tuple(faces))


def mesh_area(mesh: Mesh) -> float:
    verts = np.asarray(mesh.vertices)
    if not mesh.faces:
        return 0.0
    tris = np.asarray(mesh.faces)
    a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    return float(0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1).sum())


def mesh_to_json(mesh: Mesh) -> dict:
    """0-based index encoding: {"vertices": [[x,y,z],...], "faces": [[i,j,k],...]}."""
    return {
        "vertices": [list(v) for v in mesh.vertices],
        "faces": [list(f) for f in mesh.faces],
    }


def _obj_vertex(p: Point) -> str:
    return f"v {p.x:.9g} {p.y:.9g} {p.z:.9g}"


def drawables_to_obj(
    drawables: list[tuple[int, GeomValue]],
    u_count: int = DEFAULT_U,
    v_count: int = DEFAULT_V,
    curve_samples: int = 64,
) -> str:
    """Wavefront OBJ text for a drawable list (1-based indices).

    Points become `p` elements, curves become `l` polyline elements and
    surfaces are sampled into triangle `f` elements.
    """
    lines: list[str] = ["# scriptflow export"]
    offset = 1

    def emit(node_id: int, value: GeomValue) -> None:
        nonlocal offset
        if isinstance(value, ListV):
            for item in value.items:
                emit(node_id, item)
            return
        if isinstance(value, Point):
            lines.append(f"o node{node_id}_point")
            lines.append(_obj_vertex(value))
            lines.append(f"p {offset}")
            offset += 1
            return
        if is_curve(value):
            pts = sample_polyline(value, curve_samples)
            lines.append(f"o node{node_id}_curve")
            for p in pts:
                lines.append(_obj_vertex(p))
            lines.append("l " + " ".join(str(offset + i) for i in range(len(pts))))
            offset += len(pts)
            return
        if is_surface(value):
            mesh = sample_mesh(value, u_count, v_count)
            lines.append(f"o node{node_id}_surface")
            for x, y, z in mesh.vertices:
                lines.append(f"v {x:.9g} {y:.9g} {z:.9g}")
            for a, b, c in mesh.faces:
                lines.append(f"f {offset + a} {offset + b} {offset + c}")
            offset += len(mesh.vertices)
            return
        # numbers, text and errors have no printable geometry

    for node_id, value in drawables:
        emit(node_id, value)
    return "\n".join(lines) + "\n"
