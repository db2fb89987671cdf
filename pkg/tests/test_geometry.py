"""Geometry kernel checks against closed-form values.

Area targets come from hand calculations: a unit-radius cylinder of
height 2 has lateral area 4*pi; an annulus between radii 1 and 2 has
area 3*pi; a planar quad patch has its exact vertex-product area.
"""
import math
import random

import pytest

from scriptflow.geometry import (
    CircleCurve,
    Extrusion,
    LineSeg,
    LoftSurface,
    NurbsCurve,
    Point,
    PolylineCurve,
    Vector,
    arc_length,
    divide_points,
    drawables_to_obj,
    mesh_area,
    point_at,
    point_at_fraction,
    sample_mesh,
    translate,
)

ORIGIN = Point(0.0, 0.0, 0.0)
Z = Vector(0.0, 0.0, 1.0)


def rel_err(got: float, want: float) -> float:
    return abs(got - want) / abs(want)


def test_cylinder_lateral_area_one_percent():
    cylinder = Extrusion(CircleCurve(ORIGIN, Z, 1.0), Vector(0.0, 0.0, 2.0))
    area = mesh_area(sample_mesh(cylinder, 64, 32))
    assert rel_err(area, 4.0 * math.pi) < 0.01


def test_annulus_loft_area_one_percent():
    inner = CircleCurve(ORIGIN, Z, 1.0)
    outer = CircleCurve(ORIGIN, Z, 2.0)
    area = mesh_area(sample_mesh(LoftSurface((inner, outer)), 64, 32))
    assert rel_err(area, 3.0 * math.pi) < 0.01


def test_planar_patch_area_exact():
    # straight 3x2 rectangle extruded from a segment: a flat quad
    segment = LineSeg(Point(0.0, 0.0, 0.0), Point(3.0, 0.0, 0.0))
    patch = Extrusion(segment, Vector(0.0, 2.0, 0.0))
    area = mesh_area(sample_mesh(patch, 8, 8))
    assert abs(area - 6.0) < 1e-6


def test_planar_loft_between_segments_exact():
    a = LineSeg(Point(0.0, 0.0, 0.0), Point(4.0, 0.0, 0.0))
    b = LineSeg(Point(0.0, 3.0, 0.0), Point(4.0, 3.0, 0.0))
    area = mesh_area(sample_mesh(LoftSurface((a, b)), 4, 4))
    assert abs(area - 12.0) < 1e-6


def test_bspline_endpoint_interpolation_100_polygons():
    rng = random.Random(314159)
    for _ in range(100):
        count = rng.randrange(2, 9)
        control = tuple(
            Point(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10))
            for _ in range(count)
        )
        curve = NurbsCurve(control, degree=min(3, count - 1))
        start = point_at(curve, 0.0)
        end = point_at(curve, 1.0)
        for got, want in ((start, control[0]), (end, control[-1])):
            assert abs(got.x - want.x) < 1e-9
            assert abs(got.y - want.y) < 1e-9
            assert abs(got.z - want.z) < 1e-9


def test_divide_curve_uniform_chords_on_line():
    line = LineSeg(Point(0.0, 0.0, 0.0), Point(10.0, 0.0, 0.0))
    pts = divide_points(line, 10)
    assert len(pts) == 11
    chords = [
        math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))
        for a, b in zip(pts, pts[1:])
    ]
    for chord in chords:
        assert rel_err(chord, 1.0) < 1e-6


def test_divide_curve_uniform_chords_on_circle():
    circle = CircleCurve(ORIGIN, Z, 5.0)
    pts = divide_points(circle, 12)
    chords = [
        math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))
        for a, b in zip(pts, pts[1:])
    ]
    mean = sum(chords) / len(chords)
    for chord in chords:
        assert rel_err(chord, mean) < 1e-6


def test_divide_polyline_respects_arc_length():
    poly = PolylineCurve((
        Point(0.0, 0.0, 0.0), Point(1.0, 0.0, 0.0),
        Point(1.0, 2.0, 0.0), Point(1.0, 2.0, 3.0),
    ))
    assert abs(arc_length(poly) - 6.0) < 1e-9
    pts = divide_points(poly, 6)
    chords = [
        math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))
        for a, b in zip(pts, pts[1:])
    ]
    # corner-spanning chords shorten slightly; arc spacing stays exact
    total = sum(chords)
    assert total <= 6.0 + 1e-9
    mid = point_at_fraction(poly, 0.5)
    assert (abs(mid.x - 1.0) < 1e-9 and abs(mid.y - 2.0) < 1e-9
            and abs(mid.z - 0.0) < 1e-9)


def test_circle_arc_length():
    circle = CircleCurve(ORIGIN, Z, 3.0)
    assert rel_err(arc_length(circle), 6.0 * math.pi) < 1e-6


def test_translate_invariance_of_area():
    cylinder = Extrusion(CircleCurve(ORIGIN, Z, 1.5), Vector(0.0, 0.0, 2.0))
    moved = translate(cylinder, Vector(12.0, -7.0, 3.0))
    a0 = mesh_area(sample_mesh(cylinder, 32, 16))
    a1 = mesh_area(sample_mesh(moved, 32, 16))
    assert abs(a0 - a1) < 1e-9


def test_mesh_sampling_deterministic():
    surface = LoftSurface((
        CircleCurve(ORIGIN, Z, 1.0),
        CircleCurve(Point(0.0, 0.0, 4.0), Z, 0.25),
    ))
    m1 = sample_mesh(surface, 32, 16)
    m2 = sample_mesh(surface, 32, 16)
    assert m1.vertices == m2.vertices
    assert m1.faces == m2.faces


def test_mesh_counts():
    mesh = sample_mesh(Extrusion(CircleCurve(ORIGIN, Z, 1.0), Z), 32, 16)
    assert len(mesh.vertices) == 32 * 16
    assert len(mesh.faces) == 31 * 15 * 2


def test_degenerate_constructors_rejected():
    with pytest.raises(ValueError):
        CircleCurve(ORIGIN, Z, 0.0)
    with pytest.raises(ValueError):
        CircleCurve(ORIGIN, Vector(0.0, 0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        PolylineCurve((ORIGIN,))
    with pytest.raises(ValueError):
        Extrusion(CircleCurve(ORIGIN, Z, 1.0), Vector(0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        LoftSurface((CircleCurve(ORIGIN, Z, 1.0),))


def test_nurbs_rejects_degree_beyond_spans():
    with pytest.raises(ValueError, match="degree"):
        NurbsCurve((ORIGIN, Point(1.0, 0.0, 0.0)), degree=3)


def test_obj_export_shape():
    drawables = [
        (4, LineSeg(ORIGIN, Point(1.0, 0.0, 0.0))),
        (9, Extrusion(CircleCurve(ORIGIN, Z, 1.0), Z)),
    ]
    text = drawables_to_obj(drawables, u_count=8, v_count=4)
    lines = text.splitlines()
    assert lines[0].startswith("#")
    assert any(line == "o node4_curve" for line in lines)
    assert any(line.startswith("o node9_") for line in lines)
    vertex_count = sum(1 for line in lines if line.startswith("v "))
    face_count = sum(1 for line in lines if line.startswith("f "))
    assert vertex_count == 2 + 8 * 4
    assert face_count == 7 * 3 * 2
    # faces reference valid 1-based vertex indices
    for line in lines:
        if line.startswith("f "):
            for token in line.split()[1:]:
                assert 1 <= int(token) <= vertex_count
