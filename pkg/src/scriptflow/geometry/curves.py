"""Curve sampling: natural parameters, arc length, equal-arc division.

Curves are parameterized over t in [0, 1].  LineSeg and PolylineCurve use
arc-proportional parameters by construction; CircleCurve maps t to angle
(also arc-proportional); NurbsCurve uses the B-spline parameter with a
clamped uniform knot vector, so equal-arc queries go through a chordal
arc-length table refined to a relative tolerance of 1e-6.
"""
from __future__ import annotations

import functools
import math

import numpy as np

from .values import CircleCurve, Curve, LineSeg, NurbsCurve, Point, PolylineCurve, Vector

ARC_TOL = 1e-6
_BASE_SEGMENTS = 256
_MAX_SEGMENTS = 8192

__all__ = [
    "knot_vector",
    "basis_matrix",
    "greville_abscissae",
    "bspline_points",
    "point_at",
    "points_at",
    "point_at_fraction",
    "arc_length",
    "is_closed",
    "divide_points",
    "sample_polyline",
]


def knot_vector(count: int, degree: int) -> np.ndarray:
    """Clamped uniform knot vector for `count` control points.

    The first and last knots repeat degree+1 times so the curve
    interpolates both endpoint control points.
    """
    if count < 2:
        raise ValueError("need at least 2 control points")
    if not 1 <= degree <= count - 1:
        raise ValueError(f"degree {degree} out of range for {count} control points")
    interior = np.linspace(0.0, 1.0, count - degree + 1)[1:-1]
    return np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])


def basis_matrix(count: int, degree: int, t: np.ndarray) -> np.ndarray:
    """Cox-de Boor basis values: returns array of shape (len(t), count).

    Row i holds N_{j,degree}(t[i]) for all basis functions j.  The
    half-open span convention is patched at t == 1 so the last basis
    function evaluates to exactly 1 there.
    """
    knots = knot_vector(count, degree)
    t = np.asarray(t, dtype=float)
    m = len(knots) - 1
    basis = np.zeros((t.size, m))
    for i in range(m):
        basis[:, i] = (knots[i] <= t) & (t < knots[i + 1])
    at_end = t >= knots[-1]
    if at_end.any():
        basis[at_end, :] = 0.0
        basis[at_end, count - 1] = 1.0
    for k in range(1, degree + 1):
        next_basis = np.zeros((t.size, m - k))
        for i in range(m - k):
            left_den = knots[i + k] - knots[i]
            right_den = knots[i + k + 1] - knots[i + 1]
            term = np.zeros(t.size)
            if left_den > 0:
                term = (t - knots[i]) / left_den * basis[:, i]
            if right_den > 0:
                term = term + (knots[i + k + 1] - t) / right_den * basis[:, i + 1]
            next_basis[:, i] = term
        basis = next_basis
    if at_end.any():
        basis[at_end, :] = 0.0
        basis[at_end, count - 1] = 1.0
    return basis[:, :count]


def greville_abscissae(count: int, degree: int) -> np.ndarray:
    """Greville parameters: averages of `degree` consecutive interior knots."""
    knots = knot_vector(count, degree)
    return np.array([knots[j + 1 : j + degree + 1].mean() for j in range(count)])


def _control_array(curve: NurbsCurve) -> np.ndarray:
    return np.array([[p.x, p.y, p.z] for p in curve.control])


def bspline_points(curve: NurbsCurve, t: np.ndarray) -> np.ndarray:
    basis = basis_matrix(len(curve.control), curve.degree, t)
    return basis @ _control_array(curve)


def _circle_frame(normal: Vector) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic in-plane orthonormal basis for a circle normal."""
    n = np.array([normal.x, normal.y, normal.z], dtype=float)
    n = n / np.linalg.norm(n)
    ref = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(ref, n)
    u = u / np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v


def points_at(curve: Curve, t: np.ndarray) -> np.ndarray:
    """Evaluate the curve at parameter array t, returning an (m, 3) array."""
    t = np.asarray(t, dtype=float)
    if isinstance(curve, LineSeg):
        a = np.array([curve.a.x, curve.a.y, curve.a.z])
        b = np.array([curve.b.x, curve.b.y, curve.b.z])
        return a[None, :] + t[:, None] * (b - a)[None, :]
    if isinstance(curve, PolylineCurve):
        verts = np.array([[p.x, p.y, p.z] for p in curve.vertices])
        seg = np.diff(verts, axis=0)
        seg_len = np.linalg.norm(seg, axis=1)
        total = seg_len.sum()
        if total == 0.0:
            return np.repeat(verts[:1], t.size, axis=0)
        cum = np.concatenate([[0.0], np.cumsum(seg_len)]) / total
        idx = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(seg) - 1)
        span = cum[idx + 1] - cum[idx]
        local = np.where(span > 0, (t - cum[idx]) / np.where(span > 0, span, 1.0), 0.0)
        return verts[idx] + local[:, None] * seg[idx]
    if isinstance(curve, CircleCurve):
        u, v = _circle_frame(curve.normal)
        ang = 2.0 * math.pi * t
        c = np.array([curve.center.x, curve.center.y, curve.center.z])
        return c[None, :] + curve.radius * (np.cos(ang)[:, None] * u + np.sin(ang)[:, None] * v)
    if isinstance(curve, NurbsCurve):
        return bspline_points(curve, t)
    raise TypeError(f"not a curve: {curve!r}")


def point_at(curve: Curve, t: float) -> Point:
    xyz = points_at(curve, np.array([t]))[0]
    return Point(float(xyz[0]), float(xyz[1]), float(xyz[2]))


@functools.lru_cache(maxsize=512)
def _arc_table(curve: Curve) -> tuple[np.ndarray, np.ndarray]:
    """Chordal arc-length table (params, cumulative lengths).

    Starts at 256 segments and doubles until the total length converges
    to ARC_TOL relative tolerance.
    """
    segments = _BASE_SEGMENTS
    prev_total = None
    while True:
        params = np.linspace(0.0, 1.0, segments + 1)
        pts = points_at(curve, params)
        chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(chords)])
        total = float(cum[-1])
        if prev_total is not None:
            if total == 0.0 or abs(total - prev_total) <= ARC_TOL * max(total, 1e-30):
                return params, cum
        if segments >= _MAX_SEGMENTS:
            return params, cum
        prev_total = total
        segments *= 2


def arc_length(curve: Curve) -> float:
    """Total arc length; exact for segments and polylines, chordal otherwise."""
    if isinstance(curve, LineSeg):
        return math.dist((curve.a.x, curve.a.y, curve.a.z), (curve.b.x, curve.b.y, curve.b.z))
    if isinstance(curve, PolylineCurve):
        verts = np.array([[p.x, p.y, p.z] for p in curve.vertices])
        return float(np.linalg.norm(np.diff(verts, axis=0), axis=1).sum())
    return float(_arc_table(curve)[1][-1])


def point_at_fraction(curve: Curve, fraction: float) -> Point:
    """Point at a normalized arc-length fraction in [0, 1]."""
    fraction = min(max(fraction, 0.0), 1.0)
    if isinstance(curve, (LineSeg, PolylineCurve, CircleCurve)):
        # natural parameter is already arc-proportional for these
        return point_at(curve, fraction)
    params, cum = _arc_table(curve)
    total = cum[-1]
    if total == 0.0:
        return point_at(curve, 0.0)
    target = fraction * total
    idx = int(np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(params) - 2))
    span = cum[idx + 1] - cum[idx]
    local = 0.0 if span == 0.0 else (target - cum[idx]) / span
    t = params[idx] + local * (params[idx + 1] - params[idx])
    return point_at(curve, float(t))


def is_closed(curve: Curve, eps: float = 1e-9) -> bool:
    if isinstance(curve, CircleCurve):
        return True
    start, end = point_at(curve, 0.0), point_at(curve, 1.0)
    return math.dist((start.x, start.y, start.z), (end.x, end.y, end.z)) <= eps


def divide_points(curve: Curve, count: int) -> list[Point]:
    """Equal-arc-length division points.

    Open curves yield count + 1 points including both endpoints; closed
    curves yield count points without duplicating the seam.
    """
    if count < 1:
        raise ValueError(f"division count must be >= 1, got {count}")
    if is_closed(curve):
        fractions = [j / count for j in range(count)]
    else:
        fractions = [j / count for j in range(count + 1)]
    return [point_at_fraction(curve, f) for f in fractions]


def sample_polyline(curve: Curve, samples: int = 64) -> list[Point]:
    """Polyline approximation for viewport/export use."""
    if isinstance(curve, LineSeg):
        return [curve.a, curve.b]
    if isinstance(curve, PolylineCurve):
        return list(curve.vertices)
    pts = points_at(curve, np.linspace(0.0, 1.0, samples + 1))
    return [Point(float(x), float(y), float(z)) for x, y, z in pts]
