"""Points, Plücker lines and planes, and the static distances between them.

All primitives are :class:`~vfikit.dq.DQ` values:

* a point is a pure quaternion ``x i + y j + z k``;
* a line is the pure unit dual quaternion ``l + eps m`` with ``m = p x l``;
* a plane is ``n + eps d`` with unit normal ``n`` and signed offset ``d``.
"""
from __future__ import annotations

import numpy as np

from .dq import DQ, D, P, conj, cross, inner, is_pure, translation

__all__ = [
    "PARALLEL_SIN_TOL", "point", "line_from", "plane_from", "line_direction",
    "line_moment", "plane_normal", "plane_offset", "point_plane_distance",
    "point_line_distance", "line_inner", "line_cross", "line_line_distance",
    "transform_line", "transform_point", "check_line",
]

# |sin(phi)| below this routes line-line distance to the parallel formula
PARALLEL_SIN_TOL = 1e-6


def point(xyz) -> DQ:
    x, y, z = np.asarray(xyz, dtype=float)
    return DQ([0.0, x, y, z])


def _as_point(p) -> DQ:
    if isinstance(p, DQ):
        if not is_pure(p, 1e-10) or np.any(p.q[4:] != 0.0):
            raise ValueError(f"not a point: {p!r}")
        return p
    return point(p)


def _unit_direction(v, what: str) -> DQ:
    v = _as_point(v)
    n = np.linalg.norm(v.q[1:4])
    if abs(n - 1.0) > 1e-10:
        raise ValueError(f"{what} must be a unit pure quaternion, norm is {n:.3g}")
    return v


def line_from(p, direction) -> DQ:
    """Plücker line through point ``p`` along the unit ``direction``."""
    l = _unit_direction(direction, "line direction")
    m = cross(_as_point(p), l)
    return DQ(np.concatenate([l.q[:4], m.q[:4]]))


def plane_from(p, normal) -> DQ:
    """Plane through ``p`` with unit ``normal``; offset is ``<p, n>``."""
    n = _unit_direction(normal, "plane normal")
    offset = float(_as_point(p).q[1:4] @ n.q[1:4])
    return DQ([0.0, *n.q[1:4], offset, 0.0, 0.0, 0.0])


def line_direction(l: DQ) -> DQ:
    return P(l)


def line_moment(l: DQ) -> DQ:
    return D(l)


def plane_normal(pi: DQ) -> DQ:
    return P(pi)


def plane_offset(pi: DQ) -> float:
    return float(pi.q[4])


def check_line(l: DQ, tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``l`` satisfies the Plücker line invariants."""
    if not is_pure(l, tol):
        raise ValueError("line is not pure")
    d, m = l.q[1:4], l.q[5:8]
    if abs(np.linalg.norm(d) - 1.0) > tol:
        raise ValueError("line direction is not unit")
    if abs(float(d @ m)) > tol:
        raise ValueError("line violates the Plücker constraint <l, m> = 0")


def point_plane_distance(t, pi: DQ) -> float:
    """Signed distance, positive on the side the normal points to."""
    t = _as_point(t)
    return float(t.q[1:4] @ pi.q[1:4]) - plane_offset(pi)


def point_line_distance(t, l: DQ) -> float:
    """Distance ``||t x l - m||`` between a point and a line."""
    t = _as_point(t)
    v = cross(t, P(l)) - D(l)
    return float(np.linalg.norm(v.q[1:4]))


def line_inner(lz: DQ, l: DQ) -> DQ:
    """Dual cosine ``cos(phi) - eps d sin(phi)`` of two lines (a real dual number)."""
    return inner(lz, l)


def line_cross(lz: DQ, l: DQ) -> DQ:
    """Dual sine times the common perpendicular, ``lz x l``."""
    return cross(lz, l)


def line_line_distance(lz: DQ, l: DQ) -> float:
    """Distance between two Plücker lines.

    The quotient ``|D<lz, l>| / |P(lz x l)|`` is used unless the lines are
    (numerically) parallel, in which case ``|D(lz x l)|`` is returned.
    """
    c = line_cross(lz, l)
    sin_phi = float(np.linalg.norm(c.q[1:4]))
    if sin_phi < PARALLEL_SIN_TOL:
        return float(np.linalg.norm(c.q[4:8]))
    dot = line_inner(lz, l)
    return abs(float(dot.q[4])) / sin_phi


def transform_point(x: DQ, p) -> DQ:
    """Apply the rigid motion ``x`` to a point."""
    r = P(x)
    return r * _as_point(p) * conj(r) + translation(x)


def transform_line(x: DQ, l: DQ) -> DQ:
    """Apply the rigid motion ``x`` to a line, ``x l conj(x)``."""
    return x * l * conj(x)

