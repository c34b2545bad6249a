"""Distances between a robot-driven primitive and a static one, with Jacobians.

Each function returns a :class:`DistancePair` holding the scalar distance and
the 1 x n row ``J_d`` such that ``d(d)/dt = J_d @ qdot``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dq import DQ, D, P, crossmatrix, haminus8, hamiplus8, norm_derivative_row
from .geom import PARALLEL_SIN_TOL, line_cross, line_inner, plane_normal, plane_offset

__all__ = [
    "DistancePair", "SingularDistanceError", "point_plane", "line_point",
    "point_line", "inner_product_jacobian", "cross_product_jacobian", "line_line",
    "LOW_CONFIDENCE_SIN",
]

log = logging.getLogger(__name__)

# 1e-6 <= |sin(phi)| < LOW_CONFIDENCE_SIN uses the non-parallel Jacobian but is logged
LOW_CONFIDENCE_SIN = 1e-4
SINGULAR_DISTANCE = 1e-12


class SingularDistanceError(ValueError):
    """The distance Jacobian divides by a vanishing quantity at this configuration."""

    def __init__(self, message: str, branch: str = ""):
        super().__init__(message)
        self.branch = branch


@dataclass(frozen=True)
class DistancePair:
    d: float
    J: np.ndarray
    tag: str = ""

    def rate(self, qdot) -> float:
        return float(self.J @ np.asarray(qdot, dtype=float))


def point_plane(J_t: np.ndarray, t: DQ, pi: DQ) -> DistancePair:
    """Signed point-to-static-plane distance ``<t, n> - d_pi``."""
    n = plane_normal(pi).q[:4]
    d = float(t.q[:4] @ n) - plane_offset(pi)
    return DistancePair(d, n @ J_t, "point-plane")


def line_point(J_lz: np.ndarray, lz: DQ, p: DQ) -> DistancePair:
    """Distance from a robot line to a static point (e.g. an entry point)."""
    l, m = P(lz), D(lz)
    v = _cross(p, l) - m
    d = float(np.linalg.norm(v.q[:4]))
    if d < SINGULAR_DISTANCE:
        raise SingularDistanceError("point lies on the line; distance Jacobian undefined", "line-point")
    J_rz, J_mz = J_lz[:4], J_lz[4:]
    J = v.q[:4] @ (crossmatrix(p) @ J_rz - J_mz) / d
    return DistancePair(d, J, "line-point")


def point_line(J_t: np.ndarray, t: DQ, l: DQ) -> DistancePair:
    """Distance from a robot point to a static line (cylinder constraints)."""
    ld, m = P(l), D(l)
    v = _cross(t, ld) - m
    d = float(np.linalg.norm(v.q[:4]))
    if d < SINGULAR_DISTANCE:
        raise SingularDistanceError("point lies on the line; distance Jacobian undefined", "point-line")
    J = v.q[:4] @ crossmatrix(ld).T @ J_t / d
    return DistancePair(d, J, "point-line")


def inner_product_jacobian(J_lz: np.ndarray, l: DQ) -> np.ndarray:
    """Jacobian of ``vec8(<lz, l>)`` for a static line ``l``."""
    return -0.5 * (hamiplus8(l) + haminus8(l)) @ J_lz


def cross_product_jacobian(J_lz: np.ndarray, l: DQ) -> np.ndarray:
    """Jacobian of ``vec8(lz x l)`` for a static line ``l``."""
    return 0.5 * (haminus8(l) - hamiplus8(l)) @ J_lz


def line_line(J_lz: np.ndarray, lz: DQ, l: DQ) -> DistancePair:
    """Distance between a robot line and a static line.

    Non-parallel lines use ``|D<lz,l>| / |P(lz x l)|`` and the quotient rule;
    parallel lines (``|sin(phi)| < 1e-6``) use ``|D(lz x l)|``.

    Raises
    ------
    SingularDistanceError
        For intersecting lines (non-parallel branch) or coincident lines
        (parallel branch). ``err.branch`` names the branch.
    """
    c = line_cross(lz, l)
    sin_phi = float(np.linalg.norm(c.q[:4]))
    J_cross = cross_product_jacobian(J_lz, l)
    if sin_phi < PARALLEL_SIN_TOL:
        dual = D(c)
        d = float(np.linalg.norm(dual.q[:4]))
        if d < SINGULAR_DISTANCE:
            raise SingularDistanceError("coincident lines", "parallel")
        J = norm_derivative_row(dual, J_cross[4:])
        return DistancePair(d, J, "line-line-parallel")

    if sin_phi < LOW_CONFIDENCE_SIN:
        log.debug("line-line Jacobian near parallel (|sin phi| = %.3g); low confidence", sin_phi)
    dot_dual = D(line_inner(lz, l))
    num = float(np.linalg.norm(dot_dual.q[:4]))
    if num < SINGULAR_DISTANCE:
        raise SingularDistanceError("intersecting lines", "non-parallel")
    J_inner = inner_product_jacobian(J_lz, l)
    a = 1.0 / sin_phi
    b = -num / sin_phi ** 2
    J_num = norm_derivative_row(dot_dual, J_inner[4:])
    J_den = norm_derivative_row(P(c), J_cross[:4])
    return DistancePair(num / sin_phi, a * J_num + b * J_den, "line-line")


def _cross(a: DQ, b: DQ) -> DQ:
    # quaternion cross product; both arguments are pure quaternions here
    return (a * b - b * a) * 0.5
