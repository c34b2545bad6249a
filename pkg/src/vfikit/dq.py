"""Quaternion and dual quaternion algebra.

A single immutable type, :class:`DQ`, carries quaternions (zero dual part),
dual quaternions, points (pure quaternions), Plücker lines and planes.
Coefficients are laid out as ``(w, x, y, z | w', x', y', z')`` so that
``vec8`` is a plain copy of the storage and the Hamilton matrices below can
be compared element-wise with their textbook definitions.
"""
from __future__ import annotations

import math
from numbers import Real

import numpy as np

__all__ = [
    "DQ", "DegeneratePrimaryError", "NotPureError", "AntipodalAmbiguityError",
    "i_", "j_", "k_", "E_", "C4", "C8",
    "P", "D", "Re", "Im", "conj", "norm", "vec4", "vec8",
    "hamiplus4", "haminus4", "hamiplus8", "haminus8", "crossmatrix",
    "inner", "cross", "is_pure", "is_unit", "translation", "rotation",
    "from_translation", "from_rotation", "pose", "rotation_angle", "rotation_axis",
    "norm_derivative_row", "log", "exp", "dq_pow", "sclerp", "align_sign",
    "to_matrix",
]

_ALGEBRA_TOL = 1e-12
_SCREW_BRANCH_TOL = 1e-8


class DegeneratePrimaryError(ValueError):
    """Dual norm requested for a dual quaternion with zero primary part."""


class NotPureError(ValueError):
    """An operation defined on pure (dual) quaternions got a non-pure one."""


class AntipodalAmbiguityError(ValueError):
    """The relative rotation between two poses is exactly pi."""


def _qmul(a, b):
    # plain-float Hamilton product; a and b are length-4 sequences
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return [
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ]


def _wrap(v: np.ndarray) -> "DQ":
    # trusted fast path: v is a fresh float array of length 8
    h = object.__new__(DQ)
    v.setflags(write=False)
    object.__setattr__(h, "_v", v)
    return h


class DQ:
    """Dual quaternion ``h = P(h) + eps D(h)``.

    Parameters
    ----------
    coeffs : scalar or array_like of length 1, 4 or 8
        A scalar gives a real dual quaternion, 4 values a quaternion with
        zero dual part, 8 values the full ``vec8`` layout.
    """

    __slots__ = ("_v",)

    def __init__(self, coeffs=0.0):
        if isinstance(coeffs, DQ):
            v = coeffs._v
        else:
            arr = np.asarray(coeffs, dtype=float).ravel()
            v = np.zeros(8)
            if arr.size in (1, 4, 8):
                v[:arr.size] = arr
            else:
                raise ValueError(f"DQ needs 1, 4 or 8 coefficients, got {arr.size}")
        v = np.array(v, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "_v", v)

    @classmethod
    def from_parts(cls, primary, dual=(0.0, 0.0, 0.0, 0.0)) -> "DQ":
        """Build ``primary + eps dual`` from two quaternions (DQ or 4-arrays)."""
        p = primary._v[:4] if isinstance(primary, DQ) else np.asarray(primary, float)
        d = dual._v[:4] if isinstance(dual, DQ) else np.asarray(dual, float)
        return cls(np.concatenate([p, d]))

    def __setattr__(self, name, value):
        raise AttributeError("DQ is immutable")

    @property
    def q(self) -> np.ndarray:
        """Read-only view of the eight coefficients."""
        return self._v

    def __add__(self, other):
        if isinstance(other, Real):
            other = DQ(other)
        if not isinstance(other, DQ):
            return NotImplemented
        return _wrap(self._v + other._v)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Real):
            other = DQ(other)
        if not isinstance(other, DQ):
            return NotImplemented
        return _wrap(self._v - other._v)

    def __rsub__(self, other):
        if isinstance(other, Real):
            return DQ(other) - self
        return NotImplemented

    def __neg__(self):
        return _wrap(-self._v)

    def __mul__(self, other):
        if isinstance(other, Real):
            return _wrap(self._v * float(other))
        if not isinstance(other, DQ):
            return NotImplemented
        a, b = self._v.tolist(), other._v.tolist()
        p = _qmul(a[:4], b[:4])
        d1 = _qmul(a[:4], b[4:])
        d2 = _qmul(a[4:], b[:4])
        return _wrap(np.array(p + [d1[0] + d2[0], d1[1] + d2[1], d1[2] + d2[2], d1[3] + d2[3]]))

    def __rmul__(self, other):
        if isinstance(other, Real):
            return _wrap(self._v * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return DQ(self._v / float(other))
        return NotImplemented

    def __repr__(self):
        w, x, y, z, wd, xd, yd, zd = self._v
        return (f"DQ({w:.6g} + {x:.6g}i + {y:.6g}j + {z:.6g}k"
                f" + eps({wd:.6g} + {xd:.6g}i + {yd:.6g}j + {zd:.6g}k))")

    def isclose(self, other, atol=_ALGEBRA_TOL) -> bool:
        return bool(np.allclose(self._v, DQ(other)._v, rtol=0.0, atol=atol))

    # short aliases, mostly for readability in formulas
    def P(self) -> "DQ":
        return P(self)

    def D(self) -> "DQ":
        return D(self)

    def conj(self) -> "DQ":
        return conj(self)


i_ = DQ([0, 1, 0, 0])
j_ = DQ([0, 0, 1, 0])
k_ = DQ([0, 0, 0, 1])
E_ = DQ([0, 0, 0, 0, 1, 0, 0, 0])

C4 = np.diag([1.0, -1.0, -1.0, -1.0])
C8 = np.diag([1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def P(h: DQ) -> DQ:
    """Primary part."""
    return DQ(h.q[:4])


def D(h: DQ) -> DQ:
    """Dual part, returned as a quaternion."""
    return DQ(h.q[4:])


def Re(h: DQ) -> DQ:
    v = np.zeros(8)
    v[0], v[4] = h.q[0], h.q[4]
    return DQ(v)


def Im(h: DQ) -> DQ:
    v = h.q.copy()
    v[0] = v[4] = 0.0
    return DQ(v)


def conj(h: DQ) -> DQ:
    return DQ(C8 @ h.q)


def vec4(h: DQ) -> np.ndarray:
    return h.q[:4].copy()


def vec8(h: DQ) -> np.ndarray:
    return h.q.copy()


def norm(h: DQ) -> DQ:
    """Dual norm ``sqrt(h conj(h))`` as a real dual number ``a + eps b``.

    Raises
    ------
    DegeneratePrimaryError
        If the primary part vanishes; the dual component is then undefined.
    """
    p, d = h.q[:4], h.q[4:]
    a = math.sqrt(float(p @ p))
    if a == 0.0:
        raise DegeneratePrimaryError("norm of a dual quaternion with zero primary part")
    return DQ([a, 0, 0, 0, float(p @ d) / a, 0, 0, 0])


def is_pure(h: DQ, tol: float = _ALGEBRA_TOL) -> bool:
    return abs(h.q[0]) <= tol and abs(h.q[4]) <= tol


def is_unit(h: DQ, tol: float = 1e-10) -> bool:
    p, d = h.q[:4], h.q[4:]
    return abs(float(p @ p) - 1.0) <= tol and abs(float(p @ d)) <= tol


def _require_pure(*hs: DQ):
    for h in hs:
        if not is_pure(h, 1e-10):
            raise NotPureError(f"expected a pure dual quaternion, got {h!r}")


def hamiplus4(h: DQ) -> np.ndarray:
    a0, a1, a2, a3 = h.q[:4]
    return np.array([
        [a0, -a1, -a2, -a3],
        [a1, a0, -a3, a2],
        [a2, a3, a0, -a1],
        [a3, -a2, a1, a0],
    ])


def haminus4(h: DQ) -> np.ndarray:
    b0, b1, b2, b3 = h.q[:4]
    return np.array([
        [b0, -b1, -b2, -b3],
        [b1, b0, b3, -b2],
        [b2, -b3, b0, b1],
        [b3, b2, -b1, b0],
    ])


def hamiplus8(h: DQ) -> np.ndarray:
    M = np.zeros((8, 8))
    M[:4, :4] = M[4:, 4:] = hamiplus4(P(h))
    M[4:, :4] = hamiplus4(D(h))
    return M


def haminus8(h: DQ) -> np.ndarray:
    M = np.zeros((8, 8))
    M[:4, :4] = M[4:, 4:] = haminus4(P(h))
    M[4:, :4] = haminus4(D(h))
    return M


def crossmatrix(a: DQ) -> np.ndarray:
    """4x4 matrix with ``vec4(a x b) = crossmatrix(a) @ vec4(b)`` for pure ``a``."""
    if abs(a.q[0]) > 1e-10 or np.any(a.q[4:] != 0.0):
        raise NotPureError(f"crossmatrix needs a pure quaternion, got {a!r}")
    _, a2, a3, a4 = a.q[:4]
    return np.array([
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -a4, a3],
        [0.0, a4, 0.0, -a2],
        [0.0, -a3, a2, 0.0],
    ])


def inner(a: DQ, b: DQ) -> DQ:
    """Inner product ``-(ab + ba)/2`` of two pure dual quaternions."""
    _require_pure(a, b)
    return (a * b + b * a) * -0.5


def cross(a: DQ, b: DQ) -> DQ:
    """Cross product ``(ab - ba)/2`` of two pure dual quaternions."""
    _require_pure(a, b)
    return (a * b - b * a) * 0.5


def norm_derivative_row(a: DQ, J_a: np.ndarray) -> np.ndarray:
    """Row mapping joint velocities to ``d||a||/dt`` given ``vec4(da/dt) = J_a qdot``.

    The identity ``d||a||/dt = vec4(a)^T vec4(da/dt) / ||a||`` holds for any
    nonzero quaternion; it is used here on pure quaternions and on the real
    dual part of a line inner product.
    """
    v = a.q[:4]
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise ZeroDivisionError("norm derivative of a zero quaternion is undefined")
    J_a = np.atleast_2d(np.asarray(J_a, dtype=float))
    return (v @ J_a) / n


# --- poses -----------------------------------------------------------------

def from_rotation(axis, angle: float) -> DQ:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        if angle != 0.0:
            raise ValueError("zero rotation axis with nonzero angle")
        return DQ(1.0)
    axis = axis / n
    return DQ(np.concatenate([[math.cos(angle / 2)], math.sin(angle / 2) * axis]))


def from_translation(t) -> DQ:
    t = np.asarray(t.q[1:4] if isinstance(t, DQ) else t, dtype=float)
    return DQ([1.0, 0, 0, 0, 0, *(0.5 * t)])


def pose(r: DQ, t) -> DQ:
    """Unit dual quaternion ``r + eps (1/2) t r``."""
    return from_translation(t) * r


def rotation(x: DQ) -> DQ:
    return P(x)


def translation(x: DQ) -> DQ:
    """Position ``2 D(x) conj(P(x))`` of a unit dual quaternion."""
    return D(x) * conj(P(x)) * 2.0


def rotation_angle(r: DQ) -> float:
    w = float(np.clip(r.q[0], -1.0, 1.0))
    return 2.0 * math.acos(w)


def rotation_axis(r: DQ) -> DQ:
    s = np.linalg.norm(r.q[1:4])
    if s < _SCREW_BRANCH_TOL:
        return k_
    return DQ([0.0, *(r.q[1:4] / s)])


def to_matrix(x: DQ) -> np.ndarray:
    """4x4 homogeneous transform of a unit dual quaternion."""
    w, a, b, c = x.q[:4]
    R = np.array([
        [1 - 2 * (b * b + c * c), 2 * (a * b - w * c), 2 * (a * c + w * b)],
        [2 * (a * b + w * c), 1 - 2 * (a * a + c * c), 2 * (b * c - w * a)],
        [2 * (a * c - w * b), 2 * (b * c + w * a), 1 - 2 * (a * a + b * b)],
    ])
    T = np.eye(4)
    T[:3, :3] = R
    T[:3, 3] = translation(x).q[1:4]
    return T


def align_sign(x: DQ, reference: DQ) -> DQ:
    """Return ``x`` or ``-x``, whichever has a nonnegative vec8 dot with ``reference``."""
    return -x if float(x.q @ reference.q) < 0.0 else x


# --- screw logarithm / exponential ------------------------------------------

def log(x: DQ) -> DQ:
    """Screw logarithm of a unit dual quaternion.

    Returns the pure dual quaternion ``(1/2)(phi + eps d)(l + eps m)`` where
    ``phi``, ``d`` are the rotation angle and translation along the screw axis
    ``l + eps m``. Below ``sin(phi/2) < 1e-8`` the pure-translation limit
    ``eps t / 2`` is used.
    """
    r = x.q[:4]
    dual = x.q[4:]
    s = float(np.linalg.norm(r[1:]))
    c = float(r[0])
    if s < _SCREW_BRANCH_TOL:
        t = translation(DQ(np.concatenate([r / np.linalg.norm(r), dual])))
        return DQ([0.0, 0.0, 0.0, 0.0, 0.0, *(0.5 * t.q[1:4])])
    phi = 2.0 * math.atan2(s, c)
    l = r[1:] / s
    d = -2.0 * dual[0] / s
    # phi*m = (phi/s) * (Im D - l d c / 2); phi/s stays bounded as s -> 0
    phi_m = (phi / s) * (dual[1:] - l * (0.5 * d * c))
    return DQ([0.0, *(0.5 * phi * l), 0.0, *(0.5 * (phi_m + d * l))])


def exp(g: DQ) -> DQ:
    """Inverse of :func:`log` for pure dual quaternions."""
    _require_pure(g)
    a = g.q[1:4]
    b = g.q[5:8]
    half_phi = float(np.linalg.norm(a))
    if half_phi < _SCREW_BRANCH_TOL:
        return DQ([1.0, 0, 0, 0, 0, *b])
    l = a / half_phi
    half_d = float(b @ l)
    sinc = math.sin(half_phi) / half_phi
    cs, sn = math.cos(half_phi), math.sin(half_phi)
    # m sin(phi/2) = (b - l d/2) * sin(phi/2)/(phi/2)
    dual_vec = (b - half_d * l) * sinc + l * half_d * cs
    return DQ([cs, *(sn * l), -half_d * sn, *dual_vec])


def dq_pow(x: DQ, tau: float) -> DQ:
    return exp(log(x) * float(tau))


def sclerp(x1: DQ, x2: DQ, tau: float, branch: int | None = None) -> DQ:
    """Screw linear interpolation ``x1 (conj(x1) x2)^tau``.

    The relative transform is taken along the shortest path. When the relative
    rotation is exactly ``pi`` both directions are equally short; pass
    ``branch=+1`` or ``branch=-1`` to pick the sign of the relative transform,
    otherwise :class:`AntipodalAmbiguityError` is raised.
    """
    rel = conj(x1) * x2
    w = rel.q[0]
    if branch is None:
        if abs(w) < _ALGEBRA_TOL:
            raise AntipodalAmbiguityError("relative rotation of pi between poses")
        if w < 0.0:
            rel = -rel
    elif branch in (1, -1):
        rel = rel * float(branch)
    else:
        raise ValueError("branch must be None, +1 or -1")
    return x1 * dq_pow(rel, tau)
