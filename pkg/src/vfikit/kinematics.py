"""Serial-chain kinematics with dual quaternions.

Joints follow the standard Denavit-Hartenberg convention; joint ``i`` contributes
``Rz(theta_i) Tz(d_i) Tx(a_i) Rx(alpha_i)`` with the joint variable added to
``theta`` (revolute) or ``d`` (prismatic).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from .dq import (
    _qmul,
    C4, DQ, D, P, conj, cross, from_translation, haminus4, haminus8, hamiplus4,
    is_unit, k_, pose, translation,
)

__all__ = [
    "REVOLUTE", "PRISMATIC", "Joint", "AttachmentPoint", "KinematicChain", "dh_transform",
    "translation_jacobian", "rotation_jacobian", "line_jacobian", "load_chain",
]

REVOLUTE = "revolute"
PRISMATIC = "prismatic"


@dataclass(frozen=True)
class Joint:
    kind: str
    theta: float = 0.0
    d: float = 0.0
    a: float = 0.0
    alpha: float = 0.0
    q_min: float = -math.pi
    q_max: float = math.pi

    def __post_init__(self):
        if self.kind not in (REVOLUTE, PRISMATIC):
            raise ValueError(f"unknown joint kind {self.kind!r}")
        if not self.q_min < self.q_max:
            raise ValueError(f"joint limits must satisfy q_min < q_max, got {self.q_min}, {self.q_max}")


@dataclass(frozen=True)
class AttachmentPoint:
    """A point rigidly attached to the frame of joint ``joint_index`` (1-based)."""

    name: str
    joint_index: int
    local_offset: tuple = (0.0, 0.0, 0.0)


def dh_transform(theta: float, d: float, a: float, alpha: float) -> DQ:
    """Unit dual quaternion of ``Rz(theta) Tz(d) Tx(a) Rx(alpha)``.

    Closed form of the four-factor product: rotation ``Rz(theta) Rx(alpha)``
    and translation ``(a cos(theta), a sin(theta), d)``.
    """
    ct, st = math.cos(theta / 2), math.sin(theta / 2)
    ca, sa = math.cos(alpha / 2), math.sin(alpha / 2)
    r = [ct * ca, ct * sa, st * sa, st * ca]
    t = [0.0, 0.5 * a * math.cos(theta), 0.5 * a * math.sin(theta), 0.5 * d]
    return DQ(r + _qmul(t, r))


_HALF_K = DQ([0, 0, 0, 0.5])
_HALF_EPS_K = DQ([0, 0, 0, 0, 0, 0, 0, 0.5])


class KinematicChain:
    """Serial manipulator ``base * A_1(q_1) * ... * A_n(q_n) * effector``."""

    def __init__(self, joints: Sequence[Joint], base: DQ = DQ(1.0), effector: DQ = DQ(1.0),
                 attachment_points: Sequence[AttachmentPoint] = (), name: str = ""):
        if len(joints) < 1:
            raise ValueError("a chain needs at least one joint")
        for what, x in (("base", base), ("effector", effector)):
            if not is_unit(x):
                raise ValueError(f"{what} pose is not a unit dual quaternion")
        self.joints = tuple(joints)
        self.base = base
        self.effector = effector
        self.name = name
        self.attachment_points = {p.name: p for p in attachment_points}
        for p in attachment_points:
            if not 0 <= p.joint_index <= self.n:
                raise ValueError(f"attachment point {p.name!r} has joint index {p.joint_index} out of range")

    @property
    def n(self) -> int:
        return len(self.joints)

    @property
    def q_min(self) -> np.ndarray:
        return np.array([j.q_min for j in self.joints])

    @property
    def q_max(self) -> np.ndarray:
        return np.array([j.q_max for j in self.joints])

    def _check(self, q, upto):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n,):
            raise ValueError(f"expected {self.n} joint values, got shape {q.shape}")
        if upto is None:
            return q, self.n, True
        if not 0 <= upto <= self.n:
            raise IndexError(f"upto={upto} out of range for a {self.n}-joint chain")
        return q, upto, False

    def joint_transform(self, i: int, qi: float) -> DQ:
        j = self.joints[i]
        if j.kind == REVOLUTE:
            return dh_transform(j.theta + qi, j.d, j.a, j.alpha)
        return dh_transform(j.theta, j.d + qi, j.a, j.alpha)

    def _factors(self, q, upto, with_effector):
        factors = [self.base]
        factors += [self.joint_transform(i, q[i]) for i in range(upto)]
        if with_effector:
            factors.append(self.effector)
        return factors

    def fkm(self, q, upto: int | None = None) -> DQ:
        """Pose of frame ``upto`` (``None``: end effector, including the tool transform)."""
        q, upto, with_effector = self._check(q, upto)
        x = DQ(1.0)
        for f in self._factors(q, upto, with_effector):
            x = x * f
        return x

    def pose_jacobian(self, q, upto: int | None = None) -> np.ndarray:
        """8 x n analytical Jacobian of ``vec8(fkm(q, upto))``."""
        return self.frames(q, (upto,))[0][1]

    def frames(self, q, which=(None,)) -> list[tuple[DQ, np.ndarray]]:
        """Poses and pose Jacobians of several frames from one pass over the chain.

        Column ``i`` of the Jacobian of frame ``k`` is ``w_i x_k`` where
        ``w_i = p_i (k/2) conj(p_i)`` (``eps k/2`` for prismatic joints) is the
        world-frame twist of joint ``i`` and ``p_i`` the pose of its frame
        before the joint displacement acts.
        """
        q, _, _ = self._check(q, None)
        for upto in which:
            self._check(q, upto)
        prefix = [self.base]
        for i in range(self.n):
            prefix.append(prefix[-1] * self.joint_transform(i, q[i]))
        # joint i displaces about the z axis of frame i: A_i = Rz/Tz(q) * (constant)
        twists = np.zeros((8, self.n))
        for i in range(self.n):
            w = _HALF_K if self.joints[i].kind == REVOLUTE else _HALF_EPS_K
            twists[:, i] = (prefix[i] * w * conj(prefix[i])).q
        out = []
        for upto in which:
            if upto is None:
                x, k = prefix[-1] * self.effector, self.n
            else:
                x, k = prefix[upto], upto
            J = np.zeros((8, self.n))
            J[:, :k] = haminus8(x) @ twists[:, :k]
            out.append((x, J))
        return out

    def point(self, q, name: str) -> DQ:
        p = self.attachment_points[name]
        x = self.fkm(q, p.joint_index) * from_translation(p.local_offset)
        return translation(x)

    def point_jacobian(self, q, name: str) -> tuple[DQ, np.ndarray]:
        """Position of an attachment point and its 4 x n translation Jacobian."""
        p = self.attachment_points[name]
        offset = from_translation(p.local_offset)
        x = self.fkm(q, p.joint_index) * offset
        J_x = haminus8(offset) @ self.pose_jacobian(q, p.joint_index)
        return translation(x), translation_jacobian(J_x, x)

    # --- description files ------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "KinematicChain":
        joints = [
            Joint(kind=j["kind"], theta=float(j.get("theta", 0.0)), d=float(j.get("d", 0.0)),
                  a=float(j.get("a", 0.0)), alpha=float(j.get("alpha", 0.0)),
                  q_min=float(j["q_min"]), q_max=float(j["q_max"]))
            for j in data["joints"]
        ]
        base = _pose_field(data, "base")
        effector = _pose_field(data, "effector")
        points = [
            AttachmentPoint(p["name"], int(p["joint_index"]), tuple(float(v) for v in p.get("local_offset", (0, 0, 0))))
            for p in data.get("attachment_points", [])
        ]
        return cls(joints, base, effector, points, name=data.get("name", name))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "base_pose": [float(v) for v in self.base.q],
            "joints": [
                {"kind": j.kind, "theta": j.theta, "d": j.d, "a": j.a, "alpha": j.alpha,
                 "q_min": j.q_min, "q_max": j.q_max}
                for j in self.joints
            ],
            "effector_pose": [float(v) for v in self.effector.q],
            "attachment_points": [
                {"name": p.name, "joint_index": p.joint_index, "local_offset": list(p.local_offset)}
                for p in self.attachment_points.values()
            ],
        }


def _pose_field(data: dict, key: str) -> DQ:
    # either "<key>_pose" (8 coefficients) or "<key>_rotation" (4) and "<key>_translation" (3)
    if f"{key}_pose" in data and (f"{key}_rotation" in data or f"{key}_translation" in data):
        raise ValueError(f"give either {key}_pose or {key}_rotation/{key}_translation, not both")
    if f"{key}_pose" in data:
        x = DQ(data[f"{key}_pose"])
    else:
        r = DQ(data.get(f"{key}_rotation", [1.0, 0, 0, 0]))
        x = pose(r * (1.0 / float(np.linalg.norm(r.q[:4]))), data.get(f"{key}_translation", [0, 0, 0]))
    if not is_unit(x, 1e-8):
        raise ValueError(f"{key} pose is not a unit dual quaternion")
    return x


def load_chain(path) -> KinematicChain:
    path = Path(path)
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return KinematicChain.from_dict(data, name=path.stem)


def rotation_jacobian(J_x: np.ndarray) -> np.ndarray:
    return np.array(J_x[:4, :], dtype=float)


def translation_jacobian(J_x: np.ndarray, x: DQ) -> np.ndarray:
    """4 x n Jacobian of ``t = 2 D(x) conj(P(x))``."""
    if not is_unit(x, 1e-8):
        raise ValueError("translation Jacobian needs a unit dual quaternion")
    J_r = J_x[:4, :]
    J_d = J_x[4:, :]
    return 2.0 * (haminus4(conj(P(x))) @ J_d + hamiplus4(D(x)) @ C4 @ J_r)


def line_jacobian(x: DQ, J_x: np.ndarray, axis: DQ = k_) -> tuple[DQ, np.ndarray]:
    """Line through the frame ``x`` along its local ``axis``, with its 8 x n Jacobian."""
    if abs(np.linalg.norm(axis.q[1:4]) - 1.0) > 1e-10 or axis.q[0] != 0.0:
        raise ValueError("line axis must be a unit pure quaternion")
    r = P(x)
    t = translation(x)
    J_r = rotation_jacobian(J_x)
    J_t = translation_jacobian(J_x, x)
    l = r * axis * conj(r)
    m = cross(t, l)
    J_rz = (haminus4(axis * conj(r)) + hamiplus4(r * axis) @ C4) @ J_r
    J_mz = 0.5 * ((haminus4(l) - hamiplus4(l)) @ J_t + (hamiplus4(t) - haminus4(t)) @ J_rz)
    lz = DQ(np.concatenate([l.q[:4], m.q[:4]]))
    return lz, np.vstack([J_rz, J_mz])
