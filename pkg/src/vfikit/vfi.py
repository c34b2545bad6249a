"""Vector-field-inequality rows for the velocity-level linear program.

A row ``W @ qdot <= rhs`` is carried as :class:`ConstraintRow`; in the split
form used by the LP it reads ``W qdot_P - W qdot_N + z = rhs`` with ``z >= 0``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .distance_jacobians import DistancePair

__all__ = [
    "KEEP_OUT", "KEEP_IN", "ZoneSpec", "ConstraintRow", "distance_error",
    "keep_out_row", "keep_in_row", "zone_row", "joint_limit_rows",
    "check_discretization", "DEFAULT_JOINT_GAIN",
]

KEEP_OUT = "keep_out"
KEEP_IN = "keep_in"
DEFAULT_JOINT_GAIN = 2.0


@dataclass(frozen=True)
class ZoneSpec:
    direction: str
    d_safe: float
    eta_d: float = 0.5

    def __post_init__(self):
        if self.direction not in (KEEP_OUT, KEEP_IN):
            raise ValueError(f"direction must be {KEEP_OUT!r} or {KEEP_IN!r}")
        if self.d_safe < 0:
            raise ValueError("d_safe must be nonnegative")
        if not self.eta_d > 0:
            raise ValueError("eta_d must be positive")


@dataclass(frozen=True)
class ConstraintRow:
    """``W @ qdot <= rhs``."""

    W: np.ndarray
    rhs: float
    tag: str = ""

    @property
    def split_row(self) -> np.ndarray:
        """Coefficients acting on ``(qdot_P, qdot_N)``."""
        return np.concatenate([self.W, -self.W])

    def slack(self, qdot) -> float:
        return float(self.rhs - self.W @ np.asarray(qdot, dtype=float))

    def satisfied(self, qdot, tol: float = 1e-8) -> bool:
        return self.slack(qdot) >= -tol


def distance_error(d: float, spec: ZoneSpec) -> float:
    """Signed margin: positive in the safe region, zero on the boundary."""
    if spec.direction == KEEP_OUT:
        return d - spec.d_safe
    return spec.d_safe - d


def keep_out_row(pair: DistancePair, spec: ZoneSpec, tag: str = "") -> ConstraintRow:
    """Encode ``J_d qdot >= -eta_d (d - d_safe)``.

    A negative margin is accepted; the row then demands strictly outward motion.
    """
    if spec.direction != KEEP_OUT:
        raise ValueError("keep_out_row needs a keep_out zone")
    margin = pair.d - spec.d_safe
    return ConstraintRow(-np.asarray(pair.J, dtype=float), spec.eta_d * margin, tag or pair.tag)


def keep_in_row(pair: DistancePair, spec: ZoneSpec, tag: str = "") -> ConstraintRow:
    """Encode ``J_d qdot <= eta_d (d_safe - d)``."""
    if spec.direction != KEEP_IN:
        raise ValueError("keep_in_row needs a keep_in zone")
    margin = spec.d_safe - pair.d
    return ConstraintRow(np.asarray(pair.J, dtype=float).copy(), spec.eta_d * margin, tag or pair.tag)


def zone_row(pair: DistancePair, spec: ZoneSpec, tag: str = "") -> ConstraintRow:
    if spec.direction == KEEP_OUT:
        return keep_out_row(pair, spec, tag)
    return keep_in_row(pair, spec, tag)


def joint_limit_rows(q, chain, eta_joint: float = DEFAULT_JOINT_GAIN) -> list[ConstraintRow]:
    """Velocity-damper rows keeping every joint of ``chain`` inside its limits.

    Per joint: ``qdot_i >= -eta (q_i - q_min_i)`` and ``qdot_i <= eta (q_max_i - q_i)``.
    """
    if not eta_joint > 0:
        raise ValueError("eta_joint must be positive")
    q = np.asarray(q, dtype=float)
    q_min, q_max = chain.q_min, chain.q_max
    n = q.size
    rows = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        rows.append(ConstraintRow(-e, eta_joint * (q[i] - q_min[i]), f"q{i + 1}_min"))
        rows.append(ConstraintRow(e, eta_joint * (q_max[i] - q[i]), f"q{i + 1}_max"))
    return rows


def check_discretization(eta_d: float, dt: float) -> bool:
    """Warn when ``eta_d * dt > 1``; Euler steps can then overshoot the boundary."""
    if eta_d * dt > 1.0:
        warnings.warn(f"eta_d * dt = {eta_d * dt:.3g} > 1: discrete steps may cross the zone boundary",
                      RuntimeWarning, stacklevel=2)
        return False
    return True
