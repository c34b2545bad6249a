"""Per-tick velocity controller: task tracking plus VFI rows, solved as one LP.

Decision vector layout::

    g = [qdot_P (n), qdot_N (n), y (8), z_A (8), z_B (1), z_l (r_l), z_C (r_c)]

Blocks of ``A g = b``:

1. ``J (qdot_P - qdot_N) - y + z_A = -eta x_err``      (1-norm tracking residual)
2. ``1 (qdot_P + qdot_N) + z_B = beta ||x_err||_1``    (stop at the goal)
3. joint-limit rows, one slack each
4. zone rows, one slack each
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distance_jacobians import DistancePair, SingularDistanceError
from .dq import DQ
from .lp import INFEASIBLE, OPTIMAL, CanonicalLP, LPNumericalError, LPSolution, solve
from .vfi import DEFAULT_JOINT_GAIN, ConstraintRow, ZoneSpec, distance_error, joint_limit_rows, zone_row

__all__ = [
    "Gains", "Zone", "ControlOutput", "task_error", "build_program",
    "solve_program", "step", "SINGULAR", "FAILSAFE",
]

log = logging.getLogger(__name__)

SINGULAR = "singular_row_omitted"
FAILSAFE = "failsafe_stop"


@dataclass(frozen=True)
class Gains:
    eta: float = 50.0
    beta: float = 40.0
    eta_joint: float = DEFAULT_JOINT_GAIN

    def __post_init__(self):
        if not (self.eta > 0 and self.beta > 0 and self.eta_joint > 0):
            raise ValueError("gains must be positive")


@dataclass(frozen=True)
class Zone:
    """A restricted zone: a distance evaluator plus its VFI parameters.

    ``evaluate(q)`` returns the :class:`DistancePair` for the configuration.
    """

    name: str
    spec: ZoneSpec
    evaluate: Callable[[np.ndarray], DistancePair]


@dataclass
class ControlOutput:
    qdot: np.ndarray
    status: str
    objective: float = float("nan")
    y: np.ndarray = field(default_factory=lambda: np.zeros(8))
    z_A: np.ndarray = field(default_factory=lambda: np.zeros(8))
    z_B: float = 0.0
    z_l: np.ndarray = field(default_factory=lambda: np.zeros(0))
    z_C: np.ndarray = field(default_factory=lambda: np.zeros(0))
    x_err: np.ndarray = field(default_factory=lambda: np.zeros(8))
    rows: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    distances: dict = field(default_factory=dict)
    solution: LPSolution | None = None


def task_error(x: DQ, x_d: DQ) -> np.ndarray:
    """``vec8(x - s x_d)`` with ``s = +-1`` chosen to minimize the error norm."""
    plus = x.q - x_d.q
    minus = x.q + x_d.q
    return plus.copy() if plus @ plus <= minus @ minus else minus.copy()


def build_program(J_x: np.ndarray, x_err: np.ndarray, gains: Gains,
                  joint_rows: Sequence[ConstraintRow] = (),
                  zone_rows: Sequence[ConstraintRow] = ()) -> CanonicalLP:
    J_x = np.atleast_2d(np.asarray(J_x, dtype=float))
    x_err = np.asarray(x_err, dtype=float).ravel()
    m, n = J_x.shape
    if x_err.size != m:
        raise ValueError(f"task error has {x_err.size} entries, Jacobian has {m} rows")
    for row in (*joint_rows, *zone_rows):
        if np.shape(row.W) != (n,):
            raise ValueError(f"constraint row {row.tag!r} has width {np.shape(row.W)}, expected ({n},)")
    r_l, r_c = len(joint_rows), len(zone_rows)
    M = 2 * n + 2 * m + 1 + r_l + r_c
    K = m + 1 + r_l + r_c
    A = np.zeros((K, M))
    b = np.zeros(K)
    iy, iza, izb, izl, izc = 2 * n, 2 * n + m, 2 * n + 2 * m, 2 * n + 2 * m + 1, 2 * n + 2 * m + 1 + r_l

    A[:m, :n] = J_x
    A[:m, n:2 * n] = -J_x
    A[:m, iy:iza] = -np.eye(m)
    A[:m, iza:izb] = np.eye(m)
    b[:m] = -gains.eta * x_err

    A[m, :2 * n] = 1.0
    A[m, izb] = 1.0
    b[m] = gains.beta * float(np.abs(x_err).sum())

    for k, row in enumerate((*joint_rows, *zone_rows)):
        A[m + 1 + k, :2 * n] = row.split_row
        A[m + 1 + k, izl + k] = 1.0
        b[m + 1 + k] = row.rhs

    ones_J = J_x.sum(axis=0)
    c = np.zeros(M)
    c[:n] = -ones_J
    c[n:2 * n] = ones_J
    c[iy:iza] = 2.0

    names = ([f"qdotP{i + 1}" for i in range(n)] + [f"qdotN{i + 1}" for i in range(n)]
             + [f"y{i + 1}" for i in range(m)] + [f"zA{i + 1}" for i in range(m)] + ["zB"]
             + [f"zl_{r.tag or k}" for k, r in enumerate(joint_rows)]
             + [f"zC_{r.tag or k}" for k, r in enumerate(zone_rows)])
    return CanonicalLP(c, A, b, tuple(names))


def solve_program(J_x, x_err, gains: Gains, joint_rows=(), zone_rows=()) -> ControlOutput:
    """Build and solve one tick's LP; an infeasible program yields zero velocity."""
    J_x = np.atleast_2d(np.asarray(J_x, dtype=float))
    x_err = np.asarray(x_err, dtype=float).ravel()
    m, n = J_x.shape
    lp = build_program(J_x, x_err, gains, joint_rows, zone_rows)
    try:
        sol = solve(lp)
    except LPNumericalError as exc:
        log.warning("LP breakdown, stopping: %s", exc)
        return ControlOutput(np.zeros(n), FAILSAFE, x_err=x_err, flags=[FAILSAFE])
    if sol.status != OPTIMAL:
        return ControlOutput(np.zeros(n), sol.status, x_err=x_err, flags=[FAILSAFE], solution=sol)
    g = sol.g
    r_l = len(joint_rows)
    iy, iza, izb = 2 * n, 2 * n + m, 2 * n + 2 * m
    return ControlOutput(
        qdot=g[:n] - g[n:2 * n],
        status=OPTIMAL,
        objective=sol.objective - gains.eta * float(x_err.sum()),
        y=g[iy:iza].copy(),
        z_A=g[iza:izb].copy(),
        z_B=float(g[izb]),
        z_l=g[izb + 1:izb + 1 + r_l].copy(),
        z_C=g[izb + 1 + r_l:].copy(),
        x_err=x_err,
        rows=list(zone_rows),
        solution=sol,
    )


def step(chain, q, x_d: DQ, zones: Sequence[Zone] = (), gains: Gains = Gains(),
         strict_singular: bool = False, joint_limits: bool = True) -> ControlOutput:
    """One control tick for ``chain`` at ``q`` tracking the end-effector pose ``x_d``.

    A zone whose distance Jacobian is singular at ``q`` is omitted with a
    warning (``strict_singular`` re-raises instead).
    """
    q = np.asarray(q, dtype=float)
    x = chain.fkm(q)
    J_x = chain.pose_jacobian(q)
    x_err = task_error(x, x_d)
    rows, flags, distances = [], [], {}
    for zone in zones:
        try:
            pair = zone.evaluate(q)
        except SingularDistanceError as exc:
            if strict_singular:
                raise
            log.warning("zone %s singular (%s branch), row omitted: %s", zone.name, exc.branch, exc)
            flags.append(SINGULAR)
            continue
        distances[zone.name] = (pair.d, distance_error(pair.d, zone.spec))
        rows.append(zone_row(pair, zone.spec, zone.name))
    jrows = joint_limit_rows(q, chain, gains.eta_joint) if joint_limits else []
    out = solve_program(J_x, x_err, gains, jrows, rows)
    out.flags = flags + out.flags
    out.distances = distances
    if out.status == INFEASIBLE:
        log.warning("control LP infeasible; commanding zero velocity")
    return out
