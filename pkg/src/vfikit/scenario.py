"""Two-arm restricted-workspace simulation: constraints C1-C4, scenarios S1-S5.

One tool moves along a screw-interpolated trajectory while the other is held
still. Four distances are logged every tick whether or not their constraint is
enabled:

C1  moving shaft line  vs static shaft line      (line - static line)
C2  moving shaft line  vs entry point            (line - static point)
C3  lower shaft point  vs workspace centre line  (point - static line)
C4  tool tip           vs lower workspace plane  (point - static plane)
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from . import distance_jacobians as dj
from .controller import Gains, solve_program, task_error
from .dq import DQ, P, align_sign, from_rotation, from_translation, haminus8, is_unit, pose, sclerp, translation
from .geom import (line_from, line_line_distance, plane_from, point, point_line_distance,
                   point_plane_distance)
from .kinematics import KinematicChain, line_jacobian, load_chain, translation_jacobian
from .lp import OPTIMAL
from .vfi import KEEP_IN, KEEP_OUT, ZoneSpec, check_discretization, distance_error, joint_limit_rows, zone_row

__all__ = [
    "CONSTRAINTS", "SCENARIOS", "EXPECTED_VIOLATIONS", "VIOLATION_TOL", "ScenarioConfig",
    "Trajectory", "LogRecord", "ScenarioResult", "load_config", "reference_config_path",
    "generate_trajectory", "run_scenario", "write_log", "read_log", "summarize", "log_columns",
]

log = logging.getLogger(__name__)

CONSTRAINTS = ("C1", "C2", "C3", "C4")
SCENARIOS = {
    "S1": (),
    "S2": ("C1",),
    "S3": ("C1", "C2"),
    "S4": ("C1", "C2", "C3"),
    "S5": ("C1", "C2", "C3", "C4"),
}
# which constraints each scenario is reported to violate
EXPECTED_VIOLATIONS = {
    "S1": ("C1", "C2", "C3", "C4"),
    "S2": ("C2", "C3", "C4"),
    "S3": ("C3", "C4"),
    "S4": ("C4",),
    "S5": (),
}
# a constraint counts as violated once its margin drops below -0.1 mm
VIOLATION_TOL = 1e-4

DEFAULT_ZONES = {
    "C1": ZoneSpec(KEEP_OUT, 0.005, 0.5),
    "C2": ZoneSpec(KEEP_IN, 0.014, 0.5),
    "C3": ZoneSpec(KEEP_IN, 0.014, 0.5),
    "C4": ZoneSpec(KEEP_OUT, 0.0, 0.5),
}


def reference_config_path() -> Path:
    return Path(__file__).parent / "data" / "reference.yaml"


# --- trajectory --------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Piecewise screw-linear interpolation through consecutive poses."""

    poses: tuple
    durations: tuple

    def __post_init__(self):
        if len(self.poses) != len(self.durations) + 1:
            raise ValueError("need exactly one more pose than segment durations")
        if any(not d > 0 for d in self.durations):
            raise ValueError("segment durations must be positive")
        if any(not is_unit(x, 1e-9) for x in self.poses):
            raise ValueError("trajectory poses must be unit dual quaternions")
        # consecutive poses on the same sheet of the double cover
        aligned = [self.poses[0]]
        for x in self.poses[1:]:
            prev = aligned[-1]
            aligned.append(-x if float(x.q[:4] @ prev.q[:4]) < 0 else x)
        object.__setattr__(self, "poses", tuple(aligned))
        object.__setattr__(self, "durations", tuple(float(d) for d in self.durations))

    @property
    def total(self) -> float:
        return float(sum(self.durations))

    def __call__(self, t: float) -> DQ:
        return generate_trajectory(self.poses, self.durations, t)


def generate_trajectory(poses, durations, t: float) -> DQ:
    """Desired pose at time ``t`` along the piecewise sclerp through ``poses``."""
    total = float(sum(durations))
    if not 0.0 <= t <= total:
        raise ValueError(f"t = {t} outside [0, {total}]")
    start = 0.0
    for k, dur in enumerate(durations):
        if t <= start + dur or k == len(durations) - 1:
            tau = min(max((t - start) / dur, 0.0), 1.0)
            x1, x2 = poses[k], poses[k + 1]
            if tau == 0.0:
                return x1
            if tau == 1.0:
                return x2 if float(x1.q[:4] @ x2.q[:4]) >= 0 else -x2
            return sclerp(x1, x2, tau)
        start += dur
    return poses[-1]


# --- configuration -----------------------------------------------------------

@dataclass
class ScenarioConfig:
    moving: KinematicChain
    static: KinematicChain
    q0: np.ndarray
    static_q: np.ndarray
    trajectory: Trajectory
    entry_point: DQ
    centre_line: DQ
    plane: DQ
    shaft_frame: int = 5
    static_shaft_frame: int = 5
    lower_point: str = "t6"
    zones: dict = field(default_factory=lambda: dict(DEFAULT_ZONES))
    gains: Gains = field(default_factory=Gains)
    dt: float = 0.004
    duration: float = 20.0
    cylinder_radius: float = 0.028
    cylinder_depth: float = 0.08
    tool_diameter: float = 0.0035
    scenarios: dict = field(default_factory=lambda: {k: tuple(v) for k, v in SCENARIOS.items()})
    expected: dict = field(default_factory=lambda: {k: tuple(v) for k, v in EXPECTED_VIOLATIONS.items()})

    def __post_init__(self):
        self.q0 = np.asarray(self.q0, dtype=float)
        self.static_q = np.asarray(self.static_q, dtype=float)
        if self.q0.shape != (self.moving.n,):
            raise ValueError("moving arm q0 has the wrong length")
        if self.static_q.shape != (self.static.n,):
            raise ValueError("static arm q has the wrong length")
        for name, val in (("dt", self.dt), ("duration", self.duration),
                          ("cylinder radius", self.cylinder_radius),
                          ("cylinder depth", self.cylinder_depth)):
            if not val > 0:
                raise ValueError(f"{name} must be positive")
        if set(self.zones) != set(CONSTRAINTS):
            raise ValueError(f"zones must define exactly {CONSTRAINTS}")
        for s, enabled in self.scenarios.items():
            unknown = set(enabled) - set(CONSTRAINTS)
            if unknown:
                raise ValueError(f"scenario {s} enables unknown constraints {sorted(unknown)}")

    def static_line(self) -> DQ:
        x = self.static.fkm(self.static_q, self.static_shaft_frame)
        lz, _ = line_jacobian(x, self.static.pose_jacobian(self.static_q, self.static_shaft_frame))
        return lz

    def with_dt(self, dt: float) -> "ScenarioConfig":
        return replace(self, dt=float(dt))


def _pose_entry(entry, x0: DQ) -> DQ:
    if entry == "initial":
        return x0
    if "dq" in entry:
        return DQ(entry["dq"])
    rot = entry.get("rotation", {})
    r = from_rotation(rot.get("axis", [0, 0, 1]), float(rot.get("angle", 0.0)))
    t = np.asarray(entry.get("translation", [0, 0, 0]), dtype=float)
    if entry.get("relative", False):
        return pose(r * P(x0), translation(x0).q[1:4] + t)
    return pose(r, t)


def load_config(path) -> ScenarioConfig:
    """Read a scenario description (YAML); arm files are resolved relative to it."""
    path = Path(path)
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at the top level")
    root = path.parent

    def _arm(spec):
        if isinstance(spec, dict):
            return KinematicChain.from_dict(spec)
        return load_chain(root / spec)

    try:
        moving = _arm(data["arms"]["moving"])
        static = _arm(data["arms"]["static"])
        q0 = np.asarray(data["moving_q0"], dtype=float)
        static_q = np.asarray(data["static_q"], dtype=float)
        shaft_frame = int(data.get("shaft_frame", 5))
        x0 = moving.fkm(q0)
        traj = data["trajectory"]
        poses = tuple(_pose_entry(e, x0) for e in traj["poses"])
        trajectory = Trajectory(poses, tuple(traj["durations"]))

        ws = data["workspace"]
        cyl = ws["cylinder"]
        axis_point = np.asarray(cyl.get("axis_point", [0, 0, 0]), dtype=float)
        axis_dir = np.asarray(cyl.get("axis_direction", [0, 0, 1]), dtype=float)
        axis_dir = axis_dir / np.linalg.norm(axis_dir)
        centre = line_from(point(axis_point), point(axis_dir))
        entry = point(ws.get("entry_point", axis_point))
        depth = float(cyl["depth"])
        plane_spec = ws.get("lower_plane")
        if plane_spec is None:
            plane = plane_from(point(axis_point - depth * axis_dir), point(axis_dir))
        else:
            n = np.asarray(plane_spec["normal"], dtype=float)
            plane = plane_from(point(plane_spec["point"]), point(n / np.linalg.norm(n)))

        zones = dict(DEFAULT_ZONES)
        for name, z in (data.get("constraints") or {}).items():
            if name not in CONSTRAINTS:
                raise ValueError(f"unknown constraint {name!r}")
            base = zones[name]
            zones[name] = ZoneSpec(z.get("direction", base.direction),
                                   float(z.get("d_safe", base.d_safe)),
                                   float(z.get("eta_d", base.eta_d)))
        ctl = data.get("control", {})
        gains = Gains(float(ctl.get("eta", 50.0)), float(ctl.get("beta", 40.0)),
                      float(ctl.get("eta_joint", 2.0)))
        if data.get("scenarios"):
            # a scenarios block replaces the built-in set
            scen, expected = {}, {}
            for name, s in data["scenarios"].items():
                scen[name] = tuple(s.get("enabled", ()))
                if "expected_violations" in s:
                    expected[name] = tuple(s["expected_violations"])
        else:
            scen = {k: tuple(v) for k, v in SCENARIOS.items()}
            expected = {k: tuple(v) for k, v in EXPECTED_VIOLATIONS.items()}
        return ScenarioConfig(
            moving=moving, static=static, q0=q0, static_q=static_q, trajectory=trajectory,
            entry_point=entry, centre_line=centre, plane=plane, shaft_frame=shaft_frame,
            static_shaft_frame=int(data.get("static_shaft_frame", shaft_frame)),
            lower_point=str(data.get("lower_point", "t6")), zones=zones, gains=gains,
            dt=float(ctl.get("dt", 0.004)), duration=float(ctl.get("duration", 20.0)),
            cylinder_radius=float(cyl["radius"]), cylinder_depth=depth,
            tool_diameter=float(ws.get("tool_diameter", 0.0035)),
            scenarios=scen, expected=expected,
        )
    except KeyError as exc:
        raise ValueError(f"{path}: missing required field {exc}") from None


# --- simulation --------------------------------------------------------------

@dataclass
class LogRecord:
    t: float
    q: np.ndarray
    err_l1: float
    qdot_l2: float
    d: tuple
    d_tilde: tuple
    status: str
    objective: float


def log_columns(n: int) -> list[str]:
    return (["t"] + [f"q{i + 1}" for i in range(n)] + ["err_l1", "qdot_l2"]
            + [f"d_{c}" for c in CONSTRAINTS] + [f"dtilde_{c}" for c in CONSTRAINTS]
            + ["status", "objective"])


@dataclass
class ScenarioResult:
    name: str
    enabled: tuple
    records: list
    summary: dict


def _geometry(cfg: ScenarioConfig, q: np.ndarray):
    ch = cfg.moving
    low = ch.attachment_points[cfg.lower_point]
    (x, J_x), (x_shaft, J_shaft), (x_low, J_low) = ch.frames(q, (None, cfg.shaft_frame, low.joint_index))
    lz, J_lz = line_jacobian(x_shaft, J_shaft)
    offset = from_translation(low.local_offset)
    x_low, J_low = x_low * offset, haminus8(offset) @ J_low
    t_low, J_t_low = translation(x_low), translation_jacobian(J_low, x_low)
    tip, J_tip = translation(x), translation_jacobian(J_x, x)
    return x, J_x, lz, J_lz, t_low, J_t_low, tip, J_tip


def _distances(cfg, lz, t_low, tip, l_static):
    return (
        line_line_distance(lz, l_static),
        point_line_distance(cfg.entry_point, lz),
        point_line_distance(t_low, cfg.centre_line),
        point_plane_distance(tip, cfg.plane),
    )


def run_scenario(cfg: ScenarioConfig, name: str, strict_singular: bool = False,
                 enabled: tuple | None = None) -> ScenarioResult:
    """Integrate the closed loop with explicit Euler over ``cfg.duration``."""
    if enabled is None:
        enabled = cfg.scenarios[name]
    for c in enabled:
        check_discretization(cfg.zones[c].eta_d, cfg.dt)
    l_static = cfg.static_line()
    q = cfg.q0.copy()
    steps = int(round(cfg.duration / cfg.dt))
    records = []
    n_singular = n_failsafe = 0
    x_ref = cfg.moving.fkm(q)
    for k in range(steps + 1):
        t = k * cfg.dt
        x_d = align_sign(cfg.trajectory(min(t, cfg.trajectory.total)), x_ref)
        x_ref = x_d
        x, J_x, lz, J_lz, t_low, J_low, tip, J_tip = _geometry(cfg, q)
        dists = _distances(cfg, lz, t_low, tip, l_static)
        margins = tuple(distance_error(d, cfg.zones[c]) for d, c in zip(dists, CONSTRAINTS))
        rows = []
        for c in enabled:
            try:
                if c == "C1":
                    pair = dj.line_line(J_lz, lz, l_static)
                elif c == "C2":
                    pair = dj.line_point(J_lz, lz, cfg.entry_point)
                elif c == "C3":
                    pair = dj.point_line(J_low, t_low, cfg.centre_line)
                else:
                    pair = dj.point_plane(J_tip, tip, cfg.plane)
            except dj.SingularDistanceError as exc:
                if strict_singular:
                    raise
                log.warning("%s t=%.3f: %s singular (%s), row omitted", name, t, c, exc)
                n_singular += 1
                continue
            rows.append(zone_row(pair, cfg.zones[c], c))
        x_err = task_error(x, x_d)
        out = solve_program(J_x, x_err, cfg.gains, joint_limit_rows(q, cfg.moving, cfg.gains.eta_joint), rows)
        if out.status != OPTIMAL:
            n_failsafe += 1
        records.append(LogRecord(t, q.copy(), float(np.abs(x_err).sum()), float(np.linalg.norm(out.qdot)),
                                 dists, margins, out.status, out.objective))
        q = q + out.qdot * cfg.dt
    summary = _summary(cfg, name, enabled, records, n_singular, n_failsafe)
    return ScenarioResult(name, tuple(enabled), records, summary)


def _summary(cfg, name, enabled, records, n_singular, n_failsafe) -> dict:
    margins = np.array([r.d_tilde for r in records]) if records else np.zeros((0, 4))
    dists = np.array([r.d for r in records]) if records else np.zeros((0, 4))
    violated = tuple(c for i, c in enumerate(CONSTRAINTS)
                     if margins.size and margins[:, i].min() < -VIOLATION_TOL)
    # high-frequency content of ||qdot||: mean squared second difference
    qd = np.array([r.qdot_l2 for r in records])
    vibration = float(np.mean(np.diff(qd, 2) ** 2)) if qd.size > 2 else 0.0
    expected = cfg.expected.get(name)
    return {
        "scenario": name,
        "enabled": tuple(enabled),
        "min_distance": {c: float(dists[:, i].min()) for i, c in enumerate(CONSTRAINTS)} if dists.size else {},
        "min_margin": {c: float(margins[:, i].min()) for i, c in enumerate(CONSTRAINTS)} if margins.size else {},
        "violation_ticks": {c: int((margins[:, i] < -VIOLATION_TOL).sum()) for i, c in enumerate(CONSTRAINTS)},
        "violated": violated,
        "expected": tuple(expected) if expected is not None else None,
        "matches": None if expected is None else set(violated) == set(expected),
        "max_err_l1": float(max((r.err_l1 for r in records), default=0.0)),
        "final_err_l1": float(records[-1].err_l1) if records else 0.0,
        "singular_events": n_singular,
        "failsafe_events": n_failsafe,
        "vibration": vibration,
    }


# --- output ------------------------------------------------------------------

def write_log(records, path, n: int | None = None) -> None:
    """CSV with a header row, 9 significant digits."""
    if n is None:
        n = records[0].q.size if records else 8
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(log_columns(n))
        for r in records:
            w.writerow([f"{r.t:.9g}", *(f"{v:.9g}" for v in r.q), f"{r.err_l1:.9g}", f"{r.qdot_l2:.9g}",
                        *(f"{v:.9g}" for v in r.d), *(f"{v:.9g}" for v in r.d_tilde),
                        r.status, f"{r.objective:.9g}"])


def read_log(path) -> list[LogRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    n = sum(1 for h in header if h.startswith("q") and h[1:].isdigit())
    out = []
    for row in body:
        vals = row
        q = np.array([float(v) for v in vals[1:1 + n]])
        i = 1 + n
        out.append(LogRecord(float(vals[0]), q, float(vals[i]), float(vals[i + 1]),
                             tuple(float(v) for v in vals[i + 2:i + 6]),
                             tuple(float(v) for v in vals[i + 6:i + 10]),
                             vals[i + 10], float(vals[i + 11])))
    return out


def summarize(results) -> str:
    """Plain-text table of per-constraint minima and the violation pattern."""
    buf = io.StringIO()
    head = f"{'scenario':<9}{'enabled':<14}" + "".join(f"{'min d~ ' + c + ' [mm]':>17}" for c in CONSTRAINTS)
    head += f"{'max |x~|_1':>12}  {'violated':<16}{'expected':<16}match"
    buf.write(head + "\n")
    buf.write("-" * len(head) + "\n")
    for res in results:
        s = res.summary
        mm = "".join(f"{1e3 * s['min_margin'].get(c, math.nan):>17.3f}" for c in CONSTRAINTS)
        exp = "-" if s["expected"] is None else (",".join(s["expected"]) or "none")
        match = "-" if s["matches"] is None else ("yes" if s["matches"] else "NO")
        buf.write(f"{s['scenario']:<9}{','.join(s['enabled']) or 'none':<14}{mm}{s['max_err_l1']:>12.4g}  "
                  f"{','.join(s['violated']) or 'none':<16}{exp:<16}{match}\n")
    buf.write("\n")
    for res in results:
        s = res.summary
        buf.write(f"{s['scenario']}: singular rows omitted {s['singular_events']}, "
                  f"fail-safe stops {s['failsafe_events']}, vibration {s['vibration']:.3g}\n")
    return buf.getvalue()
