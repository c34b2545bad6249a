import math

import numpy as np
import pytest

import oracles
from vfikit import distance_jacobians as dj
from vfikit.dq import DQ, P, i_, j_, k_, translation
from vfikit.geom import (
    line_cross, line_from, line_inner, line_line_distance, plane_from, point, point_line_distance,
    point_plane_distance, transform_line,
)
from vfikit.kinematics import PRISMATIC, REVOLUTE, Joint, KinematicChain, line_jacobian, translation_jacobian


def unit(v):
    return np.asarray(v, float) / np.linalg.norm(v)


def fd_rate(f, q, qd, h=1e-6):
    return (f(q + h * qd) - f(q - h * qd)) / (2 * h)


def check_rate(pair_rate, fd, tol):
    assert abs(pair_rate - fd) <= tol * max(1.0, abs(fd)), (pair_rate, fd)


def samples(seed, count):
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        ch = KinematicChain.from_dict(oracles.random_chain_spec(rng, int(rng.integers(2, 8))))
        q = rng.uniform(-1.5, 1.5, ch.n)
        yield rng, ch, q
        made += 1


def tip(ch, q):
    x = ch.fkm(q)
    return translation(x), translation_jacobian(ch.pose_jacobian(q), x)


def zline(ch, q):
    return line_jacobian(ch.fkm(q), ch.pose_jacobian(q))


def test_point_plane_examples():
    pi = plane_from(point([0, 0, 0]), k_)
    pair = dj.point_plane(np.eye(4), point([1, 2, 3]), pi)
    assert np.allclose(pair.J, [0, 0, 0, 1]) and pair.d == 3.0
    assert dj.point_plane(np.ones((4, 3)), point([1, 2, 0]), pi).d == 0.0


def test_point_plane_finite_differences():
    for rng, ch, q in samples(0, 150):
        pi = plane_from(point(rng.normal(size=3)), point(unit(rng.normal(size=3))))
        t, J_t = tip(ch, q)
        pair = dj.point_plane(J_t, t, pi)
        assert pair.J.shape == (ch.n,)
        qd = rng.normal(size=ch.n)
        check_rate(pair.rate(qd), fd_rate(lambda q: point_plane_distance(tip(ch, q)[0], pi), q, qd), 1e-5)


def test_line_point_examples():
    z = line_from(point([0, 0, 0]), k_)
    with pytest.raises(dj.SingularDistanceError) as err:
        dj.line_point(np.zeros((8, 1)), z, point([0, 0, 0.3]))
    assert err.value.branch == "line-point"
    assert abs(dj.line_point(np.zeros((8, 1)), z, point([2, 0, 0])).d - 2.0) < 1e-15


def test_line_point_finite_differences():
    for rng, ch, q in samples(1, 150):
        p = point(rng.normal(size=3))
        lz, J_lz = zline(ch, q)
        pair = dj.line_point(J_lz, lz, p)
        qd = rng.normal(size=ch.n)
        check_rate(pair.rate(qd), fd_rate(lambda q: point_line_distance(p, zline(ch, q)[0]), q, qd), 1e-5)


def test_point_line_examples():
    z = line_from(point([0, 0, 0]), k_)
    pair = dj.point_line(np.eye(4), i_, z)
    assert abs(pair.d - 1.0) < 1e-15
    assert pair.rate([0, 1, 0, 0]) > 0            # moving outward along x
    assert pair.rate([0, -1, 0, 0]) < 0
    assert pair.rate([0, 0, 0, 1]) == 0.0          # axial motion
    assert abs(pair.rate([0, 0, 1, 0])) < 1e-15    # tangential motion
    with pytest.raises(dj.SingularDistanceError):
        dj.point_line(np.eye(4), point([0, 0, 2]), z)


def test_point_line_finite_differences():
    for rng, ch, q in samples(2, 150):
        l = line_from(point(rng.normal(size=3)), point(unit(rng.normal(size=3))))
        t, J_t = tip(ch, q)
        pair = dj.point_line(J_t, t, l)
        qd = rng.normal(size=ch.n)
        check_rate(pair.rate(qd), fd_rate(lambda q: point_line_distance(tip(ch, q)[0], l), q, qd), 1e-5)


def test_inner_and_cross_product_jacobians():
    l = line_from(point([0, 1, 0]), i_)
    assert not dj.inner_product_jacobian(np.zeros((8, 3)), l).any()
    assert not dj.cross_product_jacobian(np.zeros((8, 3)), l).any()
    for rng, ch, q in samples(3, 120):
        l = line_from(point(rng.normal(size=3)), point(unit(rng.normal(size=3))))
        lz, J_lz = zline(ch, q)
        Ji = dj.inner_product_jacobian(J_lz, l)
        Jc = dj.cross_product_jacobian(J_lz, l)
        Ni = oracles.fd_jacobian(lambda q: line_inner(zline(ch, q)[0], l).q, q)
        Nc = oracles.fd_jacobian(lambda q: line_cross(zline(ch, q)[0], l).q, q)
        assert np.abs(Ji - Ni).max() <= 1e-5 * max(1.0, np.abs(Ni).max())
        assert np.abs(Jc - Nc).max() <= 1e-5 * max(1.0, np.abs(Nc).max())


def test_inner_product_rate_for_perpendicular_rotation():
    # z axis spinning about x: at q = 0 the line is k, perpendicular to the static j line
    # base turns the joint axis onto x, the effector turns the line back onto z
    ch = KinematicChain([Joint(REVOLUTE, 0, 0, 0, 0, -3, 3)],
                        base=DQ([math.cos(math.pi / 4), 0, math.sin(math.pi / 4), 0]),
                        effector=DQ([math.cos(math.pi / 4), 0, -math.sin(math.pi / 4), 0]))
    lz, J_lz = zline(ch, np.zeros(1))
    assert lz.isclose(k_, atol=1e-12)
    l = line_from(point([0, 0, 0]), j_)
    rate = (dj.inner_product_jacobian(J_lz, l) @ [1.0])[0]
    assert abs(abs(rate) - 1.0) < 1e-12


def test_cross_product_identical_lines_axial_motion():
    ch = KinematicChain([Joint(PRISMATIC, 0, 0, 0, 0, -1, 1)])
    lz, J_lz = zline(ch, np.array([0.2]))
    c = dj.cross_product_jacobian(J_lz, lz) @ [1.0]
    assert line_cross(lz, lz).isclose(DQ(0.0)) and np.abs(c).max() < 1e-15


def test_line_line_examples():
    z = line_from(point([0, 0, 0]), k_)
    pair = dj.line_line(np.zeros((8, 1)), z, line_from(i_, k_))
    assert abs(pair.d - 1.0) < 1e-15 and pair.tag == "line-line-parallel"
    pair = dj.line_line(np.zeros((8, 1)), line_from(point([0, 0, 0]), i_), line_from(point([0, 0, 3]), j_))
    assert abs(pair.d - 3.0) < 1e-15 and pair.tag == "line-line"
    with pytest.raises(dj.SingularDistanceError) as err:
        dj.line_line(np.zeros((8, 1)), z, z)
    assert err.value.branch == "parallel"
    with pytest.raises(dj.SingularDistanceError) as err:
        dj.line_line(np.zeros((8, 1)), z, line_from(point([0, 0, 0]), i_))
    assert err.value.branch == "non-parallel"


def test_line_line_finite_differences_non_parallel():
    done = 0
    for rng, ch, q in samples(4, 400):
        l = line_from(point(rng.normal(size=3)), point(unit(rng.normal(size=3))))
        lz, J_lz = zline(ch, q)
        sin_phi = np.linalg.norm(line_cross(lz, l).q[:4])
        d = line_line_distance(lz, l)
        if sin_phi < 1e-3 or d < 1e-3:
            continue
        pair = dj.line_line(J_lz, lz, l)
        assert pair.tag == "line-line"
        qd = rng.normal(size=ch.n)
        check_rate(pair.rate(qd), fd_rate(lambda q: line_line_distance(zline(ch, q)[0], l), q, qd), 1e-4)
        done += 1
        if done == 120:
            break
    assert done == 120


def test_line_line_finite_differences_parallel():
    # the static line is a copy of the moving one shifted sideways; motions that keep
    # the direction fixed (translations) keep the pair on the parallel branch
    rng = np.random.default_rng(5)
    for _ in range(120):
        base = DQ(oracles.random_pose_vec(rng))
        ch = KinematicChain([Joint(PRISMATIC, float(rng.uniform(-3, 3)), 0, 0, float(rng.uniform(-3, 3)), -1, 1)
                             for _ in range(3)], base=base)
        q = rng.uniform(-0.5, 0.5, 3)
        lz, J_lz = zline(ch, q)
        shift = np.cross(lz.q[1:4], rng.normal(size=3))
        x = DQ([1, 0, 0, 0, 0, *(0.5 * shift)])
        l = transform_line(x, lz) * float(rng.choice([-1.0, 1.0]))
        pair = dj.line_line(J_lz, lz, l)
        assert pair.tag == "line-line-parallel"
        assert abs(pair.d - np.linalg.norm(shift)) < 1e-12
        qd = rng.normal(size=3)
        check_rate(pair.rate(qd), fd_rate(lambda q: line_line_distance(zline(ch, q)[0], l), q, qd), 1e-5)


def test_rigid_motion_equivariance():
    rng = np.random.default_rng(6)
    for _ in range(50):
        spec = oracles.random_chain_spec(rng, 5)
        ch = KinematicChain.from_dict(spec)
        g = DQ(oracles.random_pose_vec(rng))
        moved = KinematicChain(ch.joints, g * ch.base, ch.effector)
        q, qd = rng.uniform(-1, 1, 5), rng.normal(size=5)
        l = line_from(point(rng.normal(size=3)), point(unit(rng.normal(size=3))))
        lg = transform_line(g, l)
        a = dj.line_line(zline(ch, q)[1], zline(ch, q)[0], l)
        b = dj.line_line(zline(moved, q)[1], zline(moved, q)[0], lg)
        assert abs(a.d - b.d) < 1e-8 and abs(a.rate(qd) - b.rate(qd)) < 1e-8
        p = point(rng.normal(size=3))
        pg = P(g) * p * P(g).conj() + translation(g)
        a = dj.line_point(zline(ch, q)[1], zline(ch, q)[0], p)
        b = dj.line_point(zline(moved, q)[1], zline(moved, q)[0], pg)
        assert abs(a.d - b.d) < 1e-8 and abs(a.rate(qd) - b.rate(qd)) < 1e-8


def test_line_line_sweep_through_parallel_is_continuous():
    # a revolute joint tilts the moving line through the parallel configuration;
    # the static line is offset along the rotation axis so the distance stays
    # at the offset for every angle
    ch = KinematicChain([Joint(REVOLUTE, 0, 0, 0, 0, -3, 3)],
                        effector=DQ([math.cos(math.pi / 4), math.sin(math.pi / 4), 0, 0]))
    lz0, _ = zline(ch, np.zeros(1))
    static = line_from(point([0, 0, 0.05]), point(lz0.q[1:4]))
    qs = np.linspace(-1e-3, 1e-3, 2001)
    ds = np.array([line_line_distance(zline(ch, np.array([q]))[0], static) for q in qs])
    assert np.abs(np.diff(ds)).max() <= 10 * 0.05 * (qs[1] - qs[0]) + 1e-12
    assert np.abs(ds - 0.05).max() < 1e-9
