import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dqmul, qmul, random_pose_vec, random_unit_quat, rot_matrix
from vfikit.dq import (
    C4, DQ, AntipodalAmbiguityError, D, DegeneratePrimaryError, E_, Im, NotPureError, P, Re,
    conj, cross, crossmatrix, exp, from_rotation, from_translation, haminus4, haminus8,
    hamiplus4, hamiplus8, i_, inner, is_unit, j_, k_, log, norm, norm_derivative_row, pose,
    sclerp, to_matrix, translation, vec4, vec8,
)

finite = st.floats(-10, 10, allow_nan=False)
dq_coeffs = st.lists(finite, min_size=8, max_size=8)


def test_multiplication_table():
    one = DQ(1.0)
    for a, b, c in [(i_, j_, k_), (j_, k_, i_), (k_, i_, j_)]:
        assert (a * b).isclose(c)
        assert (b * a).isclose(-c)
    for u in (i_, j_, k_):
        assert (u * u).isclose(-one)
    assert (i_ * j_ * k_).isclose(-one)


def test_eps_is_nilpotent():
    assert (E_ * E_).isclose(DQ(0.0))
    rng = np.random.default_rng(1)
    for _ in range(100):
        a, b = rng.normal(size=8), rng.normal(size=8)
        ab = DQ(a) * DQ(b)
        assert np.allclose(D(ab).q[:4], qmul(a[:4], b[4:]) + qmul(a[4:], b[:4]), atol=1e-12)


def test_identity_element():
    rng = np.random.default_rng(2)
    h = DQ(rng.normal(size=8))
    assert (DQ(1.0) * h).isclose(h)
    assert (h * DQ(1.0)).isclose(h)


def test_product_matches_table_oracle():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        a, b = rng.normal(size=8), rng.normal(size=8)
        assert np.abs((DQ(a) * DQ(b)).q - dqmul(a, b)).max() < 1e-12


def test_hamilton_factorizations():
    rng = np.random.default_rng(4)
    assert np.array_equal(hamiplus4(DQ(1.0)), np.eye(4))
    assert np.array_equal(haminus4(DQ(1.0)), np.eye(4))
    for _ in range(1000):
        a, b = DQ(rng.normal(size=8)), DQ(rng.normal(size=8))
        ab = dqmul(a.q, b.q)
        assert np.abs(hamiplus8(a) @ b.q - ab).max() < 1e-12
        assert np.abs(haminus8(b) @ a.q - ab).max() < 1e-12
        assert np.abs(hamiplus4(a) @ b.q[:4] - ab[:4]).max() < 1e-12
        assert np.abs(haminus4(b) @ a.q[:4] - ab[:4]).max() < 1e-12


def test_conjugate():
    assert conj(DQ([1, 0, 0, 0, 0, 0, 0, 1])).isclose(DQ([1, 0, 0, 0, 0, 0, 0, -1]))
    pure = DQ([0, 1, 2, 3, 0, 4, 5, 6])
    assert conj(pure).isclose(-pure)
    rng = np.random.default_rng(5)
    for _ in range(200):
        h = DQ(rng.normal(size=8))
        assert np.array_equal(conj(conj(h)).q, h.q)
        hh = (h * conj(h)).q
        assert np.abs(hh[[1, 2, 3, 5, 6, 7]]).max() < 1e-12


def test_norm():
    assert norm(from_rotation([1, 2, 3], 0.7)).isclose(DQ(1.0))
    assert norm(DQ([0, 2, 0, 0])).isclose(DQ(2.0))
    rng = np.random.default_rng(6)
    for _ in range(200):
        assert norm(DQ(random_pose_vec(rng))).isclose(DQ(1.0))
    with pytest.raises(DegeneratePrimaryError):
        norm(DQ([0, 0, 0, 0, 1, 0, 0, 0]))


def test_norm_squared_is_h_conj_h():
    rng = np.random.default_rng(7)
    for _ in range(100):
        h = DQ(rng.normal(size=8))
        n = norm(h)
        assert (n * n).isclose(h * conj(h), atol=1e-10)


def test_parts():
    h = DQ([1, 1, 0, 0, 0, 0, 1, 0])
    assert P(h).isclose(DQ([1, 1, 0, 0]))
    assert D(h).isclose(DQ([0, 0, 1, 0]))
    assert Re(h).isclose(DQ(1.0))
    assert Im(h).isclose(DQ([0, 1, 0, 0, 0, 0, 1, 0]))
    assert Re(DQ([0, 1, 2, 3, 0, 4, 5, 6])).isclose(DQ(0.0))
    rng = np.random.default_rng(8)
    for _ in range(100):
        h = DQ(rng.normal(size=8))
        assert np.array_equal((P(h) + E_ * D(h)).q, h.q)
        assert np.array_equal((Re(h) + Im(h)).q, h.q)


def test_vec_round_trip():
    v = np.arange(8.0)
    assert np.array_equal(vec8(DQ(v)), v)
    assert np.array_equal(vec4(DQ(v[:4])), v[:4])


def test_immutable():
    h = DQ([1, 2, 3, 4])
    with pytest.raises(AttributeError):
        h.foo = 1
    with pytest.raises(ValueError):
        h.q[0] = 5.0
    with pytest.raises(ValueError):
        DQ([1, 2, 3])


def test_crossmatrix():
    assert np.allclose(crossmatrix(i_) @ j_.q[:4], k_.q[:4])
    rng = np.random.default_rng(9)
    for _ in range(200):
        a = DQ([0, *rng.normal(size=3)])
        b = DQ([0, *rng.normal(size=3)])
        assert np.abs(crossmatrix(a) @ a.q[:4]).max() < 1e-12
        assert np.allclose(crossmatrix(a) @ b.q[:4], -crossmatrix(b) @ a.q[:4], atol=1e-12)
        assert np.allclose(crossmatrix(a) @ b.q[:4], crossmatrix(b).T @ a.q[:4], atol=1e-12)
        assert np.allclose(crossmatrix(a) @ b.q[:4], [0, *np.cross(a.q[1:4], b.q[1:4])], atol=1e-12)
        S = crossmatrix(a)
        assert not S[0].any() and not S[:, 0].any()
        assert np.array_equal(S[1:, 1:], -S[1:, 1:].T)
    with pytest.raises(NotPureError):
        crossmatrix(DQ([1, 0, 0, 0]))


def test_inner_and_cross():
    assert inner(i_, j_).isclose(DQ(0.0))
    assert cross(i_, j_).isclose(k_)
    rng = np.random.default_rng(10)
    for _ in range(200):
        a = DQ([0, *rng.normal(size=3), 0, *rng.normal(size=3)])
        b = DQ([0, *rng.normal(size=3), 0, *rng.normal(size=3)])
        assert abs(inner(a, b).q[0] - a.q[1:4] @ b.q[1:4]) < 1e-12
        assert (a * b).isclose(-inner(a, b) + cross(a, b), atol=1e-12)
    with pytest.raises(NotPureError):
        inner(DQ(1.0), i_)
    with pytest.raises(NotPureError):
        cross(i_, DQ([0, 0, 0, 0, 1, 0, 0, 0]))


def test_norm_derivative_row():
    assert np.allclose(norm_derivative_row(DQ([0, 0, 0, 2]), np.eye(4)), [0, 0, 0, 1])
    assert np.array_equal(norm_derivative_row(DQ([0, 1, 1, 0]), np.zeros((4, 3))), np.zeros(3))
    with pytest.raises(ZeroDivisionError):
        norm_derivative_row(DQ(0.0), np.eye(4))
    rng = np.random.default_rng(11)
    for _ in range(100):
        A = rng.normal(size=(4, 5))
        a0 = np.concatenate([[0.0], rng.normal(size=3)])
        A[0] = 0.0
        q = rng.normal(size=5)
        f = lambda q: np.linalg.norm(a0 + A @ q + 0.1 * np.sin(A @ q))
        a = DQ(a0 + A @ q + 0.1 * np.sin(A @ q))
        J = A + 0.1 * np.cos(A @ q)[:, None] * A
        qd = rng.normal(size=5)
        h = 1e-6
        fd = (f(q + h * qd) - f(q - h * qd)) / (2 * h)
        assert abs(norm_derivative_row(a, J) @ qd - fd) <= 1e-6 * max(1.0, abs(fd))


def test_double_cover_same_transform():
    rng = np.random.default_rng(12)
    for _ in range(100):
        x = DQ(random_pose_vec(rng))
        assert np.allclose(to_matrix(x), to_matrix(-x), atol=1e-12)
        p = DQ([0, *rng.normal(size=3)])
        for s in (x, -x):
            moved = translation(s) + P(s) * p * conj(P(s))
            expect = rot_matrix(x.q[:4]) @ p.q[1:4] + to_matrix(x)[:3, 3]
            assert np.allclose(moved.q[1:4], expect, atol=1e-12)


def test_associativity_and_distributivity():
    rng = np.random.default_rng(13)
    for _ in range(200):
        a, b, c = (DQ(rng.normal(size=8)) for _ in range(3))
        assert ((a * b) * c).isclose(a * (b * c), atol=1e-12)
        assert (a * (b + c)).isclose(a * b + a * c, atol=1e-12)


def test_unit_closure():
    rng = np.random.default_rng(14)
    for _ in range(200):
        x, y = DQ(random_pose_vec(rng)), DQ(random_pose_vec(rng))
        assert is_unit(x * y, 1e-12)


@settings(max_examples=200, deadline=None)
@given(dq_coeffs, dq_coeffs)
def test_hamilton_property(a, b):
    a, b = DQ(a), DQ(b)
    ab = (a * b).q
    scale = 1.0 + np.abs(a.q).max() * np.abs(b.q).max()
    assert np.abs(hamiplus8(a) @ b.q - ab).max() <= 1e-12 * scale
    assert np.abs(haminus8(b) @ a.q - ab).max() <= 1e-12 * scale


def test_log_exp_round_trip():
    rng = np.random.default_rng(15)
    for _ in range(200):
        x = DQ(random_pose_vec(rng))
        if x.q[0] < 0:
            x = -x
        assert exp(log(x)).isclose(x, atol=1e-10)
    t = from_translation([0.3, -0.2, 0.1])
    assert exp(log(t)).isclose(t, atol=1e-14)


def test_sclerp_endpoints_and_midpoint():
    rng = np.random.default_rng(16)
    for _ in range(50):
        x1, x2 = DQ(random_pose_vec(rng)), DQ(random_pose_vec(rng))
        assert sclerp(x1, x2, 0.0).isclose(x1, atol=1e-12)
        end = sclerp(x1, x2, 1.0)
        assert end.isclose(x2, atol=1e-10) or end.isclose(-x2, atol=1e-10)
        assert is_unit(sclerp(x1, x2, float(rng.random())), 1e-10)
    x2 = DQ([1, 0, 0, 0, 0, 2, 0, 0])         # 1 + eps (1/2)(4 i)
    mid = sclerp(DQ(1.0), x2, 0.5)
    assert np.allclose(translation(mid).q[1:4], [2, 0, 0], atol=1e-12)


def test_sclerp_constant_screw_axis():
    rng = np.random.default_rng(17)
    for _ in range(50):
        x1, x2 = DQ(random_pose_vec(rng)), DQ(random_pose_vec(rng))
        rel = conj(x1) * x2
        if rel.q[0] < 0:
            rel = -rel
        g = log(rel).q
        axis = g[1:4] / np.linalg.norm(g[1:4])
        for tau in (0.25, 0.5, 0.75):
            gt = log(conj(x1) * sclerp(x1, x2, tau)).q
            assert np.allclose(gt[1:4] / np.linalg.norm(gt[1:4]), axis, atol=1e-8)
            assert np.allclose(gt, tau * g, atol=1e-8)


def test_sclerp_antipodal():
    x1 = DQ(1.0)
    x2 = pose(from_rotation([0, 0, 1], math.pi), [0.1, 0, 0])
    with pytest.raises(AntipodalAmbiguityError):
        sclerp(x1, x2, 0.5)
    a = sclerp(x1, x2, 0.5, branch=1)
    b = sclerp(x1, x2, 0.5, branch=-1)
    assert is_unit(a) and is_unit(b)
    assert not np.allclose(to_matrix(a), to_matrix(b))
    with pytest.raises(ValueError):
        sclerp(x1, x2, 0.5, branch=2)


def test_c4_is_conjugation_matrix():
    rng = np.random.default_rng(18)
    r = DQ(random_unit_quat(rng))
    assert np.allclose(C4 @ r.q[:4], conj(r).q[:4])
