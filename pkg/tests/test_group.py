import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from solgeom.errors import DomainError
from solgeom.group import (
    ORIGIN,
    Isometry,
    Point,
    TangentVec,
    apply_isometry,
    frame_components,
    from_frame,
    group_inverse,
    group_mul,
    horizontal_distance,
    matrix_rep,
    metric_norm,
    potential,
    vertical_flip,
)

coord = st.floats(-3.0, 3.0)
points = st.builds(Point, coord, coord, coord)
comp = st.floats(-2.0, 2.0)


def _close(p, q, tol=1e-12):
    return all(abs(u - v) <= tol * max(1.0, abs(u), abs(v)) for u, v in zip(p, q))


def test_identity_element():
    assert group_mul(ORIGIN, Point(1.5, -2.0, 0.3)) == Point(1.5, -2.0, 0.3)


def test_product_example():
    r = group_mul(Point(1.0, 1.0, math.log(2.0)), Point(1.0, 1.0, 0.0))
    assert _close(r, (3.0, 1.5, math.log(2.0)), 1e-15)


@given(points)
def test_inverse(p):
    assert _close(group_mul(p, group_inverse(p)), (0.0, 0.0, 0.0), 1e-12)
    assert _close(group_mul(group_inverse(p), p), (0.0, 0.0, 0.0), 1e-12)


@given(points, points, points)
def test_associativity(p, q, r):
    assert _close(group_mul(group_mul(p, q), r), group_mul(p, group_mul(q, r)))


@given(points, points)
def test_matrix_rep_is_homomorphism(p, q):
    lhs = matrix_rep(p) @ matrix_rep(q)
    rhs = matrix_rep(group_mul(p, q))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_vertical_lift():
    w = 0.7
    p = Isometry.vertical_lift(w).apply_point(Point(1.0, 2.0, 3.0))
    assert _close(p, (math.exp(w), 2.0 * math.exp(-w), 3.7), 1e-15)


def test_swap_flip():
    assert Isometry.swap_flip().apply_point(Point(1.0, 2.0, 3.0)) == Point(2.0, 1.0, -3.0)


def test_sign_change_involution():
    g = Isometry.sign_change(-1, 1)
    p = Point(0.4, -1.1, 0.2)
    assert g.then(g).apply_point(p) == p


def test_sign_change_rejects_bad_entries():
    with pytest.raises(DomainError):
        Isometry.sign_change(2, 1)


isometries = st.one_of(
    st.builds(Isometry.left_translation, coord, coord, coord),
    st.builds(Isometry.sign_change, st.sampled_from([1, -1]), st.sampled_from([1, -1])),
    st.just(Isometry.swap_flip()),
)
words = st.lists(isometries, min_size=1, max_size=4).map(
    lambda gs: gs[0] if len(gs) == 1 else _compose(gs)
)


def _compose(gs):
    g = gs[0]
    for h in gs[1:]:
        g = g.then(h)
    return g


@given(words, points, comp, comp, comp)
def test_isometries_preserve_norm(g, p, dx, dy, dz):
    v = TangentVec(p, dx, dy, dz)
    assert math.isclose(metric_norm(apply_isometry(g, v)), metric_norm(v), rel_tol=1e-12, abs_tol=1e-12)


@given(words, points, points)
def test_isometries_preserve_height_gap(g, p, q):
    gp, gq = apply_isometry(g, p), apply_isometry(g, q)
    assert math.isclose(abs(gp.z - gq.z), abs(p.z - q.z), rel_tol=1e-15, abs_tol=1e-15)


@given(words, points)
def test_isometry_inverse(g, p):
    assert _close(g.then(g.inverse()).apply_point(p), p, 1e-10)


@given(words, st.lists(points, min_size=1, max_size=5))
def test_apply_array_matches_apply_point(g, pts):
    arr = np.array([tuple(p) for p in pts])
    out = g.apply_array(arr)
    for row, p in zip(out, pts):
        assert _close(row, g.apply_point(p), 1e-14)


@given(words, points, comp, comp, comp)
def test_differential_matches_finite_difference(g, p, dx, dy, dz):
    h = 1e-6
    v = TangentVec(p, dx, dy, dz)
    fwd = g.apply_point(Point(p.x + h * dx, p.y + h * dy, p.z + h * dz)).as_array()
    bwd = g.apply_point(Point(p.x - h * dx, p.y - h * dy, p.z - h * dz)).as_array()
    fd = (fwd - bwd) / (2 * h)
    dv = g.apply_vector(v)
    assert np.allclose(fd, dv.components, rtol=1e-6, atol=1e-6)


def test_vertical_flip_fixes_horizontal_vectors():
    v = TangentVec(Point(0.1, 0.2, 0.3), 0.5, -0.4, 0.0)
    assert vertical_flip(v) == v


@given(points, comp, comp, comp)
def test_vertical_flip_isometric_involution(p, dx, dy, dz):
    v = TangentVec(p, dx, dy, dz)
    f = vertical_flip(v)
    assert metric_norm(f) == pytest.approx(metric_norm(v), rel=1e-15, abs=1e-300)
    assert vertical_flip(f) == v
    assert f.dz == -v.dz


@given(points, comp, comp, comp)
def test_frame_round_trip(p, X, Y, Z):
    v = from_frame(p, X, Y, Z)
    assert np.allclose(frame_components(v), (X, Y, Z), rtol=1e-14, atol=1e-14)
    assert metric_norm(v) == pytest.approx(math.sqrt(X * X + Y * Y + Z * Z), rel=1e-14, abs=1e-15)


def test_potential_symmetric_minimum():
    assert potential(0.4, 0.4, 0.0) == pytest.approx(0.16, rel=1e-15)


def test_potential_two_forms_agree():
    a, b, z = 0.3, 0.5, 0.2
    algebraic = 0.5 * (a * a * math.exp(2 * z) + b * b * math.exp(-2 * z))
    assert abs(potential(a, b, z) - algebraic) <= 1e-14


@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_potential_minimum_at_average_height(a, b, sa, sb):
    a, b = sa * a, sb * b
    h = 0.5 * math.log(abs(b / a))
    zs = np.linspace(h - 3, h + 3, 601)
    vals = potential(a, b, zs)
    assert np.all(vals >= abs(a * b) * (1 - 1e-14))
    assert potential(a, b, h) == pytest.approx(abs(a * b), rel=1e-14)
    off = np.abs(zs - h) > 1e-3
    assert np.all(vals[off] > abs(a * b))


def test_potential_single_exponential():
    assert potential(0.5, 0.0, 1.0) == pytest.approx(0.125 * math.exp(2.0), rel=1e-15)
    assert potential(0.0, 0.0, 5.0) == 0.0


def test_horizontal_distance():
    p = Point(0.3, 0.1, 0.0)
    assert horizontal_distance(p, p) == 0.0
    q = Point(3.3, 4.1, 0.0)
    assert horizontal_distance(p, q) == pytest.approx(5.0, rel=1e-15)
    with pytest.raises(DomainError):
        horizontal_distance(p, Point(0.0, 0.0, 1.0))


@given(points, coord, coord, coord)
def test_horizontal_area_invariant_under_lift(p, dx, dy, w):
    q = Point(p.x + dx, p.y + dy, p.z)
    g = Isometry.vertical_lift(w)
    gp, gq = g.apply_point(p), g.apply_point(q)
    before = abs(q.x - p.x) * abs(q.y - p.y)
    after = abs(gq.x - gp.x) * abs(gq.y - gp.y)
    assert after == pytest.approx(before, rel=1e-10, abs=1e-12)


def test_point_rejects_nonfinite():
    with pytest.raises(DomainError):
        Point(float("nan"), 0.0, 0.0)
