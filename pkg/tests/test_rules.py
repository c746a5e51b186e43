from math import factorial

import numpy as np
import pytest

from implicitquad.errors import OrderOutOfRange
from implicitquad.rules import gauss_legendre_01, map_rule, radial_rule, tet_rule, triangle_rule


def test_midpoint_rule():
    r = gauss_legendre_01(1)
    assert r.nodes.tolist() == [0.5] and r.weights.tolist() == [1.0]


def test_two_point_rule():
    r = gauss_legendre_01(2)
    s3 = np.sqrt(3.0)
    np.testing.assert_allclose(r.nodes, [(3 - s3) / 6, (3 + s3) / 6], rtol=0, atol=1e-15)
    np.testing.assert_allclose(r.weights, [0.5, 0.5], rtol=0, atol=1e-15)


def test_t9_with_five_points():
    r = gauss_legendre_01(5)
    assert abs(np.dot(r.weights, r.nodes**9) - 0.1) <= 1e-15


@pytest.mark.parametrize("q", range(1, 21))
def test_exactness_degree(q):
    r = gauss_legendre_01(q)
    for k in range(2 * q):
        assert abs(np.dot(r.weights, r.nodes**k) - 1.0 / (k + 1)) <= 1e-14


@pytest.mark.parametrize("q", [1, 2, 7, 20, 64])
def test_weights_positive_and_symmetric(q):
    r = gauss_legendre_01(q)
    assert np.all(r.weights > 0)
    np.testing.assert_allclose(r.nodes + r.nodes[::-1], 1.0, rtol=0, atol=1e-14)


def test_matches_numpy_legendre():
    for q in (3, 17, 40):
        x, w = np.polynomial.legendre.leggauss(q)
        r = gauss_legendre_01(q)
        np.testing.assert_allclose(r.nodes, (x + 1) / 2, rtol=0, atol=2e-15)
        np.testing.assert_allclose(r.weights, w / 2, rtol=0, atol=2e-15)


@pytest.mark.parametrize("q", [0, 65, 2.5])
def test_order_out_of_range(q):
    with pytest.raises(OrderOutOfRange):
        gauss_legendre_01(q)


def test_triangle_midpoint():
    r = triangle_rule(1)
    np.testing.assert_allclose(r.points, [[0.5, 0.25]])
    np.testing.assert_allclose(r.weights, [0.5])


@pytest.mark.parametrize("q", [1, 3, 8, 20])
def test_triangle_area_and_positivity(q):
    r = triangle_rule(q)
    assert abs(r.weights.sum() - 0.5) <= 1e-14
    assert np.all(r.weights > 0)


def _triangle_moment(a, b):
    return factorial(a) * factorial(b) / factorial(a + b + 2)


def _tet_moment(a, b, c):
    return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3)


def test_triangle_first_moment():
    r = triangle_rule(2)
    assert abs(np.dot(r.weights, r.points[:, 0]) - 1 / 6) <= 1e-15


@pytest.mark.parametrize("q", [2, 4, 6])
def test_triangle_monomials(q):
    r = triangle_rule(q)
    for a in range(2 * q - 1):
        for b in range(2 * q - 1 - a):
            got = np.dot(r.weights, r.points[:, 0] ** a * r.points[:, 1] ** b)
            assert abs(got - _triangle_moment(a, b)) <= 1e-14


def test_tet_single_point():
    r = tet_rule(1)
    assert r.points.shape == (1, 3)
    assert r.weights[0] == pytest.approx(1 / 6, abs=1e-16)


@pytest.mark.parametrize("q", [1, 2, 5, 12])
def test_tet_volume(q):
    r = tet_rule(q)
    assert abs(r.weights.sum() - 1 / 6) <= 1e-14
    assert np.all(r.weights > 0)


@pytest.mark.parametrize("q", [2, 4, 6])
def test_tet_monomials(q):
    r = tet_rule(q)
    x, y, z = r.points.T
    # the a**2 Jacobian uses two degrees of the radial Gauss rule
    deg = 2 * q - 3
    for a in range(deg + 1):
        for b in range(deg + 1 - a):
            for c in range(deg + 1 - a - b):
                got = np.dot(r.weights, x**a * y**b * z**c)
                assert abs(got - _tet_moment(a, b, c)) <= 1e-14


@pytest.mark.parametrize("power", [0, 1, 2])
def test_radial_rule_integrates_weighted_monomials(power):
    a, w = radial_rule(5, power)
    for k in range(8):
        assert np.dot(w, a**k) == pytest.approx(1 / (k + power + 1), abs=1e-14)


def test_map_rule_affine_area(rng):
    V = rng.normal(size=(5, 3, 2))
    pts, w = map_rule(triangle_rule(3), V)
    areas = np.abs(np.linalg.det(V[:, 1:] - V[:, :1])) / 2
    np.testing.assert_allclose(w.sum(axis=1), areas, rtol=1e-13)
    assert pts.shape == (5, len(triangle_rule(3).weights), 2)
