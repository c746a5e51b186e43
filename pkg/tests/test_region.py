import numpy as np
import pytest

from implicitquad.fields import FunctionField
from implicitquad.region import integrate_region, integrate_region_tet, integrate_region_triangle

TRI = [(0, 0), (1, 0), (0, 1)]
CORNER = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


@pytest.mark.parametrize("q", [2, 3, 8])
def test_half_plane_in_triangle(q):
    assert integrate_region_triangle(TRI, "x-0.5", "1", q) == pytest.approx(0.375, abs=1e-15)


def test_full_triangle():
    assert integrate_region_triangle([(0, 0), (2, 0), (0, 3)], "x+y-10", "1", 2) == pytest.approx(3.0)


def test_quarter_disk():
    assert abs(integrate_region_triangle([(0, 0), (2, 0), (0, 2)], "x^2+y^2-1", "1", 20) - np.pi / 4) <= 1e-10


@pytest.mark.parametrize("q", [2, 4])
def test_corner_tet_below_plane(q):
    assert integrate_region_tet(CORNER, "z-0.5", "1", q) == pytest.approx(7 / 48, abs=1e-15)


def test_positive_tet_is_zero():
    assert integrate_region_tet(CORNER, "x+y+z+1", "1", 3) == 0.0


def test_ellipse_area():
    assert abs(integrate_region([-1.1, 1.1, -1.1, 1.1], 64, "x^2+4*y^2-1", "1", 8) - np.pi / 2) <= 1e-9


def test_quartic_area():
    assert abs(integrate_region([-2, 2, -2, 2], 64, "x^4-y", "1", 8) - 8 / 5 * 2**1.25) <= 1e-8


@pytest.mark.parametrize("box", [[0, 2, -1, 1], [0, 1, 0, 2, -1, 0.5]])
def test_full_box(box):
    measure = np.prod(np.diff(np.reshape(box, (-1, 2)), axis=1))
    assert abs(integrate_region(box, 4, "-1", "1", 3) - measure) <= 1e-13


@pytest.mark.parametrize("box", [[0, 2, -1, 1], [0, 1, 0, 2, -1, 0.5]])
def test_full_box_first_moment(box):
    b = np.reshape(box, (-1, 2))
    measure = np.prod(b[:, 1] - b[:, 0])
    exact = measure * b[0].mean()
    assert abs(integrate_region(box, 4, "-1", "x", 2) - exact) <= 1e-12


def _partition(box, n, F, q):
    d = len(box) // 2
    neg = FunctionField(lambda p: -F.value(p), lambda p: -F.value_and_grad(p)[1], d)
    return integrate_region(box, n, F, "1", q) + integrate_region(box, n, neg, "1", q)


@pytest.mark.parametrize("text,box,n", [
    ("x^2+4*y^2-1", [-1.1, 1.1, -1.1, 1.1], 16),
    ("x^4-y", [-2, 2, -2, 2], 16),
    ("sin(3*x)+cos(2*y)-0.3", [-1, 1, -1, 1], 24),
    ("x^2+y^2+4*z^2-1", [-1.1, 1.1] * 3, 8),
    ("x^2+y^2-z", [-1, 1, -1, 1, -1, 3], 8),
])
def test_partition_of_box(text, box, n):
    from implicitquad.fields import ExprField

    F = ExprField.from_text(text, len(box) // 2)
    measure = np.prod(np.diff(np.reshape(box, (-1, 2)), axis=1))
    assert abs(_partition(box, n, F, 4) - measure) <= 1e-10


def test_planar_exactness_2d(rng):
    # planar F, polynomial f of degree 2q-2 is integrated exactly on a cut triangle
    q = 3
    tri = np.array([(0, 0), (1, 0), (0, 1)], float)
    got = integrate_region_triangle(tri, "x-0.6", "x^4 + y^3*x", q)
    # exact: integral over the triangle minus the cut corner near (1,0)
    full = 1 / 30 + 1 / 120
    # the part x > 0.6 is the triangle (0.6,0),(1,0),(0.6,0.4); integrate by substitution
    from math import comb
    s = 0.0
    # integral over x in [0.6,1], y in [0,1-x] of x^4 + x y^3
    xs, ws = np.polynomial.legendre.leggauss(20)
    x = 0.8 + 0.2 * xs
    inner = x**4 * (1 - x) + x * (1 - x) ** 4 / 4
    s = 0.2 * np.dot(ws, inner)
    assert abs(got - (full - s)) <= 1e-12


def test_planar_exactness_3d():
    q = 3
    got = integrate_region_tet(CORNER, "z-0.5", "x*y + z^2", q)
    # integral over z <= 0.5 of the corner tet, computed on slices
    xs, ws = np.polynomial.legendre.leggauss(20)
    z = 0.25 + 0.25 * xs
    L = 1 - z
    slice_xy = L**4 / 24
    slice_area = L**2 / 2
    exact = 0.25 * np.dot(ws, slice_xy + z**2 * slice_area)
    assert abs(got - exact) <= 1e-12


def test_effective_weights_positive():
    res = integrate_region([-1.1, 1.1] * 3, 8, "x^2+y^2+4*z^2-1", "1", 4, full_output=True)
    assert res.min_effective_weight > 0


@pytest.mark.slow
def test_ellipsoid_volume():
    v = integrate_region([-1.1, 1.1] * 3, 32, "x^2+y^2+4*z^2-1", "1", 6)
    assert abs(v - 2 * np.pi / 3) <= 1e-6
