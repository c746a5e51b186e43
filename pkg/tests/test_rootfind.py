import numpy as np
import pytest

from implicitquad import kernels
from implicitquad.errors import NoSignChange
from implicitquad.fields import ExprField, FunctionField
from implicitquad.rootfind import root_on_segment, segment_roots


def test_linear_root():
    r = root_on_segment(ExprField.from_text("x - 0.5", 2), (0, 0), (1, 0))
    assert r.t == 0.5
    np.testing.assert_array_equal(r.point, (0.5, 0.0))


def test_unit_circle():
    r = root_on_segment(ExprField.from_text("x^2+y^2-1", 2), (0, 0), (2, 0))
    np.testing.assert_allclose(r.point, (1.0, 0.0), rtol=0, atol=1e-15)


def test_no_sign_change():
    with pytest.raises(NoSignChange):
        root_on_segment(ExprField.from_text("x - 0.5", 2), (0.6, 0), (0.9, 0))


def test_endpoint_root_accepted():
    F = ExprField.from_text("x - 1", 2)
    assert root_on_segment(F, (0, 0), (1, 0), ztol=1e-12).t == 1.0
    assert root_on_segment(F, (1, 0), (3, 0), ztol=1e-12).t == 0.0


@pytest.mark.parametrize("backend", kernels.available_backends())
def test_random_cubics(backend):
    """Cubics with a known simple root inside [0, 1] and no other root there."""
    rng = np.random.default_rng(11)
    n = 1000
    r = rng.uniform(0.05, 0.95, n)
    # (t - r)(t^2 + p t + s) with a positive quadratic factor
    p = rng.uniform(-1, 1, n)
    s = p**2 / 4 + rng.uniform(0.05, 2.0, n)
    scale = rng.choice([-1.0, 1.0], n) * rng.uniform(0.5, 5.0, n)
    c3, c2, c1, c0 = scale, scale * (p - r), scale * (s - p * r), -scale * s * r
    worst = 0.0
    with kernels.use_backend(backend):
        for k in range(n):
            F = ExprField.from_text("{!r}*x^3 + {!r}*x^2 + {!r}*x + {!r}".format(*map(float, (c3[k], c2[k], c1[k], c0[k]))), 2)
            t, _ = segment_roots(F, np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]), 0.0)
            worst = max(worst, abs(t[0] - r[k]))
            assert 0.0 <= t[0] <= 1.0
    assert worst <= 1e-12


def test_vectorised_cubics_with_function_field():
    rng = np.random.default_rng(12)
    n = 1000
    r = rng.uniform(0.05, 0.95, n)

    def value(pts):
        x = pts[:, 0]
        return (x - pts[:, 1]) * (x * x + 1.0)

    def grad(pts):
        x, y = pts[:, 0], pts[:, 1]
        return np.stack([3 * x * x - 2 * x * y + 1.0, -(x * x + 1.0)], axis=1)

    F = FunctionField(value, grad, 2)
    a = np.stack([np.zeros(n), r], axis=1)
    b = np.stack([np.ones(n), r], axis=1)
    t, status = segment_roots(F, a, b, 0.0)
    assert np.all(status == kernels.ROOT_OK)
    assert np.max(np.abs(t - r)) <= 1e-12


def test_raise_errors_off_returns_status():
    F = ExprField.from_text("x - 0.5", 2)
    a = np.array([[0.0, 0.0], [0.6, 0.0]])
    b = np.array([[1.0, 0.0], [0.9, 0.0]])
    t, status = segment_roots(F, a, b, 0.0, raise_errors=False)
    assert status.tolist() == [kernels.ROOT_OK, kernels.ROOT_NO_SIGN]
    assert t[0] == 0.5
