import itertools

import numpy as np
import pytest

from implicitquad.errors import AmbiguousSigns
from implicitquad.geometry import Box, barycentric_point, classify_simplex, sign_pattern, zero_tolerance


def test_uniform_signs_are_empty():
    assert classify_simplex([1, 1, 1], 2).tag == "Empty"
    assert classify_simplex([-1, -1, -1, -1], 3).tag == "Full"


def test_lone_minority_is_apex():
    case = classify_simplex([-1, 1, 1], 2)
    assert case.tag == "CutApex" and case.apex == 0


def test_two_two():
    case = classify_simplex([1, 1, -1, -1], 3)
    assert case.tag == "CutTwoTwo" and case.positive_pair == (0, 1)


def test_zero_joins_majority():
    case = classify_simplex([1, 1, 0, -1], 3)
    assert case.tag == "CutApex" and case.apex == 3


@pytest.mark.parametrize("signs", [[0, 0, 1], [1, 0, -1], [0, 0, 0, 0], [1, -1, 0, 0]])
def test_ambiguous_patterns_raise(signs):
    with pytest.raises(AmbiguousSigns):
        classify_simplex(signs, len(signs) - 1)


def test_two_two_impossible_in_2d():
    with pytest.raises((AmbiguousSigns, ValueError)):
        classify_simplex([1, -1, 1, -1], 2)


def _all_patterns(dim):
    for signs in itertools.product((-1, 0, 1), repeat=dim + 1):
        try:
            yield signs, classify_simplex(signs, dim)
        except AmbiguousSigns:
            continue


@pytest.mark.parametrize("dim", [2, 3])
def test_relabeling_moves_apex(dim):
    for signs, case in _all_patterns(dim):
        for perm in itertools.permutations(range(dim + 1)):
            permuted = [signs[p] for p in perm]
            other = classify_simplex(permuted, dim)
            assert other.tag == case.tag
            if case.tag == "CutApex":
                assert perm[other.apex] == case.apex


@pytest.mark.parametrize("dim", [2, 3])
def test_negation_swaps_empty_and_full(dim):
    swap = {"Empty": "Full", "Full": "Empty", "CutApex": "CutApex", "CutTwoTwo": "CutTwoTwo"}
    for signs, case in _all_patterns(dim):
        other = classify_simplex([-s for s in signs], dim)
        assert other.tag == swap[case.tag]
        assert other.apex == case.apex


def test_barycentric_examples():
    assert np.allclose(barycentric_point([(0, 0), (1, 0)], [0.5, 0.5]), (0.5, 0))
    tri = [(0, 0), (1, 0), (0, 1)]
    assert np.array_equal(barycentric_point(tri, [1, 0, 0]), (0, 0))
    assert np.allclose(barycentric_point(tri, [1 / 3] * 3), (1 / 3, 1 / 3), atol=1e-16)


def test_barycentric_recovers_vertices_exactly(rng):
    V = rng.normal(size=(4, 3))
    for k in range(4):
        assert np.array_equal(barycentric_point(V, np.eye(4)[k]), V[k])


def test_barycentric_rejects_bad_weights():
    with pytest.raises(ValueError):
        barycentric_point([(0, 0), (1, 0)], [0.3, 0.3])


def test_box_validation():
    b = Box.from_flat([0, 2, -1, 1])
    assert b.dim == 2 and b.measure == 4.0
    with pytest.raises(ValueError):
        Box.from_flat([1, 0, 0, 1])
    with pytest.raises(ValueError):
        Box.from_flat([0, 1, 0])


def test_zero_tolerance_scales_with_values():
    assert zero_tolerance([0.5, -0.1]) == 1e-12
    assert zero_tolerance([1e6, 2.0]) == pytest.approx(1e-6)
    assert sign_pattern([1e-13, -2.0, 3.0], 1e-12).tolist() == [0, -1, 1]
