"""Minimum-norm-point solver against closed forms and the lattice oracle."""

import numpy as np
import pytest

from gradsamp import MinNormResult, min_norm_bruteforce, min_norm_point


def test_singleton_hull():
    res = min_norm_point([np.array([2.0, 0.0])])
    np.testing.assert_allclose(res.point, [2.0, 0.0])
    np.testing.assert_allclose(res.weights, [1.0])


def test_symmetric_pair():
    res = min_norm_point([np.array([1.0, 1.0]), np.array([-1.0, 1.0])])
    np.testing.assert_allclose(res.point, [0.0, 1.0], atol=1e-12)


def test_three_point_interior_face():
    # Known optimum (3, 0): the segment between (3,4) and (3,-4) is the
    # closest face; cross-checked by the lattice oracle below.
    pts = [np.array([3.0, 4.0]), np.array([3.0, -4.0]), np.array([5.0, 0.0])]
    res = min_norm_point(pts)
    np.testing.assert_allclose(res.point, [3.0, 0.0], atol=1e-9)
    brute = min_norm_bruteforce(pts, 1e-3)
    np.testing.assert_allclose(brute, [3.0, 0.0], atol=1e-2)


def test_collinear_segment_nearest_endpoint():
    res = min_norm_point([np.array([1.0, 0.0]), np.array([2.0, 0.0])])
    np.testing.assert_allclose(res.point, [1.0, 0.0], atol=1e-12)


def test_weights_certify_containment():
    gen = np.random.Generator(np.random.Philox(11))
    for _ in range(50):
        pts = gen.uniform(-5.0, 5.0, size=(4, 3))
        res = min_norm_point(list(pts))
        assert np.all(res.weights >= 0.0)
        assert abs(res.weights.sum() - 1.0) <= 1e-12
        np.testing.assert_allclose(res.weights @ pts, res.point, atol=1e-10)


def test_zero_in_hull_detected():
    pts = [np.array([1.0, 0.0]), np.array([-1.0, 0.5]), np.array([-1.0, -0.5])]
    res = min_norm_point(pts)
    scale = 1e-12 * (1.0 + max(np.linalg.norm(p) for p in pts))
    assert np.linalg.norm(res.point) <= scale * 10


def test_permutation_invariant_value():
    gen = np.random.Generator(np.random.Philox(12))
    pts = list(gen.uniform(-3.0, 3.0, size=(5, 2)))
    base = np.linalg.norm(min_norm_point(pts).point)
    for _ in range(5):
        perm = gen.permutation(5)
        v = np.linalg.norm(min_norm_point([pts[i] for i in perm]).point)
        assert abs(v - base) <= 1e-12


def test_duplicate_points_deduplicated():
    p = np.array([2.0, 1.0])
    res = min_norm_point([p, p.copy(), np.array([-2.0, 1.0])])
    np.testing.assert_allclose(res.point, [0.0, 1.0], atol=1e-12)
    # Weight flows to the first duplicate only.
    assert res.weights[1] == 0.0


def test_wolfe_certificate_holds():
    gen = np.random.Generator(np.random.Philox(13))
    for _ in range(30):
        pts = gen.uniform(-10.0, 10.0, size=(5, 3))
        res = min_norm_point(list(pts))
        g = res.point
        gsq = float(g @ g)
        for p in pts:
            assert float(g @ (p - g)) >= -1e-10 * (1.0 + gsq)


def test_empty_and_nonfinite_rejected():
    with pytest.raises(ValueError):
        min_norm_point([])
    with pytest.raises(ValueError):
        min_norm_point([np.array([np.nan, 0.0])])
    with pytest.raises(ValueError):
        min_norm_point([np.array([1.0])], tol=0.0)


def test_result_reports_iterations():
    res = min_norm_point([np.array([1.0, 1.0]), np.array([-1.0, 1.0])])
    assert isinstance(res, MinNormResult)
    assert res.iterations >= 1
    assert not res.capped


def test_bruteforce_symmetric_pairs():
    out = min_norm_bruteforce([np.array([1.0, 0.0]), np.array([0.0, 1.0])], 1e-3)
    np.testing.assert_allclose(out, [0.5, 0.5], atol=2e-3)
    out = min_norm_bruteforce([np.array([1.0, 0.0]), np.array([-1.0, 0.0])], 1e-3)
    np.testing.assert_allclose(out, [0.0, 0.0], atol=2e-3)


def test_bruteforce_input_validation():
    pts = [np.array([1.0, 0.0])] * 7
    with pytest.raises(ValueError):
        min_norm_bruteforce(pts, 1e-3)
    with pytest.raises(ValueError):
        min_norm_bruteforce(pts[:2], 0.5)
    with pytest.raises(ValueError):
        min_norm_bruteforce([], 1e-3)


def test_bruteforce_refinement_matches_exhaustive():
    """The windowed multiscale path (large lattices) agrees with the
    exhaustive path run at a coarser, feasible resolution."""
    gen = np.random.Generator(np.random.Philox(14))
    for _ in range(10):
        pts = list(gen.uniform(-4.0, 4.0, size=(4, 2)))
        fine = np.linalg.norm(min_norm_bruteforce(pts, 1e-3))    # refined
        coarse = np.linalg.norm(min_norm_bruteforce(pts, 0.05))  # exhaustive
        exact = np.linalg.norm(min_norm_point(pts).point)
        assert fine <= coarse + 1e-9
        assert fine >= exact - 1e-12
