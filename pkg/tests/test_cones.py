import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factories import random_cone_2d, random_cone_3d
from robvec.cones import (EPS_STRICT, ConeError, PolyhedralCone, check_direction, check_dual_vector,
                          in_cone, in_interior, in_neg_interior, sample_dual_cone, threshold_alpha,
                          validate_cone)

R2 = PolyhedralCone.orthant(2)
# {y1 >= 0, y1 + y2 >= 0}
WEDGE = PolyhedralCone([[1, 0], [1, 1]], [[1, -1], [0, 1]])


def test_neg_interior_examples():
    assert in_neg_interior(R2, [-1, -1])
    assert not in_neg_interior(R2, [0, -1])
    # oracle: both normal products negative, (-1) and (-1)
    assert in_neg_interior(WEDGE, [-1, 0])


def test_membership_vectorised():
    Y = np.array([[1, 1], [0, 0], [-1, 2], [-1, -1]])
    assert in_cone(R2, Y).tolist() == [True, True, False, False]
    assert in_interior(R2, Y).tolist() == [True, False, False, False]
    assert in_neg_interior(R2, Y).tolist() == [False, False, False, True]


def _scan_threshold(K, y, k, lo=-10, hi=10, num=2_000_001):
    """First alpha on a fine grid where y + alpha k leaves -int K."""
    a = np.linspace(lo, hi, num)
    inside = np.all((y[None, :] + a[:, None] * k[None, :]) @ K.normals.T < 0, axis=1)
    return a[np.argmin(inside)]


# scan-oracle thresholds, frozen (grid step 1e-5)
SCAN_R2 = -1.0
SCAN_WEDGE = -2.0


def test_threshold_examples():
    assert threshold_alpha(R2, [0, 0], [1, 1]) == 0.0
    assert _scan_threshold(R2, np.array([1.0, -2.0]), np.array([1.0, 1.0])) == pytest.approx(SCAN_R2, abs=1e-5)
    assert threshold_alpha(R2, [1, -2], [1, 1]) == pytest.approx(SCAN_R2, abs=1e-12)
    assert _scan_threshold(WEDGE, np.array([2.0, -1.0]), np.array([1.0, 0.0])) == pytest.approx(SCAN_WEDGE, abs=1e-5)
    assert threshold_alpha(WEDGE, [2, -1], [1, 0]) == pytest.approx(SCAN_WEDGE, abs=1e-12)


def test_threshold_rejects_boundary_direction():
    with pytest.raises(ConeError):
        threshold_alpha(R2, [0, 0], [1, 0])


def test_dual_cone_scalar_ladder():
    Z = sample_dual_cone(PolyhedralCone.orthant(1), 3)
    assert Z.ravel().tolist() == [0.0, 1.0, 10.0, 100.0]


def test_dual_cone_simplex_grid():
    Z = sample_dual_cone(R2, 2)
    for z in ([1, 0], [0, 1], [0.5, 0.5], [10, 0], [5, 5]):
        assert np.any(np.all(np.isclose(Z, z), axis=1)), z
    assert np.all(Z @ R2.generators.T >= 0)


def test_dual_cone_contains_zero_and_explicit_ladder():
    for K in (R2, WEDGE, PolyhedralCone.orthant(3)):
        Z = sample_dual_cone(K, 1)
        assert np.all(Z[0] == 0)
        assert np.all(Z @ K.generators.T >= -1e-12)
    Z = sample_dual_cone(PolyhedralCone.orthant(1), 5, ladder=(2.0,))
    assert Z.ravel().tolist() == [0.0, 2.0]


def test_check_helpers():
    assert check_direction(R2, [1, 2]).tolist() == [1, 2]
    with pytest.raises(ConeError):
        check_dual_vector(WEDGE, [-1, 0])
    assert check_dual_vector(WEDGE, [1, 1]).tolist() == [1, 1]


def test_validate_names_violating_pair():
    bad = PolyhedralCone([[1, 0], [0, 1]], [[1, 0], [-1, 1]])
    with pytest.raises(ConeError, match="generator 1 .* violates normal 0"):
        validate_cone(bad, "K")


def test_validate_detects_missing_generator():
    # generators span only a ray of the orthant
    with pytest.raises(ConeError, match="not a nonnegative combination"):
        validate_cone(PolyhedralCone([[1, 0], [0, 1]], [[1, 1]]), "K")


def test_validate_detects_empty_interior():
    with pytest.raises(ConeError, match="interior is empty"):
        validate_cone(PolyhedralCone([[1, 0], [-1, 0]], [[0, 1], [0, -1]]), "K")


def test_validate_accepts_random_cones():
    rng = np.random.default_rng(0)
    for _ in range(20):
        validate_cone(random_cone_2d(rng))
        validate_cone(random_cone_3d(rng))


finite = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10_000), st.lists(finite, min_size=4, max_size=4), st.floats(0, 1))
def test_segment_property_of_complement(seed, vals, lam):
    # y + a k0 and y + b k0 outside -int K  =>  every convex combination is too
    rng = np.random.default_rng(seed)
    K = random_cone_2d(rng)
    k0 = K.generators.T @ rng.uniform(0, 1, 2)
    y = np.array(vals[:2])
    a, b = vals[2], vals[3]
    if in_neg_interior(K, y + a * k0) or in_neg_interior(K, y + b * k0):
        return
    assert not in_neg_interior(K, y + (lam * a + (1 - lam) * b) * k0)


def test_segment_property_fuzz():
    rng = np.random.default_rng(1)
    violations = 0
    for _ in range(10_000):
        K = random_cone_2d(rng) if rng.random() < 0.5 else random_cone_3d(rng)
        k0 = K.generators.T @ rng.uniform(0, 1, K.generators.shape[0])
        y = rng.normal(size=K.dim) * 2
        a, b = rng.normal(size=2) * 3
        if in_neg_interior(K, y + a * k0) or in_neg_interior(K, y + b * k0):
            continue
        lam = rng.uniform()
        violations += bool(in_neg_interior(K, y + (lam * a + (1 - lam) * b) * k0))
    assert violations == 0


def test_threshold_straddle():
    rng = np.random.default_rng(2)
    for _ in range(200):
        K = random_cone_2d(rng) if rng.random() < 0.5 else random_cone_3d(rng)
        k = K.interior_direction()
        y = rng.normal(size=K.dim) * 2
        abar = threshold_alpha(K, y, k)
        alphas = abar + np.r_[rng.uniform(-1, 1, 196), -1e-6, 1e-6, 0.0, 5e-10]
        verdict = in_neg_interior(K, y[None, :] + alphas[:, None] * k[None, :])
        away = np.abs(alphas - abar) >= 1e-9
        assert np.array_equal(verdict[away], (alphas < abar)[away])


def test_cone_plus_interior_is_interior():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        K = random_cone_2d(rng) if rng.random() < 0.5 else random_cone_3d(rng)
        p = K.generators.T @ rng.uniform(0, 2, K.generators.shape[0])
        q = K.generators.T @ rng.uniform(0.05, 2, K.generators.shape[0])
        if not np.all(K.normals @ q > 0):
            continue
        assert np.all(K.normals @ (p + q) > 0)


def test_strict_tolerance_band():
    # a_i . y must be below -eps, not merely negative
    assert not in_neg_interior(R2, [-EPS_STRICT / 2, -1])
    assert in_neg_interior(R2, [-2 * EPS_STRICT, -1])
