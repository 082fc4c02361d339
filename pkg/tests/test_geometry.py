import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from circumfeas.errors import DegenerateConfiguration, DimensionMismatch, RankDeficient
from circumfeas.geometry import (
    DEFAULT_TOL,
    FullPivotLU,
    Tolerance,
    as_vec,
    circumcenter,
    coincide,
    distinct_points,
    solve_gram,
)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def points(n, dim):
    return arrays(np.float64, (n, dim), elements=coord)


def well_posed(pts):
    v = pts[1:] - pts[0]
    s = np.linalg.svd(v, compute_uv=False)
    return s.min() > 1e-2 * max(1.0, s.max())


# --- examples -------------------------------------------------------------

def test_circumcenter_symmetric_unit_circle_points():
    c = circumcenter([(1, 0), (-1, 0), (0, 1)])
    np.testing.assert_allclose(c, [0, 0], atol=1e-15)


def test_duplicate_collapses_to_midpoint():
    np.testing.assert_array_equal(circumcenter([(2, 3), (2, 3), (4, 5)]), [3, 4])


def test_counterexample_first_step_points():
    # x0, R_A x0 and the closed-form R_B R_A x0 for x0 = (1, 0.5, 0)
    c = circumcenter([(1, 0.5, 0), (0, -0.5, 1), (0, -0.5, -1)])
    np.testing.assert_allclose(c, [0.25, -0.25, 0], atol=1e-12)


def test_single_point_returned():
    np.testing.assert_array_equal(circumcenter([(1.5, -2.0)]), [1.5, -2.0])


def test_solve_gram_orthonormal():
    np.testing.assert_allclose(solve_gram([(1, 0), (0, 1)], (3, 4)), [3, 4])


def test_solve_gram_one_dimensional():
    np.testing.assert_allclose(solve_gram([(2, 0)], (4,)), [1])


def test_solve_gram_matches_substitution():
    basis = np.array([(1.0, 1.0), (1.0, -1.0)])
    rhs = np.array([2.0, 0.0])
    t = solve_gram(basis, rhs)
    # direct substitution: sum_i t_i <b_i, b_j> must reproduce rhs
    np.testing.assert_allclose(basis @ basis.T @ t, rhs, atol=1e-14)
    np.testing.assert_allclose(t, [1.0, 0.0], atol=1e-14)


# --- errors ---------------------------------------------------------------

def test_collinear_triple_is_degenerate():
    with pytest.raises(DegenerateConfiguration):
        circumcenter([(0, 0), (1, 1), (3, 3)])


def test_too_many_points():
    with pytest.raises(DegenerateConfiguration):
        circumcenter([(0, 0), (1, 0), (0, 1), (1, 1)])


def test_solve_gram_dependent_basis():
    with pytest.raises(RankDeficient):
        solve_gram([(1, 2), (2, 4)], (1, 1))


def test_mixed_dimensions():
    with pytest.raises(DimensionMismatch):
        circumcenter([(0, 0), (1, 0, 0)])


@pytest.mark.parametrize("bad", [[np.nan, 0.0], [0.0, np.inf], []])
def test_as_vec_rejects(bad):
    with pytest.raises(ValueError):
        as_vec(bad)


def test_as_vec_dimension():
    with pytest.raises(DimensionMismatch):
        as_vec([1, 2, 3], 2)


@pytest.mark.parametrize("args", [(0.0, 1e-12), (1e-10, -1.0), (1e-12, 1e-10)])
def test_tolerance_validation(args):
    with pytest.raises(ValueError):
        Tolerance(*args)


def test_tolerance_round_trip():
    t = Tolerance(1e-8, 1e-11)
    assert Tolerance.from_dict(t.to_dict()) == t


def test_lu_against_numpy(rng):
    for _ in range(50):
        m = rng.normal(size=(4, 4))
        b = rng.normal(size=4)
        np.testing.assert_allclose(FullPivotLU(m, 1e-14).solve(b), np.linalg.solve(m, b), atol=1e-9)


def test_dedup_keeps_first():
    p, q = np.array([1.0, 0.0]), np.array([1.0 + 1e-14, 0.0])
    out = distinct_points([p, q])
    assert len(out) == 1 and out[0] is p
    assert coincide(p, q)
    assert not coincide(p, p + 1e-6)


# --- invariants -------------------------------------------------------------

@given(points(3, 2))
def test_equidistant_and_in_hull_plane(pts):
    if not well_posed(pts):
        return
    c = circumcenter(pts)
    d = np.linalg.norm(pts - c, axis=1)
    assert np.ptp(d) <= DEFAULT_TOL.eps_feas * max(1.0, d.max())
    v = pts[1:] - pts[0]
    coef, *_ = np.linalg.lstsq(v.T, c - pts[0], rcond=None)
    assert np.linalg.norm(v.T @ coef - (c - pts[0])) <= 1e-9 * max(1.0, np.abs(pts).max())


@given(points(3, 4))
def test_equidistant_higher_dimension(pts):
    if not well_posed(pts):
        return
    c = circumcenter(pts)
    d = np.linalg.norm(pts - c, axis=1)
    assert np.ptp(d) <= DEFAULT_TOL.eps_feas * max(1.0, d.max())


@given(points(4, 3))
def test_permutation_invariance(pts):
    if not well_posed(pts):
        return
    ref = circumcenter(pts)
    for perm in itertools.permutations(range(4)):
        got = circumcenter(pts[list(perm)])
        assert np.linalg.norm(got - ref) <= DEFAULT_TOL.eps_feas * max(1.0, np.linalg.norm(ref))


@given(points(2, 3))
def test_two_points_give_exact_midpoint(pts):
    p, q = pts
    if coincide(p, q):
        return
    assert np.array_equal(circumcenter([p, q]), 0.5 * (p + q))
