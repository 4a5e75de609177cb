import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from refinable.attractor import SupportSet, omega
from refinable.bspline import bspline_mask
from refinable.errors import IrrationalConstraint
from refinable.trigpoly import (TrigPolynomial, ZeroConstraint, constraint_rows, evaluate,
                                face_basis, multi_indices)

from conftest import BEAR, TWO_DIGITS
from oracles import origin_face_dims

LINE = SupportSet(np.array([[-1], [0], [1]]))
SQUARE = SupportSet(np.array(sorted(itertools.product(range(-1, 2), repeat=2))))


def bear_omega(ell):
    return omega(BEAR, bspline_mask(TWO_DIGITS, ell).support)


def test_evaluate_constant():
    p = TrigPolynomial(SQUARE, [1, 0, 0, 0, 0])
    assert evaluate(p, [0.3, 0.7]) == pytest.approx(1.0)


def test_evaluate_one_minus_cos():
    p = TrigPolynomial.from_full(LINE, [-0.5, 1, -0.5])
    assert evaluate(p, 0.5) == pytest.approx(2.0)
    assert evaluate(p, 0.25) == pytest.approx(1.0)
    np.testing.assert_allclose(p(np.array([0.0, 0.5])), [0.0, 2.0], atol=1e-15)


@given(st.lists(st.floats(-1, 1), min_size=5, max_size=5),
       st.tuples(st.floats(-2, 2), st.floats(-2, 2)))
def test_evaluate_even_and_periodic(c, xi):
    p = TrigPolynomial(SQUARE, c)
    xi = np.array(xi)
    v = p(xi)
    assert p(-xi) == pytest.approx(v, abs=1e-12)
    assert p(xi + np.array([1.0, -2.0])) == pytest.approx(v, abs=1e-11)
    full = sum(cf * np.exp(2j * np.pi * np.dot(k, xi))
               for k, cf in zip(SQUARE.points, p.full_coefficients()))
    assert v == pytest.approx(full.real, abs=1e-12)


def test_grid_values_match_evaluation():
    rng = np.random.default_rng(0)
    S = bear_omega(3)
    p = TrigPolynomial(S, rng.standard_normal((len(S) + 1) // 2))
    g = p.grid_values(16)
    idx = np.array([[3, 5], [0, 0], [15, 9]])
    np.testing.assert_allclose(g[tuple(idx.T)], p(idx / 16), atol=1e-10)


def test_rows_univariate_origin():
    rows = constraint_rows(LINE, ZeroConstraint.point([0], 2))
    assert rows.shape == (1, 2)
    np.testing.assert_allclose(rows[0] / rows[0, 0], [1, 2])


def test_rows_subspace_square():
    c = ZeroConstraint.subspace([0, 0], [[0, 1]], 2)
    rows = constraint_rows(SQUARE, c, basis="monomial")
    F = face_basis(SQUARE, [c])
    # p vanishes with its gradient on the line xi_1 = 0: p(0, tau) and
    # d/dxi_1 p(0, tau) are trigonometric polynomials in tau that must vanish
    for x in np.eye(F.dim):
        p = F.polynomial(x)
        tau = np.linspace(0, 1, 17)
        pts = np.stack([np.zeros_like(tau), tau], axis=1)
        np.testing.assert_allclose(p(pts), 0, atol=1e-12)
        np.testing.assert_allclose(p.derivative(pts, (1, 0)), 0, atol=1e-10)
    # frequencies a in {0, 1} (folded), with value and first transverse
    # derivative rows; odd ones vanish by symmetry
    assert np.linalg.matrix_rank(rows) == 5 - F.dim
    assert F.dim == 2


@pytest.mark.parametrize("ell", range(5))
def test_origin_rows_count_even_multi_indices(ell):
    S = bear_omega(ell)
    rows = constraint_rows(S, ZeroConstraint.origin(2, ell))
    even = sum(1 for b in multi_indices(2, 2 * ell + 1) if sum(b) % 2 == 0)
    assert len(rows) == even == (ell + 1) ** 2


def test_haar_face():
    F = face_basis(LINE, [ZeroConstraint.origin(1, 0)])
    assert F.dim == 1
    p = F.polynomial([1.0])
    full = p.full_coefficients() / p.coefficients[0]
    np.testing.assert_allclose(full, [-0.5, 1, -0.5])


def test_empty_constraints_full_space():
    S = bear_omega(2)
    assert face_basis(S).dim == (1 + len(S)) // 2
    assert face_basis(S, symmetric=False).dim == len(S)


@pytest.mark.parametrize("ell", range(5))
def test_face_dims_match_exact_rank(ell):
    S = bear_omega(ell)
    c = ZeroConstraint.origin(2, ell)
    folded, full = origin_face_dims(S.points.tolist(), 2 * (ell + 1))
    assert face_basis(S, [c]).dim == folded
    assert face_basis(S, [c], symmetric=False).dim == full


def test_arnoldi_rows_stay_full_rank_where_monomials_fail():
    # at high order the raw monomial rows lose numerical rank
    S = bear_omega(9)
    c = ZeroConstraint.origin(2, 9)
    assert face_basis(S, [c]).dim == (1 + len(S)) // 2 - 100
    assert face_basis(S, [c], basis="monomial").dim > face_basis(S, [c]).dim


def test_face_basis_orthonormal_and_nested():
    S = bear_omega(4)
    dims = []
    for k in range(5):
        F = face_basis(S, [ZeroConstraint.origin(2, k)])
        np.testing.assert_allclose(F.basis.T @ F.basis, np.eye(F.dim), atol=1e-12)
        dims.append(F.dim)
    assert dims == sorted(dims, reverse=True)


def test_random_face_member_satisfies_point_constraint():
    rng = np.random.default_rng(1)
    S = bear_omega(3)
    c = ZeroConstraint.origin(2, 2)
    F = face_basis(S, [c])
    p = F.polynomial(rng.standard_normal(F.dim))
    scale = np.abs(p.coefficients).sum()
    # analytic derivative rows
    for beta in multi_indices(2, c.order - 1):
        d = p.derivative([0.0, 0.0], beta)[0] / (2 * np.pi * 8) ** sum(beta)
        assert abs(d) < 1e-8 * scale
    # finite differences: p(h u) = O(h^6) along random directions
    for _ in range(5):
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        h1, h2 = 1e-2, 2e-2
        r = p(h2 * u) / p(h1 * u)
        assert math.log2(abs(r)) == pytest.approx(6, abs=0.05)


def test_random_face_member_vanishes_on_subspace():
    rng = np.random.default_rng(2)
    S = omega([[2, 0], [0, 2]], bspline_mask([(0, 0), (1, 0), (0, 1), (1, 1)], 2).support)
    c = ZeroConstraint.subspace([Fraction(1, 2), 0], [[1, 1]], 4)
    F = face_basis(S, [c])
    assert 0 < F.dim < (len(S) + 1) // 2
    p = F.polynomial(rng.standard_normal(F.dim))
    pts = c.sample(100, rng, scale=3.0)
    scale = np.abs(p.coefficients).sum()
    assert np.max(np.abs(p(pts))) < 1e-8 * scale
    w = np.array([1.0, -1.0]) / math.sqrt(2)
    for j in range(1, 4):
        beta_vals = sum(math.comb(j, i) * w[0] ** i * w[1] ** (j - i)
                        * p.derivative(pts[:5], (i, j - i)) for i in range(j + 1))
        assert np.max(np.abs(beta_vals)) < 1e-7 * scale * (2 * np.pi * 4) ** j


def test_constraints_only_shrink():
    S = bear_omega(2)
    a = ZeroConstraint.origin(2, 1)
    b = ZeroConstraint.subspace([0, 0], [[1, 0]], 2)
    da = face_basis(S, [a]).dim
    assert face_basis(S, [a, b]).dim <= da <= face_basis(S).dim


def test_constraint_validation():
    with pytest.raises(IrrationalConstraint):
        ZeroConstraint.point([math.sqrt(2), 0], 2)
    with pytest.raises(ValueError):
        ZeroConstraint.point([0, 0], 3)
    with pytest.raises(ValueError):
        ZeroConstraint.subspace([0, 0], [[1, 2], [2, 4]], 2)
    c = ZeroConstraint.point(["1/3", (1, 4)], 2)
    assert c.base == (Fraction(1, 3), Fraction(1, 4))
    assert ZeroConstraint.from_json(c.to_json()) == c
    assert ZeroConstraint.point([0.25, 0.5], 2).base == (Fraction(1, 4), Fraction(1, 2))
