import itertools

import numpy as np
import pytest

from refinable.attractor import (attractor_radius, difference_set, j0_image, omega,
                                 tile_points)
from refinable.bspline import bspline_mask
from refinable.errors import BoundOverflow, EmptyResult
from refinable.lattice import as_dilation

from conftest import BEAR, CORPUS, DIAG32, MODIFIED6, TWO_DIGITS
from oracles import omega_gfp


def test_omega_univariate():
    assert omega([[2]], [(0,), (1,)]).points.ravel().tolist() == [-1, 0, 1]


def test_omega_square():
    S = omega([[2, 0], [0, 2]], list(itertools.product(range(2), repeat=2)))
    assert S.as_set() == set(itertools.product(range(-1, 2), repeat=2))


def test_omega_bear_tile():
    # the Bear tile has six neighbours; with the origin that gives 7 points
    S = omega(BEAR, TWO_DIGITS)
    assert len(S) == 7
    assert S.as_set() == {(0, 0), (1, 0), (-1, 0), (1, 1), (-1, -1), (0, 1), (0, -1)}


@pytest.mark.parametrize("ell", [0, 1, 3])
def test_omega_univariate_bspline_closed_form(ell):
    Q = [(s,) for s in range(ell + 2)]
    assert omega([[2]], Q).points.ravel().tolist() == list(range(-ell - 1, ell + 2))


@pytest.mark.parametrize("name", sorted(CORPUS))
@pytest.mark.parametrize("ell", [0, 2])
def test_omega_invariants(name, ell):
    M, D = CORPUS[name]
    Q = bspline_mask(D, ell).support
    S = omega(M, Q)
    pts = S.as_set()
    n = len(M)
    assert (0,) * n in pts
    assert all(tuple(-x for x in k) in pts for k in pts)
    A = as_dilation(M).array
    qd = difference_set(Q)
    for k in S.points:
        assert any(tuple(A @ k + q) in pts for q in qd)
    assert {tuple(x) for x in j0_image(M, S.points, qd).tolist()} <= pts
    assert omega(M, Q, radius_scale=2.0) == S
    assert pts == omega_gfp(M, Q.tolist(), int(attractor_radius(M, qd)) + 3)


def test_radius_bound_contains_tile():
    cloud = tile_points(BEAR, TWO_DIGITS, 12)
    R = attractor_radius(BEAR, np.array(TWO_DIGITS))
    assert np.linalg.norm(cloud.points, axis=1).max() <= R + 1e-12


def test_bound_overflow():
    with pytest.raises(BoundOverflow):
        omega(BEAR, [(0, 0), (40, 0)], cap=1000)


def test_empty_support():
    with pytest.raises(EmptyResult):
        omega([[2]], np.zeros((0, 1), dtype=int))


def test_tile_points_dyadic():
    cloud = tile_points([[2]], [(0,), (1,)], 3)
    assert sorted(cloud.points.ravel().tolist()) == [j / 8 for j in range(8)]
    assert cloud.count == 8 and not cloud.sampled


def test_tile_points_bear_depth_two():
    cloud = tile_points(BEAR, TWO_DIGITS, 2)
    Minv = np.linalg.inv(np.array(BEAR, dtype=float))
    d = np.array([1.0, 0.0])
    expected = Minv @ d + Minv @ Minv @ d
    assert len(cloud.points) == 4
    assert np.min(np.linalg.norm(cloud.points - expected, axis=1)) < 1e-14
    assert np.min(np.linalg.norm(cloud.points, axis=1)) == 0


def test_tile_points_depth_one_diag():
    cloud = tile_points(DIAG32, MODIFIED6, 1)
    expected = np.array(MODIFIED6) / np.array([3.0, 2.0])
    np.testing.assert_allclose(np.sort(cloud.points, axis=0), np.sort(expected, axis=0))


def test_tile_points_refine():
    coarse = {tuple(np.round(p, 12)) for p in tile_points(BEAR, TWO_DIGITS, 4).points}
    fine = {tuple(np.round(p, 12)) for p in tile_points(BEAR, TWO_DIGITS, 5).points}
    assert coarse <= fine


def test_tile_sampling_is_deterministic(tmp_path):
    a = tile_points(BEAR, TWO_DIGITS, 30, sample=500, seed=7)
    b = tile_points(BEAR, TWO_DIGITS, 30, sample=500, seed=7)
    assert a.sampled and np.array_equal(a.points, b.points)
    a.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "x_1,x_2" and len(lines) == 501
