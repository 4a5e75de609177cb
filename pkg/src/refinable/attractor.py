"""
The difference set Omega = (Y - Y) cap Z^n and point clouds of self-affine
attractors.

``Y`` is the attractor of the maps ``x -> M^{-1}(x + s)``, ``s in Q``.  Its
difference set satisfies ``Y - Y = M^{-1}(Y - Y + Q')`` with ``Q' = Q - Q``,
so an integer point ``k`` lies in Omega iff ``M k + q'`` lies in Omega for
some ``q' in Q'``.  Omega is computed as the greatest set with this property
inside a ball certified to contain ``Y - Y``.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundOverflow, EmptyResult
from .lattice import DigitSet, as_dilation

__all__ = ["SupportSet", "TileCloud", "omega", "difference_set",
           "attractor_radius", "j0_image", "tile_points"]

DEFAULT_CAP = 10 ** 6


def difference_set(Q) -> np.ndarray:
    """Sorted unique rows of ``Q - Q``."""
    Q = np.asarray(Q, dtype=np.int64)
    if Q.ndim == 1:
        Q = Q[:, None]
    diff = (Q[:, None, :] - Q[None, :, :]).reshape(-1, Q.shape[1])
    return np.unique(diff, axis=0)


def attractor_radius(M, vectors, rtol: float = 1e-12) -> float:
    """Radius ``R`` with ``{sum_j M^{-j} v_j : v_j in vectors}`` inside B(0, R).

    ``R = max |v| * sum_{j>=1} |M^{-j}|_2``; the series is cut once a term
    drops below ``rtol`` times the partial sum.
    """
    M = as_dilation(M)
    v = np.asarray(vectors, dtype=float).reshape(-1, M.n)
    vmax = float(np.max(np.linalg.norm(v, axis=1))) if len(v) else 0.0
    Minv = M.inverse
    P = np.eye(M.n)
    total = 0.0
    for _ in range(100000):
        P = P @ Minv
        term = np.linalg.norm(P, 2)
        total += term
        if term < rtol * total:
            break
    return vmax * total


@dataclass(frozen=True)
class SupportSet:
    """Finite symmetric set of integer vectors containing the origin.

    ``points`` is sorted lexicographically.  ``qdiff`` is ``Q - Q`` for the
    mask support the set was computed from.
    """

    points: np.ndarray = field(repr=False)
    M: object = field(default=None, repr=False, compare=False)
    qdiff: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.points)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def as_set(self) -> set:
        return set(map(tuple, self.points.tolist()))

    def __eq__(self, other):
        return isinstance(other, SupportSet) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    def to_json(self):
        return self.points.tolist()


def _lookup_grid(points, lo, shape):
    grid = np.zeros(shape, dtype=bool)
    grid[tuple((points - lo).T)] = True
    return grid


def _member(grid, lo, x):
    idx = x - lo
    inside = np.all((idx >= 0) & (idx < np.array(grid.shape)), axis=1)
    out = np.zeros(len(x), dtype=bool)
    out[inside] = grid[tuple(idx[inside].T)]
    return out


def omega(M, Q, cap: int = DEFAULT_CAP, radius_scale: float = 1.0) -> SupportSet:
    """Integer points of ``Y - Y`` for the attractor ``Y`` of ``(M, Q)``.

    Parameters
    ----------
    M : DilationMatrix or array_like
        Integer expanding matrix.
    Q : array_like, shape (N, n)
        Mask support.
    cap : int
        Maximal number of lattice points allowed in the initial ball.
    radius_scale : float
        Multiplies the certified radius.  Any value >= 1 gives the same set.

    Returns
    -------
    SupportSet

    Notes
    -----
    Starting from every integer point of ``B(0, R + sqrt(n))``, each pass
    deletes, after a full scan, the points ``k`` for which no ``q' in Q - Q``
    gives ``M k + q'`` in the current set.  All arithmetic is integer.
    """
    M = as_dilation(M)
    Q = np.asarray(Q, dtype=np.int64).reshape(-1, M.n)
    if len(Q) == 0:
        raise EmptyResult("empty mask support")
    Qp = difference_set(Q)
    R = radius_scale * attractor_radius(M, Qp) + np.sqrt(M.n)
    B = int(np.floor(R))
    side = 2 * B + 1
    if float(side) ** M.n > 4 * cap:
        raise BoundOverflow(f"bounding box with side {side} exceeds the cap")
    axes = [np.arange(-B, B + 1)] * M.n
    pts = np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, M.n)
    pts = pts[np.einsum("ij,ij->i", pts, pts) <= R * R]
    if len(pts) > cap:
        raise BoundOverflow(f"{len(pts)} candidate points exceed cap {cap}")

    A = M.array
    lo = np.full(M.n, -B, dtype=np.int64)
    shape = (side,) * M.n
    while True:
        grid = _lookup_grid(pts, lo, shape)
        img = pts @ A.T
        keep = np.zeros(len(pts), dtype=bool)
        for q in Qp:
            keep |= _member(grid, lo, img + q)
        if keep.all():
            break
        pts = pts[keep]
        if len(pts) == 0:
            raise EmptyResult("fixed point is empty")
    order = np.lexsort(pts.T[::-1])
    return SupportSet(pts[order], M, Qp)


def j0_image(M, points, qdiff) -> np.ndarray:
    """Integer points of ``M^{-1}(points + qdiff)``, exactly."""
    M = as_dilation(M)
    pts = np.asarray(points, dtype=np.int64).reshape(-1, M.n)
    sums = (pts[:, None, :] + np.asarray(qdiff, dtype=np.int64)[None]).reshape(-1, M.n)
    sums = np.unique(sums, axis=0)
    y = sums @ M.adjugate.T
    ok = np.all(y % M.det == 0, axis=1)
    return np.unique(y[ok] // M.det, axis=0)


@dataclass(frozen=True)
class TileCloud:
    """Finite M-adic expansions ``sum_{j<=depth} M^{-j} d_{i_j}``."""

    points: np.ndarray = field(repr=False)
    depth: int
    count: int
    sampled: bool = False

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow([f"x_{i + 1}" for i in range(self.points.shape[1])])
            for p in self.points:
                w.writerow([f"{x:.12g}" for x in p])
        finally:
            if own:
                fh.close()


def tile_points(M, D, depth: int, sample: int | None = None, seed: int = 0,
                max_points: int = 1 << 20) -> TileCloud:
    """Points of the attractor of ``(M, D)`` truncated at ``depth`` digits.

    All ``m**depth`` expansions are produced when that is at most
    ``max_points`` and ``sample`` is not given; otherwise ``sample`` (or
    ``max_points``) digit strings are drawn uniformly with ``seed``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    M = as_dilation(M)
    digits = np.asarray(list(D.digits if isinstance(D, DigitSet) else D),
                        dtype=float).reshape(-1, M.n)
    Minv = M.inverse
    total = len(digits) ** depth
    if sample is None and total <= max_points:
        X = np.zeros((1, M.n))
        for _ in range(depth):
            X = ((digits[:, None, :] + X[None, :, :]).reshape(-1, M.n)) @ Minv.T
        return TileCloud(X, depth, len(X), False)
    size = sample or max_points
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(digits), size=(size, depth))
    X = np.zeros((size, M.n))
    for j in range(depth - 1, -1, -1):
        X = (digits[idx[:, j]] + X) @ Minv.T
    return TileCloud(X, depth, size, True)
