"""Subdivision operator and sampling of refinable functions on M-adic grids."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import SupportCap
from .lattice import as_dilation
from .mask import Mask

__all__ = ["GridData", "subdivision_step", "iterate", "sample_refinable", "delta"]

DEFAULT_CAP = 10 ** 7


@dataclass(frozen=True)
class GridData:
    """Finitely supported data ``k -> value`` on Z^n at refinement level ``level``.

    ``points`` are sorted lexicographically; level-j points sit at
    ``M^{-j} k``.
    """

    points: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    level: int = 0
    M: object = field(default=None, repr=False)

    def __len__(self):
        return len(self.points)

    def as_dict(self) -> dict:
        return dict(zip(map(tuple, self.points.tolist()), self.values.tolist()))

    def coordinates(self) -> np.ndarray:
        """``M^{-level} k`` for every stored point."""
        M = as_dilation(self.M)
        P = np.linalg.matrix_power(M.inverse, self.level)
        return self.points @ P.T

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            n = self.points.shape[1]
            w.writerow([f"x_{i + 1}" for i in range(n)] + ["value"])
            for x, v in zip(self.coordinates(), self.values):
                w.writerow([f"{c:.12g}" for c in x] + [f"{v:.12g}"])
        finally:
            if own:
                fh.close()


def delta(n: int, M=None) -> GridData:
    """The unit impulse at the origin."""
    return GridData(np.zeros((1, n), dtype=np.int64), np.ones(1), 0, M)


def _merge(points, values):
    uniq, inv = np.unique(points, axis=0, return_inverse=True)
    return uniq, np.bincount(inv.ravel(), weights=values, minlength=len(uniq))


def subdivision_step(mask: Mask, M, data: GridData) -> GridData:
    """``[S a](alpha) = sum_k c_{alpha - M k} a(k)``, one level finer."""
    M = as_dilation(M)
    Q = mask.support
    c = mask.values
    K = np.asarray(data.points, dtype=np.int64).reshape(-1, M.n)
    alpha = (K @ M.array.T)[:, None, :] + Q[None, :, :]
    vals = np.asarray(data.values, dtype=float)[:, None] * c[None, :]
    pts, v = _merge(alpha.reshape(-1, M.n), vals.ravel())
    return GridData(pts, v, data.level + 1, M)


def iterate(mask: Mask, M, data0: GridData, j: int, cap: int = DEFAULT_CAP) -> GridData:
    """``S^j data0``.

    Raises
    ------
    SupportCap
        When a step would handle more than ``cap`` point-coefficient pairs.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    M = as_dilation(M)
    data = data0 if data0.M is not None else GridData(data0.points, data0.values, data0.level, M)
    for _ in range(j):
        if len(data) * len(mask) > cap:
            raise SupportCap(f"{len(data) * len(mask)} terms exceed the cap {cap}")
        data = subdivision_step(mask, M, data)
    return data


def sample_refinable(mask: Mask, M, j: int, cap: int = DEFAULT_CAP) -> GridData:
    """``S^j delta_0``; approximates ``phi(M^{-j} k)`` for convergent schemes."""
    M = as_dilation(M)
    return iterate(mask, M, delta(M.n, M), j, cap)
