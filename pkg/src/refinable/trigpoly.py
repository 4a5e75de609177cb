"""
Real even trigonometric polynomials with spectrum in Omega, zero constraints
and the subspaces ("faces") they cut out.

A polynomial ``p(xi) = sum_{k in Omega} p_k exp(2 pi i (k, xi))`` with
``p_{-k} = p_k`` real is stored by its folded coefficients: ``p_0`` followed
by one ``p_k`` for each pair ``{k, -k}``, the representative being the
lexicographically positive one.  Then ``p(xi) = p_0 + 2 sum p_k cos 2 pi (k, xi)``.

Most routines also accept ``symmetric=False``, which switches to the full real
coefficient space ``R^Omega`` (no symmetry imposed).  That space is what the
classical size comparison of transition-operator methods counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np
from scipy.linalg import null_space

from .attractor import SupportSet
from .errors import IrrationalConstraint

__all__ = ["TrigPolynomial", "ZeroConstraint", "FaceBasis", "constraint_rows",
           "face_basis", "fold_map", "evaluate", "multi_indices"]

NULLITY_RTOL = 1e-10
ROW_DROP_RTOL = 1e-12


# ---------------------------------------------------------------- folding ---

def fold_map(points: np.ndarray) -> tuple[int, np.ndarray]:
    """Folded index of every point of a sorted symmetric set.

    Returns ``(z, idx)`` where ``z`` is the position of the origin and
    ``idx[i]`` is the folded coordinate of ``points[i]``.  In a
    lexicographically sorted symmetric set ``-points[i] = points[N-1-i]``.
    """
    N = len(points)
    z = N // 2
    if N % 2 == 0 or np.any(points[z] != 0) or not np.array_equal(points, -points[::-1]):
        raise ValueError("support must be symmetric, sorted and contain 0")
    i = np.arange(N)
    return z, np.where(i >= z, i, N - 1 - i) - z


def _points(omega) -> np.ndarray:
    return omega.points if isinstance(omega, SupportSet) else np.asarray(omega, dtype=np.int64)


@dataclass(frozen=True)
class TrigPolynomial:
    """Real even trigonometric polynomial on a support set.

    Parameters
    ----------
    support : SupportSet
    coefficients : ndarray
        Folded coefficients ``(p_0, p_k for k in Omega^+)``.
    """

    support: SupportSet = field(repr=False)
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != ((len(self.support) + 1) // 2,):
            raise ValueError("wrong number of folded coefficients")
        object.__setattr__(self, "coefficients", c)

    @property
    def half(self) -> np.ndarray:
        """The representatives ``0, Omega^+`` in coefficient order."""
        z = len(self.support) // 2
        return self.support.points[z:]

    @classmethod
    def from_full(cls, support: SupportSet, full, atol: float = 1e-12):
        full = np.asarray(full, dtype=float)
        if np.max(np.abs(full - full[::-1]), initial=0) > atol * max(1.0, np.abs(full).max()):
            raise ValueError("coefficients are not symmetric")
        return cls(support, full[len(full) // 2:].copy())

    def full_coefficients(self) -> np.ndarray:
        """Coefficients ``p_k`` for every point of the support, in its order."""
        _, idx = fold_map(self.support.points)
        return self.coefficients[idx]

    def __call__(self, xi):
        return evaluate(self, xi)

    def derivative(self, xi, beta) -> np.ndarray:
        """``d^beta p(xi)`` from the cosine form (real)."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        K = self.support.points.astype(float)
        factor = np.prod((2j * np.pi * K) ** np.asarray(beta), axis=1)
        terms = np.exp(2j * np.pi * xi @ K.T) * factor
        return (terms @ self.full_coefficients()).real

    def grid_values(self, size: int = 64) -> np.ndarray:
        """Values on the grid ``{j / size}^n`` by an inverse FFT.

        Coefficients are binned modulo ``size``; this is exact on grid points.
        """
        n = self.support.n
        bins = np.zeros((size,) * n, dtype=complex)
        np.add.at(bins, tuple((self.support.points % size).T), self.full_coefficients())
        return (np.fft.ifftn(bins) * size ** n).real


def evaluate(p: TrigPolynomial, xi) -> np.ndarray | float:
    """Cosine-form value ``p_0 + 2 sum_{k in Omega^+} p_k cos 2 pi (k, xi)``.

    ``xi`` may be a single point or an array of points (last axis = n).
    """
    xi = np.asarray(xi, dtype=float)
    n = p.support.n
    shape = xi.shape if n == 1 and (xi.ndim == 0 or xi.shape[-1] != 1) else xi.shape[:-1]
    X = xi.reshape(-1, n)
    H = p.half[1:].astype(float)
    val = p.coefficients[0] + 2.0 * np.cos(2 * np.pi * X @ H.T) @ p.coefficients[1:]
    return float(val[0]) if shape == () else val.reshape(shape)


# ------------------------------------------------------------ constraints ---

def _rational(x) -> Fraction:
    if isinstance(x, bool):
        raise IrrationalConstraint("boolean is not a coordinate")
    if isinstance(x, (Integral, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, (float, np.floating)):
        xf = float(x)
        if math.isfinite(xf):
            f = Fraction(xf).limit_denominator(10 ** 6)
            if float(f) == xf:
                return f
    raise IrrationalConstraint(f"{x!r} is not a recognizable rational number")


def _vector(v) -> tuple:
    return tuple(_rational(x) for x in v)


def _lcm_den(values) -> int:
    return math.lcm(1, *(f.denominator for f in values))


def _exact_rank(rows) -> int:
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / rows[rank][col]
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


@dataclass(frozen=True)
class ZeroConstraint:
    """Zero of a given order on a rational point or rational affine subspace.

    The zero set is ``{base + sum_i tau_i u_i}``; with no directions it is
    the single point ``base``.  A zero of order ``t`` means every derivative
    of order below ``t`` vanishes there.
    """

    base: tuple
    directions: tuple = ()
    order: int = 2

    def __post_init__(self):
        base = _vector(self.base)
        dirs = tuple(_vector(u) for u in self.directions)
        if any(len(u) != len(base) for u in dirs):
            raise ValueError("directions must have the dimension of the base point")
        if dirs and _exact_rank(dirs) < len(dirs):
            raise ValueError("directions are linearly dependent")
        if int(self.order) != self.order or self.order < 2 or self.order % 2:
            raise ValueError("order must be a positive even integer")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "order", int(self.order))

    @classmethod
    def point(cls, z, order: int) -> "ZeroConstraint":
        return cls(tuple(z), (), order)

    @classmethod
    def subspace(cls, base, directions, order: int) -> "ZeroConstraint":
        return cls(tuple(base), tuple(tuple(u) for u in directions), order)

    @classmethod
    def origin(cls, n: int, k: int) -> "ZeroConstraint":
        """The constraint defining ``P^(k)``: zero of order ``2(k+1)`` at 0."""
        return cls.point((0,) * n, 2 * (k + 1))

    @property
    def kind(self) -> str:
        return "subspace" if self.directions else "point"

    @property
    def n(self) -> int:
        return len(self.base)

    def sample(self, count: int, rng, scale: float = 1.0) -> np.ndarray:
        """Random points of the zero set."""
        z = np.array([float(x) for x in self.base])
        if not self.directions:
            return np.tile(z, (count, 1))
        U = np.array([[float(x) for x in u] for u in self.directions])
        return z + rng.uniform(-scale, scale, size=(count, len(U))) @ U

    def to_json(self):
        frac = lambda f: [f.numerator, f.denominator]
        out = {"kind": self.kind, "base": [frac(f) for f in self.base], "order": self.order}
        if self.directions:
            out["directions"] = [[frac(f) for f in u] for u in self.directions]
        return out

    @classmethod
    def from_json(cls, data) -> "ZeroConstraint":
        if "point" in data:
            return cls.point(data["point"], data["order"])
        return cls(tuple(data["base"]), tuple(tuple(u) for u in data.get("directions", ())),
                   data["order"])


def multi_indices(n: int, max_degree: int):
    """All multi-indices of ``n`` variables, graded by total degree."""
    out = []
    def rec(prefix, left, remaining):
        if remaining == 1:
            out.append(prefix + (left,))
            return
        for a in range(left, -1, -1):
            rec(prefix + (a,), left - a, remaining - 1)
    for d in range(max_degree + 1):
        if n == 0:
            if d == 0:
                out.append(())
            continue
        rec((), d, n)
    return out


def _arnoldi_basis(Y: np.ndarray, max_degree: int, parity: bool) -> np.ndarray:
    """Orthonormal basis of polynomials of degree <= max_degree on the rows of Y.

    Columns are produced in graded order by multiplying a previous column by
    one coordinate and orthogonalizing (Vandermonde with Arnoldi).  The span
    equals that of the monomials evaluated on ``Y``.  With ``parity=True``
    the point set is symmetric with ``Y[::-1] = -Y`` and every column is made
    exactly even or odd.
    """
    N, d = Y.shape
    scale = np.abs(Y).max() if Y.size and np.abs(Y).max() > 0 else 1.0
    Y = Y / scale
    cols: dict[tuple, np.ndarray] = {}
    basis = []
    for beta in multi_indices(d, max_degree):
        if sum(beta) == 0:
            v = np.ones(N)
        else:
            v = None
            for j in range(d - 1, -1, -1):
                if beta[j] == 0:
                    continue
                parent = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
                if parent in cols:
                    v = Y[:, j] * cols[parent]
                    break
            if v is None:
                continue
        before = np.linalg.norm(v)
        if basis:
            B = np.array(basis).T
            for _ in range(2):
                v = v - B @ (B.T @ v)
        if parity:
            s = -1.0 if sum(beta) % 2 else 1.0
            v = 0.5 * (v + s * v[::-1])
        nv = np.linalg.norm(v)
        if nv <= 1e-10 * before:
            continue
        v = v / nv
        cols[beta] = v
        basis.append(v)
    return np.array(basis).reshape(-1, N).T


def _monomial_basis(Y: np.ndarray, max_degree: int) -> np.ndarray:
    betas = multi_indices(Y.shape[1], max_degree)
    return np.stack([np.prod(Y ** np.array(b), axis=1) for b in betas], axis=1)


def constraint_rows(omega, c: ZeroConstraint, symmetric: bool = True,
                    basis: str = "arnoldi") -> np.ndarray:
    """Real linear rows whose null space is the set of polynomials obeying ``c``.

    Parameters
    ----------
    omega : SupportSet
    c : ZeroConstraint
    symmetric : bool
        Rows act on folded coefficients when true, on the full real
        coefficient vector indexed by ``omega`` otherwise.
    basis : {"arnoldi", "monomial"}
        Polynomial basis for the derivative factors.  Both give the same row
        span; the orthogonalized one stays well conditioned at high order.

    Returns
    -------
    ndarray, shape (r, dim)
        Unit-norm rows; rows that vanish identically (odd derivatives at a
        symmetric point, for instance) are dropped.

    Notes
    -----
    Along ``base + sum tau_i u_i`` the polynomial becomes a sum of
    exponentials in ``tau`` with frequencies ``((k, u_1), ..., (k, u_d))``.
    Points ``k`` sharing a frequency tuple form a group; for every group and
    every transverse multi-index ``beta`` of order below ``c.order`` the
    weighted sum ``sum_{k in group} p_k (W^T k)^beta exp(2 pi i (k, base))``
    must vanish, ``W`` spanning the orthogonal complement of the directions.
    """
    K = _points(omega)
    N, n = K.shape
    if c.n != n:
        raise ValueError("constraint dimension does not match the support")
    base = c.base
    Lb = _lcm_den(base)
    bint = np.array([int(f * Lb) for f in base], dtype=np.int64)
    phase_num = (K @ bint) % Lb
    phase = np.exp(2j * np.pi * phase_num / Lb)

    if c.directions:
        Lu = _lcm_den([f for u in c.directions for f in u])
        Uint = np.array([[int(f * Lu) for f in u] for u in c.directions], dtype=np.int64)
        _, group = np.unique(K @ Uint.T, axis=0, return_inverse=True)
        group = group.ravel()
        Uf = Uint.astype(float)
        _, s, Vt = np.linalg.svd(Uf, full_matrices=True)
        W = Vt[len(c.directions):].T
    else:
        group = np.zeros(N, dtype=np.int64)
        W = np.eye(n)
    Y = K.astype(float) @ W
    if basis == "arnoldi":
        P = _arnoldi_basis(Y, c.order - 1, parity=True)
    elif basis == "monomial":
        P = _monomial_basis(Y, c.order - 1)
    else:
        raise ValueError(f"unknown basis {basis!r}")

    ngroups = int(group.max()) + 1 if N else 0
    rows = []
    for g in range(ngroups):
        sel = group == g
        block = np.zeros((P.shape[1], N), dtype=complex)
        block[:, sel] = (P[sel] * phase[sel, None]).T
        rows.append(block)
    R = np.concatenate(rows, axis=0) if rows else np.zeros((0, N), dtype=complex)
    if symmetric:
        _, idx = fold_map(K)
        F = np.zeros((N, (N + 1) // 2))
        F[np.arange(N), idx] = 1.0
        R = R @ F
    R = np.concatenate([R.real, R.imag], axis=0)
    norms = np.linalg.norm(R, axis=1)
    if norms.size == 0 or norms.max() == 0:
        return np.zeros((0, R.shape[1]))
    keep = norms > ROW_DROP_RTOL * norms.max()
    return R[keep] / norms[keep, None]


@dataclass(frozen=True)
class FaceBasis:
    """Orthonormal basis (columns) of the subspace cut out by constraints."""

    basis: np.ndarray = field(repr=False)
    constraints: tuple
    support: SupportSet = field(repr=False)
    symmetric: bool = True

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def polynomial(self, x) -> TrigPolynomial:
        """Polynomial with face coordinates ``x`` (symmetric faces only)."""
        if not self.symmetric:
            raise ValueError("only folded faces produce TrigPolynomial values")
        return TrigPolynomial(self.support, self.basis @ np.asarray(x, dtype=float))


def face_basis(omega, constraints=(), symmetric: bool = True,
               rtol: float = NULLITY_RTOL, basis: str = "arnoldi") -> FaceBasis:
    """Null space of all constraint rows, by SVD with relative threshold ``rtol``.

    With no constraints the result is the whole space, of dimension
    ``(1 + |Omega|) / 2`` when folded.
    """
    constraints = tuple(constraints)
    K = _points(omega)
    dim = (len(K) + 1) // 2 if symmetric else len(K)
    rows = [constraint_rows(omega, c, symmetric, basis) for c in constraints]
    rows = [r for r in rows if len(r)]
    if not rows:
        N = np.eye(dim)
    else:
        N = null_space(np.concatenate(rows, axis=0), rcond=rtol)
    support = omega if isinstance(omega, SupportSet) else SupportSet(K)
    return FaceBasis(N, constraints, support, symmetric)
