"""
Transition operator on P_Omega, invariant faces, spectral radii and
L2-regularity reports.

With the normalized mask ``c^ = c / m`` and its autocorrelation
``a_n = sum_j c^_{j+n} c^_j`` the operator acts on coefficients by

    (T p)_k = m * sum_j a_{Mk - j} p_j,        k, j in Omega,

which is the coefficient form of
``T p(xi) = sum_{d* in D*} a(M^{-T}(xi + d*)) p(M^{-T}(xi + d*))``.
The Hoelder exponent of the refinable function in L2 is read off from the
spectral radii of T restricted to the subspaces ``P^(k)`` of polynomials with
a zero of order ``2(k+1)`` at the origin, or from user-supplied faces
attached to the spectral subspaces of M.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .attractor import SupportSet, j0_image, omega
from .errors import NoConvergence, NotInvariant, PreconditionError, SupportEscape
from .lattice import as_dilation, canonical_digits, rational_invariant_check, spectral_moduli
from .mask import Mask
from .trigpoly import FaceBasis, TrigPolynomial, ZeroConstraint, face_basis, fold_map, multi_indices

__all__ = [
    "Autocorrelation", "TransitionMatrix", "SpectralResult", "RegularityRow",
    "RegularityReport", "Face", "SubspaceRow", "PerSubspaceReport",
    "autocorrelation", "build_transition", "digit_sum_image", "sum_rules_order",
    "coset_sums", "restrict", "spectral_radius", "regularity",
    "regularity_per_subspace", "coordinate_faces", "eigenvalue_one",
]

RESIDUAL_RTOL = 1e-8
SUM_RULES_RTOL = 1e-9
KMAX_TOL = 1e-9


def _fmt(x):
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.12g}")


# --------------------------------------------------------- autocorrelation ---

@dataclass(frozen=True)
class Autocorrelation:
    """Coefficients ``a_n`` of ``|c^(xi)|^2``, indexed by ``Q - Q``."""

    coefficients: dict

    @property
    def n(self) -> int:
        return len(next(iter(self.coefficients)))

    @property
    def support(self) -> np.ndarray:
        return np.array(list(self.coefficients), dtype=np.int64).reshape(-1, self.n)

    @property
    def values(self) -> np.ndarray:
        return np.array([float(v) for v in self.coefficients.values()])

    def __getitem__(self, k):
        return self.coefficients.get(tuple(k), 0)

    def symbol(self, xi) -> np.ndarray:
        """``a(xi)`` (real, nonnegative up to rounding)."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        return np.cos(2 * np.pi * xi @ self.support.T.astype(float)) @ self.values


def autocorrelation(mask: Mask) -> Autocorrelation:
    """Autocorrelation of the normalized mask ``c / sum(c)``.

    Exact (``Fraction``) when the mask is.
    """
    total = mask.total
    chat = {k: v / total for k, v in mask.coefficients.items()}
    out: dict = {}
    for i, ci in chat.items():
        for j, cj in chat.items():
            key = tuple(a - b for a, b in zip(i, j))
            out[key] = out.get(key, 0) + ci * cj
    return Autocorrelation(dict(sorted((k, v) for k, v in out.items() if v != 0)))


# -------------------------------------------------------------- operator ---

@dataclass(frozen=True)
class TransitionMatrix:
    """Dense matrix of T on folded (or full) coefficient vectors."""

    matrix: np.ndarray = field(repr=False)
    M: object = field(repr=False)
    mask: Mask = field(repr=False)
    support: SupportSet = field(repr=False)
    autocorr: Autocorrelation = field(repr=False)
    symmetric: bool = True

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, p: TrigPolynomial) -> TrigPolynomial:
        if not self.symmetric:
            raise ValueError("apply needs the folded operator")
        return TrigPolynomial(self.support, self.matrix @ p.coefficients)


def _index_lookup(points: np.ndarray):
    lo = points.min(axis=0)
    shape = tuple(points.max(axis=0) - lo + 1)
    grid = np.full(shape, -1, dtype=np.int64)
    grid[tuple((points - lo).T)] = np.arange(len(points))

    def find(x):
        idx = x - lo
        inside = np.all((idx >= 0) & (idx < np.array(shape)), axis=1)
        out = np.full(len(x), -1, dtype=np.int64)
        out[inside] = grid[tuple(idx[inside].T)]
        return out

    return find


def build_transition(M, mask: Mask, omega_set: SupportSet | None = None,
                     symmetric: bool = True) -> TransitionMatrix:
    """Matrix of the transition operator on ``P_Omega``.

    Parameters
    ----------
    M : DilationMatrix or array_like
    mask : Mask
    omega_set : SupportSet, optional
        Defaults to ``omega(M, supp mask)``.
    symmetric : bool
        Folded coordinates (default) or the full real coefficient space.

    Raises
    ------
    SupportEscape
        When some ``k`` outside Omega would receive a nonzero coefficient.
    """
    M = as_dilation(M)
    if omega_set is None:
        omega_set = omega(M, mask.support)
    ac = autocorrelation(mask)
    K = omega_set.points
    N = len(K)
    escaped = {tuple(x) for x in j0_image(M, K, ac.support).tolist()} - omega_set.as_set()
    if escaped:
        raise SupportEscape(f"{len(escaped)} image indices outside Omega, e.g. {min(escaped)}")
    find = _index_lookup(K)
    MK = K @ M.array.T
    T = np.zeros((N, N))
    rows = np.arange(N)
    for nvec, a in zip(ac.support, ac.values):
        cols = find(MK - nvec)
        ok = cols >= 0
        np.add.at(T, (rows[ok], cols[ok]), M.m * a)
    if symmetric:
        z, idx = fold_map(K)
        F = np.zeros((N, N - z))
        F[rows, idx] = 1.0
        T = T[z:] @ F
    return TransitionMatrix(T, M, mask, omega_set, ac, symmetric)


def digit_sum_image(M, mask: Mask, p: TrigPolynomial, xi) -> np.ndarray:
    """``sum_{d*} a(M^{-T}(xi + d*)) p(M^{-T}(xi + d*))`` evaluated directly.

    ``a = |c(xi) / m|^2`` is computed from the mask symbol, so this is an
    independent check of :func:`build_transition`.
    """
    M = as_dilation(M)
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    Dstar = canonical_digits(M, transpose=True).array.astype(float)
    MinvT = M.inverse_transpose
    total = float(mask.total)
    out = np.zeros(len(xi))
    for d in Dstar:
        eta = (xi + d) @ MinvT.T
        a = np.abs(mask.symbol(eta) / total) ** 2
        out += a * np.atleast_1d(p(eta))
    return out


def eigenvalue_one(T: TransitionMatrix, grid: int = 64, tol: float = 1e-8):
    """Stability heuristic: does T have eigenvalue 1 with a positive eigenpolynomial?

    Returns ``(has_one, positive)``.
    """
    w, V = scipy.linalg.eig(T.matrix)
    i = int(np.argmin(np.abs(w - 1)))
    if abs(w[i] - 1) > tol:
        return False, False
    v = np.real(V[:, i])
    vals = TrigPolynomial(T.support, v).grid_values(grid)
    if vals.max() < -vals.min():
        vals = -vals
    return True, bool(vals.min() > 0)


# ------------------------------------------------------------- sum rules ---

def coset_sums(mask: Mask, M) -> dict:
    """``sum_j c_{Mj - d}`` for every canonical digit ``d`` (over ``c / (sum c / m)``)."""
    M = as_dilation(M)
    D = canonical_digits(M).array
    adj = M.adjugate
    scale = mask.total / M.m
    sums = {tuple(d): 0 for d in D}
    for k, v in mask.coefficients.items():
        k = np.array(k)
        for d in D:
            if np.all((adj @ (k - d)) % M.det == 0):
                sums[tuple(d)] += v / scale
                break
    return sums


def _sum_rule_defect(K, chat, v, beta):
    factor = np.prod((-2j * np.pi * K) ** np.array(beta), axis=1)
    value = np.sum(chat * factor * np.exp(-2j * np.pi * K @ v))
    norm = np.linalg.norm(K, axis=1)
    scale = np.sum(np.abs(chat) * (2 * np.pi * norm) ** sum(beta))
    return abs(value), scale


def sum_rules_order(mask: Mask, M, max_order: int | None = None,
                    rtol: float = SUM_RULES_RTOL) -> int:
    """Largest ``l`` such that the mask satisfies the sum rules of order ``l``.

    The normalized symbol and its derivatives up to order ``l`` vanish at
    ``M^{-T} d*`` for every nonzero digit ``d*`` of ``M^T``.  Returns -1 when
    even order 0 fails.  Order 0 is cross-checked against the coset sums
    ``sum_j c_{Mj - d} = 1``.
    """
    M = as_dilation(M)
    K = mask.support.astype(float)
    chat = mask.values / float(mask.total)
    Dstar = canonical_digits(M, transpose=True).array[1:].astype(float)
    V = Dstar @ M.inverse_transpose.T
    cap = len(mask) if max_order is None else max_order
    order = -1
    for ell in range(cap + 1):
        ok = True
        for beta in multi_indices(M.n, ell):
            if sum(beta) != ell:
                continue
            for v in V:
                val, scale = _sum_rule_defect(K, chat, v, beta)
                if val > rtol * scale:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            break
        order = ell
    coset_ok = all(abs(float(s) - 1) <= 1e-9 for s in coset_sums(mask, M).values())
    if coset_ok != (order >= 0):
        warnings.warn("order-0 sum rules: symbol test and coset sums disagree",
                      RuntimeWarning, stacklevel=2)
    return order


# ------------------------------------------------------ faces and spectra ---

def restrict(T, F: FaceBasis, rtol: float = RESIDUAL_RTOL) -> np.ndarray:
    """Matrix ``R = N^T T N`` of T on the span of the orthonormal columns ``N``.

    Raises
    ------
    NotInvariant
        When ``|T N - N R| > rtol |T N|`` (Frobenius norms).
    """
    A = T.matrix if isinstance(T, TransitionMatrix) else np.asarray(T, dtype=float)
    N = F.basis
    if N.shape[1] == 0:
        raise PreconditionError("face has dimension 0")
    if N.shape[0] != A.shape[0]:
        raise ValueError("face basis and operator have different coordinates")
    TN = A @ N
    R = N.T @ TN
    res = np.linalg.norm(TN - N @ R)
    ref = np.linalg.norm(TN)
    if res > rtol * ref:
        raise NotInvariant(f"invariance residual {res / ref:.3g} exceeds {rtol:g}")
    return R


@dataclass(frozen=True)
class SpectralResult:
    """Spectral radius together with the leading eigenpair when it is real and simple."""

    rho: float
    eigenvalues: np.ndarray = field(repr=False)
    vector: np.ndarray | None = field(default=None, repr=False)
    nonnegative: bool | None = None

    def __float__(self):
        return self.rho


def spectral_radius(R, face: FaceBasis | None = None, grid: int = 64) -> SpectralResult:
    """Largest eigenvalue modulus of a dense real matrix (LAPACK ``geev``).

    When the leading eigenvalue is real and simple its eigenvector is kept.
    If ``face`` is given (folded coordinates) the eigenvector is mapped to a
    polynomial and checked for nonnegativity on a ``grid**n`` mesh; a
    violation beyond ``-1e-8`` times the maximum only issues a warning.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if not np.all(np.isfinite(R)):
        raise ValueError("matrix has non-finite entries")
    try:
        w, V = scipy.linalg.eig(R)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    mods = np.abs(w)
    i = int(np.argmax(mods))
    rho = float(mods[i])
    lead = w[i]
    others = np.delete(w, i)
    simple = not np.any(np.abs(others - lead) <= 1e-8 * max(rho, 1e-300))
    if abs(lead.imag) > 1e-10 * max(rho, 1e-300) or not simple:
        return SpectralResult(rho, w)
    v = np.real(V[:, i])
    nonneg = None
    if face is not None and face.symmetric:
        vals = face.polynomial(v).grid_values(grid)
        if vals.max() < -vals.min():
            v, vals = -v, -vals
        nonneg = bool(vals.min() >= -1e-8 * vals.max())
        if not nonneg:
            warnings.warn("leading eigenpolynomial is not nonnegative on the grid",
                          RuntimeWarning, stacklevel=2)
    return SpectralResult(rho, w, v, nonneg)


# ------------------------------------------------------------- regularity ---

def _half_log(rho: float, r: float) -> float:
    if rho <= 0:
        return math.inf
    return -0.5 * math.log(rho) / math.log(r)


@dataclass(frozen=True)
class RegularityRow:
    k: int
    dim: int
    rho: float
    half_log: float

    def to_json(self):
        return {"k": self.k, "dim": self.dim, "rho": _fmt(self.rho),
                "alpha_candidate": _fmt(self.half_log)}


@dataclass(frozen=True)
class Face:
    """Zero constraints attached to the spectral subspace ``J_s`` of modulus ``r``."""

    label: str
    r: float
    constraints: tuple = ()

    def to_json(self):
        return {"label": self.label, "r_s": _fmt(self.r),
                "constraints": [c.to_json() for c in self.constraints]}

    @classmethod
    def from_json(cls, data):
        return cls(str(data["label"]), float(data["r_s"]),
                   tuple(ZeroConstraint.from_json(c) for c in data.get("constraints", ())))


@dataclass(frozen=True)
class SubspaceRow:
    label: str
    r: float
    dim: int
    rho: float
    alpha: float

    def to_json(self):
        return {"s": self.label, "r_s": _fmt(self.r), "dim": self.dim,
                "rho": _fmt(self.rho), "alpha": _fmt(self.alpha)}


@dataclass(frozen=True)
class PerSubspaceReport:
    """Face table at order ``k``; ``face_k`` holds per-face orders when they differ."""

    k: int
    rows: tuple
    alpha: float | None
    face_k: tuple = ()

    def to_json(self):
        out = {"k": self.k, "rows": [r.to_json() for r in self.rows],
               "alpha": _fmt(self.alpha)}
        if self.face_k:
            out["face_k"] = list(self.face_k)
        return out


@dataclass(frozen=True)
class RegularityReport:
    """Outcome of :func:`regularity`.

    ``alpha`` is ``None`` when no ``k`` passes the test ``half_log_k > k``.
    """

    sum_rules_order: int
    table: tuple
    k_max: int
    alpha: float | None
    flags: tuple
    boundary: tuple = ()
    per_subspace: PerSubspaceReport | None = None
    advisory: str = ""

    def to_json(self):
        out = {"sum_rules_order": self.sum_rules_order,
               "table": [row.to_json() for row in self.table],
               "k_max": self.k_max,
               "alpha": _fmt(self.alpha),
               "flags": list(self.flags),
               "per_subspace": None if self.per_subspace is None else self.per_subspace.to_json()}
        if self.boundary:
            out["boundary"] = list(self.boundary)
        if self.advisory:
            out["advisory"] = self.advisory
        return out


def regularity(M, mask: Mask, max_k: int | None = None, omega_set: SupportSet | None = None,
               rtol: float | None = None, T: TransitionMatrix | None = None,
               faces=None) -> RegularityReport:
    """Hoelder exponent in L2.

    For ``k = 0 .. min(l, max_k)``, with ``l`` the sum-rules order, computes
    ``rho_k`` on ``P^(k)`` and ``half_log_k = 1/2 log_{1/r} rho_k`` with ``r``
    the spectral radius of M.  ``k_max`` is the largest ``k`` with
    ``half_log_k > k`` (strictly, by more than 1e-9) and
    ``alpha = half_log_{k_max}``.

    Parameters
    ----------
    faces : callable or sequence of Face, optional
        Either ``faces(k) -> [Face, ...]`` or a fixed list.  When given, each
        face ``s`` gets its own ``k_s`` (largest ``k`` with
        ``alpha_{k,s} > k``), ``alpha`` becomes ``min_s alpha_{k_s,s}`` and
        the flag is ``FaceSupplied``.  The generic table is still reported.

    Notes
    -----
    The generic formula is certified when the characteristic polynomial of M
    is irreducible over Q (flag ``GenericGuaranteed``).  Otherwise the flag
    is ``Unverified`` and a per-subspace analysis is advised.
    """
    M = as_dilation(M)
    ell = sum_rules_order(mask, M)
    if T is None:
        T = build_transition(M, mask, omega_set)
    r = M.spectral_radius
    top = ell if max_k is None else min(ell, max_k)
    rows = []
    kw = {} if rtol is None else {"rtol": rtol}
    for k in range(top + 1):
        F = face_basis(T.support, [ZeroConstraint.origin(M.n, k)], **kw)
        rho = spectral_radius(restrict(T, F)).rho if F.dim else 0.0
        rows.append(RegularityRow(k, F.dim, rho, _half_log(rho, r)))
    k_max, boundary = _select_k(rows)
    alpha = rows[k_max].half_log if k_max >= 0 else None
    verdict = rational_invariant_check(M)
    if verdict.kind == "GenericGuaranteed":
        flags, advisory = ("GenericGuaranteed",), ""
    else:
        flags = ("Unverified",)
        advisory = ("characteristic polynomial reducible or unchecked; "
                    "run regularity_per_subspace with faces for each spectral subspace")
    per = None
    if faces is not None:
        factory = faces if callable(faces) else (lambda k: faces)
        reports = [regularity_per_subspace(M, mask, factory(k), k, T=T, rtol=rtol)
                   for k in range(top + 1)]
        per = _combine_faces(reports)
        alpha = per.alpha
        flags = flags + ("FaceSupplied",)
        advisory = ""
    return RegularityReport(ell, tuple(rows), k_max, alpha, flags, tuple(boundary),
                            per_subspace=per, advisory=advisory)


def _combine_faces(reports) -> PerSubspaceReport:
    """Pick, for every face label, the largest ``k`` with ``alpha_{k,s} > k``."""
    chosen = {}
    for rep in reports:
        for row in rep.rows:
            if row.alpha > rep.k + KMAX_TOL:
                chosen[row.label] = (rep.k, row)
    if not chosen:
        return PerSubspaceReport(-1, (), None)
    rows = tuple(row for _, row in chosen.values())
    ks = {k for k, _ in chosen.values()}
    k = ks.pop() if len(ks) == 1 else max(ks)
    return PerSubspaceReport(k, rows, min(row.alpha for row in rows),
                             tuple(kk for kk, _ in chosen.values()))


def _select_k(rows):
    k_max, boundary = -1, []
    for row in rows:
        if abs(row.half_log - row.k) <= KMAX_TOL:
            boundary.append(row.k)
        elif row.half_log > row.k:
            k_max = row.k
    return k_max, boundary


def regularity_per_subspace(M, mask: Mask, faces, k: int,
                            omega_set: SupportSet | None = None,
                            rtol: float | None = None,
                            T: TransitionMatrix | None = None) -> PerSubspaceReport:
    """Per-subspace exponents ``alpha_{k,s} = 1/2 log_{1/r_s} rho_{k,s}``.

    Every face gets the origin constraint of ``P^(k)`` in addition to its
    own constraints.  ``alpha`` is the minimum over faces.
    """
    M = as_dilation(M)
    if T is None:
        T = build_transition(M, mask, omega_set)
    kw = {} if rtol is None else {"rtol": rtol}
    rows = []
    for face in faces:
        cons = (ZeroConstraint.origin(M.n, k),) + tuple(face.constraints)
        F = face_basis(T.support, cons, **kw)
        rho = spectral_radius(restrict(T, F)).rho if F.dim else 0.0
        rows.append(SubspaceRow(face.label, face.r, F.dim, rho, _half_log(rho, face.r)))
    alpha = min(row.alpha for row in rows) if rows else None
    return PerSubspaceReport(k, tuple(rows), alpha)


def coordinate_faces(M, k: int) -> list[Face]:
    """Faces for a block-diagonal M with one eigenvalue modulus per block.

    For direct-product masks the zero set attached to ``J_s`` (spanned by the
    coordinate axes of the blocks with modulus ``r_s``) is the coordinate
    subspace ``J_s^perp``; each face asks for a zero of order ``2(k+1)``
    there.
    """
    M = as_dilation(M)
    A = M.array
    n = M.n
    parent = list(range(n))

    def root(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if A[i, j] or A[j, i]:
                parent[root(i)] = root(j)
    blocks: dict = {}
    for i in range(n):
        blocks.setdefault(root(i), []).append(i)
    st = spectral_moduli(M)
    modulus_of = {}
    for idx in blocks.values():
        sub = A[np.ix_(idx, idx)].astype(float)
        mods = np.abs(np.linalg.eigvals(sub))
        if np.ptp(mods) > 1e-6 * mods.max():
            raise ValueError("a coordinate block carries several eigenvalue moduli")
        s = int(np.argmin([abs(r - mods[0]) for r in st.moduli]))
        modulus_of.setdefault(s, []).extend(idx)
    faces = []
    for s in sorted(modulus_of):
        inside = set(modulus_of[s])
        dirs = [tuple(int(i == j) for j in range(n)) for i in range(n) if i not in inside]
        cons = (ZeroConstraint.subspace((0,) * n, dirs, 2 * (k + 1)),) if dirs else ()
        faces.append(Face(str(s + 1), st.moduli[s], cons))
    return faces
