"""
Integer dilation matrices, digit sets and their spectral data.

Everything that can be decided exactly (determinants, characteristic
polynomials, coset membership, factorisation over the rationals) is done in
integer / ``fractions.Fraction`` arithmetic.  Floating point only enters when
roots of the characteristic polynomial are needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import (AmbiguousClustering, InternalCountMismatch, NotExpanding,
                     SingularMatrix)

__all__ = [
    "DilationMatrix", "DigitSet", "SpectralStructure", "InvariantVerdict",
    "validate_dilation", "canonical_digits", "digits_valid",
    "spectral_moduli", "spectral_subspace", "rational_invariant_check",
    "charpoly", "squarefree_factors", "factor_rational",
]

EXPANSION_TOL = 1e-9
CLUSTER_TOL = 1e-6
AMBIGUITY_TOL = 1e-9


# ---------------------------------------------------------------------------
# exact integer helpers

def _det_int(rows):
    """Bareiss fraction-free determinant of an integer matrix."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _adjugate(rows):
    n = len(rows)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[rows[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            adj[j][i] = (-1) ** (i + j) * _det_int(minor)
    return adj


def _rref(rows):
    """Reduced row echelon form over the rationals; returns (R, pivots)."""
    a = [[Fraction(x) for x in r] for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def _nullspace_rational(rows, ncols):
    """Basis of the rational null space, scaled to primitive integer vectors."""
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    R, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(_primitive(v))
    return basis


def _primitive(v):
    from math import gcd, lcm
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


# ---------------------------------------------------------------------------
# polynomials over Q; coefficient lists with the highest degree first

def charpoly(rows):
    """Characteristic polynomial det(lambda I - A) of an integer matrix.

    Faddeev-LeVerrier recursion carried out in exact arithmetic.  Returns
    integer coefficients, highest degree first (numpy ``roots`` order).
    """
    n = len(rows)
    A = [[Fraction(x) for x in r] for r in rows]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    c_prev = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)]
              for i in range(n)]
        Mk = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)]
              for i in range(n)]
        AMk = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)]
               for i in range(n)]
        c_prev = -sum(AMk[i][i] for i in range(n)) / k
        coeffs.append(c_prev)
    return [int(c) for c in coeffs]


def _ptrim(p):
    p = list(p)
    while len(p) > 1 and p[0] == 0:
        p.pop(0)
    return p


def _pdivmod(a, b):
    a = [Fraction(x) for x in _ptrim(a)]
    b = [Fraction(x) for x in _ptrim(b)]
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = list(a)
    for i in range(len(q)):
        f = r[i] / b[0]
        q[i] = f
        for j in range(len(b)):
            r[i + j] -= f * b[j]
    rem = _ptrim(r[len(q):] or [Fraction(0)])
    return q, rem


def _monic(p):
    p = [Fraction(x) for x in _ptrim(p)]
    return [x / p[0] for x in p]


def _pgcd(a, b):
    a, b = _monic(a), _ptrim([Fraction(x) for x in b])
    while not (len(b) == 1 and b[0] == 0):
        _, r = _pdivmod(a, b)
        a, b = _monic(b), r
    return _monic(a)


def _pderiv(p):
    d = len(p) - 1
    return [c * (d - i) for i, c in enumerate(p[:-1])] or [Fraction(0)]


def squarefree_factors(p):
    """Yun's square-free decomposition over Q.

    Returns a list of ``(factor, multiplicity)`` with monic factors.
    """
    p = _monic(p)
    out = []
    if len(p) == 1:
        return out
    a = _pgcd(p, _pderiv(p))
    b, _ = _pdivmod(p, a)
    c, _ = _pdivmod(_pderiv(p), a)
    d = [x - y for x, y in zip(_pad(c, len(b)), _pad(_pderiv(b), len(b)))]
    i = 1
    while len(_ptrim(b)) > 1:
        a = _pgcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b, _ = _pdivmod(b, a)
        c, _ = _pdivmod(d, a)
        d = [x - y for x, y in zip(_pad(c, len(b)), _pad(_pderiv(b), len(b)))]
        i += 1
    return out


def _pad(p, length):
    p = list(p)
    return [Fraction(0)] * (length - len(p)) + p


def _divisors(n):
    n = abs(n)
    if n == 0:
        return [0]
    return [d for d in range(1, n + 1) if n % d == 0]


def _integer_roots(p):
    """Integer roots of a monic integer polynomial."""
    p = [int(x) for x in p]
    if p[-1] == 0:
        return [0]
    roots = []
    for d in _divisors(p[-1]):
        for cand in (d, -d):
            val = 0
            for c in p:
                val = val * cand + c
            if val == 0:
                roots.append(cand)
    return roots


def _quadratic_factor(p):
    """Monic integer quadratic factor of a monic integer polynomial, if any."""
    p = [int(x) for x in p]
    bound = 1 + max(abs(x) for x in p[1:])   # Cauchy root bound
    cands_c = set()
    for d in _divisors(p[-1]):
        cands_c.update((d, -d))
    for c in sorted(cands_c, key=abs):
        if abs(c) > bound * bound:
            continue
        for b in range(-2 * bound, 2 * bound + 1):
            q, r = _pdivmod(p, [1, b, c])
            if all(x == 0 for x in r) and all(x.denominator == 1 for x in q):
                return [1, b, c]
    return None


def factor_rational(p):
    """Factor a monic integer polynomial of degree <= 4 over Q.

    Returns ``[(factor, multiplicity), ...]`` with monic integer irreducible
    factors.  Degrees above four raise ``ValueError``.
    """
    out = []
    for f, mult in squarefree_factors(p):
        f = [int(x) for x in f]
        pending = [f]
        while pending:
            g = pending.pop()
            deg = len(g) - 1
            if deg > 4:
                raise ValueError("factorisation implemented for degree <= 4")
            if deg == 1:
                out.append((g, mult))
                continue
            roots = _integer_roots(g)
            if roots:
                lin = [1, -roots[0]]
                q, _ = _pdivmod(g, lin)
                out.append((lin, mult))
                if len(q) > 1:
                    pending.append([int(x) for x in q])
                continue
            if deg == 4:
                quad = _quadratic_factor(g)
                if quad is not None:
                    q, _ = _pdivmod(g, quad)
                    pending.extend([quad, [int(x) for x in q]])
                    continue
            out.append((g, mult))
    return sorted(out, key=lambda t: (len(t[0]), t[0]))


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class DilationMatrix:
    """Integer expanding matrix ``M`` together with its derived data.

    Build instances through :func:`validate_dilation`; the constructor does
    no checking of its own.
    """

    entries: tuple
    det: int
    eigenvalues: np.ndarray = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return abs(self.det)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @cached_property
    def adjugate(self) -> np.ndarray:
        """Integer matrix with ``M @ adj = det * I``."""
        return np.array(_adjugate(self.entries), dtype=np.int64)

    @cached_property
    def inverse(self) -> np.ndarray:
        return self.adjugate / self.det

    @cached_property
    def inverse_transpose(self) -> np.ndarray:
        return self.inverse.T

    @property
    def T(self) -> "DilationMatrix":
        return DilationMatrix(tuple(zip(*self.entries)), self.det,
                              self.eigenvalues)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def to_json(self):
        return [list(r) for r in self.entries]


def _eigenvalues_from_charpoly(rows):
    vals = []
    for f, mult in squarefree_factors(charpoly(rows)):
        r = np.roots(np.array([float(x) for x in f]))
        vals.extend(list(r) * mult)
    return np.sort_complex(np.array(vals, dtype=complex))


def validate_dilation(entries) -> DilationMatrix:
    """Check that ``entries`` is an integer expanding matrix.

    Eigenvalues are the roots of the exact integer characteristic
    polynomial, taken factor by factor from its square-free decomposition so
    that repeated eigenvalues come out exactly repeated.

    Raises
    ------
    SingularMatrix
        ``det M == 0``.
    NotExpanding
        Some eigenvalue has modulus ``<= 1 + 1e-9``.
    """
    arr = np.asarray(entries)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("dilation matrix must be square")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("dilation matrix must have integer entries")
    rows = tuple(tuple(int(x) for x in r) for r in arr.tolist())
    det = _det_int(rows)
    if det == 0:
        raise SingularMatrix("det M = 0")
    eig = _eigenvalues_from_charpoly(rows)
    if np.any(np.abs(eig) <= 1 + EXPANSION_TOL):
        raise NotExpanding(f"eigenvalue moduli {np.abs(eig)} not all > 1")
    return DilationMatrix(rows, det, eig)


def as_dilation(M) -> DilationMatrix:
    return M if isinstance(M, DilationMatrix) else validate_dilation(M)


@dataclass(frozen=True)
class DigitSet:
    """Coset representatives of Z^n / M Z^n (or of Z^n / M^T Z^n)."""

    digits: tuple
    transpose: bool = False

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.digits, dtype=np.int64).reshape(len(self.digits), -1)

    def to_json(self):
        return [list(d) for d in self.digits]


def canonical_digits(M, transpose: bool = False) -> DigitSet:
    """Integer points of the half-open parallelepiped ``M [0,1)^n``.

    Membership is decided exactly: ``M^{-1} k = adj(M) k / det``.  With
    ``transpose=True`` the same is done for ``M^T``.  The zero digit is
    listed first, the rest lexicographically.
    """
    M = as_dilation(M)
    A = M.array.T if transpose else M.array
    adj = np.array(_adjugate(A.tolist()), dtype=np.int64)
    det = M.det
    lo = np.minimum(A, 0).sum(axis=1)
    hi = np.maximum(A, 0).sum(axis=1)
    axes = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
    pts = np.array(list(itertools.product(*axes)), dtype=np.int64)
    y = pts @ adj.T
    if det > 0:
        ok = np.all((y >= 0) & (y < det), axis=1)
    else:
        ok = np.all((y <= 0) & (y > det), axis=1)
    found = sorted(map(tuple, pts[ok].tolist()), key=lambda d: (any(d), d))
    if len(found) != M.m:
        raise InternalCountMismatch(f"found {len(found)} digits, expected {M.m}")
    return DigitSet(tuple(found), transpose)


def digits_valid(M, D, transpose: bool | None = None) -> bool:
    """True iff the digits are pairwise distinct modulo ``M Z^n``."""
    M = as_dilation(M)
    if transpose is None:
        transpose = getattr(D, "transpose", False)
    A = M.array.T if transpose else M.array
    adj = np.array(_adjugate(A.tolist()), dtype=np.int64)
    d = np.array(list(D), dtype=np.int64).reshape(-1, M.n)
    if len(d) != M.m:
        return False
    for i, j in itertools.combinations(range(len(d)), 2):
        if np.all((adj @ (d[i] - d[j])) % M.det == 0):
            return False
    return True


@dataclass(frozen=True)
class SpectralStructure:
    moduli: tuple
    multiplicities: tuple
    clustering_tolerance: float

    @property
    def q(self) -> int:
        return len(self.moduli)

    def to_json(self):
        return {"moduli": list(self.moduli),
                "multiplicities": list(self.multiplicities),
                "clustering_tolerance": self.clustering_tolerance}


def spectral_moduli(M, tolerance: float | None = None) -> SpectralStructure:
    """Cluster the eigenvalue moduli of ``M`` into ``r_1 > ... > r_q``.

    With the default tolerance (1e-6 relative) a gap that falls between 1e-9
    and 1e-6 raises :class:`AmbiguousClustering`; passing ``tolerance``
    explicitly disables that check.
    """
    M = as_dilation(M)
    explicit = tolerance is not None
    tol = CLUSTER_TOL if tolerance is None else tolerance
    mods = np.sort(np.abs(M.eigenvalues))[::-1]
    clusters = [[mods[0]]]
    for x in mods[1:]:
        ref = clusters[-1][-1]
        gap = (ref - x) / ref
        if gap <= tol:
            if not explicit and gap > AMBIGUITY_TOL:
                raise AmbiguousClustering(
                    f"moduli {ref} and {x} differ by {gap:.3g} (relative)")
            clusters[-1].append(x)
        else:
            clusters.append([x])
    return SpectralStructure(tuple(float(np.mean(c)) for c in clusters),
                             tuple(len(c) for c in clusters), tol)


def spectral_subspace(M, s: int, structure: SpectralStructure | None = None):
    """Orthonormal real basis (columns) of the spectral subspace ``J_s``.

    ``s`` is 1-based as in ``r_1 > r_2 > ...``.  ``J_s`` is the kernel of
    the real polynomial prod (M - lambda I) over eigenvalues of modulus r_s.
    """
    M = as_dilation(M)
    st = structure or spectral_moduli(M)
    r = st.moduli[s - 1]
    lam = [x for x in M.eigenvalues
           if abs(abs(x) - r) <= max(st.clustering_tolerance, 1e-9) * r]
    coef = np.real(np.poly(lam))
    A = M.array.astype(float)
    G = np.zeros_like(A)
    for c in coef:
        G = G @ A + c * np.eye(M.n)
    u, sv, vt = np.linalg.svd(G)
    dim = len(lam)
    return vt[M.n - dim:].T


@dataclass(frozen=True)
class InvariantVerdict:
    """Outcome of :func:`rational_invariant_check`.

    ``kind`` is one of ``"GenericGuaranteed"``, ``"BlockTriangularizable"``
    or ``"Unknown"``.  For block-triangularizable matrices ``basis`` is a
    unimodular integer matrix ``P`` with ``P^{-1} M P`` upper block
    triangular, the first ``block`` columns spanning the invariant subspace.
    """

    kind: str
    factors: tuple = ()
    basis: np.ndarray | None = field(default=None, compare=False)
    block: int = 0
    note: str = ""

    def to_json(self):
        out = {"kind": self.kind,
               "factors": [[list(f), k] for f, k in self.factors],
               "note": self.note}
        if self.basis is not None:
            out["basis"] = self.basis.tolist()
            out["block"] = self.block
        return out


def _poly_of_matrix(coeffs, rows):
    n = len(rows)
    G = [[0] * n for _ in range(n)]
    for c in coeffs:
        G = [[sum(G[i][t] * rows[t][j] for t in range(n)) + (c if i == j else 0)
              for j in range(n)] for i in range(n)]
    return G


def _unimodular_completion(vectors, n):
    d = len(vectors)
    if d == 0 or d >= n:
        return None
    pool = [v for v in itertools.product((-1, 0, 1), repeat=n) if any(v)]
    pool.sort(key=lambda v: (sum(map(abs, v)), v))
    for extra in itertools.combinations(pool, n - d):
        cols = list(vectors) + [list(e) for e in extra]
        P = [[cols[j][i] for j in range(n)] for i in range(n)]
        if abs(_det_int(P)) == 1:
            return P
    return None


def rational_invariant_check(M) -> InvariantVerdict:
    """Look for a proper rational M-invariant subspace.

    The characteristic polynomial is factored over Q (rational-root test plus
    quadratic factor trial, enough for n <= 4).  An irreducible polynomial
    rules out any proper rational invariant subspace.  Otherwise an integer
    basis exhibiting the block upper-triangular form is searched for.
    """
    M = as_dilation(M)
    rows = [list(r) for r in M.entries]
    n = M.n
    if n > 4:
        return InvariantVerdict("Unknown", note="n > 4: factorisation path not implemented")
    cp = charpoly(rows)
    factors = tuple((tuple(f), k) for f, k in factor_rational(cp))
    if len(factors) == 1 and factors[0][1] == 1:
        return InvariantVerdict("GenericGuaranteed", factors,
                                note="characteristic polynomial irreducible over Q")
    for f, _ in factors:
        G = _poly_of_matrix(list(f), rows)
        kernel = _nullspace_rational(G, n)
        if len(kernel) == n and len(f) == 2:
            # M is scalar: every coordinate subspace is invariant
            kernel = kernel[:1]
        P = _unimodular_completion(kernel, n)
        if P is None:
            continue
        Pa = np.array(P, dtype=np.int64)
        B = np.array(_adjugate(P), dtype=np.int64) @ M.array @ Pa * _det_int(P)
        d = len(kernel)
        if np.all(B[d:, :d] == 0):
            return InvariantVerdict("BlockTriangularizable", factors, Pa, d,
                                    note=f"invariant subspace ker f(M), f = {list(f)}")
    return InvariantVerdict("Unknown", factors,
                            note="reducible characteristic polynomial; no unimodular block basis found")
