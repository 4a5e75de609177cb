"""
Slow, independent reference computations used as test oracles.

Nothing here calls the package's numerical kernels: sets are Python sets,
arithmetic is exact where it can be, and formulas are spelled out directly.
"""

import cmath
import itertools
import math
from fractions import Fraction


def adjugate_2x2_or_3x3(M):
    n = len(M)
    def minor(i, j):
        return [[M[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
    def det(A):
        if len(A) == 1:
            return A[0][0]
        return sum((-1) ** j * A[0][j] * det(minor_of(A, 0, j)) for j in range(len(A)))
    def minor_of(A, i, j):
        return [[A[r][c] for c in range(len(A)) if c != j] for r in range(len(A)) if r != i]
    d = det(M)
    adj = [[(-1) ** (i + j) * det(minor(j, i)) if n > 1 else 1 for j in range(n)] for i in range(n)]
    return adj, d


def omega_gfp(M, Q, half_width):
    """Greatest set inside the box with: k in set iff M k + q' in set for some q' in Q - Q.

    Plain Python sets; the box must contain Y - Y.
    """
    n = len(M)
    qd = {tuple(a - b for a, b in zip(s, t)) for s in Q for t in Q}
    cur = set(itertools.product(range(-half_width, half_width + 1), repeat=n))
    while True:
        keep = set()
        for k in cur:
            mk = [sum(M[i][j] * k[j] for j in range(n)) for i in range(n)]
            if any(tuple(a + b for a, b in zip(mk, q)) in cur for q in qd):
                keep.add(k)
        if keep == cur:
            return cur
        cur = keep


def inverse_transpose(M):
    adj, d = adjugate_2x2_or_3x3(M)
    n = len(M)
    return [[Fraction(adj[j][i], d) for j in range(n)] for i in range(n)]


def dual_digits(M):
    """Coset representatives of Z^n / M^T Z^n by brute force over a box."""
    n = len(M)
    MT = [[M[j][i] for j in range(n)] for i in range(n)]
    adj, d = adjugate_2x2_or_3x3(MT)
    reps = []
    for k in itertools.product(range(-4, 5), repeat=n):
        if all(not all(sum(adj[i][j] * (k[j] - r[j]) for j in range(n)) % d == 0
                       for i in range(n)) for r in reps):
            reps.append(k)
        if len(reps) == abs(d):
            break
    return reps


def symbol(mask, xi):
    return sum(float(c) * cmath.exp(-2j * math.pi * sum(a * b for a, b in zip(k, xi)))
               for k, c in mask.items())


def poly_value(coeffs, xi):
    """Full-coefficient trigonometric polynomial sum p_k exp(2 pi i (k, xi))."""
    return sum(c * cmath.exp(2j * math.pi * sum(a * b for a, b in zip(k, xi)))
               for k, c in coeffs.items()).real


def transition_pointwise(M, mask, coeffs, xi):
    """sum over dual digits d* of |c(eta)/m|^2 p(eta), eta = M^{-T}(xi + d*)."""
    MiT = inverse_transpose(M)
    m = float(sum(mask.values()))
    n = len(M)
    total = 0.0
    for dstar in dual_digits(M):
        eta = [sum(float(MiT[i][j]) * (xi[j] + dstar[j]) for j in range(n)) for i in range(n)]
        total += abs(symbol(mask, eta) / m) ** 2 * poly_value(coeffs, eta)
    return total


def binomial_mask(d, ell, n):
    """Mask of the B-spline of order ell for the two digits {0, d}."""
    return {tuple(s * x for x in d): Fraction(math.comb(ell + 1, s), 2 ** ell)
            for s in range(ell + 2)}


def exact_rank(rows):
    rows = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def origin_face_dims(points, order):
    """Exact (folded, full) dimensions of the space with a zero of given order at 0.

    Full space: rows sum_k p_k k^beta for |beta| < order.  Folded space: the
    same rows with k and -k merged.
    """
    pts = [tuple(p) for p in points]
    n = len(pts[0])
    betas = [b for b in itertools.product(range(order), repeat=n) if sum(b) < order]
    full = [[math.prod(x ** e for x, e in zip(k, b)) for k in pts] for b in betas]
    half = [k for k in pts if k > tuple(-x for x in k) or not any(k)]
    folded = [[math.prod(x ** e for x, e in zip(k, b)) * (1 if not any(k) else 1 + (-1) ** sum(b))
               for k in half] for b in betas]
    return len(half) - exact_rank(folded), len(pts) - exact_rank(full)
