"""Property checks shared by the module tests and the acceptance suite.

Each function returns the measured quantity so callers can both assert and
report it.
"""

import numpy as np

from refinable.attractor import attractor_radius, difference_set, j0_image, omega
from refinable.subdivision import GridData, subdivision_step
from refinable.transition import build_transition, restrict, sum_rules_order
from refinable.trigpoly import TrigPolynomial, ZeroConstraint, face_basis

from oracles import omega_gfp, transition_pointwise


def definition_oracle_error(M, mask, pairs=200, seed=0):
    """Largest relative gap between the matrix image and the digit-sum formula."""
    rng = np.random.default_rng(seed)
    T = build_transition(M, mask)
    S = T.support
    n = len(M)
    worst = 0.0
    coeffs = dict(mask.coefficients)
    for _ in range(pairs):
        p = TrigPolynomial(S, rng.standard_normal((len(S) + 1) // 2))
        xi = rng.uniform(-1, 1, n)
        lhs = T.apply(p)(xi)
        full = dict(zip(map(tuple, S.points.tolist()), p.full_coefficients()))
        rhs = transition_pointwise(M, coeffs, full, xi.tolist())
        scale = np.abs(p.full_coefficients()).sum()
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def _squarable_set(points, rng, size):
    """Random G with G - G inside the support set."""
    pts = [tuple(p) for p in points]
    allowed = set(pts)
    G = [tuple(0 for _ in pts[0])]
    for k in rng.permutation(len(pts)):
        cand = pts[k]
        if cand in G:
            continue
        if all(tuple(a - b for a, b in zip(cand, g)) in allowed for g in G):
            G.append(cand)
        if len(G) == size:
            break
    return G


def cone_preservation_margin(M, mask, count=50, seed=0, grid=64):
    """Smallest ratio grid-min / grid-max of T p over random squares p = |g|^2."""
    rng = np.random.default_rng(seed)
    T = build_transition(M, mask)
    S = T.support
    index = {tuple(k): i for i, k in enumerate(S.points.tolist())}
    worst = np.inf
    for _ in range(count):
        G = _squarable_set(S.points, rng, 5)
        g = rng.standard_normal(len(G))
        full = np.zeros(len(S))
        for a, ga in zip(G, g):
            for b, gb in zip(G, g):
                full[index[tuple(x - y for x, y in zip(a, b))]] += ga * gb
        p = TrigPolynomial.from_full(S, full)
        vals = T.apply(p).grid_values(grid)
        worst = min(worst, vals.min() / vals.max())
    return worst


def invariance_residuals(M, mask):
    """Relative residuals |TN - NR| / |TN| for every P^(k), k <= sum-rules order."""
    T = build_transition(M, mask)
    out = []
    for k in range(sum_rules_order(mask, M) + 1):
        F = face_basis(T.support, [ZeroConstraint.origin(len(M), k)])
        R = restrict(T, F)
        TN = T.matrix @ F.basis
        out.append(np.linalg.norm(TN - F.basis @ R) / np.linalg.norm(TN))
    return out


def minimal_face_rate_gap(seed, size=8, j=60):
    """Relative gap between ``|A^j x|^{1/j}`` and rho of A on the minimal invariant face.

    ``A`` is block upper triangular with random blocks so that the orthant
    has proper invariant coordinate faces whose spectral radius differs from
    that of ``A``.  The minimal invariant face containing ``x`` is found by
    brute force as the coordinates reachable from the support of ``x``.

    Returns
    -------
    gap, rho_face, rho_full
    """
    rng = np.random.default_rng(seed)
    cut = int(rng.integers(3, size - 2))
    A = rng.uniform(0, 1, (size, size)) * (rng.uniform(size=(size, size)) < 0.8)
    A[cut:, :cut] = 0.0
    A[cut:, cut:] *= rng.uniform(0.3, 2.0)
    A /= max(abs(np.linalg.eigvals(A)))
    width = cut if rng.uniform() < 0.5 else size
    x = np.zeros(size)
    x[:width] = rng.uniform(0, 1, width) * (rng.uniform(size=width) < 0.7)
    if not x.any():
        x[rng.integers(width)] = 1.0
    x /= np.linalg.norm(x)
    support = set(np.flatnonzero(x).tolist())
    frontier = set(support)
    while frontier:
        new = {int(i) for s in frontier for i in np.flatnonzero(A[:, s])} - support
        support |= new
        frontier = new
    idx = sorted(support)
    rho_face = max(abs(np.linalg.eigvals(A[np.ix_(idx, idx)])))
    y = x.copy()
    for _ in range(j):
        y = A @ y
    rate = np.linalg.norm(y) ** (1.0 / j)
    gap = abs(rate - rho_face) / rho_face if rho_face > 0 else rate
    return gap, rho_face, 1.0


def polynomial_fit_residual(M, mask, degree, seed=0):
    """Residual of a degree-``degree`` fit to ``S p`` for a random polynomial ``p``.

    Data is sampled on a box; only output points whose whole stencil lies in
    the box are used.
    """
    rng = np.random.default_rng(seed)
    M = np.asarray(M)
    n = len(M)
    exps = [e for e in np.ndindex(*(degree + 1,) * n) if sum(e) <= degree]
    coef = rng.standard_normal(len(exps))

    def poly(x):
        return sum(c * np.prod(x ** np.array(e), axis=1) for c, e in zip(coef, exps))

    box = 10
    pts = np.array(list(np.ndindex(*(2 * box + 1,) * n))) - box
    out = subdivision_step(mask, M, GridData(pts, poly(pts.astype(float)), 0, M))
    Minv = np.linalg.inv(M)
    pre = (out.points[:, None, :] - mask.support[None]) @ Minv.T
    exact = np.all(np.abs(pre - np.round(pre)) < 1e-9, axis=2)
    inside = np.all(np.abs(pre) <= box - 1e-9, axis=2)
    keep = np.all(inside | ~exact, axis=1)
    y = out.points[keep] @ Minv.T
    V = np.stack([np.prod(y ** np.array(e), axis=1) for e in exps], axis=1)
    fit, *_ = np.linalg.lstsq(V, out.values[keep], rcond=None)
    return np.linalg.norm(V @ fit - out.values[keep]) / np.linalg.norm(out.values[keep])


def omega_fixed_point_exact(M, mask):
    """Omega is closed under k -> M^{-1}(k + Q - Q) and equals the brute-force fixed point."""
    Q = mask.support
    S = omega(M, Q)
    pts = S.as_set()
    qd = difference_set(Q)
    closed = {tuple(x) for x in j0_image(M, S.points, qd).tolist()} <= pts
    return closed and pts == omega_gfp(M, Q.tolist(), int(attractor_radius(M, qd)) + 3)
