"""
Minimal-support masks for two-digit dilations.

For ``|det M| = 2`` there is one nonzero digit ``d*`` of ``M^T`` and
``v = M^{-T} d*`` has ``w = 2v`` integral.  A mask supported on points
``k_i`` with ``(w, k_i) = s_i`` has ``c^(v) = sum q_i (-1)^{s_i}``, so the sum
rules reduce to the moment equations ``sum_i (-1)^{s_i} q_i s_i^r = 0`` once
the points lie on a line through the origin.  With ``l + 2`` nodes of mixed
parity these equations and ``sum q_i = 1`` have a unique solution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BoxTooLarge, NoDiophantineSolution, ParityDegenerate, PreconditionError
from .lattice import _adjugate, as_dilation, canonical_digits
from .mask import Mask
from .trigpoly import ZeroConstraint, face_basis, multi_indices

__all__ = ["MomentSystem", "moment_system", "design_minimal_mask",
           "verify_lower_bound", "brute_force_minimality"]


@dataclass(frozen=True)
class MomentSystem:
    """Nodes, lattice points and exact weights of a minimal mask."""

    v: tuple
    nodes: tuple
    points: tuple
    q: tuple
    order: int

    @property
    def w(self) -> tuple:
        return tuple(int(2 * x) for x in self.v)


def _two_digit(M):
    M = as_dilation(M)
    if M.m != 2:
        raise PreconditionError("minimal-mask design needs |det M| = 2")
    return M


def _half_vector(M, dstar=None):
    if dstar is None:
        dstar = canonical_digits(M, transpose=True).digits[1]
    adjT = _adjugate(M.array.T.tolist())
    v = tuple(Fraction(sum(a * d for a, d in zip(row, dstar)), M.det) for row in adjT)
    w = [2 * x for x in v]
    if any(x.denominator != 1 for x in w):
        raise PreconditionError("2 M^{-T} d* is not integral")
    return v, tuple(int(x) for x in w)


def _is_tile_pair(M, e) -> bool:
    """True when the digits ``{0, e}`` give an attractor of measure one."""
    from .transition import build_transition, restrict, spectral_radius

    zero = (0,) * len(e)
    T = build_transition(M, Mask({zero: Fraction(1), tuple(e): Fraction(1)}))
    F = face_basis(T.support, [ZeroConstraint.origin(len(e), 0)])
    return F.dim > 0 and spectral_radius(restrict(T, F)).rho < 1 - 1e-9


def _unit_direction(M, w, radius: int):
    """Smallest-norm integer ``e`` with ``(w, e) = 1`` inside the box of ``radius``.

    Among the solutions of smallest norm, one for which ``{0, e}`` is a tile
    digit set is preferred, so that the order-0 mask is the tile indicator.
    """
    n = len(w)
    found = sorted((sum(x * x for x in e), e)
                   for e in itertools.product(range(-radius, radius + 1), repeat=n)
                   if sum(a * b for a, b in zip(w, e)) == 1)
    if not found:
        raise NoDiophantineSolution(f"no integer e with (w, e) = 1 for w = {w}")
    shortest = [e for norm, e in found if norm == found[0][0]]
    return next((e for e in shortest if _is_tile_pair(M, e)), shortest[0])


def _solve_exact(A, b):
    n = len(A)
    rows = [list(map(Fraction, r)) + [Fraction(x)] for r, x in zip(A, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for i in range(n):
            if i != col and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[col])]
    return [r[-1] for r in rows]


def moment_system(M, ell: int, nodes=None, dstar=None) -> MomentSystem:
    """Solve ``sum (-1)^{s_i} q_i s_i^r = 0`` (r <= ell), ``sum q_i = 1`` exactly.

    Raises
    ------
    ParityDegenerate
        When the system is singular (e.g. all nodes of one parity).
    """
    M = _two_digit(M)
    if ell < 0:
        raise ValueError("ell must be >= 0")
    nodes = tuple(range(ell + 2)) if nodes is None else tuple(int(s) for s in nodes)
    if len(nodes) != ell + 2 or len(set(nodes)) != len(nodes):
        raise ValueError("need ell + 2 distinct nodes")
    v, w = _half_vector(M, dstar)
    e = _unit_direction(M, w, 3 * (ell + 2))
    points = tuple(tuple(s * x for x in e) for s in nodes)
    A = [[(-1) ** (s % 2) * s ** r for s in nodes] for r in range(ell + 1)]
    A.append([1] * len(nodes))
    q = _solve_exact(A, [0] * (ell + 1) + [1])
    if q is None:
        raise ParityDegenerate(f"nodes {nodes} give a singular moment system")
    return MomentSystem(v, nodes, points, tuple(q), ell)


def design_minimal_mask(M, ell: int, nodes=None, dstar=None) -> Mask:
    """Mask with exactly ``ell + 2`` nonzero coefficients and sum rules of order ``ell``.

    Nodes default to ``0 .. ell+1``.  The lattice points are ``s_i e`` with
    ``e`` a smallest-norm solution of ``(2 M^{-T} d*, e) = 1``, which makes
    every mixed derivative condition a multiple of a moment equation.  Ties
    are broken in favour of an ``e`` for which ``{0, e}`` is a tile digit set.
    """
    ms = moment_system(M, ell, nodes, dstar)
    if any(x == 0 for x in ms.q):
        raise ParityDegenerate("a node received weight zero")
    return Mask({k: 2 * q for k, q in zip(ms.points, ms.q)})


def verify_lower_bound(mask: Mask, M, ell: int) -> bool:
    """Check that a mask with sum rules of order ``ell`` has ``>= ell + 2`` coefficients."""
    from .transition import sum_rules_order

    M = _two_digit(M)
    if sum_rules_order(mask, M) < ell:
        raise PreconditionError(f"mask does not satisfy sum rules of order {ell}")
    return len(mask) >= ell + 2


def _box_points(box, n):
    if isinstance(box, int):
        lo, hi = [-box] * n, [box] * n
    else:
        lo, hi = box
        lo = [lo] * n if np.isscalar(lo) else list(lo)
        hi = [hi] * n if np.isscalar(hi) else list(hi)
    sides = [h - l for l, h in zip(lo, hi)]
    return lo, hi, sides


def brute_force_minimality(M, ell: int, box=3) -> bool:
    """True iff no mask supported on ``<= ell + 1`` box points has sum rules of order ``ell``.

    ``box`` is a half-width ``b`` (box ``[-b, b]^n``) or a ``(lo, hi)`` pair.
    Each support is tested by comparing the ranks of the linear system
    ``sum c = 2``, ``sum c_k (-1)^{(w, k)} k^beta = 0`` (``|beta| <= ell``)
    with and without its right-hand side.

    Raises
    ------
    BoxTooLarge
        If ``ell > 3`` or a box side exceeds 6.
    """
    M = _two_digit(M)
    lo, hi, sides = _box_points(box, M.n)
    if ell > 3 or max(sides) > 6:
        raise BoxTooLarge(f"ell = {ell}, box sides {sides}: limit is ell <= 3, side <= 6")
    _, w = _half_vector(M)
    pts = np.array(list(itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])))
    sign = np.where((pts @ np.array(w)) % 2 == 0, 1.0, -1.0)
    betas = multi_indices(M.n, ell)
    cols = np.stack([sign * np.prod(pts.astype(float) ** np.array(b), axis=1) for b in betas]
                    + [np.ones(len(pts))], axis=0)
    rhs = np.zeros(len(betas) + 1)
    rhs[-1] = 2.0
    for size in range(1, ell + 2):
        combos = np.array(list(itertools.combinations(range(len(pts)), size)))
        if len(combos) == 0:
            continue
        A = np.transpose(cols[:, combos], (1, 0, 2))
        Ab = np.concatenate([A, np.broadcast_to(rhs[None, :, None], (len(A), len(rhs), 1))], axis=2)
        r1 = np.linalg.matrix_rank(A)
        r2 = np.linalg.matrix_rank(Ab)
        if np.any(r1 == r2):
            return False
    return True
