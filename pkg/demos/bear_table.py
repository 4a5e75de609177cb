"""Regularity of the Bear tile B-splines.

Prints sum-rule order, the size of the transition matrix and the L2 Hölder
exponent for orders 0..8, followed by the full rho_k table for order 2.
"""

from refinable import bspline_mask, regularity

M = [[1, -2], [1, 0]]
D = [(0, 0), (1, 0)]

print(f"{'order':>5} {'sum rules':>9} {'T size':>6} {'alpha':>8}")
for ell in range(9):
    rep = regularity(M, bspline_mask(D, ell))
    print(f"{ell:>5} {rep.sum_rules_order:>9} {rep.table[0].dim:>6} {rep.alpha:>8.4f}")

print("\nrho_k table for order 2")
for row in regularity(M, bspline_mask(D, 2)).table:
    print(f"  k = {row.k}: dim {row.dim:>3}, rho {row.rho:.6f}, candidate {row.half_log:.4f}")
