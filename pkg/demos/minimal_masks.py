"""Minimal-support masks for the Bear matrix.

A mask with sum rules of order l needs at least l + 2 coefficients when
|det M| = 2.  The designed masks attain the bound; their regularity is
printed next to the brute-force minimality check on a small box.
"""

from refinable import brute_force_minimality, design_minimal_mask, regularity, sum_rules_order

M = [[1, -2], [1, 0]]
for ell in range(4):
    mask = design_minimal_mask(M, ell)
    coeffs = ", ".join(f"{k}: {v}" for k, v in mask.coefficients.items())
    rep = regularity(M, mask)
    alpha = "n/a" if rep.alpha is None else f"{rep.alpha:.4f}"
    print(f"order {ell}: {len(mask)} coefficients, sum rules {sum_rules_order(mask, M)}, "
          f"alpha {alpha}, minimal in [-2, 2]^2: {brute_force_minimality(M, ell, 2)}")
    print(f"  {coeffs}")
