"""Anisotropic dilations: the generic bound versus per-subspace analysis.

For M = diag(3, 2) with the square digit set the refinable function is a
product of univariate B-splines; the generic exponent underestimates the
true value, while one face per eigenvalue modulus recovers alpha = 1/2.
The same comparison is made for the Bear cylinder in three dimensions.
"""

from refinable import coordinate_faces, regularity, regularity_per_subspace, tile_mask

M = [[3, 0], [0, 2]]
square = [(i, j) for j in range(2) for i in range(3)]
mask = tile_mask(square)
generic = regularity(M, mask)
faces = regularity_per_subspace(M, mask, coordinate_faces(M, 0), 0)
print("square tile, M = diag(3, 2)")
print(f"  generic exponent   {generic.table[0].half_log:.4f}")
for row in faces.rows:
    print(f"  face {row.label}: r = {row.r:g}, rho = {row.rho:.6f}, alpha = {row.alpha:.4f}")
print(f"  per-subspace alpha {faces.alpha:.4f}")

C = [[2, 0, 0], [0, 1, -2], [0, 1, 0]]
cyl = tile_mask([(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)])
generic = regularity(C, cyl)
faced = regularity(C, cyl, faces=lambda k: coordinate_faces(C, k))
print("\nBear cylinder in R^3")
print(f"  generic exponent   {generic.alpha:.4f}")
print(f"  per-subspace alpha {faced.alpha:.4f}")
