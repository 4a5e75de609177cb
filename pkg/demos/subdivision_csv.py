"""Sample the Bear B-spline of order 1 by subdivision and write a CSV.

Usage: python3 demos/subdivision_csv.py [depth] [output.csv]
"""

import sys

from refinable import bspline_mask, sample_refinable

depth = int(sys.argv[1]) if len(sys.argv) > 1 else 8
path = sys.argv[2] if len(sys.argv) > 2 else "bear_order1.csv"

grid = sample_refinable(bspline_mask([(0, 0), (1, 0)], 1), [[1, -2], [1, 0]], depth)
grid.to_csv(path)
print(f"{len(grid)} samples at level {depth}, max value {grid.values.max():.4f}, written to {path}")
