"""
Closed sets and the Hausdorff metric
====================================

Unions of closed intervals, point-to-set distance and the Hausdorff
distance, all computed exactly from the piece endpoints.
"""

import numpy as np

from hybridfp import ClosedSet, hausdorff, point_set_distance

# A closed set is a list of (lo, hi) pieces; overlapping pieces merge
A = ClosedSet([(1, 2)])
B = ClosedSet([(0, 0.5)])
print("A =", A, " B =", B)
print("H(A, B) =", hausdorff(A, B))
print("d(3, B) =", point_set_distance(3.0, B))

# Points and finite sets are degenerate pieces
C = ClosedSet.points([0, 1, 4])
print("C =", C, " H(C, A) =", hausdorff(C, A))

# The metric is exact, so symmetry holds bit for bit
rng = np.random.default_rng(0)
for _ in range(3):
    lo = np.sort(rng.uniform(-5, 5, 4))
    X = ClosedSet([(lo[0], lo[1]), (lo[2], lo[3])])
    print(X, "  H(X, A) =", hausdorff(X, A), "  H(A, X) =", hausdorff(A, X))
