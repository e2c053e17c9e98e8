"""Which rank matrices come from real geometry?

A rank matrix is feasible when some distance matrix with distinct entries
induces it.  Keeping all distances in [1, 2] makes the triangle
inequality free, so feasibility reduces to a linear program.  A Latin
square rank matrix turns out to be feasible exactly when it is symmetric.
"""

import numpy as np

from jumpchain import RankMatrix, feasibility_search, rank_matrix_from_distances

sym = RankMatrix(np.array([[1, 2, 3, 4], [2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]]))
asym = RankMatrix(np.array([[1, 2, 3, 4], [3, 1, 4, 2], [2, 4, 1, 3], [4, 3, 2, 1]]))

d = feasibility_search(sym)
print("symmetric Latin square: witness found")
print(np.round(d, 4))
print("round-trip reproduces the ranks:", np.array_equal(rank_matrix_from_distances(d).r, sym.r))

print("\nasymmetric Latin square:", "witness found" if feasibility_search(asym) is not None else "not found (margin 1e-3)")
