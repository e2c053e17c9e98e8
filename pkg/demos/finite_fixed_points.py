"""Fixed points on finite spaces.

Every space fixes the one-point masses and uniform two-point masses.  A
5-point distance matrix shows something rarer: a full-support invariant
weight vector for (j, k) = (1, 2) -- which the spectral radius of the
map's Jacobian reveals to be unstable, like every sporadic fixed point
we have seen.
"""

import numpy as np

from jumpchain import Distribution, RankMatrix, find_fixed_points, iterate_exact, rank_matrix_from_distances
from jumpchain.scenarios import FIVE_POINT_DISTANCES, UNSTABLE_RANKS_4

R5 = rank_matrix_from_distances(np.array(FIVE_POINT_DISTANCES))
print("5-point space, (j,k) = (1,2): searching from 64 random starts...")
for rep in find_fixed_points(R5, 1, 2, n_restarts=64, seed=0):
    if not rep.is_omnipresent:
        w = np.round(rep.theta_star.weights, 4)
        print(f"  full-support fixed point {w}, spectral radius {rep.spectral_radius:.3f} -> {rep.stability}")

R4 = RankMatrix(np.array(UNSTABLE_RANKS_4))
theta = Distribution(np.array([1, 1, 2, 2]) / 6)
print("\n4-point rank matrix: the interior fixed point (1/6, 1/6, 2/6, 2/6)")
pert = Distribution(np.array([1 / 6 + 0.01, 1 / 6 - 0.01, 2 / 6 + 0.01, 2 / 6 - 0.01]))
traj = iterate_exact(R4, pert, 1, 2, 20)
print("  a generic 0.01 perturbation under (1,2) escapes toward an atom:")
for n in (0, 5, 10, 20):
    print(f"    iterate {n:>2}: {np.round(traj[n].weights, 4)}")
sym = Distribution(np.array([1 / 6 + 0.01, 1 / 6 + 0.01, 2 / 6 - 0.01, 2 / 6 - 0.01]))
back = iterate_exact(R4, sym, 2, 2, 20)[-1]
print(f"  the matched perturbation under (2,2) returns: final {np.round(back.weights, 4)}")
