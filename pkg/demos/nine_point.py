"""A 9-point planar cloud with k = 10.

Random initial weights collapse to a single point for small j and to an
even two-point mixture for large j; the transition sits near j/k = 0.7.
"""

import numpy as np

from jumpchain import MixingPolicy, PointCloud, classify_limit, estimate_pi, sample_initial, summarize
from jumpchain.scenarios import NINE_POINT_CLOUD
from jumpchain.spaces import DirichletRandom

cloud = PointCloud(points=np.array(NINE_POINT_CLOUD))
for j in (2, 9):
    pop = sample_initial(DirichletRandom(seed=1), cloud, 20_000, np.random.SeedSequence((7, j)))
    summaries = [summarize(pop)]
    for g in range(18):
        pop = estimate_pi(pop, j, 10, MixingPolicy(), np.random.SeedSequence((7, j, g)))
        summaries.append(summarize(pop))
    c = classify_limit(summaries, pop)
    locs = [int(x) for x in c.locations]
    print(f"j = {j:>2}: {c.kind} at point(s) {locs} with masses {np.round(c.masses, 3)}")
