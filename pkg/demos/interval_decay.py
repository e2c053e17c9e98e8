"""Iterating the map on the unit interval.

From the uniform distribution with k = 4 and j = 1 the iterates sharpen
around 1/2, and their standard deviations fall geometrically -- the
signature of a scaling limit with a per-iterate contraction constant.
"""

import numpy as np

from jumpchain import (
    Interval, MixingPolicy, UniformInterval, classify_limit, estimate_pi,
    fit_decay, sample_initial, summarize,
)

N = 50_000
pop = sample_initial(UniformInterval(), Interval(), N, seed=1)
sds = [float(pop.projected().std())]
summaries = [summarize(pop)]
print(f"N = {N} particles, k = 4, j = 1")
for g in range(8):
    pop = estimate_pi(pop, 1, 4, MixingPolicy(), np.random.SeedSequence((1, g)))
    sds.append(float(pop.projected().std()))
    summaries.append(summarize(pop))
    print(f"  iterate {g+1}: s.d. = {sds[-1]:.5f}  (ratio {sds[-1]/sds[-2]:.3f})")

fit = fit_decay(sds[1:], burn_in=1)
print(f"\ngeometric decay constant: {fit.c_fit:.4f} (r^2 = {fit.r_squared:.5f})")
print("limit classification:", classify_limit(summaries, pop).kind)
