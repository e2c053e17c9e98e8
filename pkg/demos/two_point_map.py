"""The two-point space: a scalar map built from binomial tails.

Weight p on one of two points evolves under the jump chain's stationary
map.  For most (j, k) the iterates sink to 0 or rise to 1/2; for a few
pairs an interior critical weight separates the two regimes and is itself
a fixed point, though an unstable one.
"""

import numpy as np

from jumpchain import binomial_map, classification_table, classify

print("classification of all pairs up to k = 9")
print(f"{'k':>3} {'j':>3} {'type':>5} {'p_crit':>12}")
for c in classification_table(9):
    pc = f"{c.p_crit:.5f}" if c.p_crit is not None else ""
    print(f"{c.k:>3} {c.j:>3} {c.type:>5} {pc:>12}")

print("\niterates from p = 0.25 for the first interior-critical pair (j=4, k=5):")
c = classify(4, 5)
for p0 in (c.p_crit - 0.01, c.p_crit + 0.01):
    p, path = p0, [p0]
    for _ in range(12):
        p = binomial_map(p, 4, 5)
        path.append(p)
    print(f"  start {p0:.5f}: " + " ".join(f"{v:.4f}" for v in path[1:8]) + " ...")
print(f"\nthe critical weight {c.p_crit:.5f} repels both neighbors: an unstable fixed point")
