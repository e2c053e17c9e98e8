"""Closed-form analysis of the two-point space.

With theta parametrized by the weight p of one point, the induced map on
distributions reduces to a scalar map on [0, 1] built from binomial tails.
This module evaluates that map, iterates it, classifies its qualitative
behavior for each (j, k), and evaluates the inequality ruling out invariant
densities on the interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import _tail_vec, binomial_tail_ge

__all__ = [
    "BinomialClassification",
    "binomial_map",
    "classify",
    "classification_table",
    "density_nonexistence_check",
]

GRID_POINTS = 10_000
ITERATION_LIMIT = 1_000
ENDPOINT_EPS = 1e-9


@dataclass(frozen=True)
class BinomialClassification:
    """Qualitative behavior of iterates started in (0, 1/2).

    Type I: iterates sink to 0.  Type II: they rise to 1/2.  Type III: an
    interior critical weight splits the two regimes and is itself fixed.
    """

    k: int
    j: int
    type: str  # "I" | "II" | "III"
    p_crit: float | None = None

    def __post_init__(self):
        if (self.type == "III") != (self.p_crit is not None):
            raise ValueError("p_crit present iff type III")


def binomial_map(p: float, j: int, k: int) -> float:
    """Stationary weight of the first point after one application of the map.

    Equals P(Bin(k,p) > k-j) / (P(Bin(k,p) > k-j) + P(Bin(k,p) < j));
    fixes 0, 1/2 and 1.
    """
    if k < 2 or not (1 <= j <= k):
        raise ValueError(f"need k >= 2 and 1 <= j <= k, got j={j}, k={k}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    num = binomial_tail_ge(k, p, k - j + 1)  # P(Bin > k-j)
    den = 1.0 - binomial_tail_ge(k, p, j)  # P(Bin < j)
    return num / (num + den)


def _map_minus_id(p: np.ndarray, j: int, k: int) -> np.ndarray:
    num = _tail_vec(k, p, k - j + 1)
    den = 1.0 - _tail_vec(k, p, j)
    return num / (num + den) - p


def _interior_root(j: int, k: int) -> float | None:
    """Sign-change scan of map(p) - p on (0, 1/2), bisected to 1e-12."""
    grid = 0.5 * np.arange(1, GRID_POINTS) / GRID_POINTS
    g = _map_minus_id(grid, j, k)
    flips = np.nonzero(np.sign(g[1:]) != np.sign(g[:-1]))[0]
    if flips.size == 0:
        return None
    lo_p, hi_p = float(grid[flips[0]]), float(grid[flips[0] + 1])
    glo = binomial_map(lo_p, j, k) - lo_p
    if glo == 0.0:
        return float(lo_p)
    while hi_p - lo_p > 1e-12:
        mid = 0.5 * (lo_p + hi_p)
        gm = binomial_map(mid, j, k) - mid
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo_p = mid
        else:
            hi_p = mid
    return 0.5 * (lo_p + hi_p)


def classify(j: int, k: int) -> BinomialClassification:
    """Classify (j, k) as type I, II, or III.

    An interior fixed point on (0, 1/2) means type III; otherwise the limit
    of 1000 iterations from p = 0.25 decides between I (to 0) and II
    (to 1/2).
    """
    root = _interior_root(j, k)
    if root is not None:
        return BinomialClassification(k=k, j=j, type="III", p_crit=root)
    p = 0.25
    for _ in range(ITERATION_LIMIT):
        p = binomial_map(p, j, k)
        if p <= ENDPOINT_EPS:
            return BinomialClassification(k=k, j=j, type="I")
        if abs(p - 0.5) <= ENDPOINT_EPS:
            return BinomialClassification(k=k, j=j, type="II")
    # no escape within the budget: decide by which endpoint is closer
    tag = "I" if p < 0.25 else "II"
    return BinomialClassification(k=k, j=j, type=tag)


def classification_table(k_max: int) -> list[BinomialClassification]:
    """Classifications of all (j, k) with k <= k_max, in (k, j) order."""
    if not (2 <= k_max <= 12):
        raise ValueError("k_max must lie in [2, 12]")
    return [classify(j, k) for k in range(2, k_max + 1) for j in range(1, k + 1)]


def density_nonexistence_check(j: int, k: int) -> bool:
    """True when no invariant density can exist on the interval for (j, k).

    Applies for j = k, and otherwise when
    multinomial(k; j-1, 1, k-j) * (j-1)^(j-1) * (k-j)^(k-j) / (k-1)^(k-1)
    is at most 2 (with 0^0 = 1).
    """
    if k < 2 or not (1 <= j <= k):
        raise ValueError(f"need k >= 2 and 1 <= j <= k, got j={j}, k={k}")
    if j == k:
        return True
    coeff = math.factorial(k) // (math.factorial(j - 1) * math.factorial(k - j))
    value = coeff * (j - 1) ** (j - 1) * (k - j) ** (k - j) / (k - 1) ** (k - 1)
    return value <= 2.0
