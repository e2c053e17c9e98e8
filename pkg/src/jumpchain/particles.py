"""Particle Monte Carlo engine for the jump-to-j'th-closest chain.

One outer iteration freezes the current population as the sampling source
and evolves every particle independently for enough chain steps to be
(approximately) stationary; the final positions form the next population.
Chain steps only ever land on source positions, so support is preserved at
the particle level exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spaces import ParticlePopulation, Space, WeightedHypercube

__all__ = ["MixingPolicy", "chain_step", "estimate_pi", "ParticlePopulation"]

HARD_STEP_CEILING = 512
NOISE_FLOOR_FACTOR = 3.0  # W1 between successive N-marginals fluctuates ~ sd/sqrt(N)


@dataclass(frozen=True)
class MixingPolicy:
    """How many chain steps approximate stationarity inside one iteration.

    bound: the worst-case step count from the variation-distance rate
    1 - 1/k^(k-1); adaptive (the default): stop once the Wasserstein
    distance between successive step-marginals sits below tolerance for two
    consecutive checks; fixed: exactly t_fixed steps.
    """

    mode: str = "adaptive"
    epsilon: float = 1e-3
    w1_tol: float = 1e-4
    check_stride: int = 8
    t_cap: int | None = None
    t_fixed: int | None = None

    def __post_init__(self):
        if self.mode not in ("bound", "adaptive", "fixed"):
            raise ValueError(f"unknown mixing mode {self.mode!r}")
        if self.mode == "fixed" and (self.t_fixed is None or self.t_fixed < 1):
            raise ValueError("fixed mode needs t_fixed >= 1")

    @staticmethod
    def bound_steps(k: int, epsilon: float) -> int:
        rate = -math.log1p(-1.0 / k ** (k - 1))
        return 2 * math.ceil(math.log(1.0 / epsilon) / rate)

    def step_budget(self, k: int) -> int:
        if self.mode == "fixed":
            return self.t_fixed
        if self.mode == "bound":
            t = self.bound_steps(k, self.epsilon)
            return min(t, self.t_cap) if self.t_cap is not None else t
        if self.t_cap is not None:
            return self.t_cap
        return min(self.bound_steps(k, 1e-3), HARD_STEP_CEILING)

    def to_jsonable(self) -> dict:
        return {
            "mode": self.mode,
            "epsilon": self.epsilon,
            "w1_tol": self.w1_tol,
            "check_stride": self.check_stride,
            "t_cap": self.t_cap,
            "t_fixed": self.t_fixed,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "MixingPolicy":
        return cls(**{k: d[k] for k in ("mode", "epsilon", "w1_tol", "check_stride", "t_cap", "t_fixed") if k in d})


# ---------------------------------------------------------------------------
# stepping


def _pairwise(space: Space, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distances from each particle to its k samples, shape (N, k)."""
    if isinstance(space, WeightedHypercube):
        return space.pair_distance(x[:, None, :], y)
    return space.pair_distance(x[:, None], y)


def _select_jth(d: np.ndarray, j: int, k: int, rng) -> np.ndarray:
    """Column of the j'th-smallest distance per row, ties broken uniformly.

    A random permutation of the sample columns followed by a stable sort
    makes every ordering of a tied block equally likely.
    """
    n = d.shape[0]
    if k == 2:
        lt = d[:, 0] < d[:, 1]
        gt = d[:, 0] > d[:, 1]
        coin = rng.random(n) < 0.5
        first = lt | (~lt & ~gt & coin) if j == 1 else gt | (~lt & ~gt & coin)
        return np.where(first, 0, 1)
    perm = np.argsort(rng.random((n, k)), axis=1)
    d_shuf = np.take_along_axis(d, perm, axis=1)
    order = np.argsort(d_shuf, axis=1, kind="stable")
    return np.take_along_axis(perm, order[:, j - 1 : j], axis=1)[:, 0]


def _step_all(space: Space, source_pts: np.ndarray, x: np.ndarray, j: int, k: int, rng):
    n = x.shape[0]
    idx = rng.integers(0, source_pts.shape[0], size=(n, k))
    y = source_pts[idx]
    col = _select_jth(_pairwise(space, x, y), j, k, rng)
    rows = np.arange(n)
    return y[rows, col] if y.ndim <= 2 else y[rows, col, :]


def chain_step(source: ParticlePopulation, x, j: int, k: int, stream) -> object:
    """One chain step from x: the j'th closest of k samples drawn from the source."""
    if k < 2 or not (1 <= j <= k):
        raise ValueError(f"need k >= 2 and 1 <= j <= k, got j={j}, k={k}")
    idx = stream.integers(0, source.size, size=k)
    y = source.points[idx]
    xa = np.asarray(x)
    d = source.space.pair_distance(np.broadcast_to(xa, (k,) + xa.shape), y)
    perm = stream.permutation(k)
    order = np.argsort(d[perm], kind="stable")
    chosen = perm[order[j - 1]]
    return y[chosen]


def estimate_pi(
    source: ParticlePopulation, j: int, k: int, policy: MixingPolicy, seed
) -> ParticlePopulation:
    """Approximate the stationary distribution of the chain driven by the source.

    Every particle starts at its own source position and takes chain steps
    against the frozen source; the step count comes from the policy.  In
    adaptive mode the effective tolerance is the configured w1_tol floored
    at the N-sample noise level of the monitoring statistic, and hitting
    the cap without two quiet checks sets a warning flag in the lineage.
    """
    if k < 2 or not (1 <= j <= k):
        raise ValueError(f"need k >= 2 and 1 <= j <= k, got j={j}, k={k}")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    space = source.space
    src = source.points
    x = src.copy()
    budget = policy.step_budget(k)
    steps_run = 0
    warned = False

    if policy.mode == "adaptive":
        prev = None
        quiet = 0
        for t in range(1, budget + 1):
            x = _step_all(space, src, x, j, k, rng)
            steps_run = t
            if t % policy.check_stride == 0:
                cur = np.sort(space.projection(x))
                if prev is not None:
                    w1 = float(np.mean(np.abs(cur - prev)))
                    tol_eff = max(policy.w1_tol, NOISE_FLOOR_FACTOR * cur.std() / math.sqrt(cur.size))
                    quiet = quiet + 1 if w1 < tol_eff else 0
                prev = cur
                if quiet >= 2:
                    break
        else:
            warned = True
    else:
        for t in range(budget):
            x = _step_all(space, src, x, j, k, rng)
        steps_run = budget

    lineage = dict(source.lineage)
    lineage.update(
        {
            "evolve_seed": ss.entropy,
            "steps_run": steps_run,
            "warnings": list(lineage.get("warnings", []))
            + (["adaptive stop never triggered before t_cap"] if warned else []),
        }
    )
    return ParticlePopulation(
        space=space, points=x, generation=source.generation + 1, lineage=lineage
    )
