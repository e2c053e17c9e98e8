"""Diagnostics over particle populations and iterate trajectories.

All one-dimensional statistics run on a population's canonical projection:
identity on the interval, arc position on the circle, distance to the
origin corner on weighted hypercubes and coordinate clouds.  Limit
classification clusters the final samples by single-linkage gaps in the
native metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spaces import Circle, ParticlePopulation, Line, PointCloud, Space

__all__ = [
    "IterateSummary",
    "DecayFit",
    "LimitClassification",
    "summarize",
    "classify_limit",
    "fit_decay",
    "renormalize",
    "count_peaks",
    "wasserstein_1d",
]

QUANTILE_LEVELS = (1, 5, 25, 50, 75, 95, 99)

ONE_POINT_MASS = 0.999
TWO_POINT_MASS = 0.45
GAP_FACTOR = 20.0
DIAMETER_FLOOR = 1e-4


class DecayFitError(ValueError):
    """The standard-deviation sequence does not support a geometric fit."""


@dataclass(frozen=True)
class IterateSummary:
    generation: int
    mean: tuple
    sd: float
    quantiles: tuple  # values at QUANTILE_LEVELS of the projection
    cluster_count: int
    cluster_centers: tuple  # projection value of each cluster center
    cluster_masses: tuple
    inter_cluster_distance: float | None
    flags: tuple = ()

    def to_jsonable(self) -> dict:
        return {
            "generation": self.generation,
            "mean": list(self.mean),
            "sd": self.sd,
            "quantile_levels": list(QUANTILE_LEVELS),
            "quantiles": list(self.quantiles),
            "cluster_count": self.cluster_count,
            "cluster_centers": list(self.cluster_centers),
            "cluster_masses": list(self.cluster_masses),
            "inter_cluster_distance": self.inter_cluster_distance,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class DecayFit:
    c_fit: float
    r_squared: float
    burn_in: int


@dataclass(frozen=True)
class LimitClassification:
    kind: str  # "one_point" | "two_point" | "undecided"
    locations: tuple = ()
    masses: tuple = ()
    drifting_to_half: bool | None = None

    def to_jsonable(self) -> dict:
        def plain(x):
            if isinstance(x, np.ndarray):
                return x.tolist()
            if isinstance(x, np.generic):
                return x.item()
            return x

        return {
            "kind": self.kind,
            "locations": [plain(l) for l in self.locations],
            "masses": list(self.masses),
            "drifting_to_half": self.drifting_to_half,
        }


# ---------------------------------------------------------------------------
# gap clustering


def _unique_with_counts(points: np.ndarray):
    if points.ndim == 1:
        return np.unique(points, return_counts=True)
    return np.unique(points, axis=0, return_counts=True)


def _cluster_uniques(space: Space, uniq: np.ndarray, counts: np.ndarray, threshold: float):
    """Single-linkage cut at `threshold`; labels over the unique positions.

    Exact union-find in the native metric when the unique set is small;
    beyond that the population is still diffuse and sorted-projection gap
    splitting is equivalent for the 1-D spaces it occurs on.
    """
    u = uniq.shape[0]
    if u == 1:
        return np.zeros(1, dtype=int)
    if u <= 2048:
        parent = np.arange(u)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(u - 1):
            d = space.pair_distance(
                np.broadcast_to(uniq[i], uniq[i + 1 :].shape) if uniq.ndim > 1 else np.full(u - i - 1, uniq[i]),
                uniq[i + 1 :],
            )
            for off in np.nonzero(np.atleast_1d(d) <= threshold)[0]:
                ra, rb = find(i), find(i + 1 + off)
                if ra != rb:
                    parent[rb] = ra
        roots = np.array([find(i) for i in range(u)])
        _, labels = np.unique(roots, return_inverse=True)
        return labels
    proj = space.projection(uniq)
    order = np.argsort(proj)
    labels = np.empty(u, dtype=int)
    lab = 0
    labels[order[0]] = 0
    for a, b in zip(order[:-1], order[1:]):
        if proj[b] - proj[a] > threshold:
            lab += 1
        labels[b] = lab
    return labels


def _gap_threshold(space: Space, uniq, counts) -> float:
    floor = DIAMETER_FLOOR * space.diameter if np.isfinite(space.diameter) else DIAMETER_FLOOR
    labels = _cluster_uniques(space, uniq, counts, floor)
    proj = space.projection(uniq)
    total = counts.sum()
    ss = 0.0
    for lab in np.unique(labels):
        sel = labels == lab
        w = counts[sel] / total
        mw = w.sum()
        if mw <= 0:
            continue
        mu = float(np.sum(proj[sel] * w) / mw)
        ss += float(np.sum(w * (proj[sel] - mu) ** 2))
    within_sd = np.sqrt(ss)
    return max(GAP_FACTOR * within_sd, floor)


def _clusters(space: Space, points: np.ndarray):
    """Returns (labels per unique, uniq, counts, threshold used)."""
    uniq, counts = _unique_with_counts(points)
    threshold = _gap_threshold(space, uniq, counts)
    labels = _cluster_uniques(space, uniq, counts, threshold)
    return labels, uniq, counts, threshold


def _cluster_report(space: Space, points: np.ndarray):
    labels, uniq, counts, _ = _clusters(space, points)
    total = counts.sum()
    proj = space.projection(uniq)
    out = []
    for lab in np.unique(labels):
        sel = labels == lab
        mass = counts[sel].sum() / total
        # weighted median of the projection as the cluster center
        order = np.argsort(proj[sel])
        cum = np.cumsum(counts[sel][order])
        med_idx = np.searchsorted(cum, 0.5 * counts[sel].sum())
        center_u = uniq[sel][order[min(med_idx, order.size - 1)]]
        out.append((center_u, float(proj[sel][order[min(med_idx, order.size - 1)]]), float(mass)))
    out.sort(key=lambda t: -t[2])
    return out


# ---------------------------------------------------------------------------
# operations


def summarize(pop: ParticlePopulation) -> IterateSummary:
    """Empirical moments, quantiles, and cluster structure of one iterate."""
    if pop.size < 2:
        raise ValueError("summaries need at least 2 particles")
    proj = pop.projected()
    if isinstance(pop.space, PointCloud):
        pts = pop.space.points[pop.points]  # coordinates, not indices
    else:
        pts = np.asarray(pop.points, dtype=float)
    mean = tuple(np.atleast_1d(pts.mean(axis=0)).tolist())
    sd = float(proj.std())
    quants = tuple(float(v) for v in np.percentile(proj, QUANTILE_LEVELS))
    rep = _cluster_report(pop.space, pop.points)
    inter = None
    if len(rep) >= 2:
        a, b = rep[0][0], rep[1][0]
        inter = float(
            pop.space.pair_distance(
                np.asarray(a)[None] if np.ndim(a) else np.asarray([a]),
                np.asarray(b)[None] if np.ndim(b) else np.asarray([b]),
            )[0]
        )
    return IterateSummary(
        generation=pop.generation,
        mean=mean,
        sd=sd,
        quantiles=quants,
        cluster_count=len(rep),
        cluster_centers=tuple(r[1] for r in rep),
        cluster_masses=tuple(r[2] for r in rep),
        inter_cluster_distance=inter,
    )


def classify_limit(
    trajectory: list[IterateSummary], final_pop: ParticlePopulation
) -> LimitClassification:
    """Decide between a one-point limit, a two-point limit, or neither.

    Clusters the final samples by single-linkage with gap threshold
    20x the within-cluster s.d. (floored at 1e-4 of the space diameter).
    One cluster holding >= 99.9% of the mass is a one-point limit at its
    median; two clusters of >= 45% each are a two-point limit, with a note
    on whether their masses are still drifting toward (1/2, 1/2).
    """
    if len(trajectory) < 3:
        raise ValueError("classification needs at least 3 iterates")
    rep = _cluster_report(final_pop.space, final_pop.points)
    if rep and rep[0][2] >= ONE_POINT_MASS:
        return LimitClassification(kind="one_point", locations=(rep[0][0],), masses=(rep[0][2],))
    if len(rep) >= 2 and rep[0][2] >= TWO_POINT_MASS and rep[1][2] >= TWO_POINT_MASS:
        drift = None
        recent = [s for s in trajectory[-3:] if s.cluster_count >= 2]
        if len(recent) >= 2:
            offs = [abs(s.cluster_masses[0] - 0.5) for s in recent]
            drift = bool(offs[-1] <= offs[0] + 1e-3)
        return LimitClassification(
            kind="two_point",
            locations=(rep[0][0], rep[1][0]),
            masses=(rep[0][2], rep[1][2]),
            drifting_to_half=drift,
        )
    return LimitClassification(kind="undecided")


def fit_decay(sd_sequence, burn_in: int, force: bool = False) -> DecayFit:
    """Geometric-decay constant of an s.d. sequence by log-linear least squares.

    Fits log(sd) against the iteration index on entries after `burn_in`.
    Requires >= 4 usable points and r^2 >= 0.99 unless forced.
    """
    sd = np.asarray(sd_sequence, dtype=float)
    if sd.size <= burn_in + 3:
        raise DecayFitError("need more than burn_in + 3 points")
    window = sd[burn_in:]
    if np.any(window <= 0):
        raise DecayFitError("nonpositive s.d. inside the fit window")
    x = np.arange(burn_in, sd.size, dtype=float)
    y = np.log(window)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    if r2 < 0.99 and not force:
        raise DecayFitError(f"r^2 = {r2:.4f} < 0.99; pass force=True to fit anyway")
    return DecayFit(c_fit=float(np.exp(slope)), r_squared=r2, burn_in=burn_in)


def renormalize(pop: ParticlePopulation) -> ParticlePopulation:
    """Center and scale the canonical projection to mean 0, s.d. 1."""
    proj = pop.projected()
    sd = proj.std()
    if sd <= 0:
        raise ValueError("degenerate population: zero standard deviation")
    z = (proj - proj.mean()) / sd
    lineage = dict(pop.lineage)
    lineage["renormalized_from"] = type(pop.space).__name__
    return ParticlePopulation(space=Line(), points=z, generation=pop.generation, lineage=lineage)


def _silverman_bandwidth(x: np.ndarray) -> float:
    sd = x.std()
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    if scale <= 0:
        return 2.0 / 1024
    return max(0.9 * scale * x.size ** (-0.2), 2.0 / 1024)


def count_peaks(pop: ParticlePopulation, bandwidth: float | None = None) -> int:
    """Number of significant peaks of a wrapped-Gaussian KDE on the circle.

    The density is estimated on a 1024-point grid by circular FFT
    convolution; strict local maxima below 1.1x the uniform level are
    suppressed, so an unbroken uniform population counts zero peaks.
    """
    if not isinstance(pop.space, Circle):
        raise ValueError("peak counting is defined on circle populations")
    x = pop.projected()
    h = bandwidth if bandwidth is not None else _silverman_bandwidth(x)
    grid_n = 1024
    hist, _ = np.histogram(x, bins=grid_n, range=(0.0, 1.0))
    t = (np.arange(grid_n) + 0.5) / grid_n
    arc = np.minimum(t - t[0], 1.0 - (t - t[0]))
    kernel = np.exp(-0.5 * (arc / h) ** 2)
    kernel /= kernel.sum()
    dens = np.fft.irfft(np.fft.rfft(hist) * np.fft.rfft(kernel), n=grid_n)
    dens = dens / pop.size * grid_n  # normalize to a density on [0, 1)
    up = dens > np.roll(dens, 1)
    down = dens > np.roll(dens, -1)
    peaks = up & down & (dens > 1.1)
    return int(peaks.sum())


def wasserstein_1d(popA: ParticlePopulation, popB: ParticlePopulation) -> float:
    """1-D Wasserstein distance between canonical projections.

    Equal sizes compare sorted projections directly; otherwise the larger
    population is subsampled (fixed internal seed) to match the smaller.
    """
    a = np.sort(popA.projected())
    b = np.sort(popB.projected())
    if a.size == 0 or b.size == 0:
        raise ValueError("empty population")
    if a.size != b.size:
        rng = np.random.default_rng(171717)
        if a.size > b.size:
            a = np.sort(rng.choice(a, size=b.size, replace=False))
        else:
            b = np.sort(rng.choice(b, size=a.size, replace=False))
    return float(np.mean(np.abs(a - b)))
