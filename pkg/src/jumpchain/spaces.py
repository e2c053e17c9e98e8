"""Metric spaces, initial-distribution samplers, and rank-matrix construction.

Spaces are immutable after construction and safe to share across workers.
Particle populations store interval/circle points as float arrays, weighted
hypercube points as (N, dim) arrays, and point-cloud / rank-only points as
integer indices into the finite ground set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exact import RankMatrix, TieError

__all__ = [
    "Interval",
    "Circle",
    "WeightedHypercube",
    "PointCloud",
    "RankSpace",
    "Line",
    "Space",
    "UniformInterval",
    "Tilted",
    "MoreTilted",
    "UniformCircle",
    "TiltedCircle",
    "GaussianCube",
    "FiniteWeights",
    "PointMass",
    "TwoPointMass",
    "DirichletRandom",
    "InitialSpec",
    "ParticlePopulation",
    "distance",
    "sample_initial",
    "rank_matrix_from_distances",
    "random_btl_space",
    "load_distance_matrix",
    "load_point_cloud",
]


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class Interval:
    """The unit interval [0, 1] with |x - y|."""

    def validate_points(self, pts: np.ndarray) -> None:
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("interval points must form a nonempty 1-D array")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("interval points must lie in [0, 1]")

    def pair_distance(self, x, y):
        return np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def projection(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float)

    @property
    def diameter(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Circle:
    """The circle [0, 1) with the shorter-arc metric."""

    def validate_points(self, pts: np.ndarray) -> None:
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("circle points must form a nonempty 1-D array")
        if pts.min() < 0.0 or pts.max() >= 1.0:
            raise ValueError("circle points must lie in [0, 1)")

    def pair_distance(self, x, y):
        gap = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
        return np.minimum(gap, 1.0 - gap)

    def projection(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float)

    @property
    def diameter(self) -> float:
        return 0.5


@dataclass(frozen=True)
class WeightedHypercube:
    """[0, 1]^dim with d(x, y) = sum_i beta^i |x_i - y_i|, i = 1..dim."""

    dimension: int
    beta: float

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")

    @property
    def _coord_weights(self) -> np.ndarray:
        return self.beta ** np.arange(1, self.dimension + 1)

    def validate_points(self, pts: np.ndarray) -> None:
        if pts.ndim != 2 or pts.shape[1] != self.dimension or pts.shape[0] == 0:
            raise ValueError(f"points must have shape (N, {self.dimension})")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("hypercube points must lie in [0, 1]^dim")

    def pair_distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[-1] != self.dimension or y.shape[-1] != self.dimension:
            raise ValueError("dimension mismatch")
        return np.abs(x - y) @ self._coord_weights

    def projection(self, pts: np.ndarray) -> np.ndarray:
        # distance to the corner 0, the monitoring statistic for this space
        return np.abs(np.asarray(pts, dtype=float)) @ self._coord_weights

    @property
    def diameter(self) -> float:
        return float(self._coord_weights.sum())


@dataclass(frozen=True)
class PointCloud:
    """A finite set of coordinate points, Euclidean by default.

    A custom distance table (symmetric, zero diagonal, positive
    off-diagonal) may replace the Euclidean metric; it is validated at
    construction so bad geometry fails before a long run.  Populations on a
    cloud are arrays of point indices.
    """

    points: np.ndarray
    table: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < 1:
            raise ValueError("point cloud needs at least one point")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.table is not None:
            t = np.asarray(self.table, dtype=float)
            _validate_distance_matrix(t)
            if t.shape[0] != pts.shape[0]:
                raise ValueError("distance table size does not match point count")
            t.setflags(write=False)
            object.__setattr__(self, "table", t)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def distance_table(self) -> np.ndarray:
        if self.table is not None:
            return self.table
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.sqrt(np.sum(diff**2, axis=-1))

    def validate_points(self, pts: np.ndarray) -> None:
        if pts.ndim != 1 or pts.size == 0 or not np.issubdtype(pts.dtype, np.integer):
            raise ValueError("cloud populations are 1-D arrays of point indices")
        if pts.min() < 0 or pts.max() >= self.n_points:
            raise ValueError("point index outside the cloud")

    def pair_distance(self, x, y):
        return self.distance_table()[np.asarray(x), np.asarray(y)]

    def projection(self, pts: np.ndarray) -> np.ndarray:
        if self.table is None:
            return np.sqrt(np.sum(self.points[pts] ** 2, axis=-1))
        return self.table[pts, 0]  # distance to the first point; no origin in a bare table

    @property
    def diameter(self) -> float:
        return float(self.distance_table().max())


@dataclass(frozen=True)
class RankSpace:
    """A finite space known only through its rank matrix.

    Rank values are a strictly increasing relabeling of the distances from
    each point, so the chain's compare-distances-from-x steps are computed
    from ranks directly.
    """

    rank_matrix: RankMatrix

    @property
    def n_points(self) -> int:
        return self.rank_matrix.n

    def validate_points(self, pts: np.ndarray) -> None:
        if pts.ndim != 1 or pts.size == 0 or not np.issubdtype(pts.dtype, np.integer):
            raise ValueError("rank-space populations are 1-D arrays of point indices")
        if pts.min() < 0 or pts.max() >= self.n_points:
            raise ValueError("point index outside the space")

    def pair_distance(self, x, y):
        # pseudo-distance: valid for comparisons from a common first argument
        return self.rank_matrix.r[np.asarray(x), np.asarray(y)].astype(float)

    def projection(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float)

    @property
    def diameter(self) -> float:
        return float(self.n_points)


@dataclass(frozen=True)
class Line:
    """The real line; the carrier of renormalized (mean 0, sd 1) populations."""

    def validate_points(self, pts: np.ndarray) -> None:
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("line points must form a nonempty 1-D array")

    def pair_distance(self, x, y):
        return np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def projection(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float)

    @property
    def diameter(self) -> float:
        return float("inf")


Space = Union[Interval, Circle, WeightedHypercube, PointCloud, RankSpace, Line]


def distance(space: Space, x, y) -> float:
    """Distance between two points of the space, with domain checks."""
    if isinstance(space, (Interval, Circle)):
        xv, yv = float(x), float(y)
        hi_open = isinstance(space, Circle)
        for v in (xv, yv):
            if v < 0.0 or v > 1.0 or (hi_open and v >= 1.0):
                raise ValueError(f"point {v} outside the domain")
        return float(space.pair_distance(xv, yv))
    if isinstance(space, WeightedHypercube):
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        if xa.shape != (space.dimension,) or ya.shape != (space.dimension,):
            raise ValueError("dimension mismatch")
        if min(xa.min(), ya.min()) < 0.0 or max(xa.max(), ya.max()) > 1.0:
            raise ValueError("point outside the unit cube")
        return float(space.pair_distance(xa, ya))
    if isinstance(space, PointCloud):
        xi, yi = int(x), int(y)
        if not (0 <= xi < space.n_points and 0 <= yi < space.n_points):
            raise ValueError("point index outside the cloud")
        return float(space.pair_distance(xi, yi))
    if isinstance(space, Line):
        return float(space.pair_distance(float(x), float(y)))
    if isinstance(space, RankSpace):
        raise ValueError("a rank-only space carries orderings, not distances")
    raise TypeError(f"not a space: {space!r}")


# ---------------------------------------------------------------------------
# populations


@dataclass(frozen=True)
class ParticlePopulation:
    """A multiset of points representing an empirical distribution."""

    space: Space
    points: np.ndarray
    generation: int = 0
    lineage: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points)
        self.space.validate_points(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def projected(self) -> np.ndarray:
        """Canonical 1-D projection used by all diagnostics."""
        return self.space.projection(self.points)


# ---------------------------------------------------------------------------
# initial distributions


@dataclass(frozen=True)
class UniformInterval:
    pass


@dataclass(frozen=True)
class Tilted:
    """Density 1/2 + u on [0, 1]."""


@dataclass(frozen=True)
class MoreTilted:
    """Density 2u on [0, 1]."""


@dataclass(frozen=True)
class UniformCircle:
    pass


@dataclass(frozen=True)
class TiltedCircle:
    """Density t + 0.5 on the circle; discontinuous at the wrap point."""


@dataclass(frozen=True)
class GaussianCube:
    """Density proportional to exp(-alpha * sum x_i^2) on the cube."""

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class FiniteWeights:
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))


@dataclass(frozen=True)
class PointMass:
    location: object


@dataclass(frozen=True)
class TwoPointMass:
    loc1: object
    loc2: object


@dataclass(frozen=True)
class DirichletRandom:
    """A flat-Dirichlet random weight vector over a finite space.

    The weights are fixed by this spec's own seed; the sampling seed passed
    to sample_initial then draws the points i.i.d. from those weights.
    """

    seed: int


InitialSpec = Union[
    UniformInterval,
    Tilted,
    MoreTilted,
    UniformCircle,
    TiltedCircle,
    GaussianCube,
    FiniteWeights,
    PointMass,
    TwoPointMass,
    DirichletRandom,
]


def _tilted_inverse_cdf(q: np.ndarray) -> np.ndarray:
    # F(u) = (u + u^2)/2 for density 1/2 + u
    return (np.sqrt(1.0 + 8.0 * q) - 1.0) / 2.0


def _gaussian_cube_sample(spec: GaussianCube, space: WeightedHypercube, n: int, rng) -> np.ndarray:
    out = np.empty((n, space.dimension))
    got = 0
    while got < n:
        m = max(4096, int(1.5 * (n - got)))
        cand = rng.random((m, space.dimension))
        accept = rng.random(m) < np.exp(-spec.alpha * np.sum(cand**2, axis=1))
        take = cand[accept][: n - got]
        out[got : got + take.shape[0]] = take
        got += take.shape[0]
    return out


def _finite_index_sample(weights: np.ndarray, n: int, rng) -> np.ndarray:
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(n), side="right").astype(np.int64)


def _point_to_population_value(space: Space, loc):
    if isinstance(space, (PointCloud, RankSpace)):
        return np.int64(loc)
    if isinstance(space, WeightedHypercube):
        return np.asarray(loc, dtype=float)
    return float(loc)


def sample_initial(spec: InitialSpec, space: Space, n: int, seed) -> ParticlePopulation:
    """Draw n i.i.d. points under the spec; bit-identical given the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)

    def incompatible():
        return ValueError(f"{type(spec).__name__} cannot be sampled on {type(space).__name__}")

    if isinstance(spec, UniformInterval):
        if not isinstance(space, Interval):
            raise incompatible()
        pts = rng.random(n)
    elif isinstance(spec, Tilted):
        if not isinstance(space, Interval):
            raise incompatible()
        pts = _tilted_inverse_cdf(rng.random(n))
    elif isinstance(spec, MoreTilted):
        if not isinstance(space, Interval):
            raise incompatible()
        pts = np.sqrt(rng.random(n))
    elif isinstance(spec, UniformCircle):
        if not isinstance(space, Circle):
            raise incompatible()
        pts = rng.random(n)
    elif isinstance(spec, TiltedCircle):
        if not isinstance(space, Circle):
            raise incompatible()
        pts = np.minimum(_tilted_inverse_cdf(rng.random(n)), np.nextafter(1.0, 0.0))
    elif isinstance(spec, GaussianCube):
        if not isinstance(space, WeightedHypercube):
            raise incompatible()
        pts = _gaussian_cube_sample(spec, space, n, rng)
    elif isinstance(spec, FiniteWeights):
        if not isinstance(space, (PointCloud, RankSpace)):
            raise incompatible()
        w = np.asarray(spec.weights)
        if w.size != space.n_points:
            raise ValueError("weight count does not match the space")
        pts = _finite_index_sample(w, n, rng)
    elif isinstance(spec, DirichletRandom):
        if not isinstance(space, (PointCloud, RankSpace)):
            raise incompatible()
        w = np.random.default_rng(spec.seed).dirichlet(np.ones(space.n_points))
        pts = _finite_index_sample(w, n, rng)
    elif isinstance(spec, PointMass):
        v = _point_to_population_value(space, spec.location)
        pts = np.broadcast_to(v, (n,) + np.shape(v)).copy()
    elif isinstance(spec, TwoPointMass):
        v1 = _point_to_population_value(space, spec.loc1)
        v2 = _point_to_population_value(space, spec.loc2)
        pick = rng.random(n) < 0.5
        a = np.broadcast_to(v1, (n,) + np.shape(v1)).copy()
        b = np.broadcast_to(v2, (n,) + np.shape(v2))
        a[~pick] = b[~pick]
        pts = a
    else:
        raise TypeError(f"not an initial-distribution spec: {spec!r}")

    lineage = {"seed": ss.entropy, "spec": type(spec).__name__, "warnings": []}
    return ParticlePopulation(space=space, points=pts, generation=0, lineage=lineage)


# ---------------------------------------------------------------------------
# rank matrices from geometry


def _validate_distance_matrix(d: np.ndarray) -> None:
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got {d.shape}")
    if not np.allclose(d, d.T, rtol=0, atol=0):
        raise ValueError("distance matrix must be exactly symmetric")
    if np.any(np.diagonal(d) != 0.0):
        raise ValueError("distance matrix diagonal must be zero")
    n = d.shape[0]
    if n > 1:
        off = d[~np.eye(n, dtype=bool)]
        if off.min() <= 0.0:
            raise ValueError("off-diagonal distances must be positive")


def rank_matrix_from_distances(D: np.ndarray, allow_ties: bool = False) -> RankMatrix:
    """Rank each row's distances ascending; r(i,i) = 1.

    Raises TieError naming the row and offending pair when two distinct
    points are equidistant from some point, unless allow_ties is set, in
    which case tied points share their minimal rank (and the resulting
    matrix is only usable through the brute-force kernel).
    """
    d = np.asarray(D, dtype=float)
    _validate_distance_matrix(d)
    n = d.shape[0]
    r = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        order = np.argsort(d[i], kind="stable")
        vals = d[i][order]
        tie_pos = np.nonzero(np.diff(vals) == 0.0)[0]
        if tie_pos.size and not allow_ties:
            p = int(tie_pos[0])
            raise TieError(
                f"row {i}: points {order[p]} and {order[p+1]} are equidistant "
                f"from {i} (d = {vals[p]!r})"
            )
        if allow_ties:
            # competition ranking: tied points share the smallest position
            ranks_sorted = np.empty(n, dtype=np.int64)
            pos = 0
            while pos < n:
                end = pos
                while end + 1 < n and vals[end + 1] == vals[pos]:
                    end += 1
                ranks_sorted[pos : end + 1] = pos + 1
                pos = end + 1
            r[i, order] = ranks_sorted
        else:
            r[i, order] = np.arange(1, n + 1)
    return RankMatrix(r)


# ---------------------------------------------------------------------------
# binary-tree-leaf spaces


def random_btl_space(n_leaves: int, seed: int = 0) -> np.ndarray:
    """Leaf-to-leaf path distances of a random binary tree.

    The shape is uniform over unrooted binary topologies (new leaves attach
    to a uniformly chosen edge); edge lengths are i.i.d. uniform on
    (0.5, 1.5), a choice the source never fixes, and are redrawn in the
    probability-zero event of equal pairwise distances.
    """
    if n_leaves < 3:
        raise ValueError("a binary tree needs at least 3 leaves")
    rng = np.random.default_rng(seed)

    center = n_leaves  # first internal node id
    edges = [(0, center), (1, center), (2, center)]
    next_internal = center + 1
    for leaf in range(3, n_leaves):
        eidx = int(rng.integers(len(edges)))
        u, v = edges.pop(eidx)
        m = next_internal
        next_internal += 1
        edges.extend([(u, m), (m, v), (leaf, m)])

    n_nodes = next_internal
    for _ in range(64):
        lengths = rng.uniform(0.5, 1.5, size=len(edges))
        adj = [[] for _ in range(n_nodes)]
        for (u, v), w in zip(edges, lengths):
            adj[u].append((v, w))
            adj[v].append((u, w))
        dist = np.zeros((n_leaves, n_leaves))
        for src in range(n_leaves):
            d = np.full(n_nodes, -1.0)
            d[src] = 0.0
            stack = [src]
            while stack:
                u = stack.pop()
                for v, w in adj[u]:
                    if d[v] < 0:
                        d[v] = d[u] + w
                        stack.append(v)
            dist[src] = d[:n_leaves]
        dist = 0.5 * (dist + dist.T)  # BFS sums differ in the last ulp by root
        off = dist[np.triu_indices(n_leaves, 1)]
        if len(np.unique(off)) == off.size:
            return dist
    raise RuntimeError("could not draw distinct pairwise distances")


# ---------------------------------------------------------------------------
# CSV loading


def _load_numeric_csv(path) -> np.ndarray:
    with open(path) as fh:
        first = fh.readline()
    skip = 0
    for tok in first.strip().split(","):
        try:
            float(tok)
        except ValueError:
            skip = 1
            break
    return np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)


def load_distance_matrix(path) -> np.ndarray:
    """Distance matrix from CSV (optional header row, row-major, zero diagonal)."""
    d = _load_numeric_csv(path)
    _validate_distance_matrix(d)
    return d


def load_point_cloud(path) -> PointCloud:
    """Point cloud from CSV: one point per row, coordinates as columns."""
    return PointCloud(points=_load_numeric_csv(path))
