"""Exact engine for finite spaces.

A finite space enters only through its rank matrix: row i lists, for every
point t, the position of d(i,t) in the ascending sort of distances from i
(self = 1).  Given a weight vector theta over the points and a pair (j, k),
the chain samples k points i.i.d. from theta and jumps to the j'th closest.
This module builds the resulting transition matrix exactly, solves for
stationary vectors, iterates the induced map on distributions, and searches
for its fixed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

__all__ = [
    "RankMatrix",
    "Distribution",
    "KernelMatrix",
    "FixedPointReport",
    "binomial_tail_ge",
    "build_kernel",
    "brute_force_kernel",
    "stationary",
    "apply_pi",
    "iterate_exact",
    "find_fixed_points",
    "refine_fixed_point",
    "stability_spectrum",
    "feasibility_search",
    "random_rank_matrix",
]

# Toggled on by the test suite: every apply_pi on a full-support input then
# asserts theta_i^k <= pi_i <= k*theta_i.
SANDWICH_CHECK = False

_WEIGHT_TOL = 1e-12


class TieError(ValueError):
    """A distance row contains a tie where distinct ranks were required."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class RankMatrix:
    """Per-row nearest-neighbor ordering of a finite space.

    ``r[i, t]`` is the rank of point t among the distances from i, with
    ``r[i, i] == 1``.  Rows are permutations of 1..n unless the matrix was
    built with ties allowed, in which case tied points share their minimal
    rank and only the brute-force kernel accepts the matrix.
    """

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.int64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"rank matrix must be square, got shape {r.shape}")
        n = r.shape[0]
        if not np.all(np.diagonal(r) == 1):
            raise ValueError("rank matrix diagonal must be all 1 (self is closest)")
        for i in range(n):
            row = np.sort(r[i])
            # valid min-rank row: each value v occurs at positions where
            # exactly v-1 entries are strictly smaller
            counts = np.bincount(r[i], minlength=n + 2)
            pos = 1
            for v in range(1, n + 1):
                c = counts[v]
                if c == 0:
                    continue
                if v != pos:
                    raise ValueError(f"row {i} is not a valid rank row: {r[i].tolist()}")
                pos += c
            if counts[1] != 1:
                raise ValueError(f"row {i} must have the unique rank 1 on the diagonal")
            del row
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.r.shape[0]

    @property
    def has_ties(self) -> bool:
        n = self.n
        return any(len(np.unique(self.r[i])) != n for i in range(n))

    def to_csv(self, path) -> None:
        np.savetxt(path, self.r, fmt="%d", delimiter=",")

    @classmethod
    def from_csv(cls, path) -> "RankMatrix":
        return cls(np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2))


@dataclass(frozen=True)
class Distribution:
    """Probability weights over the points of a finite space."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-D sequence")
        if np.any(w < -_WEIGHT_TOL):
            raise ValueError(f"negative weight: min={w.min()}")
        if abs(w.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        w[w < 0] = 0.0
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    def support_size(self, eps: float = 1e-9) -> int:
        return int(np.sum(self.weights > eps))

    def l1(self, other: "Distribution") -> float:
        return float(np.abs(self.weights - other.weights).sum())

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, s: int) -> "Distribution":
        w = np.zeros(n)
        w[s] = 1.0
        return cls(w)

    @classmethod
    def two_point(cls, n: int, s1: int, s2: int) -> "Distribution":
        if s1 == s2:
            raise ValueError("two_point needs distinct points")
        w = np.zeros(n)
        w[s1] = w[s2] = 0.5
        return cls(w)


@dataclass(frozen=True)
class KernelMatrix:
    """Row-stochastic transition matrix."""

    k: np.ndarray

    def __post_init__(self):
        m = np.array(self.k, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"kernel must be square, got {m.shape}")
        if np.any(m < -_WEIGHT_TOL):
            raise ValueError("kernel entries must be nonnegative")
        rowsum = m.sum(axis=1)
        if np.any(np.abs(rowsum - 1.0) > _WEIGHT_TOL):
            raise ValueError(f"kernel rows must sum to 1, worst={rowsum[np.argmax(np.abs(rowsum-1))]!r}")
        m.setflags(write=False)
        object.__setattr__(self, "k", m)

    @property
    def n(self) -> int:
        return self.k.shape[0]

    def to_csv(self, path) -> None:
        np.savetxt(path, self.k, delimiter=",")

    @classmethod
    def from_csv(cls, path) -> "KernelMatrix":
        return cls(np.loadtxt(path, delimiter=",", ndmin=2))


@dataclass(frozen=True)
class FixedPointReport:
    """A verified fixed point of the map theta -> pi_{j,k}(theta)."""

    theta_star: Distribution
    residual: float
    support_size: int
    spectral_radius: float
    stability: str  # "stable" | "unstable" | "marginal"

    @property
    def is_omnipresent(self) -> bool:
        w = self.theta_star.weights
        s = self.support_size
        if s == 1:
            return True
        if s == 2:
            top = np.sort(w)[-2:]
            return bool(np.all(np.abs(top - 0.5) < 1e-6))
        return False

    def to_jsonable(self) -> dict:
        return {
            "theta_star": self.theta_star.weights.tolist(),
            "residual": self.residual,
            "support_size": self.support_size,
            "spectral_radius": self.spectral_radius,
            "stability": self.stability,
        }


# ---------------------------------------------------------------------------
# binomial tail


def _tail_terms(k: int, q: float, j: int) -> float:
    # direct upper-tail summation; evaluated as a polynomial so slightly
    # out-of-range q (finite-difference probes) stays meaningful
    return math.fsum(
        math.comb(k, i) * q**i * (1.0 - q) ** (k - i) for i in range(j, k + 1)
    )


def binomial_tail_ge(k: int, q: float, j: int) -> float:
    """P(Binomial(k, q) >= j) by direct summation; stable for k <= 64."""
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if j <= 0:
        return 1.0
    if j > k:
        return 0.0
    return _tail_terms(k, q, j)


def _tail_vec(k: int, q: np.ndarray, j: int) -> np.ndarray:
    out = np.zeros_like(q)
    for i in range(j, k + 1):
        out += math.comb(k, i) * q**i * (1.0 - q) ** (k - i)
    return out


# ---------------------------------------------------------------------------
# kernel construction


def _validate_jk(j: int, k: int) -> None:
    if k < 2 or not (1 <= j <= k):
        raise ValueError(f"need k >= 2 and 1 <= j <= k, got j={j}, k={k}")


def _kernel_rows(r: np.ndarray, w: np.ndarray, j: int, k: int) -> np.ndarray:
    """Kernel via the order-statistic identity, no input validation.

    Row i: the landing point is the one whose rank is the j'th smallest of
    the k sampled ranks, so with F_i(m) the theta-mass at rank <= m the
    landing probability at rank m is B_j(F_i(m)) - B_j(F_i(m-1)) with
    B_j(q) = P(Bin(k, q) >= j).  Accepts signed weights summing to 1; the
    tail is evaluated as a polynomial, which is the analytic continuation
    used by finite-difference probes at the simplex boundary.
    """
    n = r.shape[0]
    order = np.argsort(r, axis=1, kind="stable")  # points by increasing rank
    cum = np.cumsum(np.take_along_axis(np.broadcast_to(w, (n, n)), order, axis=1), axis=1)
    tails = _tail_vec(k, cum, j)
    probs = np.diff(tails, axis=1, prepend=0.0)
    kmat = np.empty((n, n))
    np.put_along_axis(kmat, order, probs, axis=1)
    return kmat


def build_kernel(R: RankMatrix, theta: Distribution, j: int, k: int) -> KernelMatrix:
    """Exact transition matrix of the jump-to-j'th-closest chain.

    O(n^2 k); requires distinct ranks per row.  Tied rank matrices are
    routed to :func:`brute_force_kernel`, which resolves equal-distance
    sample blocks by a uniform choice.
    """
    _validate_jk(j, k)
    if R.n != theta.n:
        raise ValueError(f"size mismatch: rank matrix n={R.n}, theta n={theta.n}")
    if R.has_ties:
        return brute_force_kernel(R, theta, j, k)
    return KernelMatrix(_kernel_rows(R.r, theta.weights, j, k))


def brute_force_kernel(
    R: RankMatrix, theta: Distribution, j: int, k: int, budget: int = 10**7
) -> KernelMatrix:
    """Independent oracle: enumerate all n^k ordered sample tuples.

    Each tuple is weighted by the product of theta-weights; its samples are
    sorted by rank from the current point and the j'th order position is
    taken, splitting the tuple's weight uniformly over a tied block.
    """
    _validate_jk(j, k)
    n = R.n
    if n != theta.n:
        raise ValueError(f"size mismatch: rank matrix n={R.n}, theta n={theta.n}")
    total = n**k
    if total > budget:
        raise ValueError(f"enumeration budget exceeded: n^k = {total} > {budget}")
    w = theta.weights
    r = R.r
    kmat = np.zeros((n, n))
    chunk = 200_000
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total))
        tuples = np.stack(np.unravel_index(idx, (n,) * k), axis=1)  # (m, k)
        tweight = np.prod(w[tuples], axis=1)
        for i in range(n):
            ranks = r[i][tuples]  # (m, k)
            v = np.sort(ranks, axis=1)[:, j - 1]  # rank value at order position j
            tied = ranks == v[:, None]
            share = tweight / tied.sum(axis=1)
            contrib = np.broadcast_to(share[:, None], tied.shape)[tied]
            np.add.at(kmat[i], tuples[tied], contrib)
    return KernelMatrix(kmat)


# ---------------------------------------------------------------------------
# stationary vectors and the induced map on distributions


def _stationary_vec(kmat: np.ndarray, residual_tol: float = 1e-12) -> np.ndarray:
    n = kmat.shape[0]
    if n <= 512:
        # pi (K - I + J) = 1 with J the all-ones matrix is nonsingular
        # exactly when the stationary vector is unique
        m = (kmat - np.eye(n)).T + np.ones((n, n))
        try:
            x = scipy.linalg.solve(m, np.ones(n))
        except scipy.linalg.LinAlgError as e:
            raise ValueError("kernel has no unique stationary vector") from e
    else:
        x = np.full(n, 1.0 / n)
        for _ in range(200_000):
            # lazy step kills periodicity without changing the fixed vector
            x_new = 0.5 * (x + x @ kmat)
            if np.abs(x_new - x).sum() < 1e-15 * n:
                x = x_new
                break
            x = x_new
        else:
            raise ValueError("power iteration did not converge (reducible or periodic kernel?)")
    if np.abs(x @ kmat - x).sum() > residual_tol:
        raise ValueError("stationary solve residual too large (reducible or periodic kernel?)")
    return x


def stationary(K: KernelMatrix) -> Distribution:
    """The unique theta with theta K = theta, l1 residual <= 1e-12.

    Direct linear solve for n <= 512, lazy power iteration beyond.  Raises
    if the kernel has no unique stationary vector (cannot happen for
    kernels built from a full-support theta).
    """
    x = _stationary_vec(K.k)
    x = np.where(x < 0, 0.0, x)
    return Distribution(x / x.sum())


def _pi_vec(r: np.ndarray, w: np.ndarray, j: int, k: int) -> np.ndarray:
    """Unvalidated pi_{j,k} for signed weight probes; returns a raw vector."""
    x = _stationary_vec(_kernel_rows(r, w, j, k), residual_tol=1e-9)
    return x


def apply_pi(R: RankMatrix, theta: Distribution, j: int, k: int) -> Distribution:
    """pi_{j,k}(theta): stationary distribution of the built kernel."""
    out = stationary(build_kernel(R, theta, j, k))
    if SANDWICH_CHECK and theta.support_size(0.0) == theta.n:
        t, p = theta.weights, out.weights
        if np.any(p > k * t + 1e-9) or np.any(p < t**k - 1e-9):
            raise AssertionError("sandwich bound theta^k <= pi <= k theta violated")
    return out


def iterate_exact(
    R: RankMatrix, theta0: Distribution, j: int, k: int, n_steps: int
) -> list[Distribution]:
    """Trajectory [theta0, pi(theta0), pi^2(theta0), ...] of length n_steps+1."""
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    out = [theta0]
    for _ in range(n_steps):
        out.append(apply_pi(R, out[-1], j, k))
    return out


# ---------------------------------------------------------------------------
# fixed points


def refine_fixed_point(
    R: RankMatrix, theta: Distribution, j: int, k: int, tol: float = 1e-10
) -> Distribution | None:
    """Newton-polish a near-fixed point, restricted to its support face.

    Returns None when no fixed point is reachable from theta at the
    requested tolerance.  Starting from an actual fixed point of the map,
    the result stays within refinement noise of the input, which makes this
    the cross-check for claims that two parameter pairs share a fixed point.
    """
    w = theta.weights
    sup = np.nonzero(w > 1e-12)[0]
    out = _newton_refine(R.r, w, j, k, tol, support=sup if sup.size < R.n else None)
    return None if out is None else Distribution(out)


def _tangent_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the zero-sum subspace, shape (n, n-1)."""
    a = np.eye(n) - np.full((n, n), 1.0 / n)
    q, _ = np.linalg.qr(a[:, : n - 1])
    return q


def stability_spectrum(
    R: RankMatrix,
    theta_star: Distribution,
    j: int,
    k: int,
    h: float = 1e-6,
    tol: float = 1e-8,
) -> float:
    """Spectral radius of the Jacobian of theta -> pi_{j,k}(theta) at a fixed point.

    Central finite differences along an orthonormal basis of the simplex
    tangent space; the weight vector is probed slightly outside the simplex
    at boundary fixed points, where the polynomial kernel extends smoothly.
    """
    res = apply_pi(R, theta_star, j, k).l1(theta_star)
    if res > tol:
        raise ValueError(f"theta_star is not a fixed point: residual {res:.3e} > {tol}")
    n = R.n
    u = _tangent_basis(n)
    w = theta_star.weights
    cols = np.empty((n, n - 1))
    for d in range(n - 1):
        step = h * u[:, d]
        cols[:, d] = (_pi_vec(R.r, w + step, j, k) - _pi_vec(R.r, w - step, j, k)) / (2 * h)
    reduced = u.T @ cols
    return float(np.max(np.abs(np.linalg.eigvals(reduced))))


def _stability_tag(radius: float) -> str:
    if radius > 1.0 + 1e-6:
        return "unstable"
    if radius < 1.0 - 1e-6:
        return "stable"
    return "marginal"


def _newton_refine(
    r: np.ndarray,
    w0: np.ndarray,
    j: int,
    k: int,
    tol: float,
    support: np.ndarray | None = None,
    max_steps: int = 100,
) -> np.ndarray | None:
    """Newton on G(theta) = pi(theta) - theta in a drop-last-coordinate chart.

    With `support` given, the refinement runs on that face of the simplex
    (faces are invariant under the map, so a face fixed point is a fixed
    point of the full system).  Runs to numerical exhaustion rather than
    stopping at tol: along curvature-flat directions the residual scales
    like a power of the distance to the root, so a residual-based stop
    would freeze far from it while Newton still contracts every step.
    """
    n = r.shape[0]
    sup = np.arange(n) if support is None else np.asarray(support)
    m = sup.size
    if m == 1:
        w = np.zeros(n)
        w[sup[0]] = 1.0
        return w

    def embed(wm):
        w = np.zeros(n)
        w[sup] = wm
        return w

    def g_red(wm):
        wfull = embed(wm)
        return (_pi_vec(r, wfull, j, k) - wfull)[sup][: m - 1]

    wm = w0[sup].copy()
    wm /= wm.sum()
    best_w, best_g = None, np.inf
    fd = 1e-7
    stale = 0
    for _ in range(max_steps):
        try:
            g = g_red(wm)
        except ValueError:
            break
        gnorm = np.abs(g).sum()
        if gnorm < best_g:
            best_w, best_g = wm.copy(), gnorm
            stale = 0
        else:
            stale += 1
        if gnorm <= 1e-15 * m or stale >= 3:
            break
        jac = np.empty((m - 1, m - 1))
        bad = False
        for d in range(m - 1):
            pert = np.zeros(m)
            pert[d] = fd
            pert[m - 1] = -fd
            try:
                jac[:, d] = (g_red(wm + pert) - g) / fd
            except ValueError:
                bad = True
                break
        if bad:
            break
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            break
        # backtrack so the iterate stays essentially on the simplex face
        scale = 1.0
        for _ in range(30):
            z = wm[: m - 1] + scale * step
            cand = np.append(z, 1.0 - z.sum())
            if cand.min() >= -1e-9 and cand.max() <= 1.0 + 1e-9:
                break
            scale *= 0.5
        else:
            break
        if np.abs(cand - wm).max() < 1e-15:
            wm = cand
            break
        wm = cand
    if best_w is None or best_g > 0.5 * tol:
        return None
    w = np.clip(embed(best_w), 0.0, None)
    w[w < 1e-12] = 0.0
    return w / w.sum()


def _damped_steps(r, w, j, k, n_steps, alpha=0.5):
    for _ in range(n_steps):
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        w = (1 - alpha) * w + alpha * _pi_vec(r, w, j, k)
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def find_fixed_points(
    R: RankMatrix,
    j: int,
    k: int,
    n_restarts: int = 64,
    tol: float = 1e-10,
    seed: int = 0,
) -> list[FixedPointReport]:
    """Search for fixed points of theta -> pi_{j,k}(theta).

    Every one-point and uniform two-point distribution is verified and
    included; further candidates come from Dirichlet(1,...,1) restarts,
    briefly damped then refined by Newton in the simplex chart, with damped
    iteration as the fallback.  Results are deduplicated at l1 distance
    10*tol and reported with their finite-difference spectral radius.
    """
    _validate_jk(j, k)
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    n = R.n
    r = R.r
    candidates: list[np.ndarray] = []

    for s in range(n):
        candidates.append(Distribution.point_mass(n, s).weights)
    for s1 in range(n):
        for s2 in range(s1 + 1, n):
            candidates.append(Distribution.two_point(n, s1, s2).weights)
    if n <= 12:
        # uniform weights on a subset are fixed whenever the subset's rank
        # structure is balanced; cheap to verify for every subset
        for mask in range(1, 2**n):
            idx = [s for s in range(n) if mask >> s & 1]
            if len(idx) >= 3:
                w = np.zeros(n)
                w[idx] = 1.0 / len(idx)
                candidates.append(w)

    rng = np.random.default_rng(seed)
    for t in range(n_restarts):
        if t % 2 == 0 or n <= 3:
            # interior start: short damping, then Newton on the full simplex
            w0 = rng.dirichlet(np.ones(n))
            w = _damped_steps(r, w0, j, k, 3)
            refined = _newton_refine(r, w, j, k, tol)
            if refined is None:
                refined = _damped_steps(r, w0, j, k, 500)
        else:
            # face start: sporadic fixed points often live on proper faces
            # whose interior basins random full-simplex starts rarely hit
            size = int(rng.integers(3, n + 1))
            face = np.sort(rng.choice(n, size=size, replace=False))
            w0 = np.zeros(n)
            w0[face] = rng.dirichlet(np.ones(size))
            refined = _newton_refine(r, _damped_steps(r, w0, j, k, 3), j, k, tol, support=face)
            if refined is None:
                continue
        candidates.append(refined)

    def residual_of(w):
        theta = Distribution(w)
        return apply_pi(R, theta, j, k).l1(theta)

    def polish(w):
        # Near-marginal directions let Newton stall with sub-1e-3 dust that
        # the residual cannot see; re-refining on the dust-free face (which
        # is invariant under the map) recovers the exact fixed point there.
        # A candidate within stall range of a verified smaller-support fixed
        # point is reported as that fixed point.
        options = []
        res = residual_of(w)
        if res <= tol:
            options.append((w, res))
        for thresh in (1e-5, 1e-3):
            small = (w > 0) & (w < thresh)
            if small.any() and np.count_nonzero(w) > small.sum():
                face = np.nonzero(w >= thresh)[0]
                wr = _newton_refine(r, w, j, k, tol, support=face)
                if wr is not None and np.abs(wr - w).sum() <= 1e-2:
                    res_r = residual_of(wr)
                    if res_r <= tol:
                        options.append((wr, res_r))
        if not options:
            return None
        options.sort(key=lambda t: (np.count_nonzero(t[0]), t[1]))
        return options[0]

    # verify, dedup (keep the best residual of each cluster), sort for determinism
    verified: list[tuple[np.ndarray, float]] = []
    for w in candidates:
        out = polish(w)
        if out is not None:
            verified.append(out)
    verified.sort(key=lambda t: tuple(np.round(t[0], 12)))
    kept: list[tuple[np.ndarray, float]] = []
    for w, res in verified:
        for i, (wk, rk) in enumerate(kept):
            if np.abs(w - wk).sum() <= 10 * tol:
                if res < rk:
                    kept[i] = (w, res)
                break
        else:
            kept.append((w, res))

    reports = []
    for w, res in kept:
        theta = Distribution(w)
        radius = stability_spectrum(R, theta, j, k, tol=max(tol, 1e-8))
        reports.append(
            FixedPointReport(
                theta_star=theta,
                residual=res,
                support_size=theta.support_size(1e-7),
                spectral_radius=radius,
                stability=_stability_tag(radius),
            )
        )
    return reports


# ---------------------------------------------------------------------------
# feasibility of rank matrices


def _rank_rows(dist: np.ndarray) -> np.ndarray:
    order = np.argsort(dist, axis=1, kind="stable")
    ranks = np.empty_like(order)
    n = dist.shape[0]
    np.put_along_axis(ranks, order, np.arange(1, n + 1)[None, :].repeat(n, axis=0), axis=1)
    return ranks


def feasibility_search(R: RankMatrix, margin: float = 1e-3, seed: int = 0) -> np.ndarray | None:
    """Find a distance matrix realizing R, or report failure at this margin.

    Searches symmetric D with off-diagonal entries in [1, 2] (so the
    triangle inequality holds automatically) whose within-row ordering
    matches R with gaps >= margin, via linear programming; a feasible point
    is then jittered inside the margins so all entries are distinct.
    Returns None when the LP is infeasible at the given margin -- absence
    of a witness, not a proof of infeasibility.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    if R.has_ties:
        raise ValueError("feasibility search requires a tie-free rank matrix")
    n = R.n
    pair_index = {}
    for a in range(n):
        for b in range(a + 1, n):
            pair_index[(a, b)] = len(pair_index)
    npairs = len(pair_index)

    def var(a, b):
        return pair_index[(min(a, b), max(a, b))]

    rows = []
    for i in range(n):
        by_rank = np.argsort(R.r[i], kind="stable")  # rank 1 first (the diagonal)
        for m in range(1, n - 1):
            a = np.zeros(npairs)
            a[var(i, by_rank[m])] += 1.0
            a[var(i, by_rank[m + 1])] -= 1.0
            rows.append(a)
    a_ub = np.array(rows)
    b_ub = np.full(len(rows), -margin)
    res = linprog(
        c=np.zeros(npairs),
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(1.0, 2.0 - margin)] * npairs,
        method="highs",
    )
    if not res.success:
        return None

    rng = np.random.default_rng(seed)
    base = res.x
    for _ in range(16):
        jitter = rng.permutation(npairs) + rng.random(npairs)
        x = base + jitter * (margin / (4.0 * npairs))
        d = np.zeros((n, n))
        for (a, b), idx in pair_index.items():
            d[a, b] = d[b, a] = x[idx]
        offdiag = x
        if len(np.unique(offdiag)) == npairs and np.array_equal(_rank_rows(d), R.r):
            return d
    return None


# ---------------------------------------------------------------------------
# test/scan helper


def random_rank_matrix(n: int, seed: int = 0) -> RankMatrix:
    """Random rank matrix: each row an independent uniform permutation with r(i,i)=1."""
    rng = np.random.default_rng(seed)
    r = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        perm = rng.permutation(n - 1) + 2
        r[i, :i] = perm[:i]
        r[i, i] = 1
        r[i, i + 1 :] = perm[i:]
    return RankMatrix(r)
