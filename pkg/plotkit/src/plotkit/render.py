"""Figure rendering from run artifacts.

Numbers shown on the figures are read from the artifacts and passed
through unmodified; the only computed curves are the density estimates
(Gaussian KDE, Silverman bandwidth) and the cobweb's scalar map, both of
which are rendering mathematics rather than run data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import artifacts
from .artifacts import ArtifactError

PLOT_KINDS = ("density_iterates", "sd_log", "cobweb", "circle_density", "distance_hist")

KDE_CAVEAT = "KDE is inaccurate for sharply peaked distributions (s.d. < 0.01 iterates present)"


@dataclass(frozen=True)
class PlotSpec:
    run_dir: str | None
    kind: str
    out_path: str
    iterates: tuple | None = None  # None = all available
    j: int | None = None  # cobweb
    k: int | None = None  # cobweb
    table_csv: str | None = None  # cobweb: p_crit source
    p0: float = 0.45  # cobweb staircase start
    bins: int = 60  # histogram kinds

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; choose from {PLOT_KINDS}")
        if self.kind == "cobweb":
            if self.j is None or self.k is None:
                raise ValueError("cobweb needs --j and --k")
        elif self.run_dir is None:
            raise ValueError(f"{self.kind} needs a run directory")


@dataclass
class RenderResult:
    path: Path
    series: dict
    warnings: list = field(default_factory=list)


def _silverman(x: np.ndarray) -> float:
    sd = float(x.std())
    iqr = float(np.subtract(*np.percentile(x, [75, 25])))
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * scale * x.size ** (-0.2)


def _kde_curve(x: np.ndarray, lo: float, hi: float, wrap: bool = False):
    """Histogram-convolution Gaussian KDE on a fixed grid; None if degenerate."""
    h = _silverman(x)
    grid_n = 1024
    width = hi - lo
    if h <= width / grid_n:
        return None
    hist, edges = np.histogram(x, bins=grid_n, range=(lo, hi))
    centers = 0.5 * (edges[1:] + edges[:-1])
    offs = centers - centers[0]
    if wrap:
        arc = np.minimum(offs, width - offs)
        kernel = np.exp(-0.5 * (arc / h) ** 2)
        kernel /= kernel.sum()
        dens = np.fft.irfft(np.fft.rfft(hist) * np.fft.rfft(kernel), n=grid_n)
    else:
        half = np.exp(-0.5 * (offs / h) ** 2)
        kernel = np.concatenate([half, half[1:-1][::-1]])
        kernel /= kernel.sum()
        padded = np.concatenate([hist, np.zeros(grid_n - 2)])
        dens = np.fft.irfft(np.fft.rfft(padded) * np.fft.rfft(kernel), n=padded.size)[:grid_n]
    dens = np.clip(dens, 0.0, None) / x.size * grid_n / width
    return centers, dens


def _select_iterates(spec: PlotSpec, available: list[int]) -> list[int]:
    if spec.iterates is None:
        return available
    missing = [g for g in spec.iterates if g not in available]
    if missing:
        raise ArtifactError(f"iterates {missing} not present in the run")
    return list(spec.iterates)


# ---------------------------------------------------------------------------
# kinds


def _render_sd_log(spec: PlotSpec, ax) -> RenderResult:
    summ = artifacts.read_summaries(spec.run_dir)
    gens, sds = summ["generation"], summ["sd"]
    ax.plot(gens, sds, marker="o", lw=1.2)
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("s.d. of iterate (log scale)")
    return RenderResult(path=None, series={"generation": gens, "sd": sds})


def _render_densities(spec: PlotSpec, ax, wrap: bool) -> RenderResult:
    summ = artifacts.read_summaries(spec.run_dir)
    gens = _select_iterates(spec, summ["generation"])
    warnings = []
    series = {"iterates": gens, "sd": [summ["sd"][g] for g in gens]}
    lo, hi = (0.0, 1.0)
    if not wrap:
        ranges = []
        for g in gens:
            x = artifacts.read_samples(spec.run_dir, g)
            if x is not None and x.size:
                ranges.append((float(x.min()), float(x.max())))
        if ranges:
            lo = min(r[0] for r in ranges)
            hi = max(r[1] for r in ranges)
            if hi <= lo:
                lo, hi = lo - 0.5, lo + 0.5
    for g in gens:
        x = artifacts.read_samples(spec.run_dir, g)
        label = f"iterate {g}"
        if x is None:
            s = artifacts.read_iterate_summary(spec.run_dir, g)
            q = s["quantiles"]
            ax.plot(q, np.linspace(0.01, 0.99, len(q)), ls=":", label=label + " (quantiles)")
            warnings.append(f"iterate {g}: no samples; drew summary quantiles")
            continue
        curve = _kde_curve(x, lo, hi, wrap=wrap)
        if curve is None:
            ax.hist(x, bins=spec.bins, range=(lo, hi), density=True, alpha=0.45, label=label)
            warnings.append(f"iterate {g}: degenerate KDE bandwidth; drew a histogram")
        else:
            ax.plot(*curve, lw=1.1, label=label)
    if any(summ["sd"][g] < 0.01 for g in gens):
        ax.annotate(
            KDE_CAVEAT, xy=(0.5, -0.13), xycoords="axes fraction",
            ha="center", fontsize=7, color="0.35", annotation_clip=False,
        )
    ax.set_xlabel("position" if not wrap else "circle position")
    ax.set_ylabel("density")
    ax.legend(fontsize=7)
    return RenderResult(path=None, series=series, warnings=warnings)


def _binomial_tail_ge(k: int, q: float, j: int) -> float:
    if j <= 0:
        return 1.0
    if j > k:
        return 0.0
    return math.fsum(math.comb(k, i) * q**i * (1 - q) ** (k - i) for i in range(j, k + 1))


def _scalar_map(p: float, j: int, k: int) -> float:
    if p in (0.0, 1.0):
        return p
    num = _binomial_tail_ge(k, p, k - j + 1)
    den = 1.0 - _binomial_tail_ge(k, p, j)
    return num / (num + den)


def _render_cobweb(spec: PlotSpec, ax) -> RenderResult:
    j, k = spec.j, spec.k
    grid = np.linspace(0.0, 1.0, 801)
    curve = np.array([_scalar_map(p, j, k) for p in grid])
    ax.plot(grid, curve, lw=1.4, label=f"map (j={j}, k={k})")
    ax.plot(grid, grid, lw=0.8, color="0.5")
    p = spec.p0
    steps = [p]
    for _ in range(24):
        q = _scalar_map(p, j, k)
        ax.plot([p, p], [p, q], color="tab:red", lw=0.7)
        ax.plot([p, q], [q, q], color="tab:red", lw=0.7)
        p = q
        steps.append(p)
    warnings = []
    p_crit = None
    if spec.table_csv:
        table = artifacts.read_classification_table(spec.table_csv)
        row = table.get((j, k))
        if row and row["p_crit"] is not None:
            p_crit = row["p_crit"]
            ax.axvline(p_crit, color="tab:green", ls="--", lw=1.0)
            ax.annotate(f"{p_crit:.5f}", xy=(p_crit, 0.02), fontsize=8, color="tab:green")
        else:
            warnings.append(f"no critical weight for (j={j}, k={k}) in the table")
    ax.set_xlabel("p")
    ax.set_ylabel("map(p)")
    ax.legend(fontsize=8)
    return RenderResult(
        path=None,
        series={"grid": grid.tolist(), "map": curve.tolist(), "steps": steps, "p_crit_marked": p_crit},
        warnings=warnings,
    )


def _render_distance_hist(spec: PlotSpec, ax) -> RenderResult:
    summ = artifacts.read_summaries(spec.run_dir)
    gens = _select_iterates(spec, summ["generation"])
    warnings = []
    for g in gens:
        x = artifacts.read_samples(spec.run_dir, g)
        if x is None:
            warnings.append(f"iterate {g}: no samples; skipped")
            continue
        ax.hist(x, bins=spec.bins, density=True, histtype="step", label=f"iterate {g}")
    ax.set_xlabel("distance to origin")
    ax.set_ylabel("density")
    ax.legend(fontsize=7)
    return RenderResult(path=None, series={"iterates": gens}, warnings=warnings)


def render(spec: PlotSpec) -> RenderResult:
    """Render one figure; returns the output path and the plotted series."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    try:
        if spec.kind == "sd_log":
            result = _render_sd_log(spec, ax)
        elif spec.kind == "density_iterates":
            result = _render_densities(spec, ax, wrap=False)
        elif spec.kind == "circle_density":
            result = _render_densities(spec, ax, wrap=True)
        elif spec.kind == "cobweb":
            result = _render_cobweb(spec, ax)
        else:
            result = _render_distance_hist(spec, ax)
        out = Path(spec.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.tight_layout()
        fig.savefig(out)
        result.path = out
        return result
    finally:
        plt.close(fig)
