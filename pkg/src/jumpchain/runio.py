"""Scenario configuration, run orchestration, and artifact persistence.

A run directory holds a verbatim config echo, one summary per iterate, an
append-only summaries.csv, optionally thinned per-iterate samples, the
latest native-population state for resuming, and a final artifact.json.
Re-executing a run from its config echo reproduces summaries.csv
byte-for-byte.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import diagnostics, particles, spaces
from .diagnostics import IterateSummary, LimitClassification
from .exact import Distribution, RankMatrix
from .particles import MixingPolicy

__all__ = [
    "ScenarioConfig",
    "RunArtifact",
    "CONFIG_SCHEMA",
    "load_scenario",
    "run_iterative",
    "resume_run",
    "classify_run",
]

LOCK_NAME = "run.lock"
DEFAULT_THIN_CAP = 50_000

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["name", "space", "initial", "j", "k", "engine", "n_particles", "n_iterations", "seed"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "space": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["interval", "circle", "hypercube", "point_cloud", "finite_rank"]},
                "dimension": {"type": "integer", "minimum": 1},
                "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "points": {"type": "array"},
                "table": {"type": ["array", "null"]},
                "rank_matrix": {"type": "array"},
            },
        },
        "initial": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {
                    "enum": [
                        "uniform_interval",
                        "tilted",
                        "more_tilted",
                        "uniform_circle",
                        "tilted_circle",
                        "gaussian_cube",
                        "finite_weights",
                        "point_mass",
                        "two_point_mass",
                        "dirichlet_random",
                    ]
                },
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "weights": {"type": "array"},
                "location": {},
                "loc1": {},
                "loc2": {},
                "seed": {"type": "integer"},
            },
        },
        "j": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 2},
        "engine": {"enum": ["exact", "mc"]},
        "n_particles": {"type": "integer", "minimum": 1},
        "n_iterations": {"type": "integer", "minimum": 1},
        "policy": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["bound", "adaptive", "fixed"]},
                "epsilon": {"type": "number"},
                "w1_tol": {"type": "number"},
                "check_stride": {"type": "integer", "minimum": 1},
                "t_cap": {"type": ["integer", "null"]},
                "t_fixed": {"type": ["integer", "null"]},
            },
        },
        "seed": {"type": "integer"},
        "thin_cap": {"type": "integer", "minimum": 1},
        "store_full": {"type": "boolean"},
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    space: dict
    initial: dict
    j: int
    k: int
    engine: str
    n_particles: int
    n_iterations: int
    seed: int
    policy: MixingPolicy = field(default_factory=MixingPolicy)
    thin_cap: int = DEFAULT_THIN_CAP
    store_full: bool = False

    def __post_init__(self):
        if not (1 <= self.j <= self.k) or self.k < 2:
            raise ValueError(f"need k >= 2 and 1 <= j <= k, got j={self.j}, k={self.k}")
        if self.engine not in ("exact", "mc"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.engine == "exact" and self.space["type"] not in ("point_cloud", "finite_rank"):
            raise ValueError("the exact engine needs a finite space")

    def build_space(self) -> spaces.Space:
        s = self.space
        t = s["type"]
        if t == "interval":
            return spaces.Interval()
        if t == "circle":
            return spaces.Circle()
        if t == "hypercube":
            return spaces.WeightedHypercube(dimension=s["dimension"], beta=s["beta"])
        if t == "point_cloud":
            return spaces.PointCloud(
                points=np.asarray(s["points"], dtype=float),
                table=None if s.get("table") is None else np.asarray(s["table"], dtype=float),
            )
        if t == "finite_rank":
            return spaces.RankSpace(RankMatrix(np.asarray(s["rank_matrix"], dtype=np.int64)))
        raise ValueError(f"unknown space type {t!r}")

    def build_initial(self) -> spaces.InitialSpec:
        s = self.initial
        t = s["type"]
        if t == "uniform_interval":
            return spaces.UniformInterval()
        if t == "tilted":
            return spaces.Tilted()
        if t == "more_tilted":
            return spaces.MoreTilted()
        if t == "uniform_circle":
            return spaces.UniformCircle()
        if t == "tilted_circle":
            return spaces.TiltedCircle()
        if t == "gaussian_cube":
            return spaces.GaussianCube(alpha=s["alpha"])
        if t == "finite_weights":
            return spaces.FiniteWeights(weights=tuple(s["weights"]))
        if t == "point_mass":
            return spaces.PointMass(location=s["location"])
        if t == "two_point_mass":
            return spaces.TwoPointMass(loc1=s["loc1"], loc2=s["loc2"])
        if t == "dirichlet_random":
            return spaces.DirichletRandom(seed=s["seed"])
        raise ValueError(f"unknown initial type {t!r}")

    def initial_distribution(self) -> Distribution:
        """The exact engine's theta0 for finite scenarios."""
        space = self.build_space()
        n = space.n_points
        init = self.initial
        t = init["type"]
        if t == "finite_weights":
            return Distribution(np.asarray(init["weights"], dtype=float))
        if t == "dirichlet_random":
            return Distribution(np.random.default_rng(init["seed"]).dirichlet(np.ones(n)))
        if t == "point_mass":
            return Distribution.point_mass(n, int(init["location"]))
        if t == "two_point_mass":
            return Distribution.two_point(n, int(init["loc1"]), int(init["loc2"]))
        raise ValueError(f"{t!r} does not define weights on a finite space")

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "space": self.space,
            "initial": self.initial,
            "j": self.j,
            "k": self.k,
            "engine": self.engine,
            "n_particles": self.n_particles,
            "n_iterations": self.n_iterations,
            "seed": self.seed,
            "policy": self.policy.to_jsonable(),
            "thin_cap": self.thin_cap,
            "store_full": self.store_full,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "ScenarioConfig":
        jsonschema.validate(d, CONFIG_SCHEMA)
        d = dict(d)
        policy = MixingPolicy.from_jsonable(d.pop("policy", {}))
        return cls(policy=policy, **d)


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        return ScenarioConfig.from_jsonable(json.load(fh))


@dataclass(frozen=True)
class RunArtifact:
    config: ScenarioConfig
    out_dir: Path
    summaries: list[IterateSummary]
    classification: LimitClassification
    timing_seconds: float
    warnings: tuple = ()


# ---------------------------------------------------------------------------
# CSV formatting (repr round-trips floats, keeping re-runs byte-identical)


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _join(values) -> str:
    return ";".join(_fmt(v) for v in values)


SUMMARY_COLUMNS = (
    "generation,mean,sd,cluster_count,cluster_centers,cluster_masses,"
    "inter_cluster_distance,classification"
)


def _snapshot_label(s: IterateSummary) -> str:
    if s.cluster_masses and s.cluster_masses[0] >= diagnostics.ONE_POINT_MASS:
        return "one_point"
    if (
        len(s.cluster_masses) >= 2
        and s.cluster_masses[0] >= diagnostics.TWO_POINT_MASS
        and s.cluster_masses[1] >= diagnostics.TWO_POINT_MASS
    ):
        return "two_point"
    return "undecided"


def _summary_row(s: IterateSummary) -> str:
    return ",".join(
        [
            str(s.generation),
            _join(s.mean),
            _fmt(s.sd),
            str(s.cluster_count),
            _join(s.cluster_centers),
            _join(s.cluster_masses),
            _fmt(s.inter_cluster_distance),
            _snapshot_label(s),
        ]
    )


def _write_iterate(out: Path, cfg: ScenarioConfig, pop, summary: IterateSummary) -> None:
    itdir = out / f"iter_{summary.generation}"
    itdir.mkdir(exist_ok=True)
    with open(itdir / "summary.json", "w") as fh:
        json.dump(summary.to_jsonable(), fh, indent=2, sort_keys=True)
    if cfg.store_full:
        np.save(itdir / "population.npy", pop.points)
    proj = pop.projected()
    if proj.size > cfg.thin_cap:
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 2, summary.generation)))
        proj = proj[np.sort(rng.choice(proj.size, size=cfg.thin_cap, replace=False))]
    with open(itdir / "samples.csv", "w") as fh:
        fh.write("projection\n")
        fh.write("\n".join(repr(float(v)) for v in proj))
        fh.write("\n")
    np.savez(out / "state_latest.npz", points=pop.points, generation=summary.generation)
    with open(out / "summaries.csv", "a") as fh:
        fh.write(_summary_row(summary) + "\n")


def _finish(out: Path, cfg: ScenarioConfig, summaries, pop, t0) -> RunArtifact:
    if len(summaries) >= 3:
        classification = diagnostics.classify_limit(summaries, pop)
    else:
        classification = LimitClassification(kind="undecided")
    warnings = tuple(pop.lineage.get("warnings", []))
    artifact = {
        "config": cfg.to_jsonable(),
        "classification": classification.to_jsonable(),
        "timing_seconds": time.time() - t0,
        "warnings": list(warnings),
        "n_iterates": len(summaries),
    }
    with open(out / "artifact.json", "w") as fh:
        json.dump(artifact, fh, indent=2, sort_keys=True)
    return RunArtifact(
        config=cfg,
        out_dir=out,
        summaries=list(summaries),
        classification=classification,
        timing_seconds=artifact["timing_seconds"],
        warnings=warnings,
    )


def run_iterative(cfg: ScenarioConfig, out_dir) -> RunArtifact:
    """Execute a Monte Carlo scenario: sample theta_0, iterate, persist.

    Fully deterministic given the config: the initial sample, each
    iteration's evolution, and sample thinning derive their streams from
    (seed, purpose, generation).
    """
    if cfg.engine != "mc":
        raise ValueError("run_iterative drives the mc engine; finite scenarios use the exact CLI")
    t0 = time.time()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lock = out / LOCK_NAME
    if lock.exists():
        raise RuntimeError(f"run directory is locked: {lock}")
    lock.touch()
    try:
        with open(out / "config.json", "w") as fh:
            json.dump(cfg.to_jsonable(), fh, indent=2, sort_keys=True)
        (out / "summaries.csv").write_text(SUMMARY_COLUMNS + "\n")
        space = cfg.build_space()
        pop = spaces.sample_initial(
            cfg.build_initial(), space, cfg.n_particles, np.random.SeedSequence((cfg.seed, 0))
        )
        summaries = [diagnostics.summarize(pop)]
        _write_iterate(out, cfg, pop, summaries[-1])
        for g in range(cfg.n_iterations):
            pop = particles.estimate_pi(
                pop, cfg.j, cfg.k, cfg.policy, np.random.SeedSequence((cfg.seed, 1, g))
            )
            summaries.append(diagnostics.summarize(pop))
            _write_iterate(out, cfg, pop, summaries[-1])
        return _finish(out, cfg, summaries, pop, t0)
    finally:
        lock.unlink(missing_ok=True)


def _load_summaries(out: Path) -> list[IterateSummary]:
    out_list = []
    g = 0
    while (out / f"iter_{g}" / "summary.json").exists():
        with open(out / f"iter_{g}" / "summary.json") as fh:
            d = json.load(fh)
        out_list.append(
            IterateSummary(
                generation=d["generation"],
                mean=tuple(d["mean"]),
                sd=d["sd"],
                quantiles=tuple(d["quantiles"]),
                cluster_count=d["cluster_count"],
                cluster_centers=tuple(d["cluster_centers"]),
                cluster_masses=tuple(d["cluster_masses"]),
                inter_cluster_distance=d["inter_cluster_distance"],
                flags=tuple(d["flags"]),
            )
        )
        g += 1
    if not out_list:
        raise FileNotFoundError(f"no iterate summaries under {out}")
    return out_list


def _load_state(out: Path, cfg: ScenarioConfig):
    with np.load(out / "state_latest.npz") as state:
        pts = state["points"]
        gen = int(state["generation"])
    return spaces.ParticlePopulation(space=cfg.build_space(), points=pts, generation=gen)


def resume_run(out_dir) -> RunArtifact:
    """Continue an interrupted run to its configured iteration count.

    Refuses a directory holding a live lock.  Because every stream is keyed
    by (seed, purpose, generation), the resumed head is identical to what
    an uninterrupted run would have produced.
    """
    t0 = time.time()
    out = Path(out_dir)
    lock = out / LOCK_NAME
    if lock.exists():
        raise RuntimeError(f"run directory is locked: {lock}")
    cfg = load_scenario(out / "config.json")
    summaries = _load_summaries(out)
    pop = _load_state(out, cfg)
    lock.touch()
    try:
        for g in range(pop.generation, cfg.n_iterations):
            pop = particles.estimate_pi(
                pop, cfg.j, cfg.k, cfg.policy, np.random.SeedSequence((cfg.seed, 1, g))
            )
            summaries.append(diagnostics.summarize(pop))
            _write_iterate(out, cfg, pop, summaries[-1])
        return _finish(out, cfg, summaries, pop, t0)
    finally:
        lock.unlink(missing_ok=True)


def classify_run(out_dir) -> LimitClassification:
    """Re-run limit classification from a run directory's artifacts."""
    out = Path(out_dir)
    cfg = load_scenario(out / "config.json")
    summaries = _load_summaries(out)
    pop = _load_state(out, cfg)
    classification = diagnostics.classify_limit(summaries, pop)
    artifact_path = out / "artifact.json"
    if artifact_path.exists():
        with open(artifact_path) as fh:
            artifact = json.load(fh)
    else:
        artifact = {"config": cfg.to_jsonable()}
    artifact["classification"] = classification.to_jsonable()
    with open(artifact_path, "w") as fh:
        json.dump(artifact, fh, indent=2, sort_keys=True)
    return classification
