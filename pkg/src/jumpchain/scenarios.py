"""Bundled benchmark scenarios.

The paper-* names are finite-space benchmarks driven by the exact engine;
the interval/circle/cube families are Monte Carlo scenarios with the
default adaptive mixing policy.  Every config round-trips unchanged
through its JSON form.
"""

from __future__ import annotations

import numpy as np

from .runio import ScenarioConfig

__all__ = [
    "bundled_scenarios",
    "get_scenario",
    "FIVE_POINT_DISTANCES",
    "FIVE_POINT_FIXED_WEIGHTS",
    "UNSTABLE_RANKS_4",
    "UNSTABLE_RANKS_4_WEIGHTS",
    "FOUR_POINT_LINE",
    "NINE_POINT_CLOUD",
]

# 5-point benchmark: a distance matrix whose jump chain admits a
# full-support invariant weight vector for (j, k) = (1, 2)
FIVE_POINT_DISTANCES = (
    (0.0, 1.714, 1.341, 1.656, 1.74),
    (1.714, 0.0, 1.298, 1.794, 1.03),
    (1.341, 1.298, 0.0, 1.715, 1.844),
    (1.656, 1.794, 1.715, 0.0, 1.524),
    (1.74, 1.03, 1.844, 1.524, 0.0),
)
FIVE_POINT_FIXED_WEIGHTS = (0.149, 0.188, 0.203, 0.298, 0.162)

# 4-point rank matrix with an unstable interior fixed point for (1, 2)
UNSTABLE_RANKS_4 = ((1, 2, 4, 3), (2, 1, 3, 4), (4, 2, 1, 3), (2, 4, 3, 1))
UNSTABLE_RANKS_4_WEIGHTS = (1 / 6, 1 / 6, 2 / 6, 2 / 6)

# 4 interval points whose uniform weights are invariant for (3, 4)
FOUR_POINT_LINE = (0.0, 0.4, 0.6, 1.0)

# perturbed 3x3 grid in the plane, run with k = 10
NINE_POINT_CLOUD = (
    (1.3843, 1.2619),
    (1.108, 2.4567),
    (1.1358, 3.4418),
    (2.2758, 3.27),
    (3.022, 1.162),
    (3.3549, 2.477),
    (2.4671, 2.1929),
    (2.3478, 1.3067),
    (3.2165, 3.0299),
)

_MC_N = 200_000
_SEED = 20260809


def _exact(name, space, initial, j, k, n_iterations=20) -> ScenarioConfig:
    return ScenarioConfig(
        name=name,
        space=space,
        initial=initial,
        j=j,
        k=k,
        engine="exact",
        n_particles=1,
        n_iterations=n_iterations,
        seed=_SEED,
    )


def bundled_scenarios() -> list[ScenarioConfig]:
    out = []

    out.append(
        _exact(
            "paper-5pt",
            space={
                "type": "point_cloud",
                "points": [[float(i)] for i in range(5)],
                "table": [list(r) for r in FIVE_POINT_DISTANCES],
            },
            initial={"type": "finite_weights", "weights": [0.2] * 5},
            j=1,
            k=2,
        )
    )
    out.append(
        _exact(
            "paper-R2",
            space={"type": "finite_rank", "rank_matrix": [list(r) for r in UNSTABLE_RANKS_4]},
            initial={"type": "finite_weights", "weights": list(UNSTABLE_RANKS_4_WEIGHTS)},
            j=1,
            k=2,
        )
    )
    out.append(
        _exact(
            "paper-0.4-0.6",
            space={"type": "point_cloud", "points": [[x] for x in FOUR_POINT_LINE], "table": None},
            initial={"type": "finite_weights", "weights": [0.25] * 4},
            j=3,
            k=4,
        )
    )

    out.append(
        ScenarioConfig(
            name="ninepoint_k10",
            space={"type": "point_cloud", "points": [list(p) for p in NINE_POINT_CLOUD], "table": None},
            initial={"type": "dirichlet_random", "seed": 1},
            j=1,
            k=10,
            engine="mc",
            n_particles=50_000,
            n_iterations=15,
            seed=_SEED,
        )
    )

    for k in range(2, 7):
        for j in range(1, k + 1):
            out.append(
                ScenarioConfig(
                    name=f"interval_u_{k}_{j}",
                    space={"type": "interval"},
                    initial={"type": "uniform_interval"},
                    j=j,
                    k=k,
                    engine="mc",
                    n_particles=_MC_N,
                    n_iterations=12,
                    seed=_SEED,
                )
            )

    for name, init in (("interval_tilted", "tilted"), ("interval_more_tilted", "more_tilted")):
        out.append(
            ScenarioConfig(
                name=name,
                space={"type": "interval"},
                initial={"type": init},
                j=4,
                k=4,
                engine="mc",
                n_particles=_MC_N,
                n_iterations=12,
                seed=_SEED,
            )
        )

    out.append(
        ScenarioConfig(
            name="circle_uniform_k4",
            space={"type": "circle"},
            initial={"type": "uniform_circle"},
            j=3,
            k=4,
            engine="mc",
            n_particles=_MC_N,
            n_iterations=12,
            seed=_SEED,
        )
    )
    out.append(
        ScenarioConfig(
            name="circle_disc_k4",
            space={"type": "circle"},
            initial={"type": "tilted_circle"},
            j=4,
            k=4,
            engine="mc",
            n_particles=_MC_N,
            n_iterations=12,
            seed=_SEED,
        )
    )

    for alpha in (0.1, 1.0):
        for beta in (0.7, 0.9):
            for j in (1, 2):
                out.append(
                    ScenarioConfig(
                        name=f"tencube_a{alpha}_b{beta}_j{j}",
                        space={"type": "hypercube", "dimension": 10, "beta": beta},
                        initial={"type": "gaussian_cube", "alpha": alpha},
                        j=j,
                        k=2,
                        engine="mc",
                        n_particles=_MC_N,
                        n_iterations=10,
                        seed=_SEED,
                    )
                )

    return out


def get_scenario(name: str) -> ScenarioConfig:
    for cfg in bundled_scenarios():
        if cfg.name == name:
            return cfg
    raise KeyError(f"no bundled scenario named {name!r}")
