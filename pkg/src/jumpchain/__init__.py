"""jumpchain: Markov chains that jump to the j'th closest of k sampled points.

Given a distribution theta on a compact metric space, the chain steps from
s to the j'th nearest of k i.i.d. theta-samples; its stationary law defines
a map on distributions whose iterates and fixed points this package
computes -- exactly on finite spaces, by particle Monte Carlo elsewhere.
"""

from .binomial import (
    BinomialClassification,
    binomial_map,
    classification_table,
    classify,
    density_nonexistence_check,
)
from .diagnostics import (
    DecayFit,
    IterateSummary,
    LimitClassification,
    classify_limit,
    count_peaks,
    fit_decay,
    renormalize,
    summarize,
    wasserstein_1d,
)
from .exact import (
    Distribution,
    FixedPointReport,
    KernelMatrix,
    RankMatrix,
    apply_pi,
    binomial_tail_ge,
    brute_force_kernel,
    build_kernel,
    feasibility_search,
    find_fixed_points,
    iterate_exact,
    random_rank_matrix,
    refine_fixed_point,
    stability_spectrum,
    stationary,
)
from .particles import MixingPolicy, chain_step, estimate_pi
from .runio import RunArtifact, ScenarioConfig, classify_run, load_scenario, resume_run, run_iterative
from .scenarios import bundled_scenarios, get_scenario
from .spaces import (
    Circle,
    GaussianCube,
    Interval,
    Line,
    MoreTilted,
    ParticlePopulation,
    PointCloud,
    PointMass,
    RankSpace,
    Tilted,
    TiltedCircle,
    TwoPointMass,
    UniformCircle,
    UniformInterval,
    WeightedHypercube,
    distance,
    load_distance_matrix,
    load_point_cloud,
    random_btl_space,
    rank_matrix_from_distances,
    sample_initial,
)

__version__ = "0.1.0"
