import numpy as np
import pytest

from jumpchain.binomial import binomial_map, classify
from jumpchain.exact import (
    Distribution,
    RankMatrix,
    apply_pi,
    feasibility_search,
    find_fixed_points,
    random_rank_matrix,
    refine_fixed_point,
    stability_spectrum,
)
from jumpchain.scenarios import (
    FIVE_POINT_DISTANCES,
    FIVE_POINT_FIXED_WEIGHTS,
    UNSTABLE_RANKS_4,
    UNSTABLE_RANKS_4_WEIGHTS,
)
from jumpchain.spaces import rank_matrix_from_distances

R4 = RankMatrix(np.array(UNSTABLE_RANKS_4))
R5 = rank_matrix_from_distances(np.array(FIVE_POINT_DISTANCES))
R2PT = RankMatrix(np.array([[1, 2], [2, 1]]))


class TestFindFixedPoints:
    def test_five_point_full_support_unstable(self):
        reports = find_fixed_points(R5, 1, 2, n_restarts=64, seed=0)
        full = [r for r in reports if r.support_size == 5]
        assert len(full) == 1
        fp = full[0]
        assert np.abs(fp.theta_star.weights - np.array(FIVE_POINT_FIXED_WEIGHTS)).max() < 1e-3
        assert fp.stability == "unstable"
        assert fp.spectral_radius > 1

    def test_r4_contains_interior_point(self):
        reports = find_fixed_points(R4, 1, 2, n_restarts=64, seed=0)
        target = np.array(UNSTABLE_RANKS_4_WEIGHTS)
        assert any(np.abs(r.theta_star.weights - target).max() < 1e-9 for r in reports)

    def test_omnipresent_always_included(self):
        R = random_rank_matrix(4, seed=77)
        reports = find_fixed_points(R, 2, 3, n_restarts=4, seed=0)
        for s in range(4):
            w = Distribution.point_mass(4, s).weights
            assert any(np.array_equal(r.theta_star.weights, w) for r in reports)
        for s1 in range(4):
            for s2 in range(s1 + 1, 4):
                w = Distribution.two_point(4, s1, s2).weights
                assert any(np.abs(r.theta_star.weights - w).sum() < 1e-9 for r in reports)

    def test_residuals_below_tolerance(self):
        for rep in find_fixed_points(R4, 1, 2, n_restarts=16, seed=3, tol=1e-10):
            assert rep.residual <= 1e-10

    def test_deduplicated(self):
        reports = find_fixed_points(R4, 1, 2, n_restarts=32, seed=5)
        ws = [r.theta_star.weights for r in reports]
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                assert np.abs(ws[i] - ws[j]).sum() > 1e-9

    def test_k2_maps_share_fixed_points_small(self):
        for seed in (0, 1, 2):
            R = random_rank_matrix(4, seed=seed + 900)
            a = find_fixed_points(R, 1, 2, n_restarts=48, seed=seed)
            b = find_fixed_points(R, 2, 2, n_restarts=48, seed=seed)
            for x in a:
                d = min(np.abs(x.theta_star.weights - y.theta_star.weights).sum() for y in b)
                if d > 1e-8:
                    ref = refine_fixed_point(R, x.theta_star, 2, 2)
                    assert ref is not None and x.theta_star.l1(ref) <= 1e-8

    def test_refine_stays_put_on_fixed_point(self):
        ref = refine_fixed_point(R4, Distribution(np.array(UNSTABLE_RANKS_4_WEIGHTS)), 2, 2)
        assert ref is not None
        assert ref.l1(Distribution(np.array(UNSTABLE_RANKS_4_WEIGHTS))) < 1e-10


class TestStabilitySpectrum:
    def test_vertex_stable_for_nearest_of_two(self):
        R = random_rank_matrix(5, seed=31)
        radius = stability_spectrum(R, Distribution.point_mass(5, 2), 1, 2)
        assert radius < 1

    def test_r4_interior_unstable(self):
        radius = stability_spectrum(R4, Distribution(np.array(UNSTABLE_RANKS_4_WEIGHTS)), 1, 2)
        assert radius > 1

    def test_two_point_reduces_to_scalar_derivative(self):
        c = classify(4, 5)
        p = c.p_crit
        theta = Distribution(np.array([p, 1 - p]))
        radius = stability_spectrum(R2PT, theta, 4, 5)
        h = 1e-6
        deriv = abs(binomial_map(p + h, 4, 5) - binomial_map(p - h, 4, 5)) / (2 * h)
        assert radius == pytest.approx(deriv, rel=1e-4)
        assert radius > 1

    def test_rejects_non_fixed_point(self):
        with pytest.raises(ValueError, match="not a fixed point"):
            stability_spectrum(R4, Distribution(np.array([0.4, 0.3, 0.2, 0.1])), 1, 2)


SYM_LATIN_4 = np.array([[1, 2, 3, 4], [2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]])
ASYM_LATIN_4 = np.array([[1, 2, 3, 4], [3, 1, 4, 2], [2, 4, 1, 3], [4, 3, 2, 1]])


class TestFeasibility:
    def test_r4_is_feasible(self):
        d = feasibility_search(R4)
        assert d is not None
        assert np.array_equal(rank_matrix_from_distances(d).r, R4.r)
        off = d[~np.eye(4, dtype=bool)]
        assert off.min() >= 1.0 and off.max() <= 2.0

    def test_symmetric_latin_square_found(self):
        d = feasibility_search(RankMatrix(SYM_LATIN_4))
        assert d is not None
        assert np.array_equal(rank_matrix_from_distances(d).r, SYM_LATIN_4)

    def test_asymmetric_latin_square_not_found(self):
        assert feasibility_search(RankMatrix(ASYM_LATIN_4), margin=1e-3) is None

    def test_actual_distance_matrix_round_trips(self):
        from jumpchain.spaces import random_btl_space

        dist = random_btl_space(5, seed=17)
        R = rank_matrix_from_distances(dist)
        d = feasibility_search(R)
        assert d is not None
        assert np.array_equal(rank_matrix_from_distances(d).r, R.r)

    def test_all_entries_distinct(self):
        d = feasibility_search(R4, seed=4)
        off = d[np.triu_indices(4, 1)]
        assert len(np.unique(off)) == off.size

    def test_bad_margin(self):
        with pytest.raises(ValueError):
            feasibility_search(R4, margin=0.0)
