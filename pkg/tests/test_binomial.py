import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jumpchain.binomial import (
    BinomialClassification,
    binomial_map,
    classification_table,
    classify,
    density_nonexistence_check,
)
from jumpchain.exact import Distribution, RankMatrix, apply_pi

R2PT = RankMatrix(np.array([[1, 2], [2, 1]]))


class TestMap:
    def test_half_is_fixed(self):
        for j, k in [(1, 2), (3, 7), (4, 4), (2, 9)]:
            assert binomial_map(0.5, j, k) == pytest.approx(0.5, abs=1e-12)

    def test_endpoints(self):
        assert binomial_map(0.0, 2, 5) == 0.0
        assert binomial_map(1.0, 2, 5) == 1.0

    def test_direct_formula_value(self):
        assert binomial_map(0.3, 1, 2) == pytest.approx(9 / 58, abs=1e-15)

    def test_near_critical_weight(self):
        assert binomial_map(0.17267, 4, 5) == pytest.approx(0.17267, abs=1e-4)

    def test_invalid(self):
        with pytest.raises(ValueError):
            binomial_map(1.2, 1, 2)
        with pytest.raises(ValueError):
            binomial_map(0.5, 0, 2)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(0.0, 1.0),
        st.integers(2, 9).flatmap(lambda k: st.tuples(st.integers(1, k), st.just(k))),
    )
    def test_antisymmetry(self, p, jk):
        j, k = jk
        assert binomial_map(1 - p, j, k) == pytest.approx(1 - binomial_map(p, j, k), abs=1e-12)

    def test_agrees_with_exact_engine(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            k = int(rng.integers(2, 8))
            j = int(rng.integers(1, k + 1))
            p = float(rng.uniform(0.01, 0.99))
            out = apply_pi(R2PT, Distribution(np.array([p, 1 - p])), j, k)
            assert out.weights[0] == pytest.approx(binomial_map(p, j, k), abs=1e-12)


class TestClassify:
    def test_first_interior_critical_pair(self):
        c = classify(4, 5)
        assert c.type == "III"
        assert c.p_crit == pytest.approx(0.17267, abs=5e-6)

    def test_six_five(self):
        c = classify(5, 6)
        assert c.type == "III"
        assert c.p_crit == pytest.approx(0.09558, abs=5e-6)

    def test_k2(self):
        assert classify(1, 2).type == "I"
        assert classify(2, 2).type == "II"

    def test_p_crit_is_a_root_with_sign_change(self):
        for j, k in [(4, 5), (6, 8), (7, 9), (8, 9)]:
            c = classify(j, k)
            p = c.p_crit
            assert abs(binomial_map(p, j, k) - p) <= 1e-12
            lo = binomial_map(p - 1e-7, j, k) - (p - 1e-7)
            hi = binomial_map(p + 1e-7, j, k) - (p + 1e-7)
            assert lo * hi < 0

    def test_classification_invariant(self):
        with pytest.raises(ValueError):
            BinomialClassification(k=5, j=4, type="III", p_crit=None)
        with pytest.raises(ValueError):
            BinomialClassification(k=5, j=1, type="I", p_crit=0.3)


class TestTable:
    def test_row_k2(self):
        rows = [c for c in classification_table(2)]
        assert [(c.j, c.type) for c in rows] == [(1, "I"), (2, "II")]

    def test_row_k9(self):
        rows = [c for c in classification_table(9) if c.k == 9]
        types = {c.j: c.type for c in rows}
        assert all(types[j] == "I" for j in range(1, 7))
        assert types[7] == "III" and types[8] == "III" and types[9] == "II"
        crit = {c.j: c.p_crit for c in rows if c.type == "III"}
        assert crit[7] == pytest.approx(0.18884, abs=5e-6)

    def test_row_k8_has_critical_pair_at_six(self):
        rows = {c.j: c for c in classification_table(8) if c.k == 8}
        assert rows[6].type == "III"
        assert rows[6].p_crit == pytest.approx(0.26405, abs=5e-6)

    def test_size_and_order(self):
        tab = classification_table(9)
        assert len(tab) == 44
        assert [(c.k, c.j) for c in tab[:5]] == [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]

    def test_kmax_range(self):
        with pytest.raises(ValueError):
            classification_table(1)
        with pytest.raises(ValueError):
            classification_table(13)


class TestDensityNonexistence:
    def test_j_equals_k(self):
        for k in range(2, 9):
            assert density_nonexistence_check(k, k)

    def test_boundary_value_two(self):
        # coefficient 2, product 2*1*1/1 = 2 <= 2
        assert density_nonexistence_check(1, 2)

    def test_hand_computed_cases(self):
        # (1,3): 3!/(0!1!2!) * 0^0 * 2^2 / 2^2 = 3 > 2
        assert not density_nonexistence_check(1, 3)
        # (2,3): 6 * 1 * 1 / 4 = 1.5 <= 2
        assert density_nonexistence_check(2, 3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            density_nonexistence_check(3, 2)
