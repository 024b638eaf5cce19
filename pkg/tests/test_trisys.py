import math
import random
from fractions import Fraction

import pytest

import tripoly as tp
from tripoly import trisys
from tripoly.errors import (
    CharTooSmall,
    DegreeCondition,
    IndexOutOfRange,
    MissingField,
    NonMonicLeading,
    NonUniqueLeading,
    TermBudgetExceeded,
    VariableScope,
    ZeroA,
    ZeroCoefficientVector,
)


class TestValidation:
    def test_valid_m1(self, f5):
        r = tp.PolyRing(f5, 2)
        sys_ = tp.build_system(f5, 1, [r.from_string("X1")], [r.from_string("1")], 1, 1)
        assert sys_.exponent_matrix == ((1, 1), (0, 1))
        assert sys_.f[0] == r.from_string("X0*X1+1")
        assert sys_.f[1] == r.from_string("X1+1")

    def test_non_unique_leading(self, f5):
        r = tp.PolyRing(f5, 3)
        with pytest.raises(NonUniqueLeading):
            tp.build_system(f5, 2, [r.from_string("X1+X2"), r.from_string("X2")],
                            [r.zero, r.zero], 1, 1)

    def test_zero_multiplier(self, f5):
        r = tp.PolyRing(f5, 2)
        with pytest.raises(NonUniqueLeading):
            tp.build_system(f5, 1, [r.zero], [r.zero], 1, 1)

    def test_non_monic(self, f5):
        r = tp.PolyRing(f5, 2)
        with pytest.raises(NonMonicLeading):
            tp.build_system(f5, 1, [r.from_string("2*X1")], [r.zero], 1, 1)

    def test_degree_condition(self, f5):
        r = tp.PolyRing(f5, 2)
        with pytest.raises(DegreeCondition):
            tp.build_system(f5, 1, [r.from_string("X1")], [r.from_string("X1^2")], 1, 1)

    def test_zero_tail_allowed(self, f5):
        r = tp.PolyRing(f5, 2)
        sys_ = tp.build_system(f5, 1, [r.from_string("X1")], [r.zero], 1, 0)
        assert sys_.f[0] == r.from_string("X0*X1")

    def test_variable_scope(self, f5):
        r = tp.PolyRing(f5, 3)
        with pytest.raises(VariableScope):
            tp.build_system(f5, 2, [r.from_string("X1*X2"), r.from_string("X1")],
                            [r.zero, r.zero], 1, 1)
        with pytest.raises(VariableScope):
            tp.build_system(f5, 2, [r.from_string("X0*X1"), r.from_string("X2")],
                            [r.zero, r.zero], 1, 1)

    def test_zero_a(self, f5):
        r = tp.PolyRing(f5, 2)
        with pytest.raises(ZeroA):
            tp.build_system(f5, 1, [r.from_string("X1")], [r.zero], 0, 1)

    def test_char_too_small(self):
        f3 = tp.Field(3)
        r = tp.PolyRing(f3, 4)
        g = [r.from_string(f"X{i + 1}") for i in range(3)]
        h = [r.zero] * 3
        with pytest.raises(CharTooSmall):
            tp.build_system(f3, 3, g, h, 1, 1)

    def test_scope_checked_before_leading(self, f5):
        # validation order is fixed: a polynomial that breaks both scope and
        # uniqueness reports the scope error
        r = tp.PolyRing(f5, 3)
        with pytest.raises(VariableScope):
            tp.build_system(f5, 2, [r.from_string("X0+X1"), r.from_string("X2")],
                            [r.zero, r.zero], 1, 1)

    def test_constant_multiplier_is_valid(self, f5):
        r = tp.PolyRing(f5, 2)
        sys_ = tp.build_system(f5, 1, [r.one], [r.from_string("3")], 2, 0)
        assert sys_.exponent_matrix == ((1, 0), (0, 1))


class TestDegrees:
    def test_m1_closed_form(self, f5):
        # d_{k,0} = k*s + s + 1 for a single chain exponent s
        for s in (1, 2, 3):
            r = tp.PolyRing(f5, 2)
            sys_ = tp.build_system(f5, 1, [r.from_string(f"X1^{s}")], [r.one], 1, 1)
            for k in range(12):
                d = tp.degree_vector(sys_, k).d
                assert d == (k * s + s + 1, 1)

    def test_m2_all_ones(self, demo_m2_all_ones):
        assert tp.degree_vector(demo_m2_all_ones, 1).d == (6, 3, 1)

    def test_k0_is_component_degree(self, demo_m2_all_ones):
        d0 = tp.degree_vector(demo_m2_all_ones, 0).d
        assert d0 == tuple(f.total_degree() for f in demo_m2_all_ones.f)

    def test_recurrence_matches_matrix(self, demo_m2_all_ones):
        # d_{k,i} = d_{k-1,i} + sum_j s_ij d_{k-1,j}, independent of powers
        S = demo_m2_all_ones.exponent_matrix
        m = demo_m2_all_ones.m
        prev = tp.degree_vector(demo_m2_all_ones, 0).d
        for k in range(1, 10):
            cur = tp.degree_vector(demo_m2_all_ones, k).d
            for i in range(m):
                assert cur[i] == prev[i] + sum(S[i][j] * prev[j] for j in range(i + 1, m + 1))
            assert cur[m] == 1
            prev = cur

    def test_negative_k_rejected(self, demo_m2_all_ones):
        with pytest.raises(ValueError):
            tp.degree_vector(demo_m2_all_ones, -1)


class TestPredictedLeading:
    def test_m2_all_ones(self, demo_m2_all_ones):
        assert tp.predicted_leading(demo_m2_all_ones, 0) == (Fraction(1, 2), 2)
        assert tp.predicted_leading(demo_m2_all_ones, 1) == (Fraction(1), 1)

    def test_m1_chain3(self, f5):
        r = tp.PolyRing(f5, 2)
        sys_ = tp.build_system(f5, 1, [r.from_string("X1^3")], [r.one], 1, 1)
        assert tp.predicted_leading(sys_, 0) == (Fraction(3), 1)

    def test_index_range(self, demo_m2_all_ones):
        with pytest.raises(IndexOutOfRange):
            tp.predicted_leading(demo_m2_all_ones, 2)

    def test_closed_form_quadratic(self, demo_m2_all_ones):
        # d_{k,0} = (k+2)(k+3)/2 for the all-ones matrix at m=2; residual
        # after removing k^2/2 has degree 1
        coeffs = trisys.degree_poly_fit(demo_m2_all_ones, 0, k_start=10)
        assert coeffs == [Fraction(3), Fraction(5, 2), Fraction(1, 2)]
        for k in (0, 1, 7, 20):
            assert tp.degree_vector(demo_m2_all_ones, k).d[0] == (k + 2) * (k + 3) // 2

    def test_residual_degree_property(self, f5):
        # fitting one extra point leaves zero coefficients above the
        # predicted power, and the predicted power's coefficient is exact
        rng = random.Random(4)
        for _ in range(10):
            m = rng.choice((1, 2, 3))
            sys_ = trisys.random_system(rng, tp.Field(101), m, chain_range=(1, 3))
            for i in range(m):
                c, e = tp.predicted_leading(sys_, i)
                coeffs = trisys.degree_poly_fit(sys_, i, k_start=10, npoints=e + 2)
                assert coeffs[e] == c
                assert coeffs[e + 1] == 0


class TestIteration:
    def test_level_zero_is_the_system(self, demo_m1_p5):
        assert tp.iterate_symbolic(demo_m1_p5, 0) == list(demo_m1_p5.f)

    def test_m1_level1_hand_expansion(self, demo_m1_p5):
        # f0^(1) = (X0*X1+1)(X1+1)+1, degree 3
        r = demo_m1_p5.ring
        expected = r.from_string("X0*X1^2+X0*X1+X1+2")
        it = tp.iterate_symbolic(demo_m1_p5, 1)
        assert it[0] == expected
        assert it[0].total_degree() == tp.degree_vector(demo_m1_p5, 1).d[0] == 3

    def test_last_component_stays_affine(self, demo_m2_all_ones):
        for k in range(6):
            assert tp.iterate_symbolic(demo_m2_all_ones, k)[2].total_degree() == 1

    def test_central_equivalence_sampled(self):
        # symbolic degrees equal the matrix prediction for sampler systems
        rng = random.Random(202)
        for _ in range(12):
            m = rng.choice((1, 2, 3))
            p = rng.choice((5, 101))
            sys_ = trisys.random_system(rng, tp.Field(p), m)
            for k in range(5):
                d = tp.degree_vector(sys_, k).d
                if math.comb(d[0] + m + 1, m + 1) > 200000:
                    break
                degs = [q.total_degree() for q in tp.iterate_symbolic(sys_, k)]
                assert degs == list(d)

    def test_lopsided_tail_outgrows_prediction(self, f5):
        # a valid system whose multiplier tail is not monomial-dominated:
        # the measured degree overtakes the matrix value, which is why the
        # sampler restricts tails (measured degrees are authoritative)
        r = tp.PolyRing(f5, 3)
        sys_ = tp.build_system(
            f5, 2, [r.from_string("X2^2+X1"), r.from_string("X2")],
            [r.zero, r.zero], 1, 1,
        )
        sym = [q.total_degree() for q in tp.iterate_symbolic(sys_, 2)]
        mat = list(tp.degree_vector(sys_, 2).d)
        assert sym[0] == 8 and mat[0] == 7

    def test_term_budget_raises(self, demo_m2_all_ones):
        with pytest.raises(TermBudgetExceeded):
            tp.iterate_symbolic(demo_m2_all_ones, 40, term_budget=50)


class TestCombo:
    def test_permutation_telescopes(self, demo_m2_all_ones):
        res = tp.combo_nonconstant_check(demo_m2_all_ones, (1, 0), (3,), (3,))
        assert res.constant and res.zero
        res = tp.combo_nonconstant_check(demo_m2_all_ones, (2, 3), (1, 2), (2, 1))
        assert res.constant and res.zero

    def test_m1_example(self, demo_m1_p5):
        res = tp.combo_nonconstant_check(demo_m1_p5, (1,), (2,), (1,))
        assert not res.constant
        assert res.degree == tp.degree_vector(demo_m1_p5, 2).d[0] == 4

    def test_m2_second_component(self, demo_m2_all_ones):
        res = tp.combo_nonconstant_check(demo_m2_all_ones, (0, 1), (3,), (2,))
        assert res.degree == tp.degree_vector(demo_m2_all_ones, 3).d[1] == 5

    def test_zero_coefficients_rejected(self, demo_m2_all_ones):
        with pytest.raises(ZeroCoefficientVector):
            tp.combo_nonconstant_check(demo_m2_all_ones, (0, 0), (1,), (2,))
        with pytest.raises(ZeroCoefficientVector):
            tp.combo_nonconstant_check(demo_m2_all_ones, (5, 10), (1,), (2,))


class TestDyndeg:
    def test_triangular_tends_to_one(self, demo_m2_all_ones):
        est = tp.dyndeg_estimate(demo_m2_all_ones, 40)
        assert est[9] == pytest.approx(78 ** 0.1)
        for k in range(3, 39):
            assert est[k + 1] <= est[k] + 1e-12
        assert est[-1] < 1.2

    def test_monomial_square_map(self):
        r = tp.PolyRing(tp.Field(5), 1)
        est = tp.dyndeg_estimate([r.from_string("X0^2")], 6)
        # k-th entry measures the k-th iterate (k+1 squarings)
        for k, v in enumerate(est, start=1):
            assert v == pytest.approx(2 ** ((k + 1) / k))
        assert est[-1] < est[0]

    def test_budget_propagates(self):
        r = tp.PolyRing(tp.Field(5), 1)
        with pytest.raises(TermBudgetExceeded):
            tp.dyndeg_estimate([r.from_string("X0^2+1")], 40, term_budget=100)


class TestFastConstructor:
    def test_shape(self, f7):
        sys_ = tp.fast_system(f7, 2, [1, 1], 1, 1)
        assert sys_.is_fast and sys_.fast_consts == (1, 1)
        S = sys_.exponent_matrix
        assert S == ((1, 1, 0), (0, 1, 1), (0, 0, 1))

    def test_detected_from_generic_build(self, f5):
        r = tp.PolyRing(f5, 2)
        sys_ = tp.build_system(f5, 1, [r.from_string("X1")], [r.from_string("2")], 3, 4)
        assert sys_.is_fast and sys_.fast_consts == (2,)

    def test_non_fast(self, demo_m2_all_ones):
        assert not demo_m2_all_ones.is_fast


class TestMappingRoundTrip:
    def test_round_trip(self, demo_m2_all_ones):
        mapping = trisys.system_to_mapping(demo_m2_all_ones)
        again = trisys.system_from_mapping(mapping)
        assert again.f == demo_m2_all_ones.f
        assert again.exponent_matrix == demo_m2_all_ones.exponent_matrix

    def test_missing_field(self):
        with pytest.raises(MissingField):
            trisys.system_from_mapping({"p": "5", "m": "1", "a": "1"})

    def test_canonical_text(self, demo_m1_p5):
        text = trisys.canonical_spec_text(demo_m1_p5)
        assert text.splitlines()[0] == "[system]"
        assert "g0=X1" in text and "h0=1" in text


def test_sampler_respects_ranges():
    rng = random.Random(8)
    for _ in range(40):
        sys_ = trisys.random_system(rng, tp.Field(101), 2, s_range=(0, 3),
                                    chain_range=(1, 3))
        S = sys_.exponent_matrix
        assert all(1 <= S[i][i + 1] <= 3 for i in range(2))
        assert all(0 <= S[i][j] <= 3 for i in range(2) for j in range(i + 1, 3))


class TestViolationScan:
    def test_clean_on_demo(self, demo_m2_all_ones):
        assert trisys.combo_violation_scan(demo_m2_all_ones, 1, 3) == []

    def test_catches_lopsided_tail_system(self, f5):
        r = tp.PolyRing(f5, 3)
        sys_ = tp.build_system(
            f5, 2, [r.from_string("X2^2+X1"), r.from_string("X2")],
            [r.zero, r.zero], 1, 1,
        )
        hits = trisys.combo_violation_scan(sys_, 1, 3, coeff_trials=1)
        assert hits  # measured degree outgrows the leading-term expectation
        assert all(h["measured"] != h["expected"] for h in hits)

    def test_index_validation(self, demo_m2_all_ones):
        with pytest.raises(ValueError):
            trisys.combo_violation_scan(demo_m2_all_ones, 1, 0, min_index=2)


def test_chain_systems_have_eventually_nonincreasing_degree_vectors():
    # components can cross at small k (a later row of the exponent matrix
    # may carry the larger sum); once the chain growth k^(m-i) takes over
    # the vector is sorted
    rng = random.Random(64)
    for _ in range(10):
        m = rng.choice((1, 2, 3))
        sys_ = trisys.random_system(rng, tp.Field(101), m, chain_range=(1, 3))
        for k in range(25, 45):
            d = tp.degree_vector(sys_, k).d
            assert all(d[i] >= d[i + 1] for i in range(m)), (k, d)
            assert d[m] == 1
