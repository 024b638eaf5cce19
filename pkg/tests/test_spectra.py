import cmath
import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

import tripoly as tp
from tripoly import genseq, spectra
from tripoly.errors import (
    ConstantPolynomial,
    EnumerationCapExceeded,
    ZeroCoefficientVector,
)


class TestCharacter:
    def test_zero_maps_to_one(self):
        assert spectra.e_char(5, 0) == 1 + 0j

    def test_full_sum_vanishes(self):
        total = sum(spectra.e_char(5, z) for z in range(5))
        assert abs(total) < 1e-12

    def test_reduces_argument(self, f7):
        assert spectra.e_char(f7, 9) == pytest.approx(spectra.e_char(f7, 2))
        assert abs(spectra.e_char(f7, 3)) == pytest.approx(1.0)


class TestExpSum:
    def test_constant_zero_stream_sums_to_n(self):
        u = np.zeros((10, 2), dtype=np.uint64)
        s = tp.exp_sum(u, [1, 2], 7)
        assert s.value == pytest.approx(10 + 0j)
        assert s.n_terms == 10

    def test_single_term_has_unit_magnitude(self):
        s = tp.exp_sum([[3]], [2], 7)
        assert abs(s.value) == pytest.approx(1.0)

    def test_full_residue_stream_vanishes(self):
        u = np.arange(5, dtype=np.uint64).reshape(5, 1)
        assert abs(tp.exp_sum(u, [1], 5).value) < 1e-12

    def test_zero_coefficients_rejected(self):
        u = np.zeros((4, 2), dtype=np.uint64)
        with pytest.raises(ZeroCoefficientVector):
            tp.exp_sum(u, [0, 0], 7)
        with pytest.raises(ZeroCoefficientVector):
            tp.exp_sum(u, [7, 14], 7)

    def test_stream_and_hist_agree(self):
        rng = np.random.default_rng(11)
        p = 10007
        u = rng.integers(0, p, size=(5000, 2)).astype(np.uint64)
        for coeffs in ([1, 2], [333, 4444], [p - 1, 1]):
            a = tp.exp_sum(u, coeffs, p, method="stream").value
            b = tp.exp_sum(u, coeffs, p, method="hist").value
            assert abs(a - b) < 1e-9 * len(u)

    def test_naive_oracle_agreement(self):
        # direct recomputation term by term
        rng = np.random.default_rng(3)
        p = 13
        u = rng.integers(0, p, size=(200, 2)).astype(np.uint64)
        coeffs = (5, 9)
        naive = sum(
            cmath.exp(2j * math.pi * ((5 * int(a) + 9 * int(b)) % p) / p)
            for a, b in u
        )
        got = tp.exp_sum(u, coeffs, p).value
        assert abs(got - naive) < 1e-9 * len(u)

    def test_prefix_length(self):
        u = np.arange(6, dtype=np.uint64).reshape(6, 1)
        s = tp.exp_sum(u, [1], 7, n=3)
        assert s.n_terms == 3


class TestExpSumMax:
    def test_single_vector_box_reduces_to_exp_sum(self, demo_m2_all_ones):
        report = spectra.exp_sum_max(demo_m2_all_ones, (1, 2, 3), 40,
                                     vectors=[(1, 0)])
        start = genseq.advance_to_cycle(demo_m2_all_ones, (1, 2, 3))
        u = genseq.generate_array(demo_m2_all_ones, start, 40)
        direct = tp.exp_sum(u, (1, 0), 5, method="hist")
        assert report.rows[0][0] == (1, 0)
        assert report.rows[0][1] == pytest.approx(direct.value)

    def test_matches_independent_recomputation(self, demo_m1_p3):
        report = spectra.exp_sum_max(demo_m1_p3, (0, 0), 9, limit=2)
        start = genseq.advance_to_cycle(demo_m1_p3, (0, 0))
        rows = list(genseq.generate(demo_m1_p3, start, 9))
        for a, value in report.rows:
            naive = sum(spectra.e_char(3, a[0] * r[0]) for r in rows)
            assert abs(value - naive) < 1e-9 * 9

    def test_max_at_most_n(self, demo_m2_all_ones):
        report = spectra.exp_sum_max(demo_m2_all_ones, (0, 1, 2), 60, limit=2)
        assert report.max_abs <= 60 + 1e-9

    def test_multiple_of_p_skipped(self, demo_m1_p3):
        report = spectra.exp_sum_max(demo_m1_p3, (0, 0), 5, limit=3)
        assert all(a[0] % 3 for a, _ in report.rows)

    def test_box_cap(self, demo_m2_all_ones):
        with pytest.raises(EnumerationCapExceeded):
            spectra.exp_sum_max(demo_m2_all_ones, (0, 0, 0), 10, limit=50,
                                enum_cap=100)


class TestWeil:
    def test_gauss_sum(self, f5):
        r = tp.PolyRing(f5, 1)
        rep = tp.weil_bruteforce(f5, r.from_string("X0^2"))
        assert rep.magnitude == pytest.approx(math.sqrt(5), rel=1e-9)
        assert rep.bound == pytest.approx(2 * math.sqrt(5))
        assert rep.bound_ok

    def test_linear_vanishes(self, f5):
        r = tp.PolyRing(f5, 1)
        rep = tp.weil_bruteforce(f5, r.from_string("X0"))
        assert rep.magnitude < 1e-9

    def test_bilinear_p7(self, f7):
        # brute-forced independently over all 49 points, then frozen: the
        # sum collapses to p (inner sum vanishes unless x = 0)
        r = tp.PolyRing(f7, 2)
        naive = sum(
            cmath.exp(2j * math.pi * ((x * y) % 7) / 7)
            for x in range(7) for y in range(7)
        )
        assert abs(naive - 7) < 1e-9
        rep = tp.weil_bruteforce(f7, r.from_string("X0*X1"))
        assert rep.magnitude == pytest.approx(7.0, rel=1e-9)
        assert rep.bound_ok  # 7 < 2 * 7^1.5

    def test_matches_naive_on_random_polys(self):
        rng = random.Random(23)
        for p in (5, 7):
            f = tp.Field(p)
            for nvars in (1, 2):
                r = tp.PolyRing(f, nvars)
                for _ in range(5):
                    poly = r.from_terms(
                        [(tuple(rng.randint(0, p - 1) for _ in range(nvars)),
                          rng.randint(1, p - 1))
                         for _ in range(rng.randint(1, 4))]
                    )
                    if poly.total_degree() <= 0:
                        continue
                    naive = sum(
                        spectra.e_char(p, poly._eval_int(list(point)))
                        for point in itertools.product(range(p), repeat=nvars)
                    )
                    rep = tp.weil_bruteforce(f, poly)
                    assert abs(rep.value - naive) < 1e-9 * p ** nvars

    def test_constant_rejected(self, f5):
        r = tp.PolyRing(f5, 1)
        with pytest.raises(ConstantPolynomial):
            tp.weil_bruteforce(f5, r.constant(3))

    def test_enumeration_cap(self):
        f = tp.Field(101)
        r = tp.PolyRing(f, 3)
        with pytest.raises(EnumerationCapExceeded):
            tp.weil_bruteforce(f, r.from_string("X0*X1*X2"), cap=10**5)

    def test_parseval_identity(self, demo_m1_p3):
        # sum over all p^m coefficient vectors of |S_a(T)|^2 equals
        # p^m times the number of coincident pairs in the point multiset
        info = genseq.find_cycle(demo_m1_p3, (0, 0))
        start = genseq.advance_to_cycle(demo_m1_p3, (0, 0))
        pts = list(genseq.generate(demo_m1_p3, start, info.period))
        p = 3
        total = 0.0
        for a in itertools.product(range(p), repeat=1):
            s = sum(spectra.e_char(p, a[0] * r[0]) for r in pts)
            total += abs(s) ** 2
        coincidences = sum(
            1 for x in pts for y in pts if x == y
        )
        assert total == pytest.approx(p * coincidences, rel=1e-9)


class TestEnvelopes:
    def test_exact_rationals(self):
        e11 = tp.BoundEnvelope(1, 1)
        assert e11.p_exponent == Fraction(7, 8)
        assert e11.n_exponent == Fraction(1, 2)
        assert tp.BoundEnvelope(2, 1).p_exponent == Fraction(17, 12)

    def test_beta_for_any_nu(self):
        for nu in (1, 2, 3, 10, 1000):
            assert tp.BoundEnvelope(2, nu).n_exponent == Fraction(1, 2 * nu)

    def test_ratio_tends_to_critical_exponent(self):
        for m in (1, 2, 3):
            ratio = tp.BoundEnvelope(m, 10**6).exponent_ratio
            assert abs(float(ratio) - float(tp.critical_exponent(m))) < 1e-5

    def test_sum_envelope_value(self):
        env = tp.BoundEnvelope(1, 1)
        assert env.sum_envelope(9, 16) == pytest.approx(9 ** 0.875 * 4.0)

    def test_envelope_identity(self):
        # discrepancy envelope = sum envelope * (log p)^m / N
        env = tp.BoundEnvelope(2, 1)
        p, n = 1009, 5000
        lhs = env.discrepancy_envelope(p, n)
        rhs = env.sum_envelope(p, n) * math.log(p) ** 2 / n
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_nu1_large_n_exponent(self):
        assert tp.nu1_large_n_exponent(1) == Fraction(15, 16)
        assert tp.nu1_large_n_exponent(2) == 1 - Fraction(1, 36)
