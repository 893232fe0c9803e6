"""Index sets, the chi root family, factor families, and the identity
verifiers."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qchain.exactnum import QuadraticNumber
from qchain.qcore import eval_h_seq, eval_p, q_binomial
from qchain.spectra import (
    IndexSetError,
    NotRepresentable,
    VerificationFailed,
    chi,
    chi_radical,
    eval_product_form,
    eval_sum_form,
    hermite_limit_identity,
    index_set,
    index_sumset,
    rational_grid,
    t_factor,
    v_factor,
    verify_addition_formula,
    verify_B_H_relation,
    verify_chi_properties,
    verify_factorization,
    verify_h_H_relation,
)

D_REF = Fraction(7, 3)  # discriminant at y = 1, q = 4


class TestIndexSets:
    def test_small_sets(self):
        assert index_set(1) == [0]
        assert index_set(2) == [-1, 1]
        assert index_set(3) == [-2, 0, 2]
        assert index_set(4) == [-3, -1, 1, 3]

    @pytest.mark.parametrize("m", range(1, 40))
    def test_shape(self, m):
        ks = index_set(m)
        assert len(ks) == m
        assert ks == sorted(ks)
        assert [-k for k in reversed(ks)] == ks  # symmetric about 0
        assert all(b - a == 2 for a, b in zip(ks, ks[1:]))

    def test_invalid(self):
        with pytest.raises(IndexSetError):
            index_set(0)

    def test_sumset_examples(self):
        assert index_sumset(2, 2) == [-2, 0, 2]
        assert index_sumset(3, 2) == [-3, -1, 1, 3]
        assert index_sumset(1, 5) == index_set(5)

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    @pytest.mark.parametrize("n", [1, 2, 4, 7])
    def test_sumset_collapses(self, m, n):
        assert index_sumset(m, n) == index_set(m + n - 1)

    def test_parity_disjoint_neighbours(self):
        # (2) and (3) share no indices; nesting only holds two apart
        assert not set(index_set(2)) & set(index_set(3))
        assert set(index_set(2)) < set(index_set(4))
        assert set(index_set(3)) < set(index_set(5))


class TestChi:
    def test_identity_index(self):
        assert chi(0, Fraction(1), Fraction(4)) == 1
        assert chi(0, 0.37, 2.25) == pytest.approx(0.37)

    def test_exact_unit_state(self):
        plus = chi(1, Fraction(1), Fraction(4))
        minus = chi(-1, Fraction(1), Fraction(4))
        assert plus == QuadraticNumber(Fraction(5, 4), Fraction(3, 4), D_REF)
        assert minus == QuadraticNumber(Fraction(5, 4), Fraction(-3, 4), D_REF)

    def test_float_unit_state(self):
        assert chi(1, 1.0, 4.0) == pytest.approx(2.3956439237389597)
        assert chi(-1, 1.0, 4.0) == pytest.approx(0.10435607626104004)

    def test_second_index_closed_form(self):
        # chi_2(1,4) = (4 + 1/4)/2 + sqrt(7/3) (4 - 1/4)/2
        assert chi(2, Fraction(1), Fraction(4)) == QuadraticNumber(Fraction(17, 8), Fraction(15, 8), D_REF)

    def test_requires_q_above_one(self):
        with pytest.raises(ValueError):
            chi(1, 1.0, 1.0)
        with pytest.raises(ValueError):
            chi(1, Fraction(1), Fraction(1, 2))

    def test_not_representable(self):
        # y = sqrt(7/3): y^2 + 4/3 = 11/3 has no root in Q(sqrt(7/3))
        y = QuadraticNumber(0, 1, D_REF)
        with pytest.raises(NotRepresentable):
            chi(1, y, Fraction(4))

    def test_degenerate_field_state(self):
        # q = 25/9, y = 2: the radical is rational (D = 25/4 is a square)
        value = chi(1, Fraction(2), Fraction(25, 9))
        assert value == Fraction(18, 5)

    def test_monotone_in_index(self):
        for y in (0.0, 1.0, -1.3):
            values = [float(chi(k, y, 4.0)) for k in range(-6, 7)]
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_roots_of_v(self):
        y, q = Fraction(1), Fraction(4)
        for n in (1, 2, 3, 5):
            for k in (n, -n):
                assert v_factor(n, chi(k, y, q), -y, q) == 0

    def test_radical(self):
        assert chi_radical(Fraction(1), Fraction(4)) == QuadraticNumber(0, 1, D_REF)
        assert chi_radical(1.0, 4.0) == pytest.approx(math.sqrt(7 / 3))


class TestFactors:
    def test_v0_t0(self):
        x, y = Fraction(3), Fraction(-1, 2)
        assert v_factor(0, x, y, Fraction(4)) == x + y
        assert t_factor(0, x, y, Fraction(4)) == x + y

    def test_v1_at_q4(self):
        # (q + 1/q - 2)/(q - 1) = 3/4 at q = 4
        x, y = Fraction(2, 7), Fraction(-5, 3)
        expect = x * x + y * y + x * (-y) * Fraction(5, 2) - Fraction(3, 4)
        assert v_factor(1, x, -y, Fraction(4)) == expect

    def test_v_needs_q_not_one(self):
        with pytest.raises(ValueError):
            v_factor(1, 1.0, 1.0, 1.0)

    def test_t1_float(self):
        q = 0.7
        assert t_factor(1, 0.0, 0.0, q) == pytest.approx((q + 1 / q - 2) / 4)


class TestFactorizationForms:
    def test_sum_form_degree_one(self):
        x, y = Fraction(5, 2), Fraction(1, 3)
        assert eval_sum_form(1, x, y, Fraction(4)) == x - y

    def test_product_form_small_orders(self):
        x, y, q = Fraction(1, 2), Fraction(-2, 5), Fraction(4)
        assert eval_product_form(1, x, y, q) == x - y
        assert eval_product_form(2, x, y, q) == v_factor(1, x, -y, q)
        assert eval_product_form(3, x, y, q) == (x - y) * v_factor(2, x, -y, q)

    def test_sum_form_equals_recurrence(self):
        q, sq = Fraction(4), Fraction(2)
        for x in rational_grid(3):
            for y in rational_grid(3):
                assert eval_sum_form(2, x, y, q) == eval_p(2, x, y, 1 / sq, q)

    def test_verify_exact(self):
        report = verify_factorization(2, Fraction(4))
        assert report.passed and report.max_residual == 0.0
        assert report.points_checked > 9

    def test_verify_degree_one(self):
        assert verify_factorization(1, Fraction(4)).passed

    def test_verify_float(self):
        report = verify_factorization(5, 2.25)
        assert report.passed
        assert report.max_residual < 1e-8

    def test_verify_rejects_small_grids(self):
        with pytest.raises(ValueError):
            verify_factorization(3, Fraction(4), sample_points=[(Fraction(0), Fraction(0))] * 16)

    def test_failure_carries_witness(self):
        with pytest.raises(VerificationFailed) as exc:
            verify_factorization(3, 2.5, rel_tol=-1.0)
        report = exc.value.report
        assert not report.passed
        assert report.witness is not None
        assert "x" in report.witness


class TestRootCompleteness:
    @pytest.mark.parametrize("m", range(1, 9))
    def test_chi_exhausts_the_roots(self, m):
        # m distinct support points, each a root of the degree-m polynomial
        y, q, sq = Fraction(1), Fraction(4), Fraction(2)
        rho = sq ** (-(m - 1))
        values = [chi(k, y, q) for k in index_set(m)]
        for left, right in zip(values, values[1:]):
            assert left < right
        for v in values:
            assert eval_p(m, v, y, rho, q) == 0


class TestAdditionFormula:
    def test_degree_one_is_twice_the_sum(self):
        theta, phi, q = 0.9, 1.7, 0.7
        report = verify_addition_formula(1, theta, phi, q)
        assert report.passed
        # A_1 = 2(x + y) = 2 t_0
        x, y = math.cos(theta), math.cos(phi)
        total = sum(
            float(q_binomial(1, k, q)) * eval_h_seq(1, x, q)[k] * eval_h_seq(1, y, 1 / q)[1 - k]
            for k in range(2)
        )
        assert total == pytest.approx(2 * (x + y))

    def test_degree_two_at_right_angles(self):
        # x = y = 0 collapses the identity to q + 1/q - 2
        q = 0.7
        report = verify_addition_formula(2, math.pi / 2, math.pi / 2, q)
        assert report.passed
        x = y = 0.0
        total = sum(
            float(q_binomial(2, k, q))
            * q ** (-k * (2 - k) / 2)
            * eval_h_seq(2, x, q)[k]
            * eval_h_seq(2, y, 1 / q)[2 - k]
            for k in range(3)
        )
        assert total == pytest.approx(q + 1 / q - 2)

    def test_three_way_agreement(self):
        for q in (0.7, 2.5):
            report = verify_addition_formula(4, 0.61, 2.03, q)
            assert report.passed
            assert report.max_residual < 1e-8

    def test_forced_failure(self):
        with pytest.raises(VerificationFailed):
            verify_addition_formula(3, 0.5, 0.5, 0.5, rel_tol=-1.0)

    def test_rejects_bad_q(self):
        with pytest.raises(ValueError):
            verify_addition_formula(2, 0.1, 0.2, 1.0)


class TestHermiteRelations:
    def test_trivial_degree(self):
        assert verify_h_H_relation(0, 0.4, 0.5).passed

    def test_below_one(self):
        report = verify_h_H_relation(3, 0.3, 0.5)
        assert report.passed and report.max_residual < 1e-8

    def test_above_one_complex_path(self):
        for m in range(1, 9):
            assert verify_h_H_relation(m, 0.7, 4.0).passed

    def test_B_H_at_known_point(self):
        # B_2(1|4) = 5 must survive the complex route
        report = verify_B_H_relation(2, 1.0, 4.0)
        assert report.passed

    def test_B_H_sweep(self):
        for q in (0.5, 2.25, 4.0):
            for n in range(0, 9):
                assert verify_B_H_relation(n, 0.8, q).passed


class TestChiProperties:
    def test_cancelling_indices(self):
        report = verify_chi_properties(1, -1, Fraction(1), Fraction(4))
        assert report.passed
        assert chi(1, chi(-1, Fraction(1), Fraction(4)), Fraction(4)) == 1

    def test_doubling(self):
        assert verify_chi_properties(1, 1, Fraction(1), Fraction(4)).passed

    def test_square_identity_value(self):
        # quad_sqrt(chi_1^2 + 4/3) at y=1, q=4 is 3/4 + 5/4 sqrt(7/3)
        from qchain.exactnum import quad_sqrt

        chi1 = chi(1, Fraction(1), Fraction(4))
        assert quad_sqrt(chi1 * chi1 + Fraction(4, 3)) == QuadraticNumber(
            Fraction(3, 4), Fraction(5, 4), D_REF
        )

    @pytest.mark.parametrize("m,n", [(2, 3), (-2, 5), (4, -1), (0, 3), (2, 0), (-3, -2)])
    def test_exact_sweep(self, m, n):
        for y in (Fraction(0), Fraction(1), Fraction(-3, 7)):
            assert verify_chi_properties(m, n, y, Fraction(4)).passed

    def test_float_mode(self):
        assert verify_chi_properties(2, -3, 0.37, 2.25).passed

    def test_nesting_of_support(self):
        # (n) is contained in (n+2) and chi values agree index-wise
        y, q = Fraction(1), Fraction(4)
        for n in (1, 2, 3, 4):
            inner, outer = index_set(n), index_set(n + 2)
            assert set(inner) < set(outer)
            for k in inner:
                assert chi(k, y, q) == chi(k, y, q)


class TestHermiteLimit:
    def test_degree_one(self):
        assert hermite_limit_identity(1, Fraction(1, 2), Fraction(1, 3)).passed

    def test_degree_two_term_expansion(self):
        # (y^2+1) - 2xy + (x^2-1) = (x-y)^2
        x, y = Fraction(3, 4), Fraction(-2, 5)
        assert (y * y + 1) - 2 * x * y + (x * x - 1) == (x - y) ** 2
        assert hermite_limit_identity(2, x, y).passed

    def test_degree_six(self):
        assert hermite_limit_identity(6, Fraction(2, 3), Fraction(-1, 5)).passed

    @given(
        m=st.integers(min_value=1, max_value=10),
        x=st.fractions(min_value=-3, max_value=3, max_denominator=10),
        y=st.fractions(min_value=-3, max_value=3, max_denominator=10),
    )
    @settings(max_examples=40, deadline=None)
    def test_property(self, m, x, y):
        assert hermite_limit_identity(m, x, y).passed

    def test_report_serializes(self):
        import json

        doc = json.loads(hermite_limit_identity(2, Fraction(1), Fraction(0)).to_json())
        assert doc["identity"] == "hermite-limit"
        assert doc["passed"] is True
        assert "witness" not in doc
