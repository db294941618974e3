import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from turan.criteria import (
    Criterion,
    CriterionVerdict,
    Failure,
    SigmaSequence,
    check_cor1,
    check_prop3_hypothesis,
    check_sigma_transfer,
    check_thm1,
    check_thm4,
    check_thm4_condition,
    check_thm4_init,
    check_thm5,
    renormalize,
)
from turan.errors import PreconditionError, WrongCriterionError
from turan.families import (
    make_chebyshev,
    make_laguerre,
    make_legendre,
    make_pollaczek,
    make_q_ultraspherical,
    make_sec6_example,
    make_ultraspherical,
)
from turan.recurrence import CoefficientSequence, eval_polynomials
from turan.scanner import ScanRegion, scan_sign, turan_grid


def half_line(alpha, gamma):
    return CoefficientSequence.from_arrays(alpha, None, gamma, half_line=True)


class TestVerdict:
    def test_holds_requires_no_failure(self):
        with pytest.raises(ValueError):
            CriterionVerdict(Criterion.THM1_I, True, 10, Failure(3, "x", -1.0))
        with pytest.raises(ValueError):
            CriterionVerdict(Criterion.THM1_I, False, 10, None)

    def test_string_criterion_is_coerced(self):
        v = CriterionVerdict("Thm4", True, 5)
        assert v.criterion is Criterion.THM4


class TestThm1:
    def test_legendre_first_case(self):
        first, second = check_thm1(make_legendre(), 1000)
        assert first.holds and first.verified_to == 1000
        assert not second.holds

    def test_negative_lambda_second_case(self):
        first, second = check_thm1(make_ultraspherical(-0.25), 1000)
        assert second.holds and not first.holds
        assert first.first_failure.n == 1
        assert first.first_failure.condition == "alpha <= a/2"

    def test_constant_coefficients_hold_both_with_zero_margin(self):
        first, second = check_thm1(make_chebyshev(), 200)
        assert first.holds and second.holds
        assert max(abs(m) for m in first.per_n_margins[1:]) == 0.0

    def test_margins_track_distance_to_half(self):
        first, _ = check_thm1(make_legendre(), 50)
        n = np.arange(1, 51)
        to_half = 1 / (2 * (2 * n + 1))
        step = np.where(n >= 2, 0.5 / (2 * (n + 0.5) * (n - 0.5)), np.inf)
        np.testing.assert_allclose(first.per_n_margins, np.minimum(to_half, step), rtol=1e-12)

    def test_nonsymmetric_rejected(self):
        with pytest.raises(WrongCriterionError):
            check_thm1(make_sec6_example(), 10)

    def test_half_line_rejected(self):
        with pytest.raises(WrongCriterionError):
            check_thm1(make_laguerre(0.0), 10)

    def test_nonconstant_row_sum(self):
        with pytest.raises(PreconditionError):
            check_thm1(make_pollaczek(1.0, 1.0), 10)

    def test_row_sum_other_than_one(self):
        first, _ = check_thm1(make_q_ultraspherical(0.25, 0.5), 300)
        assert first.details["a"] == pytest.approx(1.25)


class TestCor1:
    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.9])
    def test_q_ultraspherical_positive_beta(self, beta):
        v = check_cor1(make_q_ultraspherical(beta, 0.5), 500)
        assert v.holds and v.criterion is Criterion.COR1_II
        assert v.details["a"] == pytest.approx(math.sqrt(beta))
        assert not v.details["boundary_a_equals_1"]

    @pytest.mark.parametrize("beta", [-0.9, -0.5, 0.0])
    def test_q_ultraspherical_nonpositive_beta(self, beta):
        v = check_cor1(make_q_ultraspherical(beta, 0.3), 500)
        assert v.holds and v.criterion is Criterion.COR1_I
        assert v.details["boundary_a_equals_1"]

    def test_pollaczek_gamma_increasing_when_lambda_below_a(self):
        v = check_cor1(make_pollaczek(0.5, 2.0), 500)
        assert v.holds and v.criterion is Criterion.COR1_I

    def test_pollaczek_neither_subcondition_when_lambda_above_a(self):
        v = check_cor1(make_pollaczek(2.0, 0.5), 500)
        assert not v.holds
        assert v.first_failure.n == 1
        assert "neither sub-condition" in v.first_failure.condition
        assert v.details["sub_conditions"] == {"i": False, "ii": False}

    def test_missing_limits(self):
        seq = CoefficientSequence.from_arrays([0, 0.2, 0.3], None, [0.5, 0.6, 0.6])
        with pytest.raises(PreconditionError, match="limits"):
            check_cor1(seq, 2)

    def test_inconsistent_limits(self):
        seq = CoefficientSequence.from_arrays([0, 0.2, 0.3], None, [0.5, 0.6, 0.6], declared_limits=(0.4, 0.4))
        with pytest.raises(PreconditionError, match="1/\\(2a\\)"):
            check_cor1(seq, 2)

    def test_tail_moving_away_from_limit(self):
        al = [0.0] + list(np.linspace(0.1, 0.3, 30))
        ga = [1.0] * 31
        seq = CoefficientSequence.from_arrays(al, None, ga, declared_limits=(0.1, 2.5))
        v = check_cor1(seq, 30)
        assert not v.holds
        assert "tail" in v.first_failure.condition


def unit_rows(alpha, gamma):
    alpha, gamma = np.asarray(alpha, float), np.asarray(gamma, float)
    beta = 1.0 - alpha - gamma
    return CoefficientSequence.from_arrays(alpha, beta, gamma, symmetric=False, row_sum_constant=1.0)


class TestThm4Init:
    def test_sec6_example(self):
        assert check_thm4_init(make_sec6_example()).holds

    def test_equal_gammas(self):
        seq = unit_rows([0.0, 0.3, 0.3], [0.6, 0.6, 0.6])
        c = check_thm4_init(seq)
        assert c.holds and c.margin == pytest.approx(0.3 * 0.6)

    def test_violation_and_negative_delta1(self):
        seq = unit_rows([0.0, 0.05, 0.05], [1.0, 0.2, 0.2])
        c = check_thm4_init(seq)
        assert not c.holds
        assert c.margin == pytest.approx(0.05 - 0.8)
        x = np.linspace(-1, 1, 401)
        assert turan_grid(seq, x, 1, 1).min() < 0

    @given(
        st.floats(0.05, 1.0),
        st.floats(0.05, 1.0),
        st.floats(0.01, 0.9),
        st.floats(-0.5, 0.5),
    )
    @settings(max_examples=150, deadline=None)
    def test_init_matches_delta1_sign(self, g0, g1, a1, b0):
        assume(abs(g0 + b0 - 1.0) < 1.0)
        seq = CoefficientSequence.from_arrays([0.0, a1], [1.0 - g0, 1.0 - a1 - g1], [g0, g1], row_sum_constant=1.0)
        c = check_thm4_init(seq)
        assume(abs(c.margin) > 1e-6)
        x = np.linspace(-1, 1, 201)
        al, be, ga = seq.coefficients(1)
        factor = (ga[0] - ga[1]) * (x - be[0]) + al[1] * ga[0]
        t = eval_polynomials(seq, x, 2).values
        delta1 = t[1] ** 2 - t[0] * t[2]
        np.testing.assert_allclose(ga[0] ** 2 * ga[1] * delta1, (1 - x) * factor, atol=1e-12)
        assert c.holds == (c.linear_factor_min >= 0)


class TestThm4Condition:
    def test_sec6_example_each_index(self):
        seq = make_sec6_example()
        for n in (2, 3, 10, 500):
            w = check_thm4_condition(seq, n)
            assert w.holds
            assert w.condition_used == "i"
            assert w.roots[1] <= 2.0

    def test_constant_half_double_root(self):
        seq = make_chebyshev()
        w = check_thm4_condition(seq, 4)
        assert w.discriminant == pytest.approx(0.0, abs=1e-15)
        assert w.roots == pytest.approx((1.0, 1.0))

    def test_requires_index_two(self):
        with pytest.raises(ValueError):
            check_thm4_condition(make_sec6_example(), 1)

    def test_row_sums_required(self):
        with pytest.raises(PreconditionError):
            check_thm4_condition(make_pollaczek(1, 1), 3)

    @given(st.floats(-0.45, 5.0), st.integers(2, 400))
    @settings(max_examples=80, deadline=None)
    def test_symmetric_roots_reduce_to_ratio(self, lam, n):
        seq = make_ultraspherical(lam)
        al, _, ga = seq.coefficients(n)
        w = check_thm4_condition(seq, n)
        t = al[n] / ga[n]
        assert w.roots[0] == pytest.approx(min(1.0, t), abs=1e-12)
        assert w.roots[1] == pytest.approx(max(1.0, t), abs=1e-12)
        assert w.holds

    @given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), st.floats(0.0, 1.0))
    @settings(max_examples=100, deadline=None)
    def test_witness_roots_same_sign(self, a, g, b):
        assume(a + g < 1.0)
        seq = unit_rows([0.0, a, a, a], [1.0, g, g, g])
        w = check_thm4_condition(seq, 2)
        if w.discriminant >= 0:
            r1, r2 = w.roots
            assert r1 <= r2
            assert r1 * r2 > 0
        assert w.roots_plus == pytest.approx((-1.0, -a / g)) or w.roots_plus == pytest.approx((-a / g, -1.0))


class TestThm4:
    def test_sec6_example(self):
        v = check_thm4(make_sec6_example(), 1000)
        assert v.holds and v.verified_to == 1000
        assert v.details["condition_usage"] == {"i": 999}

    def test_failing_initial_condition(self):
        seq = unit_rows([0.0, 0.05, 0.05, 0.05], [1.0, 0.2, 0.2, 0.2])
        v = check_thm4(seq, 3)
        assert not v.holds and v.first_failure.n == 1


class TestThm5:
    @pytest.mark.parametrize("order", [-0.9, -0.5, 0.0, 1.0, 2.5])
    def test_laguerre(self, order):
        first, second = check_thm5(make_laguerre(order), 1000)
        assert first.holds
        assert not second.holds

    def test_constructed_violation(self):
        n = np.arange(20)
        seq = half_line(2.0 * n, n + 1.0)
        _, second = check_thm5(seq, 19)
        assert not second.holds
        assert second.first_failure.n == 1

    def test_monotonicity_hypothesis_is_recorded(self):
        seq = half_line([0.0, 2.0, 1.0, 3.0], [1.0, 3.0, 4.0, 5.0])
        first, _ = check_thm5(seq, 3)
        assert not first.holds
        assert first.first_failure.condition == "hypothesis: alpha nondecreasing"

    def test_interval_form_rejected(self):
        with pytest.raises(WrongCriterionError):
            check_thm5(make_legendre(), 5)


class TestProp3Hypothesis:
    def test_laguerre(self):
        v = check_prop3_hypothesis(make_laguerre(1.0), 1000)
        assert v.holds and v.details["alpha_nondecreasing"]

    def test_unequal_increments(self):
        n = np.arange(10)
        v = check_prop3_hypothesis(half_line(n, 2.0 * n + 1), 9)
        assert not v.holds and v.first_failure.n == 1

    def test_common_offset(self):
        n = np.arange(30, dtype=float)
        v = check_prop3_hypothesis(half_line(n**2, n**2 + 1), 29)
        assert v.holds and v.details["alpha_nondecreasing"]


class TestSigma:
    def test_constant(self):
        v = check_sigma_transfer(SigmaSequence(lambda n: np.ones(np.shape(n))), 100)
        assert v.holds
        assert max(abs(m) for m in v.per_n_margins) == 0.0

    def test_geometric_equality(self):
        v = check_sigma_transfer(SigmaSequence(lambda n: 0.3 ** np.asarray(n, float)), 100)
        assert v.holds
        assert max(abs(m) for m in v.per_n_margins) <= 1e-12

    def test_log_convex_fails_at_one(self):
        v = check_sigma_transfer(SigmaSequence(lambda n: 2.0 ** (np.asarray(n, float) ** 2)), 10)
        assert not v.holds
        assert v.first_failure.n == 1
        assert v.first_failure.margin == pytest.approx(1 - 16 / 4)

    def test_log_form_handles_huge_values(self):
        sig = SigmaSequence(lambda n: None, log_sigma=lambda n: -np.asarray(n, float) ** 1.5)
        assert check_sigma_transfer(sig, 2000).holds

    def test_nonpositive_sigma(self):
        with pytest.raises(ValueError, match="sigma_2"):
            check_sigma_transfer(SigmaSequence(lambda n: 1.0 - 0.5 * np.asarray(n, float)), 5)

    def test_renormalized_polynomials_are_scaled(self):
        sig = SigmaSequence(lambda n: 1.0 / (1.0 + np.asarray(n, float)))
        seq = renormalize(make_legendre(), sig)
        x = np.linspace(-1, 1, 11)
        p = eval_polynomials(make_legendre(), x, 20).values
        q = eval_polynomials(seq, x, 20).values
        n = np.arange(21)[:, None]
        np.testing.assert_allclose(q, p / (1.0 + n), atol=1e-14)


@st.composite
def thm1_first_sequences(draw):
    steps = draw(st.lists(st.floats(0.0, 1.0), min_size=6, max_size=40))
    lo = draw(st.floats(0.05, 0.5))
    alpha = lo + (0.5 - lo) * np.cumsum(steps) / max(np.sum(steps), 1e-9)
    alpha = np.minimum(np.concatenate(([0.0], alpha)), 0.5)
    return CoefficientSequence.from_arrays(alpha, None, np.concatenate(([1.0], 1.0 - alpha[1:])))


@given(thm1_first_sequences())
@settings(max_examples=40, deadline=None)
def test_thm1_soundness_link(seq):
    first, _ = check_thm1(seq, seq.horizon)
    assume(first.holds)
    report = scan_sign(seq, ScanRegion(-1, 1, 201, 1, seq.horizon - 1))
    assert report.clean


@st.composite
def thm5_sequences(draw):
    k = draw(st.integers(5, 30))
    dg = np.array(draw(st.lists(st.floats(0.0, 2.0), min_size=k, max_size=k)))
    extra = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k)))
    extra *= draw(st.floats(0.05, 0.99)) / max(extra.sum(), 1e-9)
    alpha = np.concatenate(([0.0], np.cumsum(dg + extra)))
    gamma = np.concatenate(([1.0], 1.0 + np.cumsum(dg)))
    return half_line(alpha, gamma)


@given(thm5_sequences())
@settings(max_examples=40, deadline=None)
def test_thm5_soundness_link(seq):
    first, _ = check_thm5(seq, seq.horizon)
    assume(first.holds)
    x = np.linspace(0, 20, 201)
    delta = turan_grid(seq, x, 1, seq.horizon - 1)
    scale = np.maximum(1.0, np.abs(eval_polynomials(seq, x, seq.horizon).values[1 : seq.horizon]) ** 2)
    assert np.all(delta >= -1e-9 * scale)
