import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import expit

from logistic_grn.errors import (
    DomainError,
    HillSingularityError,
    OrientationError,
    UnsupportedCoefficientError,
)
from logistic_grn.sigmoid import (
    SECOND_DERIVATIVE_BOUND,
    HillSpec,
    LogisticSpec,
    Orientation,
    SamuilikSpec,
    basal_rate,
    hill_antiderivative_closed,
    hill_derivative,
    hill_eval,
    hill_inverse,
    log_input_equivalence,
    logistic_antiderivative,
    logistic_derivative,
    logistic_eval,
    logistic_inverse,
    logistic_linear_origin,
    logistic_second_derivative,
    logistic_taylor_midpoint,
    logit,
    match_steepness,
    samuilik_critical_point,
    samuilik_repression_eval,
    scaled_logistic_eval,
    scaled_logistic_factor,
    softplus,
    standard_logistic,
)

INC, DEC = Orientation.INCREASING, Orientation.DECREASING

steep = st.floats(0.05, 20.0)
thresh = st.floats(0.05, 20.0)
orient = st.sampled_from(list(Orientation))


class TestSpecs:
    @pytest.mark.parametrize("lam, theta", [(0.0, 1.0), (-1.0, 1.0), (1.0, math.nan), (math.nan, 1.0), (1.0, math.inf)])
    def test_logistic_rejects_bad_parameters(self, lam, theta):
        with pytest.raises(DomainError):
            LogisticSpec(lam, theta)

    @pytest.mark.parametrize("n, theta", [(0.0, 1.0), (2.0, -1.0), (math.inf, 1.0)])
    def test_hill_rejects_bad_parameters(self, n, theta):
        with pytest.raises(DomainError):
            HillSpec(n, theta)

    @pytest.mark.parametrize("text, expected", [("activation", INC), ("+", INC), ("repression", DEC), ("decreasing", DEC)])
    def test_orientation_parse(self, text, expected):
        assert Orientation.parse(text) is expected

    def test_orientation_parse_rejects_unknown(self):
        with pytest.raises(DomainError):
            Orientation.parse("sideways")

    def test_specs_are_frozen(self):
        spec = LogisticSpec(1.0, 1.0)
        with pytest.raises(AttributeError):
            spec.steepness = 2.0


class TestStandardLogistic:
    def test_matches_scipy_expit(self):
        z = np.linspace(-800, 800, 4001)
        np.testing.assert_allclose(standard_logistic(z), expit(z), rtol=1e-15, atol=1e-300)

    def test_no_overflow_warning_at_extremes(self):
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            assert standard_logistic(-1000.0) == 0.0
            assert standard_logistic(1000.0) == 1.0

    def test_scalar_in_scalar_out(self):
        assert isinstance(standard_logistic(0.3), float)
        assert standard_logistic(0.0) == 0.5

    def test_softplus_against_logaddexp(self):
        z = np.linspace(-700, 700, 1001)
        np.testing.assert_allclose(softplus(z), np.logaddexp(0.0, z), rtol=1e-14)

    @pytest.mark.parametrize("y", [0.0, 1.0, -0.1, 1.5])
    def test_logit_domain(self, y):
        with pytest.raises(DomainError):
            logit(y)


class TestLogistic:
    @given(lam=steep, theta=thresh, o=orient, x=st.floats(-50, 50))
    @settings(max_examples=200, deadline=None)
    def test_symmetry(self, lam, theta, o, x):
        a = logistic_eval(LogisticSpec(lam, theta, o), x)
        b = logistic_eval(LogisticSpec(lam, theta, o.flipped()), x)
        assert a + b == pytest.approx(1.0, abs=1e-15)

    @given(lam=steep, theta=thresh, o=orient)
    @settings(max_examples=100, deadline=None)
    def test_half_at_threshold_with_slope_lambda_over_four(self, lam, theta, o):
        spec = LogisticSpec(lam, theta, o)
        assert logistic_eval(spec, theta) == 0.5
        assert logistic_derivative(spec, theta) == pytest.approx(o.sign * lam / 4)

    @pytest.mark.parametrize("o", list(Orientation))
    def test_derivatives_against_finite_differences(self, o):
        spec = LogisticSpec(2.3, 1.7, o)
        x = np.linspace(-2, 6, 97)
        h = 1e-5
        d1 = (np.asarray(logistic_eval(spec, x + h)) - logistic_eval(spec, x - h)) / (2 * h)
        d2 = (np.asarray(logistic_derivative(spec, x + h)) - logistic_derivative(spec, x - h)) / (2 * h)
        np.testing.assert_allclose(logistic_derivative(spec, x), d1, atol=1e-9)
        np.testing.assert_allclose(logistic_second_derivative(spec, x), d2, atol=1e-8)

    def test_second_derivative_bound(self):
        spec = LogisticSpec(1.0, 1.0)
        x = np.linspace(-10, 12, 200001)
        peak = np.max(np.abs(logistic_second_derivative(spec, x)))
        assert SECOND_DERIVATIVE_BOUND == pytest.approx(math.sqrt(3) / 18)
        assert peak == pytest.approx(SECOND_DERIVATIVE_BOUND, rel=1e-8)

    @pytest.mark.parametrize("o", list(Orientation))
    def test_antiderivative_against_quadrature(self, o):
        spec = LogisticSpec(1.4, 2.0, o)
        a, b = -1.0, 5.0
        quad, _ = integrate.quad(lambda x: logistic_eval(spec, x), a, b, epsabs=1e-13)
        got = logistic_antiderivative(spec, b) - logistic_antiderivative(spec, a)
        assert got == pytest.approx(quad, rel=1e-11)

    def test_decreasing_antiderivative_vanishes_at_infinity(self):
        spec = LogisticSpec(2.0, 1.0, DEC)
        assert logistic_antiderivative(spec, 400.0) == pytest.approx(0.0, abs=1e-300)

    @given(lam=steep, theta=thresh, o=orient, u=st.floats(-12, 12))
    @settings(max_examples=200, deadline=None)
    def test_inverse_round_trip(self, lam, theta, o, u):
        spec = LogisticSpec(lam, theta, o)
        x = theta + u / lam
        assert logistic_inverse(spec, logistic_eval(spec, x)) == pytest.approx(x, abs=1e-8 / lam * (1 + math.exp(abs(u)) * 1e-6))

    @pytest.mark.parametrize("order, tol", [(1, 5e-2), (3, 5e-3), (5, 5e-4)])
    def test_taylor_accuracy_improves_with_order(self, order, tol):
        spec = LogisticSpec(2.0, 1.0)
        x = np.linspace(0.6, 1.4, 41)
        err = np.max(np.abs(logistic_taylor_midpoint(spec, x, order) - logistic_eval(spec, x)))
        assert err < tol

    def test_taylor_coefficients(self):
        # s = 0.1: 1/2 + s/4 - s^3/48 + s^5/480
        spec = LogisticSpec(1.0, 1.0)
        s = 0.1
        assert logistic_taylor_midpoint(spec, 1.0 + s, 5) == pytest.approx(0.5 + s / 4 - s**3 / 48 + s**5 / 480, rel=1e-15)

    def test_taylor_rejects_unsupported_order(self):
        with pytest.raises(DomainError):
            logistic_taylor_midpoint(LogisticSpec(1.0, 1.0), 1.0, 2)

    def test_linear_origin_requires_increasing(self):
        with pytest.raises(OrientationError):
            logistic_linear_origin(LogisticSpec(1.0, 1.0, DEC), 0.1)

    def test_linear_origin_is_tangent_at_zero(self):
        spec = LogisticSpec(3.0, 1.0)
        assert logistic_linear_origin(spec, 0.0) == pytest.approx(logistic_eval(spec, 0.0))
        h = 1e-6
        slope = (logistic_linear_origin(spec, h) - logistic_linear_origin(spec, 0.0)) / h
        assert slope == pytest.approx(logistic_derivative(spec, 0.0), rel=1e-6)

    def test_basal_rate(self):
        assert basal_rate(LogisticSpec(3.0, 1.0)) == pytest.approx(1 / (1 + math.exp(3)), rel=1e-15)


class TestScaledLogistic:
    def test_equals_one_at_zero(self):
        spec = LogisticSpec(3.0, 2.0, DEC)
        assert scaled_logistic_eval(spec, 0.0) == pytest.approx(1.0, rel=1e-15)

    def test_is_factor_times_logistic(self):
        spec = LogisticSpec(0.7, 3.0, DEC)
        x = np.linspace(0, 20, 50)
        np.testing.assert_allclose(
            scaled_logistic_eval(spec, x), scaled_logistic_factor(spec) * np.asarray(logistic_eval(spec, x)), rtol=1e-14
        )

    def test_tail_is_finite(self):
        spec = LogisticSpec(10.0, 1.0, DEC)
        assert scaled_logistic_eval(spec, 1e4) == 0.0

    def test_requires_decreasing(self):
        with pytest.raises(OrientationError):
            scaled_logistic_eval(LogisticSpec(1.0, 1.0), 0.5)


class TestHill:
    @given(n=st.floats(0.3, 8), theta=thresh, x=st.floats(0, 100))
    @settings(max_examples=200, deadline=None)
    def test_complement(self, n, theta, x):
        up = hill_eval(HillSpec(n, theta, INC), x)
        down = hill_eval(HillSpec(n, theta, DEC), x)
        assert up + down == pytest.approx(1.0, abs=1e-14)

    def test_matches_rational_form(self):
        x = np.linspace(0, 10, 101)
        np.testing.assert_allclose(hill_eval(HillSpec(3, 2), x), x**3 / (x**3 + 8), rtol=1e-14, atol=1e-300)

    def test_negative_input_rejected(self):
        with pytest.raises(DomainError):
            hill_eval(HillSpec(2, 1), -0.1)

    @pytest.mark.parametrize("o", list(Orientation))
    def test_derivative_against_finite_differences(self, o):
        spec = HillSpec(2.7, 1.3, o)
        x = np.linspace(0.1, 5, 80)
        h = 1e-6
        fd = (np.asarray(hill_eval(spec, x + h)) - hill_eval(spec, x - h)) / (2 * h)
        np.testing.assert_allclose(hill_derivative(spec, x), fd, atol=1e-8)

    @pytest.mark.parametrize("n, expected", [(1, 1.0 / 2.0), (2, 0.0), (3, 0.0)])
    def test_derivative_at_zero_integer_n(self, n, expected):
        assert hill_derivative(HillSpec(n, 2.0), 0.0) == expected

    def test_derivative_at_zero_fractional_n_raises(self):
        with pytest.raises(HillSingularityError) as info:
            hill_derivative(HillSpec(0.5, 1.0), 0.0)
        assert info.value.exponent == pytest.approx(-0.5)

    @given(n=st.floats(0.5, 6), theta=thresh, o=orient, y=st.floats(1e-6, 1 - 1e-6))
    @settings(max_examples=200, deadline=None)
    def test_inverse_round_trip(self, n, theta, o, y):
        spec = HillSpec(n, theta, o)
        assert hill_eval(spec, hill_inverse(spec, y)) == pytest.approx(y, rel=1e-9)

    @pytest.mark.parametrize("n", [1, 2])
    def test_closed_antiderivative_against_quadrature(self, n):
        spec = HillSpec(n, 1.5)
        quad, _ = integrate.quad(lambda x: hill_eval(spec, x), 0.0, 4.0, epsabs=1e-13)
        got = hill_antiderivative_closed(spec, 4.0) - hill_antiderivative_closed(spec, 0.0)
        assert got == pytest.approx(quad, rel=1e-11)

    def test_closed_antiderivative_unsupported(self):
        with pytest.raises(UnsupportedCoefficientError):
            hill_antiderivative_closed(HillSpec(3, 1.0), 1.0)
        with pytest.raises(OrientationError):
            hill_antiderivative_closed(HillSpec(2, 1.0, DEC), 1.0)


class TestMatching:
    @pytest.mark.parametrize("n, theta, lam", [(4, 3, 4 / 3), (3, 2, 1.5), (2, 1, 2.0)])
    def test_steepness_match(self, n, theta, lam):
        spec = match_steepness(HillSpec(n, theta, DEC))
        assert spec.steepness == pytest.approx(lam)
        assert spec.threshold == theta and spec.orientation is DEC

    @pytest.mark.parametrize("o", list(Orientation))
    def test_slopes_agree_at_threshold(self, o):
        hill = HillSpec(4.0, 3.0, o)
        assert logistic_derivative(match_steepness(hill), 3.0) == pytest.approx(hill_derivative(hill, 3.0), rel=1e-12)

    @given(n=st.floats(0.5, 8), theta=st.floats(0.1, 10), o=orient)
    @settings(max_examples=100, deadline=None)
    def test_log_input_identity(self, n, theta, o):
        x = theta * np.geomspace(1e-3, 1e3, 64)
        assert np.max(log_input_equivalence(HillSpec(n, theta, o), x)) <= 1e-12

    def test_log_input_requires_positive(self):
        with pytest.raises(DomainError):
            log_input_equivalence(HillSpec(2, 1), [0.0, 1.0])


class TestWeightedSum:
    def test_negative_weight_represses(self):
        spec = SamuilikSpec(2.0, -1.0, -1.0)
        x = np.linspace(0, 5, 11)
        assert np.all(np.diff(samuilik_repression_eval(spec, x)) < 0)

    def test_critical_point_is_half(self):
        spec = SamuilikSpec(2.0, -0.5, -1.0)
        assert samuilik_repression_eval(spec, samuilik_critical_point(spec)) == pytest.approx(0.5)

    def test_zero_weight(self):
        with pytest.raises(DomainError):
            samuilik_critical_point(SamuilikSpec(2.0, 0.0, 1.0))
