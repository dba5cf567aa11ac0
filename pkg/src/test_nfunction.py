#!/usr/bin/env python3
"""
N-Function Tests
Closed-form values, inverses, conjugates and growth diagnostics of φ and Φ
"""

import math
import sys
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from errors import InadmissibleExponents
from nfunction import (
    NFunctionParams,
    asymptotic_ratio,
    capital_phi,
    capital_phi_array,
    capital_phi_inverse,
    delta2_constant,
    log_sobolev_conjugate,
    p_zero_estimate,
    phi,
    phi_inverse,
    phi_ratio,
    sobolev_conjugate_inverse,
    young_conjugate,
)

QUADRATIC = NFunctionParams(p=2.0, q=1.0)
REFERENCE = NFunctionParams(p=1.9, q=1.05)
EXPONENT_PAIRS = [(1.9, 1.05), (2.0, 1.0), (2.5, 1.2), (1.5, 1.4)]


def quadratic_closed_form(t: float) -> float:
    """Φ for p=2, q=1: ∫₀ᵗ s log(1+s) ds."""
    return 0.5 * (t * t - 1.0) * math.log1p(t) - 0.25 * t * t + 0.5 * t


def test_params_reject_small_exponents():
    with pytest.raises(ValidationError):
        NFunctionParams(p=1.0, q=2.0)
    with pytest.raises(ValidationError):
        NFunctionParams(p=2.0, q=0.99)


def test_params_accept_unit_q():
    assert NFunctionParams(p=2.0, q=1.0).p_zero == 3.0
    assert p_zero_estimate(QUADRATIC) == pytest.approx(3.0, abs=1e-3)


def test_phi_values():
    assert phi(QUADRATIC, 1.0) == pytest.approx(math.log(2.0), abs=1e-12)
    assert phi(NFunctionParams(p=3.0, q=2.0), 2.0) == pytest.approx(4.0 * math.log(5.0), rel=1e-14)
    assert phi(REFERENCE, 0.0) == 0.0


@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_phi_is_odd(t):
    assert phi(REFERENCE, -t) == -phi(REFERENCE, t)


def test_phi_strictly_increasing():
    t = np.linspace(-20.0, 20.0, 4001)
    assert np.all(np.diff(phi(REFERENCE, t)) > 0)


def test_phi_inverse_round_trip_and_oddness():
    assert phi_inverse(QUADRATIC, 0.0) == 0.0
    assert phi_inverse(QUADRATIC, phi(QUADRATIC, 2.5)) == pytest.approx(2.5, abs=1e-10)
    for s in (1e-9, 0.3, 7.0, 1e6):
        assert phi_inverse(REFERENCE, -s) == -phi_inverse(REFERENCE, s)


def test_capital_phi_matches_closed_form():
    for t in (0.5, 1.0, 3.2, 50.0, 1e4):
        expected = quadratic_closed_form(t)
        assert capital_phi(QUADRATIC, t) == pytest.approx(expected, rel=1e-10)
        assert capital_phi_array(QUADRATIC, t) == pytest.approx(expected, rel=1e-10)


def test_capital_phi_is_even_and_vanishes_at_zero():
    assert capital_phi(REFERENCE, 0.0) == 0.0
    assert capital_phi_array(REFERENCE, 0.0) == 0.0
    assert capital_phi(REFERENCE, -2.0) == capital_phi(REFERENCE, 2.0)


def test_tabulated_phi_agrees_with_adaptive():
    for t in np.logspace(-7.0, 14.0, 43):
        exact = capital_phi(REFERENCE, float(t))
        assert capital_phi_array(REFERENCE, t) == pytest.approx(exact, rel=1e-11)


@settings(max_examples=200)
@given(
    st.floats(min_value=0.0, max_value=100.0),
    st.floats(min_value=0.0, max_value=100.0),
)
def test_capital_phi_midpoint_convexity(a, b):
    mid = capital_phi_array(REFERENCE, 0.5 * (a + b))
    mean = 0.5 * (capital_phi_array(REFERENCE, a) + capital_phi_array(REFERENCE, b))
    assert mid <= mean + 1e-12 * max(1.0, mean)


def test_small_t_growth():
    for p, q in EXPONENT_PAIRS:
        params = NFunctionParams(p=p, q=q)
        ratio = capital_phi(params, 1e-4) / 1e-4 ** (p + q)
        assert ratio == pytest.approx(1.0 / (p + q), rel=0.01)


def test_large_t_growth_first_order():
    # Φ/(t^p log(1+t^q)) approaches 1/p only like 1/log t
    for p, q in EXPONENT_PAIRS:
        params = NFunctionParams(p=p, q=q)
        log_term = math.log1p(1e6**q)
        ratio = capital_phi(params, 1e6) / (1e6**p * log_term)
        assert ratio == pytest.approx((1.0 - q / (p * log_term)) / p, rel=1e-3)

        far = capital_phi(params, 1e40) / (1e40**p * q * math.log(1e40))
        assert far == pytest.approx(1.0 / p, rel=0.01)


def test_capital_phi_inverse():
    assert capital_phi_inverse(QUADRATIC, 0.0) == 0.0
    assert capital_phi_inverse(QUADRATIC, capital_phi(QUADRATIC, 3.2)) == pytest.approx(3.2, abs=1e-9)
    with pytest.raises(ValueError):
        capital_phi_inverse(QUADRATIC, -1.0)


@given(
    st.floats(min_value=1e-12, max_value=1e8),
    st.floats(min_value=1e-12, max_value=1e8),
)
def test_capital_phi_inverse_monotone(y1, y2):
    lo, hi = sorted((y1, y2))
    if hi <= lo * (1.0 + 1e-9):
        return
    assert capital_phi_inverse(REFERENCE, lo) < capital_phi_inverse(REFERENCE, hi)


def test_young_conjugate_equality_case():
    assert young_conjugate(QUADRATIC, 0.0) == 0.0
    t = 1.7
    s = phi(QUADRATIC, t)
    assert capital_phi(QUADRATIC, t) + young_conjugate(QUADRATIC, s) - t * s == pytest.approx(0.0, abs=1e-8)


def test_young_inequality_sampled():
    rng = np.random.default_rng(7)
    for t, s in rng.uniform(1e-6, 10.0, (100, 2)):
        assert t * s <= capital_phi(QUADRATIC, t) + young_conjugate(QUADRATIC, s) + 1e-10


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
def test_young_inequality_property(t, s):
    assert t * s <= capital_phi(REFERENCE, t) + young_conjugate(REFERENCE, s) + 1e-10 * max(1.0, t * s)


def test_young_conjugate_is_even():
    assert young_conjugate(REFERENCE, -3.0) == young_conjugate(REFERENCE, 3.0)


def test_p_zero_identity():
    for p, q in EXPONENT_PAIRS:
        assert p_zero_estimate(NFunctionParams(p=p, q=q)) == pytest.approx(p + q, abs=1e-3)


def test_ratio_bounds_and_slow_limit():
    t = np.logspace(-8.0, 8.0, 2000)
    for p, q in EXPONENT_PAIRS:
        params = NFunctionParams(p=p, q=q)
        ratio = phi_ratio(params, t)
        assert np.all(ratio >= p - 1e-6)
        assert np.all(ratio <= p + q + 1e-6)
        # tφ/Φ - p decays like 1/log t
        assert ratio[-1] == pytest.approx(asymptotic_ratio(params, t[-1]), abs=1e-3)
        assert phi_ratio(params, 1e50) == pytest.approx(p, abs=1e-2)


def test_log_domain_evaluation_is_warning_free():
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        phi_ratio(REFERENCE, np.logspace(-8.0, 60.0, 400))
        capital_phi_inverse(REFERENCE, np.logspace(-30.0, 30.0, 50))


def test_delta2_constant_bounded():
    t = np.logspace(-6.0, 10.0, 500)
    for p, q in EXPONENT_PAIRS:
        params = NFunctionParams(p=p, q=q)
        assert 2.0**p <= delta2_constant(params, t) <= 2.0 ** (p + q) + 1e-9


def test_sobolev_conjugate_inverse():
    assert sobolev_conjugate_inverse(REFERENCE, 3, 0.0) == 0.0
    assert math.isfinite(sobolev_conjugate_inverse(REFERENCE, 3, 1.0))

    values = np.array([sobolev_conjugate_inverse(REFERENCE, 3, 10.0**k) for k in range(1, 7)])
    increments = np.diff(values)
    assert np.all(increments > 0)
    # growing decade increments: the integral diverges
    assert np.all(np.diff(increments) > 0)


def test_sobolev_conjugate_requires_subcritical_exponents():
    with pytest.raises(InadmissibleExponents):
        sobolev_conjugate_inverse(NFunctionParams(p=2.0, q=1.2), 3, 1.0)


def test_sobolev_conjugate_inverts_its_inverse():
    for y in (80.0, 300.0, 1000.0):
        s = math.exp(log_sobolev_conjugate(REFERENCE, 3, y))
        assert sobolev_conjugate_inverse(REFERENCE, 3, s) == pytest.approx(y, rel=1e-7)


def test_embedding_decay():
    r = 3.5
    t = 10.0 ** np.arange(1, 6)
    for k in (0.5, 1.0, 2.0):
        log_ratio = np.array([r * math.log(t_) - log_sobolev_conjugate(REFERENCE, 3, k * t_) for t_ in t])
        assert log_ratio[-1] < log_ratio[-2]
        assert log_ratio[-1] < log_ratio[0] - math.log(10.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
