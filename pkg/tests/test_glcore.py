import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracstate.errors import InvalidArgumentError
from fracstate.glcore import (
    GlStream,
    SampledSignal,
    gl_coefficients,
    gl_differintegrate,
    pse_operator_coefficients,
)


def gamma_binomial(r, j):
    """(-1)^j C(r, j), evaluated at 50 digits."""
    with mpmath.workdps(50):
        return float((-1) ** j * mpmath.binomial(r, j))


def semi_derivative_of_t(t, r):
    # D^r t = t^(1-r) / Gamma(2-r)
    return t ** (1 - r) / math.gamma(2 - r)


# -- gl_coefficients ----------------------------------------------------------

def test_order_zero_is_identity():
    assert gl_coefficients(0, 3).coeffs.tolist() == [1.0, 0.0, 0.0, 0.0]


def test_first_difference():
    assert gl_coefficients(1, 3).coeffs.tolist() == [1.0, -1.0, 0.0, 0.0]


def test_half_order_against_gamma_formula():
    b = gl_coefficients(0.5, 2).coeffs
    expected = [gamma_binomial(0.5, j) for j in range(3)]
    assert expected == pytest.approx([1.0, -0.5, -0.125], rel=1e-15)
    np.testing.assert_allclose(b, expected, rtol=1e-15)


@pytest.mark.parametrize("r", [-0.5, 0.3, 0.5, 0.9, 1.0, 2.2, -1.7])
def test_matches_gamma_formula(r):
    b = gl_coefficients(r, 100).coeffs
    ref = np.array([gamma_binomial(r, j) for j in range(101)])
    np.testing.assert_allclose(b, ref, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("m", [0, 1, 2, 3, 5])
def test_integer_order_vanishes_beyond_m(m):
    b = gl_coefficients(m, 30).coeffs
    assert np.all(np.abs(b[m + 1:]) <= 1e-12)
    assert b[0] == 1.0


@given(st.floats(-3, 3, allow_nan=False), st.integers(1, 60))
def test_recurrence_reproduced_exactly(r, n):
    b = gl_coefficients(r, n).coeffs
    assert b[0] == 1.0
    for j in range(1, n + 1):
        assert b[j] == (1.0 - (r + 1.0) / j) * b[j - 1]


def test_coefficients_are_read_only():
    b = gl_coefficients(0.5, 4).coeffs
    with pytest.raises(ValueError):
        b[0] = 2.0


@pytest.mark.parametrize("r, n", [(math.nan, 3), (math.inf, 3), (0.5, 0), (0.5, -2), (0.5, 1.5)])
def test_coefficient_argument_errors(r, n):
    with pytest.raises(InvalidArgumentError):
        gl_coefficients(r, n)


# -- pse_operator_coefficients ------------------------------------------------

def test_pse_taps_first_derivative():
    assert pse_operator_coefficients(1, 0.1, 2).coeffs == pytest.approx([10, -10, 0], abs=1e-12)


def test_pse_taps_identity():
    assert pse_operator_coefficients(0, 0.1, 2).coeffs.tolist() == [1.0, 0.0, 0.0]


def test_pse_taps_unit_step_equal_gl_weights():
    taps = pse_operator_coefficients(0.5, 1.0, 2).coeffs
    assert taps.tolist() == [gamma_binomial(0.5, j) for j in range(3)]


def test_pse_taps_rejects_bad_step():
    with pytest.raises(InvalidArgumentError):
        pse_operator_coefficients(0.5, 0.0, 2)


def test_convolution_with_taps_equals_differintegrate():
    rng = np.random.default_rng(3)
    f = SampledSignal(0.05, rng.normal(size=80))
    taps = pse_operator_coefficients(0.7, 0.05, 79).coeffs
    conv = np.convolve(taps, f.samples)[:80]
    np.testing.assert_allclose(gl_differintegrate(f, 0.7, 79).samples, conv, rtol=1e-12,
                               atol=1e-12)


# -- gl_differintegrate -------------------------------------------------------

def test_order_zero_returns_input_exactly():
    rng = np.random.default_rng(0)
    f = SampledSignal(0.01, rng.normal(size=200))
    out = gl_differintegrate(f, 0.0, 50)
    assert np.array_equal(out.samples, f.samples)
    assert out.step == f.step


def test_semi_derivative_of_ramp():
    f = SampledSignal.from_function(lambda t: t, 1e-3, 1001)
    out = gl_differintegrate(f, 0.5, 1001)
    exact = semi_derivative_of_t(1.0, 0.5)
    assert exact == pytest.approx(2 / math.sqrt(math.pi), rel=1e-15)
    assert out.samples[-1] == pytest.approx(exact, rel=1e-2)


def test_first_derivative_of_square():
    f = SampledSignal.from_function(lambda t: t**2, 1e-3, 1001)
    out = gl_differintegrate(f, 1.0, 1001)
    assert out.samples[-1] == pytest.approx(2.0, abs=1e-2)


@pytest.mark.parametrize("r", [-0.5, -1.0])
def test_fractional_integral_of_one(r):
    # D^r 1 = t^-r / Gamma(1 - r) for r < 0
    T = 1e-3
    f = SampledSignal(T, np.ones(1001))
    out = gl_differintegrate(f, r, 1001)
    assert out.samples[-1] == pytest.approx(1.0 ** (-r) / math.gamma(1 - r), rel=2e-2)


@pytest.mark.parametrize("r", [1, 2])
def test_integer_orders_match_backward_differences(r):
    rng = np.random.default_rng(7)
    T = 0.02
    x = rng.normal(size=60)
    padded = np.concatenate([np.zeros(r), x])
    expected = np.diff(padded, n=r) / T**r
    out = gl_differintegrate(SampledSignal(T, x), r, 60).samples
    np.testing.assert_allclose(out, expected, rtol=1e-12, atol=1e-9)


def test_composition_of_half_orders():
    T = 1e-3
    f = SampledSignal.from_function(lambda t: t**2, T, 1001)
    half = gl_differintegrate(f, 0.5, 1001)
    twice = gl_differintegrate(half, 0.5, 1001)
    once = gl_differintegrate(f, 1.0, 1001)
    assert twice.samples[-1] == pytest.approx(once.samples[-1], rel=2e-2)
    # power series product: b^(0.5) * b^(0.5) = b^(1), so agreement is round-off level
    np.testing.assert_allclose(twice.samples, once.samples, rtol=1e-9, atol=1e-9)


def test_truncation_only_changes_late_samples():
    rng = np.random.default_rng(11)
    f = SampledSignal(0.1, rng.normal(size=150))
    full = gl_differintegrate(f, 0.8, 150).samples
    huge = gl_differintegrate(f, 0.8, 10_000).samples
    assert np.array_equal(full, huge)
    for L in (10, 40, 100):
        short = gl_differintegrate(f, 0.8, L).samples
        assert np.array_equal(short[: L + 1], full[: L + 1])
        assert not np.array_equal(short[L + 1:], full[L + 1:])


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-1.5, 2.5, allow_nan=False),
    st.floats(-5, 5, allow_nan=False),
    st.floats(-5, 5, allow_nan=False),
    st.integers(1, 80),
)
def test_linearity(r, a, b, L):
    rng = np.random.default_rng(5)
    f = rng.normal(size=60)
    g = rng.normal(size=60)
    T = 0.05
    lhs = gl_differintegrate(SampledSignal(T, a * f + b * g), r, L).samples
    rhs = (a * gl_differintegrate(SampledSignal(T, f), r, L).samples
           + b * gl_differintegrate(SampledSignal(T, g), r, L).samples)
    scale = 1 + np.max(np.abs(rhs))
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale


def test_single_sample_signal():
    out = gl_differintegrate(SampledSignal(0.1, [2.0]), 0.5, 5)
    assert out.samples.tolist() == [2.0 * 0.1**-0.5]


@pytest.mark.parametrize("L", [0, -1])
def test_rejects_zero_memory(L):
    with pytest.raises(InvalidArgumentError):
        gl_differintegrate(SampledSignal(0.1, [1.0, 2.0]), 0.5, L)


@pytest.mark.parametrize("step, samples", [(0.0, [1.0]), (-1.0, [1.0]), (math.inf, [1.0]),
                                           (0.1, []), (0.1, [1.0, math.nan])])
def test_signal_validation(step, samples):
    with pytest.raises(InvalidArgumentError):
        SampledSignal(step, samples)


def test_rejects_raw_arrays():
    with pytest.raises(InvalidArgumentError):
        gl_differintegrate(np.ones(3), 0.5, 3)


@pytest.mark.parametrize("memory", [None, 7])
def test_stream_matches_batch(memory):
    rng = np.random.default_rng(2)
    x = rng.normal(size=40)
    s = GlStream(-0.6, 0.1, memory, capacity=40)
    streamed = [s.push(v) for v in x]
    batch = gl_differintegrate(SampledSignal(0.1, x), -0.6, memory or 40).samples
    np.testing.assert_allclose(streamed, batch, rtol=1e-13, atol=1e-13)
