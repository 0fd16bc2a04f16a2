import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracstate.control import CFE, PSE, ControllerSpec, controller_output, simulate_closed_loop
from fracstate.errors import InstabilityError, InvalidArgumentError, InvalidModelError
from fracstate.glcore import SampledSignal
from fracstate.statespace import FodeModel

PLANT = FodeModel(a2=0.8, a1=0.5, a0=1.0, alpha=2.2, beta=0.9)
CRITICAL = FodeModel(a2=1.0, a1=2.0, a0=1.0, alpha=2.0, beta=1.0)
SCHEMES = [pytest.param(PSE(None), id="pse-full"), pytest.param(PSE(100), id="pse-100"),
           pytest.param(CFE(), id="cfe")]


def classical_pid(e, T, K, Ti, Td):
    """Rectangle-rule integral and backward-difference derivative."""
    u = np.empty_like(e)
    acc = 0.0
    prev = 0.0
    for k, ek in enumerate(e):
        acc += ek
        u[k] = K * ek + Ti * T * acc + Td * (ek - prev) / T
        prev = ek
    return u


@pytest.mark.parametrize("scheme", SCHEMES)
def test_pure_proportional(scheme):
    e = SampledSignal(0.1, np.linspace(-3, 5, 50))
    u = controller_output(ControllerSpec(K=2.0), e, scheme)
    assert np.array_equal(u.samples, 2.0 * e.samples)


def test_integer_integral_of_step():
    T = 0.01
    e = SampledSignal(T, np.ones(101))
    u = controller_output(ControllerSpec(Ti=1.0, lam=1.0), e, PSE(None))
    # rectangle rule: exactly (k + 1) T, so the error at t = 1 equals T = 1e-2;
    # 1e-12 absorbs the rounding of 0.01 * 101
    assert u.samples[-1] == pytest.approx(1.01, rel=1e-14)
    assert abs(u.samples[-1] - 1.0) <= 1e-2 + 1e-12


def test_integer_integral_of_step_cfe_is_trapezoidal():
    T = 0.01
    e = SampledSignal(T, np.ones(101))
    u = controller_output(ControllerSpec(Ti=1.0, lam=1.0), e, CFE())
    np.testing.assert_allclose(u.samples, T * (np.arange(101) + 0.5), rtol=1e-9)


def test_fractional_derivative_term():
    T = 1e-3
    e = SampledSignal.from_function(lambda t: t, T, 1001)
    u = controller_output(ControllerSpec(Td=1.0, delta=0.5), e, PSE(None))
    assert u.samples[-1] == pytest.approx(2 / math.sqrt(math.pi), rel=1e-2)


@pytest.mark.parametrize("K, Ti, Td", [(1.0, 0.5, 0.2), (0.0, 2.0, 0.0), (3.0, 0.0, 0.05)])
def test_integer_orders_reduce_to_classical_pid(K, Ti, Td):
    T = 0.05
    rng = np.random.default_rng(21)
    e = rng.normal(size=200)
    ours = controller_output(ControllerSpec(K=K, Ti=Ti, Td=Td, lam=1.0, delta=1.0),
                             SampledSignal(T, e), PSE(None)).samples
    np.testing.assert_allclose(ours, classical_pid(e, T, K, Ti, Td), rtol=1e-9, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(-20, 20, allow_nan=False), st.sampled_from(["pse", "cfe"]))
def test_controller_is_linear(c, which):
    scheme = PSE(50) if which == "pse" else CFE()
    spec = ControllerSpec(K=1.5, Ti=0.7, Td=0.3, lam=0.6, delta=0.4)
    e = np.sin(np.arange(120) * 0.1)
    base = controller_output(spec, SampledSignal(0.1, e), scheme).samples
    scaled = controller_output(spec, SampledSignal(0.1, c * e), scheme).samples
    np.testing.assert_allclose(scaled, c * base, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("kwargs", [dict(Ti=1.0, lam=0.0), dict(lam=-0.5), dict(delta=-1.0),
                                    dict(K=math.inf)])
def test_invalid_controller(kwargs):
    with pytest.raises(InvalidModelError):
        ControllerSpec(**kwargs)


def test_zero_lambda_without_integral_is_allowed():
    ControllerSpec(K=1.0, lam=0.0)


def test_unknown_scheme():
    with pytest.raises(InvalidArgumentError):
        controller_output(ControllerSpec(Ti=1.0), SampledSignal(0.1, [1.0]), "pse")


# -- closed loop --------------------------------------------------------------

@pytest.mark.parametrize("scheme", SCHEMES)
def test_zero_gain_loop_stays_at_rest(scheme):
    res = simulate_closed_loop(PLANT, ControllerSpec(K=0.0), SampledSignal(0.1, np.ones(200)),
                               scheme)
    assert np.array_equal(res.u, np.zeros(200))
    assert np.array_equal(res.y, np.zeros(200))


@pytest.mark.parametrize("scheme", SCHEMES)
def test_zero_setpoint_stays_at_rest(scheme):
    spec = ControllerSpec(K=2.0, Ti=0.5, Td=0.3, lam=0.8, delta=0.5)
    res = simulate_closed_loop(PLANT, spec, SampledSignal(0.1, np.zeros(200)), scheme)
    assert not np.any(res.y) and not np.any(res.u)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_proportional_loop_final_value(scheme):
    K = 1.0
    res = simulate_closed_loop(CRITICAL, ControllerSpec(K=K), SampledSignal(0.01, np.ones(4001)),
                               scheme)
    assert res.y[-1] == pytest.approx(K / (CRITICAL.a0 + K), rel=2e-2)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_fractional_pd_on_reference_plant_is_bounded(scheme):
    spec = ControllerSpec(K=1.0, Td=1.0, delta=0.5)
    res = simulate_closed_loop(PLANT, spec, SampledSignal(0.1, np.ones(600)), scheme)
    assert np.all(np.isfinite(res.y))
    assert np.max(np.abs(res.y)) < 5.0


def test_loop_is_causal():
    # u_k depends on y_k only; y_0 = 0 so u_0 = K r_0
    res = simulate_closed_loop(CRITICAL, ControllerSpec(K=3.0), SampledSignal(0.1, np.ones(5)),
                               PSE())
    assert res.u[0] == 3.0
    assert res.y[0] == 0.0


def test_closed_loop_matches_open_loop_with_recorded_input():
    from fracstate.statespace import decompose, simulate_pse

    spec = ControllerSpec(K=1.2, Ti=0.4, lam=0.7)
    res = simulate_closed_loop(PLANT, spec, SampledSignal(0.1, np.ones(150)), PSE(100))
    replay = simulate_pse(decompose(PLANT), SampledSignal(0.1, res.u), 100)
    np.testing.assert_array_equal(replay.y, res.y)


def test_closed_loop_instability_reports_step():
    with pytest.raises(InstabilityError) as info:
        simulate_closed_loop(PLANT, ControllerSpec(K=1e4), SampledSignal(0.1, np.ones(2000)),
                             PSE())
    assert info.value.step > 0


def test_closed_loop_memory_includes_controller():
    spec = ControllerSpec(K=1.0, Ti=0.5, lam=0.5)
    res = simulate_closed_loop(PLANT, spec, SampledSignal(0.1, np.ones(300)), PSE(100))
    assert res.memory_bytes_peak == 2 * 100 * 8 + 101 * 8
