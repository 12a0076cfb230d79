import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from entrodyn.errors import DomainError
from entrodyn.ou_reference import (
    OUParams,
    classify_power_release,
    ou_conditional_entropy,
    ou_conditional_entropy_rate,
    ou_entropy,
    ou_entropy_rate,
    ou_fisher,
    ou_fisher_rate,
    ou_power_release,
    ou_state,
    ou_variance,
)

params = st.builds(
    OUParams,
    gamma=st.floats(0.2, 3.0),
    D=st.floats(0.2, 3.0),
    alpha0=st.floats(-2.0, 2.0),
    sigma0_sq=st.floats(0.1, 5.0),
)


def test_state_limits():
    p = OUParams(1.0, 1.0, 1.5, 2.0)
    s0 = ou_state(p, 0.0)
    assert (s0.mean, s0.variance) == pytest.approx((1.5, 2.0))
    inf = ou_state(p, 60.0)
    assert inf.mean == pytest.approx(0.0, abs=1e-20)
    assert inf.variance == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ou_variance(p, -1.0)
    with pytest.raises(DomainError):
        OUParams(0.0, 1.0, 0.0, 1.0)


def test_variance_matches_moment_ode():
    # independent oracle: integrate d(var)/dt = 2D - 2 gamma var and dm/dt = -gamma m
    p = OUParams(0.7, 1.3, 0.4, 3.1)
    sol = solve_ivp(
        lambda t, y: [-p.gamma * y[0], 2 * p.D - 2 * p.gamma * y[1]],
        (0, 5), [p.alpha0, p.sigma0_sq], rtol=1e-12, atol=1e-14, dense_output=True,
    )
    for t in np.linspace(0, 5, 11):
        m, v = sol.sol(t)
        st_ = ou_state(p, t)
        assert st_.mean == pytest.approx(m, rel=1e-9, abs=1e-12)
        assert st_.variance == pytest.approx(v, rel=1e-9)


def test_stationary_variance_constant():
    p = OUParams(2.0, 1.0, 0.3, 0.5)
    for t in (0.0, 1.0, 10.0):
        assert ou_variance(p, t) == pytest.approx(0.5)
        assert ou_entropy_rate(p, t) == 0.0
        assert ou_fisher(p, t) == pytest.approx(2.0)


def test_entropy_rate_at_origin():
    # d/dt of ln(var)/2 at t=0 with var' = 2(D - gamma s0^2) = -2 and var = 2
    p = OUParams(1.0, 1.0, 0.0, 2.0)
    assert ou_entropy_rate(p, 0.0) == pytest.approx(-0.5, abs=1e-15)
    assert ou_entropy_rate(p, 0.0, doubled_prefactor=True) == pytest.approx(-1.0, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(params, st.floats(1e-3, 4.0))
def test_entropy_rate_is_derivative(p, t):
    h = 1e-6
    num = (ou_entropy(p, t + h) - ou_entropy(p, t - h)) / (2 * h)
    assert ou_entropy_rate(p, t) == pytest.approx(num, rel=1e-6, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(params, st.floats(0.0, 4.0))
def test_conditional_entropy_rate_is_derivative(p, t):
    h = 1e-6
    lo = max(t - h, 0.0)
    num = (ou_conditional_entropy(p, t + h) - ou_conditional_entropy(p, lo)) / (t + h - lo)
    assert ou_conditional_entropy_rate(p, t) == pytest.approx(num, rel=1e-5, abs=1e-8)
    assert ou_conditional_entropy(p, t) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(params, st.floats(0.0, 4.0))
def test_fisher_rate_anticorrelated_with_entropy_rate(p, t):
    fr, sr = ou_fisher_rate(p, t), ou_entropy_rate(p, t)
    assert fr * sr <= 0.0
    h = 1e-6
    lo = max(t - h, 0.0)
    assert fr == pytest.approx((ou_fisher(p, t + h) - ou_fisher(p, lo)) / (t + h - lo), rel=1e-5, abs=1e-9)


def test_conditional_entropy_special_case():
    p = OUParams(1.0, 1.0, 1.0, 1.0)
    assert ou_conditional_entropy(p, 0.0) == pytest.approx(-0.5)
    for t in (0.3, 1.7):
        assert ou_conditional_entropy(p, t) == pytest.approx(-0.5 * math.exp(-2 * t))
    assert ou_conditional_entropy(OUParams(1.0, 1.0, 0.0, 1.0), 2.0) == 0.0


def test_fisher_oracle_values():
    p = OUParams(1.0, 1.0, 0.0, 2.0)
    assert ou_fisher(p, 0.0) == pytest.approx(0.5)
    assert ou_fisher_rate(p, 0.0) == pytest.approx(0.5)
    assert ou_fisher(p, 40.0) == pytest.approx(1.0)


def test_power_release_regimes():
    assert classify_power_release(OUParams(1.0, 1.0, 0.0, 1.0)).regime == "equilibrium"
    drain = OUParams(1.0, 1.0, 0.0, 0.3)
    assert classify_power_release(drain).regime == "drainage"
    assert all(ou_power_release(drain, t) < 0 for t in np.linspace(0, 5, 21))
    supply = OUParams(1.0, 1.0, 0.0, 3.0)
    assert classify_power_release(supply).regime == "supply"
    assert all(ou_power_release(supply, t) > 0 for t in np.linspace(0, 5, 21))


@settings(max_examples=40, deadline=None)
@given(params, st.floats(0.0, 4.0))
def test_power_release_closed_form(p, t):
    # collecting terms of dH_c/dt - dS/dt leaves gamma e^{-2 gamma t} (gamma a0^2 - (D - gamma s0^2)) / D
    expected = p.gamma * math.exp(-2 * p.gamma * t) * (p.gamma * p.alpha0**2 - (p.D - p.gamma * p.sigma0_sq)) / p.D
    assert ou_power_release(p, t) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("offset,regime", [(0.05, "supply"), (-0.05, "drainage")])
def test_power_release_threshold(offset, regime):
    gamma, D, s0 = 1.0, 1.0, 0.4
    a0 = math.sqrt((D - gamma * s0) / gamma + offset)
    p = OUParams(gamma, D, a0, s0)
    assert ou_entropy_rate(p, 0.0) > 0
    assert classify_power_release(p).regime == regime
