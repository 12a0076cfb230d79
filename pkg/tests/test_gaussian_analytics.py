import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from entrodyn.densities import GaussianParams
from entrodyn.errors import DomainError
from entrodyn.gaussian_analytics import (
    HeatKernelParams,
    bernoulli_to_gauss,
    de_bruijn_rate,
    gaussian_entropy,
    gaussian_fisher_matrix,
    gaussian_kullback,
    heat_kernel_entropy,
    heat_kernel_fisher,
    kullback_quadratic_approx,
    planck_closed_form,
    planck_coarse_graining,
)

# 30-digit mpmath values
PLANCK_MEAN_R001 = 99.500833331944447751
PLANCK_ENTROPY_R001 = 5.6051743526443413956


def test_gaussian_entropy_values():
    assert gaussian_entropy(GaussianParams(3.0, 1.0)) == pytest.approx(0.5 * math.log(2 * math.pi * math.e))
    assert gaussian_entropy(GaussianParams(0.0, 2.0)) - gaussian_entropy(GaussianParams(0.0, 1.0)) == pytest.approx(
        math.log(2.0)
    )


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-3, 3), st.floats(0.3, 3), st.floats(-3, 3), st.floats(0.3, 3)
)
def test_gaussian_kullback_matches_quadrature(m1, s1, m2, s2):
    p, q = stats.norm(m1, s1), stats.norm(m2, s2)
    lo, hi = min(m1, m2) - 12 * max(s1, s2), max(m1, m2) + 12 * max(s1, s2)
    val, _ = integrate.quad(lambda x: p.pdf(x) * (p.logpdf(x) - q.logpdf(x)), lo, hi, limit=200)
    got = gaussian_kullback(GaussianParams(m1, s1), GaussianParams(m2, s2))
    assert got == pytest.approx(val, abs=1e-8)
    assert got >= 0


def test_fisher_matrix_entries():
    m = gaussian_fisher_matrix(GaussianParams(0.0, 2.0))
    assert (m.f_alpha, m.f_sigma, m.f_sigma_sq) == pytest.approx((0.25, 0.5, 1 / 32))


@pytest.mark.parametrize("d", [1e-3, -2e-3, 5e-3])
def test_kullback_quadratic_approximation(d):
    base = GaussianParams(0.0, 1.0)
    F = gaussian_fisher_matrix(base)
    exact = gaussian_kullback(GaussianParams(d, 1.0), base)
    assert kullback_quadratic_approx(F.f_alpha, d) == pytest.approx(exact, rel=1e-12)
    exact_s = gaussian_kullback(GaussianParams(0.0, 1.0 + d), base)
    assert kullback_quadratic_approx(F.f_sigma, d) == pytest.approx(exact_s, rel=5 * abs(d))
    with pytest.raises(DomainError):
        kullback_quadratic_approx(-1.0, d)


def test_heat_kernel_closed_forms():
    p = HeatKernelParams(0.5, 2.0)
    assert p.variance == 2.0
    assert heat_kernel_entropy(p) == pytest.approx(gaussian_entropy(GaussianParams(0, math.sqrt(2.0))))
    assert heat_kernel_fisher(p) == 0.5
    assert de_bruijn_rate(p) == pytest.approx(1 / (2 * 2.0))
    # rate equals the time derivative of the entropy
    h = 1e-6
    num = (heat_kernel_entropy(HeatKernelParams(0.5, 2 + h)) - heat_kernel_entropy(HeatKernelParams(0.5, 2 - h))) / (2 * h)
    assert de_bruijn_rate(p) == pytest.approx(num, rel=1e-8)
    with pytest.raises(DomainError):
        HeatKernelParams(1.0, 0.0)


def test_bernoulli_to_gauss():
    g = bernoulli_to_gauss(400, 0.25, 0.1)
    assert g.mean == pytest.approx(10.0)
    assert g.std == pytest.approx(0.1 * math.sqrt(75))
    with pytest.raises(DomainError):
        bernoulli_to_gauss(50, 0.5, 1.0)


def test_planck_oracle():
    pc = planck_coarse_graining(0.01)
    n, s = planck_closed_form(0.01)
    assert pc.n_mean == pytest.approx(PLANCK_MEAN_R001, abs=1e-9)
    assert n == pytest.approx(PLANCK_MEAN_R001, abs=1e-9)
    assert pc.entropy == pytest.approx(PLANCK_ENTROPY_R001, abs=1e-9)
    assert s == pytest.approx(PLANCK_ENTROPY_R001, abs=1e-9)
    mean, entropy = pc
    assert abs(entropy - (1 - math.log(0.01))) < 0.01


@pytest.mark.parametrize("r", [0.05, 0.5, 2.0])
def test_planck_sums_match_closed_form(r):
    pc = planck_coarse_graining(r)
    n, s = planck_closed_form(r)
    assert pc.n_mean == pytest.approx(n, rel=1e-12)
    assert pc.entropy == pytest.approx(s, rel=1e-12)
    # geometric variance n(n+1)
    assert pc.variance == pytest.approx(n * (n + 1), rel=1e-9)
