import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrodyn.densities import Grid, moments
from entrodyn.errors import AliasingDetected, DomainError, ResolutionTooFine
from entrodyn.functionals import differential_entropy
from entrodyn.quantum_packets import squeezed_state, stationary_state
from entrodyn.spectral import (
    BBM_BOUND,
    WaveFunction,
    _transform,
    coarse_uncertainty,
    gaussian_wavefunction,
    momentum_density,
    uncertainty_report,
)

G = Grid.centered(40.0, 4096)
# S(phi_1^2) from 30-digit mpmath quadrature; the first excited state is self-dual in modulus
HERMITE1_ENTROPY = 1.3427277883861782571


def packet(g, parts):
    vals = np.zeros(g.n, dtype=complex)
    for w, mean, sd, k0, ph in parts:
        vals += w * np.exp(-0.25 * ((g.x - mean) / sd) ** 2 + 1j * (k0 * g.x + ph))
    return WaveFunction(g, vals)


packets = st.lists(
    st.tuples(
        st.floats(0.2, 1.0), st.floats(-3.0, 3.0), st.floats(0.4, 1.5), st.floats(-3.0, 3.0), st.floats(0.0, 6.3)
    ),
    min_size=1,
    max_size=3,
)


def test_wavefunction_normalizes_and_validates():
    psi = WaveFunction(G, 3.0 * np.exp(-G.x**2))
    assert psi.norm == pytest.approx(1.0, abs=1e-12)
    assert psi.is_real_nonnegative
    assert not psi.modulated(1.0).is_real_nonnegative
    with pytest.raises(DomainError):
        WaveFunction(G, np.zeros(G.n))
    with pytest.raises(DomainError):
        WaveFunction(G, np.ones(10))
    with pytest.raises(ValueError):
        psi.values[0] = 0


def test_ground_state_is_self_dual():
    psi = gaussian_wavefunction(G)
    rho_k = momentum_density(psi)
    mean, var = moments(rho_k)
    assert mean == pytest.approx(0.0, abs=1e-12)
    assert var == pytest.approx(0.5, rel=1e-9)
    assert np.allclose(rho_k.values, np.exp(-rho_k.x**2) / math.sqrt(math.pi), atol=1e-10)


def test_parseval():
    psi = packet(G, [(1.0, -1.0, 0.7, 1.5, 0.0), (0.5, 2.0, 1.1, -0.5, 1.0)])
    spectrum, _, dk = _transform(psi, 2 * G.n)
    assert float(np.sum(np.abs(spectrum) ** 2) * dk) == pytest.approx(1.0, abs=1e-9)


def test_momentum_spread_reciprocity():
    for sigma in (0.5, 1.0, 2.0):
        rho_k = momentum_density(gaussian_wavefunction(G, sigma))
        _, var = moments(rho_k)
        assert math.sqrt(var) == pytest.approx(1 / (2 * sigma), rel=1e-8)


def test_modulation_translates_momentum_density():
    psi = gaussian_wavefunction(G, 0.8)
    base = momentum_density(psi)
    shifted = momentum_density(psi.modulated(2.0))
    assert moments(shifted)[0] == pytest.approx(2.0, abs=1e-10)
    assert differential_entropy(shifted).value == pytest.approx(differential_entropy(base).value, abs=1e-10)


def test_translation_leaves_entropies_unchanged():
    a = uncertainty_report(gaussian_wavefunction(G, 0.9, mean=0.0, k0=0.5))
    b = uncertainty_report(gaussian_wavefunction(G, 0.9, mean=3.0, k0=0.5))
    assert b.s_x == pytest.approx(a.s_x, abs=1e-10)
    assert b.s_p == pytest.approx(a.s_p, abs=1e-10)


def test_ground_state_saturates_entropic_bound():
    rep = uncertainty_report(gaussian_wavefunction(G))
    assert rep.sum == pytest.approx(BBM_BOUND, abs=1e-4)
    assert rep.bound == BBM_BOUND
    assert rep.sigma_x * rep.sigma_p == pytest.approx(0.5, abs=1e-4)
    assert rep.entropy_power_product == pytest.approx(0.5, abs=1e-4)
    assert rep.fisher_x == pytest.approx(rep.fisher_momentum_bound, rel=1e-3)


def test_hermite_one_exceeds_bound():
    psi = WaveFunction(G, stationary_state(1, G).amplitude)
    rep = uncertainty_report(psi)
    assert rep.s_x == pytest.approx(HERMITE1_ENTROPY, abs=1e-6)
    assert rep.s_p == pytest.approx(HERMITE1_ENTROPY, abs=1e-4)
    assert rep.excess > 0.1
    assert rep.sigma_x * rep.sigma_p >= rep.entropy_power_product > 0.5


@pytest.mark.parametrize("t", [0.0, math.pi / 4, 1.0])
def test_squeezed_state_obeys_bound(t):
    st_ = squeezed_state(2.0, t, G)
    rep = uncertainty_report(WaveFunction(G, st_.wavefunction()))
    assert rep.s_x == pytest.approx(0.5 * math.log(2 * math.pi * math.e * st_.rho.expect(G.x**2)), abs=1e-8)
    assert rep.sum >= BBM_BOUND - 1e-4
    if t == 0.0:
        # real Gaussian: minimal-uncertainty state, sum saturates
        assert rep.sum == pytest.approx(BBM_BOUND, abs=1e-4)
    else:
        assert rep.excess > 1e-3


@settings(max_examples=20, deadline=None)
@given(packets)
def test_inequality_chains_for_random_packets(parts):
    psi = packet(G, parts)
    rep = uncertainty_report(psi)
    assert rep.sum >= BBM_BOUND - 1e-4
    assert rep.sigma_x * rep.sigma_p >= rep.entropy_power_product - 1e-4
    assert rep.entropy_power_product >= 0.5 - 1e-4
    assert rep.cramer_rao_holds
    assert rep.entropy_power_x <= rep.sigma_x + 1e-9
    assert rep.entropy_power_p <= rep.sigma_p + 1e-9
    assert 1 / (2 * rep.sigma_p) <= rep.entropy_power_x + 1e-3


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.floats(0.2, 1.0), st.floats(-3.0, 3.0), st.floats(0.4, 1.5)), min_size=1, max_size=3))
def test_fisher_equals_momentum_variance_for_real_packets(parts):
    psi = packet(G, [(w, m, s, 0.0, 0.0) for w, m, s in parts])
    rep = uncertainty_report(psi)
    assert 1 / rep.sigma_x**2 <= rep.fisher_x * (1 + 1e-6)
    assert rep.fisher_x == pytest.approx(rep.fisher_momentum_bound, rel=1e-3)


def test_aliasing_detected():
    narrow = Grid.centered(6.0, 512)
    with pytest.raises(AliasingDetected):
        momentum_density(gaussian_wavefunction(narrow, 1.0))
    coarse = Grid.centered(40.0, 64)
    with pytest.raises(AliasingDetected):
        momentum_density(gaussian_wavefunction(coarse, 1.0, k0=4.5))


def test_coarse_uncertainty_examples():
    # spacing 0.01 so the position bins are whole cells
    psi = gaussian_wavefunction(Grid.centered(40.95, 4096))
    res = coarse_uncertainty(psi, 1e-2, 1e-2)
    s_xB, s_pB, bound = res
    assert res.r == pytest.approx(1e-2, rel=1e-9)
    assert res.r_tilde == pytest.approx(1e-2, rel=1e-5)
    assert bound == pytest.approx(BBM_BOUND - math.log(res.r * res.r_tilde), abs=1e-12)
    assert bound == pytest.approx(11.355, abs=1e-3)
    assert s_xB + s_pB >= bound - 1e-6
    assert s_xB + s_pB - bound < 0.05
    unit = coarse_uncertainty(psi, 1.0, 1.0)
    # unit bins: the bound reduces to 1 + ln pi up to the realized k-bin rounding
    assert unit.bound == pytest.approx(BBM_BOUND, abs=1e-4)
    assert unit.s_xB + unit.s_pB >= unit.bound
    assert abs(res.complement_residual) < 0.05


def test_coarse_uncertainty_resolution_guard():
    psi = gaussian_wavefunction(G)
    with pytest.raises(ResolutionTooFine):
        coarse_uncertainty(psi, G.dx / 2, 0.1)
    with pytest.raises(ResolutionTooFine):
        coarse_uncertainty(psi, 0.1, 1e-6)


@settings(max_examples=20, deadline=None)
@given(packets, st.sampled_from([0.05, 0.1, 0.5]), st.sampled_from([0.05, 0.1, 0.5]))
def test_coarse_inequality_for_random_packets(parts, r, rt):
    res = coarse_uncertainty(packet(G, parts), r, rt)
    assert res.s_xB + res.s_pB >= res.bound - 1e-6
