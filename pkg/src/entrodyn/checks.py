"""Invariant suites, a seeded density corpus and a split-step reference solver.

Each suite returns a list of :class:`CheckResult` rows (name, measured value,
bound, pass flag); the CLI prints them one per line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fokker_planck as fp
from ._calculus import gradient, trajectory_rate
from .densities import (
    DiscreteDistribution,
    GaussianParams,
    Grid,
    GridDensity,
    coarse_grain,
    gaussian_on_grid,
    gaussian_values,
    moments,
    normalize,
)
from .functionals import (
    differential_entropy,
    entropy_power,
    fisher_information,
    kullback,
    osmotic_velocity,
    quantum_potential,
    shannon_discrete,
)
from .gaussian_analytics import HeatKernelParams, heat_kernel_entropy, planck_closed_form, planck_coarse_graining
from .ou_reference import OUParams, ou_entropy, ou_variance
from .quantum_packets import (
    free_packet,
    hj_residual,
    quantum_balance,
    squeezed_state,
    squeezed_variance,
    stationary_state,
)
from .spectral import WaveFunction, coarse_uncertainty, gaussian_wavefunction, uncertainty_report

CORPUS_SEED = 20240613


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    bound: float
    passed: bool

    def line(self) -> str:
        return f"{self.name}\t{self.measured:.9g}\t{self.bound:.9g}\t{'pass' if self.passed else 'FAIL'}"


def at_most(name: str, measured: float, bound: float) -> CheckResult:
    return CheckResult(name, float(measured), float(bound), bool(measured <= bound))


def at_least(name: str, measured: float, bound: float) -> CheckResult:
    return CheckResult(name, float(measured), float(bound), bool(measured >= bound))


# ---------------------------------------------------------------------------
# Seeded density corpus


@dataclass(frozen=True)
class CorpusCase:
    """Unnormalized profile ``f`` with a half-width outside which it is negligible."""

    label: str
    f: Callable[[np.ndarray], np.ndarray]
    half_width: float
    center: float = 0.0

    def grid(self, dx: float = 1e-3) -> Grid:
        n = int(math.ceil(2.0 * self.half_width / dx)) + 1
        return Grid.centered(2.0 * self.half_width, n, self.center)

    def density(self, dx: float = 1e-3, g: Grid | None = None) -> GridDensity:
        g = g or self.grid(dx)
        return normalize(GridDensity(g, self.f(g.x)))

    def scaled(self, alpha: float, beta: float) -> "CorpusCase":
        """``beta f(beta (x - alpha))`` (normalization is applied on the grid)."""
        f = self.f
        return CorpusCase(
            f"{self.label}@({alpha:g},{beta:g})",
            lambda x: beta * f(beta * (np.asarray(x) - alpha)),
            self.half_width / beta,
            alpha + self.center / beta,
        )


def _mixture(rng: np.random.Generator, i: int) -> CorpusCase:
    k = int(rng.integers(1, 4))
    w = rng.uniform(0.2, 1.0, k)
    mu = rng.uniform(-2.0, 2.0, k)
    sd = rng.uniform(0.4, 1.5, k)

    def f(x, w=w, mu=mu, sd=sd):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(w / sd * np.exp(-0.5 * ((x - mu) / sd) ** 2), axis=-1)

    return CorpusCase(f"mixture{i}", f, float(np.max(np.abs(mu)) + 12.0 * np.max(sd)))


def _generalized(rng: np.random.Generator, i: int) -> CorpusCase:
    p = float(rng.uniform(2.0, 6.0))
    scale = float(rng.uniform(0.5, 2.0))

    def f(x, p=p, scale=scale):
        return np.exp(-np.abs(np.asarray(x) / scale) ** p)

    return CorpusCase(f"gengauss{i}(p={p:.3f})", f, scale * 70.0 ** (1.0 / p))


def _sech2(rng: np.random.Generator, i: int) -> CorpusCase:
    scale = float(rng.uniform(0.5, 2.0))

    def f(x, scale=scale):
        return 1.0 / np.cosh(np.asarray(x) / scale) ** 2

    return CorpusCase(f"sech2_{i}", f, scale * 36.0)


def density_corpus(count: int = 50, seed: int = CORPUS_SEED) -> list[CorpusCase]:
    """Deterministic mix of Gaussian mixtures, ``exp(-|x|^p)`` (p >= 2) and sech^2 profiles."""
    rng = np.random.default_rng(seed)
    makers = (_mixture, _generalized, _sech2)
    return [makers[i % 3](rng, i) for i in range(count)]


def corpus_checks(case: CorpusCase, dx: float = 1e-3, tol: float = 1e-6) -> list[CheckResult]:
    rho = case.density(dx)
    S = differential_entropy(rho).value
    F = fisher_information(rho)
    mean, var = moments(rho)
    ref = normalize(GridDensity(rho.grid, gaussian_values(GaussianParams(mean, math.sqrt(var)), rho.grid.x)))
    stam = 2.0 * math.pi * math.e * math.exp(-2.0 * S)
    out = [
        at_least(f"gibbs[{case.label}]", kullback(rho, ref), -tol),
        at_least(f"cramer_rao[{case.label}]", F * var - 1.0, -tol),
        at_least(f"stam_lower[{case.label}]", stam - 1.0 / var, -tol),
        at_least(f"stam_upper[{case.label}]", F - stam, -tol),
        at_most(f"entropy_power[{case.label}]", entropy_power(S) - math.sqrt(var), tol),
    ]
    beta, alpha = 2.5, 0.75
    scaled = case.scaled(alpha, beta).density(dx / beta)
    out.append(
        at_most(
            f"scaling[{case.label}]",
            abs(differential_entropy(scaled).value - (S - math.log(beta))),
            tol,
        )
    )
    u = osmotic_velocity(rho, 1.0).values
    u2 = rho.expect(u * u)
    q = rho.expect(quantum_potential(rho, 1.0).values)
    out.append(at_most(f"u2_vs_Q[{case.label}]", abs(u2 + 2.0 * q) / u2, 1e-3))
    out.append(at_most(f"u2_vs_F[{case.label}]", abs(u2 - F) / F, 1e-3))
    return out


# ---------------------------------------------------------------------------
# Split-step reference for the harmonic oscillator


@dataclass(frozen=True)
class SqueezedAdjudication:
    t: float
    variance_numeric: float
    variance_sin_squared: float
    variance_sin: float
    verdict: str


def split_step_oscillator(psi0: np.ndarray, g: Grid, t: float, dt: float = 1e-3) -> np.ndarray:
    """Strang splitting for ``i psi_t = -psi''/2 + x^2 psi/2``."""
    n_steps = max(1, int(round(t / dt)))
    h = t / n_steps
    k = 2.0 * np.pi * np.fft.fftfreq(g.n, g.dx)
    half_v = np.exp(-0.5j * h * 0.5 * g.x**2)
    kin = np.exp(-1j * h * 0.5 * k**2)
    psi = np.array(psi0, dtype=complex)
    for _ in range(n_steps):
        psi = half_v * psi
        psi = np.fft.ifft(kin * np.fft.fft(psi))
        psi = half_v * psi
    return psi


def adjudicate_squeezed(gamma: float = 2.0, t: float = 1.0, n: int = 2048, span: float = 40.0) -> SqueezedAdjudication:
    g = Grid(-0.5 * span, span / n, n)
    psi0 = squeezed_state(gamma, 0.0, g).wavefunction()
    psi = split_step_oscillator(psi0, g, t)
    rho = normalize(GridDensity(g, np.abs(psi) ** 2))
    _, var = moments(rho)
    sin2 = squeezed_variance(gamma, t)
    lin = 0.5 * (math.sin(t) / gamma**2 + gamma**2 * math.cos(t) ** 2)
    verdict = "sin^2" if abs(var - sin2) < abs(var - lin) else "sin"
    return SqueezedAdjudication(t, var, sin2, lin, verdict)


# ---------------------------------------------------------------------------
# Suites


SHANNON_TABLE = ((0.1, 0.469), (0.2, 0.7219), (0.3, 0.8813), (0.4, 0.971), (0.5, 1.0))


def shannon_table() -> list[tuple[float, float, float]]:
    """(p, computed bits, tabulated bits) for the two-outcome distributions."""
    rows = []
    for p, tab in SHANNON_TABLE:
        h = shannon_discrete(DiscreteDistribution(np.array([p, 1.0 - p])), base=2).value
        rows.append((p, h, tab))
    return rows


def suite_inequalities(corpus_size: int = 12) -> list[CheckResult]:
    out = []
    for case in density_corpus(corpus_size):
        out.extend(corpus_checks(case))
    g = Grid.centered(40.0, 4096)
    states = {
        "gaussian": gaussian_wavefunction(g),
        "hermite1": WaveFunction(g, stationary_state(1, g).wavefunction()),
        "squeezed2": WaveFunction(g, squeezed_state(2.0, math.pi / 4, g).wavefunction()),
    }
    for label, psi in states.items():
        rep = uncertainty_report(psi)
        out.append(at_least(f"bbm[{label}]", rep.sum, rep.bound - 1e-4))
        out.append(at_least(f"heisenberg_entropy_power[{label}]", rep.sigma_x * rep.sigma_p - rep.entropy_power_product, -1e-4))
        out.append(at_least(f"entropy_power_half[{label}]", rep.entropy_power_product, 0.5 - 1e-4))
        out.append(at_most(f"fisher_momentum[{label}]", rep.fisher_x - rep.fisher_momentum_bound, 1e-3))
        out.append(at_least(f"in2_lower[{label}]", rep.entropy_power_x - 1.0 / (2.0 * rep.sigma_p), -1e-3))
        out.append(at_most(f"in2_upper[{label}]", rep.entropy_power_x - rep.sigma_x, 1e-3))
        for r in (0.05, 0.5):
            c = coarse_uncertainty(psi, r, r)
            out.append(at_least(f"coarse_bbm[{label},r={r}]", c.s_xB + c.s_pB, c.bound - 1e-4))
    rho = gaussian_on_grid(GaussianParams(0.0, 1.0), Grid.centered(16.0, 4001))
    S = differential_entropy(rho).value
    for r in (0.004, 0.04, 0.4):
        sb = shannon_discrete(coarse_grain(rho, r)).value
        out.append(at_least(f"coarse_entropy_bound[r={r}]", sb - (S - math.log(r)), -1e-9))
    return out


def _smoluchowski_rows(label: str, traj: fp.Trajectory, D: float) -> list[CheckResult]:
    rows = []
    bal = max(abs(r.S_dot - (r.S_dot_in - r.Q_dot)) / max(1.0, abs(r.S_dot)) for r in traj.reports)
    rows.append(at_most(f"balance[{label}]", bal, 1e-3))
    rows.append(at_most(f"H_zero[{label}]", max(abs(r.energy_H) for r in traj.reports), 1e-3))
    inter = max(abs(D * D * r.F_raw - (r.v2_mean - 2 * r.omega_mean)) / (D * D * r.F_raw) for r in traj.reports)
    rows.append(at_most(f"interplay[{label}]", inter, 1e-3))
    forms = max(
        max(abs(r.S_dot_v2 - r.S_dot), abs(r.S_dot_div - r.S_dot)) / max(1.0, abs(r.S_dot))
        for r in traj.reports
    )
    rows.append(at_most(f"entropy_rate_forms[{label}]", forms, 1e-3))
    rows.append(at_least(f"production_nonneg[{label}]", min(r.S_dot_in for r in traj.reports), -1e-9))
    return rows


def suite_balance() -> list[CheckResult]:
    out = []
    D = 1.0
    g = Grid.centered(20.0, 2048)
    p = OUParams(1.0, D, 1.0, 2.0)
    model = fp.SmoluchowskiModel.ornstein_uhlenbeck(p.gamma, D)
    rho0 = gaussian_on_grid(GaussianParams(p.alpha0, math.sqrt(p.sigma0_sq)), g)
    ou = fp.evolve(rho0, model, 5.0, 1e-3, 10)
    out.extend(_smoluchowski_rows("ou", ou, D))
    hc_rate = trajectory_rate(ou.times, ou.series("H_c"))
    prod = ou.series("S_dot_in")
    live = prod > 1e-3 * prod.max()
    out.append(at_most("Hc_rate_vs_production[ou]", np.max(np.abs(hc_rate[live] / prod[live] - 1.0)), 2e-2))

    g_heat = Grid.centered(40.0, 4096)
    heat = fp.evolve(fp.heat_kernel_density(D, 0.1, g_heat), fp.SmoluchowskiModel.free(D), 2.0, 1e-3, 20, t0=0.1)
    out.extend(_smoluchowski_rows("heat", heat, D))

    gq = Grid.centered(128.0, 8192)
    ts = np.linspace(0.0, 5.0, 501)
    reps = [quantum_balance(free_packet(1.0, 1.0, t, gq)) for t in ts]
    bal = max(abs(r.S_dot - (r.S_dot_in - r.Q_dot)) / max(1.0, abs(r.S_dot)) for r in reps)
    out.append(at_most("balance[free-packet]", bal, 1e-3))
    energy = np.array([0.5 * (r.v2_mean + r.u2_mean) + r.omega_mean for r in reps])
    out.append(at_most("energy_conserved[free-packet]", np.max(np.abs(energy - 1.0)), 1e-3))
    v2_rate = trajectory_rate(ts, np.array([r.v2_mean for r in reps]))
    fdot = np.array([r.F_dot for r in reps])
    sel = ts > 0
    rel = np.max(np.abs(fdot[sel] + v2_rate[sel]) / np.abs(v2_rate[sel]))
    out.append(at_most("fisher_rate_vs_v2[free-packet]", rel, 2e-2))
    return out


def suite_oracles() -> list[CheckResult]:
    out = []
    for p, h, tab in shannon_table():
        out.append(at_most(f"shannon_table[p={p}]", abs(h - tab), 1e-3))
    pc = planck_coarse_graining(0.01)
    n_closed, _ = planck_closed_form(0.01)
    out.append(at_most("planck_mean", abs(pc.n_mean - n_closed), 1e-9))
    out.append(at_most("planck_entropy_vs_1-ln r", abs(pc.entropy - (1.0 - math.log(0.01))), 0.01))
    for t in (0.5, 1.0, math.pi / 2):
        adj = adjudicate_squeezed(2.0, t)
        out.append(
            at_most(f"squeezed_split_step[t={t:.4g}]", abs(adj.variance_numeric - adj.variance_sin_squared), 1e-4)
        )
    g = Grid.centered(20.0, 4096)
    for n in range(4):
        out.append(at_most(f"hj_residual[n={n}]", float(np.max(np.abs(hj_residual(n, g)))), 1e-6))
    D = 1.0
    p = OUParams(1.0, D, 1.0, 2.0)
    gou = Grid.centered(20.0, 2048)
    rho0 = gaussian_on_grid(GaussianParams(p.alpha0, math.sqrt(p.sigma0_sq)), gou)
    tr = fp.evolve(rho0, fp.SmoluchowskiModel.ornstein_uhlenbeck(p.gamma, D), 5.0, 1e-3, 100)
    out.append(at_most("ou_variance", max(abs(r.variance / ou_variance(p, r.t) - 1) for r in tr.reports), 1e-3))
    out.append(at_most("ou_entropy", max(abs(r.S - ou_entropy(p, r.t)) for r in tr.reports), 2e-3))
    g_heat = Grid.centered(40.0, 4096)
    heat = fp.evolve(fp.heat_kernel_density(D, 0.1, g_heat), fp.SmoluchowskiModel.free(D), 2.0, 1e-3, 100, t0=0.1)
    out.append(
        at_most(
            "heat_kernel_entropy",
            max(abs(r.S - heat_kernel_entropy(HeatKernelParams(D, r.t))) for r in heat.reports),
            1e-3,
        )
    )
    debruijn = max(abs(r.S_dot - D * r.F_raw) / r.S_dot for r in heat.reports)
    out.append(at_most("de_bruijn", debruijn, 1e-2))
    return out


SUITES = {
    "inequalities": suite_inequalities,
    "balance": suite_balance,
    "oracles": suite_oracles,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        return [row for key in SUITES for row in SUITES[key]()]
    return SUITES[name]()
