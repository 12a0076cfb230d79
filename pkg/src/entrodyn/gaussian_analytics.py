"""Closed forms for Gaussian, heat-kernel and geometric (Planck) families.

Nothing here touches a grid: these functions are the reference values the
numerical modules are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .densities import GaussianParams
from .errors import DomainError

LOG_2PI_E = math.log(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class GaussianFisherMatrix:
    """Diagonal Fisher metric of the (mean, std) and (mean, variance) charts."""

    f_alpha: float
    f_sigma: float
    f_sigma_sq: float


@dataclass(frozen=True)
class HeatKernelParams:
    D: float
    t: float

    def __post_init__(self):
        if not self.D > 0:
            raise DomainError(f"diffusion coefficient must be positive, got {self.D}")
        if not self.t > 0:
            raise DomainError(f"heat kernel needs t > 0, got {self.t}")

    @property
    def variance(self) -> float:
        return 2.0 * self.D * self.t


def gaussian_entropy(p: GaussianParams) -> float:
    return 0.5 * (LOG_2PI_E + 2.0 * math.log(p.std))


def gaussian_kullback(theta: GaussianParams, theta_ref: GaussianParams) -> float:
    s, s_ref = theta.std, theta_ref.std
    return (
        math.log(s_ref / s)
        + 0.5 * (s * s / (s_ref * s_ref) - 1.0)
        + (theta.mean - theta_ref.mean) ** 2 / (2.0 * s_ref * s_ref)
    )


def gaussian_fisher_matrix(p: GaussianParams) -> GaussianFisherMatrix:
    v = p.variance
    return GaussianFisherMatrix(1.0 / v, 2.0 / v, 1.0 / (2.0 * v * v))


def kullback_quadratic_approx(F: float, dtheta: float) -> float:
    """Second-order expansion ``F dtheta^2 / 2`` of the Kullback divergence."""
    if F < 0:
        raise DomainError(f"Fisher information must be nonnegative, got {F}")
    return 0.5 * F * dtheta * dtheta


def heat_kernel_entropy(p: HeatKernelParams) -> float:
    return 0.5 * math.log(4.0 * math.pi * math.e * p.D * p.t)


def heat_kernel_fisher(p: HeatKernelParams) -> float:
    return 1.0 / p.variance


def de_bruijn_rate(p: HeatKernelParams) -> float:
    """Entropy growth rate ``D * F = 1/(2t)`` of the heat kernel."""
    return p.D * heat_kernel_fisher(p)


def bernoulli_to_gauss(G: int, p: float, r: float) -> GaussianParams:
    """Continuum Gaussian for G Bernoulli trials on bins of width r."""
    if int(G) != G or G < 100:
        raise DomainError(f"Gaussian limit needs G >= 100, got {G}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"success probability must lie in (0, 1), got {p}")
    if not r > 0:
        raise DomainError(f"bin width must be positive, got {r}")
    return GaussianParams(G * p * r, r * math.sqrt(G * p * (1.0 - p)))


def de_moivre_laplace(G: int, p: float) -> np.ndarray:
    """Normal approximation to the binomial probabilities at n = 0..G."""
    var = G * p * (1.0 - p)
    n = np.arange(G + 1, dtype=float)
    return np.exp(-((n - G * p) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


@dataclass(frozen=True)
class PlanckCoarseGraining:
    n_mean: float
    entropy: float
    variance: float
    n_terms: int

    def __iter__(self):
        # unpacks as the (n_mean, entropy) pair
        return iter((self.n_mean, self.entropy))


def planck_probabilities(r: float) -> np.ndarray:
    """Geometric bin probabilities ``(1-e^-r) e^(-k r)`` truncated below 1e-300."""
    if not r > 0:
        raise DomainError(f"bin width must be positive, got {r}")
    k_max = int(math.ceil(700.0 / r))
    k = np.arange(k_max + 1, dtype=float)
    return -math.expm1(-r) * np.exp(-k * r)


def planck_coarse_graining(r: float) -> PlanckCoarseGraining:
    """Exact discrete sums for the exponential density binned at width r.

    ``1 - ln r`` is only the small-r approximation of the returned entropy.
    """
    p = planck_probabilities(r)
    k = np.arange(p.size, dtype=float)
    live = p > 0
    n_mean = math.fsum(k * p)
    entropy = -math.fsum(p[live] * np.log(p[live]))
    second = math.fsum(k * k * p)
    return PlanckCoarseGraining(n_mean, entropy, second - n_mean * n_mean, p.size)


def planck_closed_form(r: float) -> tuple[float, float]:
    """``<n> = 1/(e^r - 1)`` and ``S = -ln(1 - e^-r) + <n> r``."""
    n_mean = 1.0 / math.expm1(r)
    return n_mean, -math.log(-math.expm1(-r)) + n_mean * r
