"""Exact Gaussian solutions of the Ornstein-Uhlenbeck Fokker-Planck equation.

Drift ``b(x) = -gamma x``, diffusion ``D``; a Gaussian start stays Gaussian
with mean ``alpha0 e^{-gamma t}`` and variance relaxing to ``D/gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .densities import GaussianParams
from .errors import DomainError
from .gaussian_analytics import gaussian_kullback


@dataclass(frozen=True)
class OUParams:
    gamma: float
    D: float
    alpha0: float
    sigma0_sq: float

    def __post_init__(self):
        for name in ("gamma", "D", "sigma0_sq"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def stationary_variance(self) -> float:
        return self.D / self.gamma

    @property
    def invariant(self) -> GaussianParams:
        return GaussianParams(0.0, math.sqrt(self.stationary_variance))


def _check_t(t: float) -> None:
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")


def ou_variance(p: OUParams, t: float) -> float:
    _check_t(t)
    e = math.exp(-2.0 * p.gamma * t)
    return p.sigma0_sq * e + p.stationary_variance * (1.0 - e)


def ou_variance_rate(p: OUParams, t: float) -> float:
    return 2.0 * (p.D - p.gamma * p.sigma0_sq) * math.exp(-2.0 * p.gamma * t)


def ou_state(p: OUParams, t: float) -> GaussianParams:
    return GaussianParams(p.alpha0 * math.exp(-p.gamma * t), math.sqrt(ou_variance(p, t)))


def ou_entropy(p: OUParams, t: float) -> float:
    return 0.5 * math.log(2.0 * math.pi * math.e * ou_variance(p, t))


def ou_entropy_rate(p: OUParams, t: float, doubled_prefactor: bool = False) -> float:
    """``dS/dt = gamma (D - gamma s0^2) e^{-2gt} / (D - (D - gamma s0^2) e^{-2gt})``.

    This is the derivative of ``ln(sigma^2(t))/2``.  ``doubled_prefactor=True``
    returns the variant with ``2 gamma`` in front, kept for documentation only;
    it is twice the true rate.
    """
    _check_t(t)
    e = math.exp(-2.0 * p.gamma * t)
    c = p.D - p.gamma * p.sigma0_sq
    rate = p.gamma * c * e / (p.D - c * e)
    return 2.0 * rate if doubled_prefactor else rate


def ou_conditional_entropy(p: OUParams, t: float) -> float:
    """``H_c(t) = -K(rho_t | rho_*)`` from the general Gaussian divergence."""
    return -gaussian_kullback(ou_state(p, t), p.invariant)


def ou_conditional_entropy_rate(p: OUParams, t: float) -> float:
    """Analytic ``dH_c/dt``; equals the entropy production ``<v^2>/D``."""
    _check_t(t)
    g, D = p.gamma, p.D
    var = ou_variance(p, t)
    dvar = ou_variance_rate(p, t)
    mean = p.alpha0 * math.exp(-g * t)
    dmean = -g * mean
    s_ref2 = D / g
    # K = 0.5 ln(s_ref2/var) + 0.5 (var/s_ref2 - 1) + mean^2/(2 s_ref2)
    dK = -0.5 * dvar / var + 0.5 * dvar / s_ref2 + mean * dmean / s_ref2
    return -dK


def ou_fisher(p: OUParams, t: float) -> float:
    return 1.0 / ou_variance(p, t)


def ou_fisher_rate(p: OUParams, t: float) -> float:
    var = ou_variance(p, t)
    return -ou_variance_rate(p, t) / (var * var)


def ou_power_release(p: OUParams, t: float) -> float:
    """``dQ/dt = dH_c/dt - dS/dt``."""
    return ou_conditional_entropy_rate(p, t) - ou_entropy_rate(p, t)


@dataclass(frozen=True)
class PowerRegime:
    regime: str  # "equilibrium", "supply", "drainage" or "crossing"
    t_change: float | None = None


def classify_power_release(p: OUParams, t_max: float = 50.0) -> PowerRegime:
    """Sign regime of the power release over t >= 0 and its crossing time.

    The crossing time, when it exists, is the root of the power release,
    bracketed on a log-spaced scan and refined by bisection.  For the exact
    OU formulas the power release factors as
    ``gamma e^{-2 gamma t} (gamma alpha0^2 - (D - gamma sigma0^2)) / D``,
    so its sign is fixed by the initial data and no crossing occurs; the scan
    is kept so the classification does not rely on that factorization.
    """
    t_max = t_max / p.gamma
    ts = [0.0] + [t_max * 10.0 ** (k / 40.0 - 6.0) for k in range(241)]
    vals = [ou_power_release(p, t) for t in ts]
    scale = max(abs(v) for v in vals)
    if scale < 1e-14:
        return PowerRegime("equilibrium")
    tol = 1e-12 * scale
    signs = [0 if abs(v) <= tol else (1 if v > 0 else -1) for v in vals]
    nonzero = [s for s in signs if s]
    if all(s > 0 for s in nonzero):
        return PowerRegime("supply")
    if all(s < 0 for s in nonzero):
        return PowerRegime("drainage")
    for (a, sa), (b, sb) in zip(zip(ts, signs), zip(ts[1:], signs[1:])):
        if sa and sb and sa != sb:
            fa = ou_power_release(p, a)
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = ou_power_release(p, mid)
                if (fm > 0) == (fa > 0):
                    a, fa = mid, fm
                else:
                    b = mid
            return PowerRegime("crossing", 0.5 * (a + b))
    return PowerRegime("crossing")
