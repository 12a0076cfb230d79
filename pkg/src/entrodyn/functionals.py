"""Information functionals of grid densities and discrete distributions.

All entropies are computed in nats; base 2 is obtained at the boundary by
exact division by ``ln 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._calculus import gradient, second_derivative, trapezoid
from .densities import (
    DENSITY_FLOOR,
    DiscreteDistribution,
    Grid,
    GridDensity,
    coarse_grain,
)
from .errors import DomainError, SupportMismatch

LN2 = math.log(2.0)


@dataclass(frozen=True)
class EntropyValue:
    value: float
    base: str = "e"

    def __post_init__(self):
        if self.base not in ("e", "2"):
            raise DomainError(f"entropy base must be 'e' or '2', got {self.base!r}")
        object.__setattr__(self, "value", float(self.value))

    def to_base(self, base: str) -> "EntropyValue":
        base = str(base)
        if base == self.base:
            return self
        if base == "2":
            return EntropyValue(self.value / LN2, "2")
        return EntropyValue(self.value * LN2, "e")

    @property
    def nats(self) -> float:
        return self.to_base("e").value

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class GridField:
    """Signed field sampled on a grid (velocities, potentials)."""

    grid: Grid
    values: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.grid.n,):
            raise DomainError(f"expected {self.grid.n} values, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "flags", frozenset(self.flags))


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p, dtype=float)
    pos = p >= DENSITY_FLOOR
    out[pos] = p[pos] * np.log(p[pos])
    return out


def shannon_discrete(mu: DiscreteDistribution, base: str | int = "e") -> EntropyValue:
    """``-sum mu_k log mu_k`` with ``0 log 0 = 0``."""
    h = -math.fsum(_xlogx(mu.probs))
    return EntropyValue(max(h, 0.0)).to_base(str(base))


def differential_entropy(d: GridDensity) -> EntropyValue:
    return EntropyValue(-trapezoid(_xlogx(d.values), d.grid.dx))


def coarse_grained_entropy(d: GridDensity, r: float) -> EntropyValue:
    return shannon_discrete(coarse_grain(d, r))


def entropy_with_unit(d: GridDensity, unit: float) -> EntropyValue:
    """Dimensionless entropy ``-int rho ln(unit*rho) dx``."""
    if not unit > 0:
        raise DomainError(f"unit must be positive, got {unit}")
    return EntropyValue(differential_entropy(d).value - math.log(unit))


def log_density(d: GridDensity) -> np.ndarray:
    return np.log(np.maximum(d.values, DENSITY_FLOOR))


def kullback(rho: GridDensity, ref: GridDensity) -> float:
    """Relative entropy ``int rho ln(rho/ref) dx``.

    The integrand is zero wherever rho is below the density floor.  Points
    where ``ref`` underflows but ``rho`` does not are tolerated only if the
    rho-mass there is negligible (< 1e-12); otherwise SupportMismatch.
    """
    if not rho.grid.same_as(ref.grid):
        raise DomainError("kullback needs both densities on the same grid")
    p, q = rho.values, ref.values
    live = p >= DENSITY_FLOOR
    bad = live & (q < DENSITY_FLOOR)
    if bad.any() and trapezoid(np.where(bad, p, 0.0), rho.grid.dx) > 1e-12:
        raise SupportMismatch("reference density vanishes on the support of rho")
    integrand = np.zeros_like(p)
    integrand[live] = p[live] * (np.log(p[live]) - np.log(np.maximum(q[live], DENSITY_FLOOR)))
    return trapezoid(integrand, rho.grid.dx)


def conditional_entropy(rho: GridDensity, ref: GridDensity) -> float:
    return -kullback(rho, ref)


def fisher_information(d: GridDensity) -> float:
    """Fisher information of the location family, ``4 int (d sqrt(rho)/dx)^2 dx``."""
    g = gradient(np.sqrt(d.values), d.grid.dx)
    return 4.0 * trapezoid(g * g, d.grid.dx)


def entropy_power(s: EntropyValue | float) -> float:
    """``exp(S)/sqrt(2 pi e)``; bounded above by the standard deviation."""
    if isinstance(s, EntropyValue):
        s = s.nats
    return math.exp(s) / math.sqrt(2.0 * math.pi * math.e)


def osmotic_velocity(d: GridDensity, D: float) -> GridField:
    """``u = D d(ln rho)/dx`` with the log floored at 1e-300."""
    return GridField(d.grid, D * gradient(log_density(d), d.grid.dx), {"one_sided_endpoints"})


def quantum_potential(d: GridDensity, D: float) -> GridField:
    """``Q = 2 D^2 (sqrt rho)'' / sqrt rho``, evaluated as ``u^2/2 + D u'``.

    The osmotic form avoids 0/0 in the tails; the two agree analytically.
    """
    if not D > 0:
        raise DomainError(f"diffusion coefficient must be positive, got {D}")
    dx = d.grid.dx
    logr = log_density(d)
    u = D * gradient(logr, dx)
    du = D * second_derivative(logr, dx)
    return GridField(d.grid, 0.5 * u * u + D * du, {"one_sided_endpoints"})


def quantum_potential_direct(d: GridDensity, D: float) -> GridField:
    """Direct ``2 D^2 (sqrt rho)''/sqrt rho``; NaN where rho is below the floor."""
    amp = np.sqrt(d.values)
    lap = second_derivative(amp, d.grid.dx)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(d.values >= DENSITY_FLOOR, 2.0 * D * D * lap / amp, np.nan)
    return GridField(d.grid, q, {"one_sided_endpoints"})
