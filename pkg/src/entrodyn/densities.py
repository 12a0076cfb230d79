"""Grid and discrete probability representations.

Every continuous density in the package lives on a uniform 1-D grid and is
integrated with the composite trapezoid rule.  Discrete distributions are
plain probability vectors.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from ._calculus import trapezoid
from .errors import DomainError, GridTooNarrow, ResolutionTooFine, ZeroMass

NORM_TOL = 1e-9
DENSITY_FLOOR = 1e-300


def strict_mode() -> bool:
    return os.environ.get("ENTRODYN_STRICT", "") == "1"


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``x_i = x0 + i*dx`` for ``i = 0..n-1``."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not self.dx > 0:
            raise DomainError(f"grid spacing must be positive, got {self.dx}")
        if int(self.n) != self.n or self.n < 8:
            raise DomainError(f"grid needs at least 8 points, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))

    @classmethod
    def between(cls, a: float, b: float, n: int) -> "Grid":
        return cls(a, (b - a) / (n - 1), n)

    @classmethod
    def centered(cls, span: float, n: int, center: float = 0.0) -> "Grid":
        return cls.between(center - 0.5 * span, center + 0.5 * span, n)

    @cached_property
    def x(self) -> np.ndarray:
        return _frozen(self.x0 + self.dx * np.arange(self.n))

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    @property
    def span(self) -> float:
        return self.dx * (self.n - 1)

    def same_as(self, other: "Grid") -> bool:
        return (
            self.n == other.n
            and math.isclose(self.x0, other.x0, rel_tol=1e-12, abs_tol=1e-12 * self.dx)
            and math.isclose(self.dx, other.dx, rel_tol=1e-12)
        )


@dataclass(frozen=True)
class GridDensity:
    """Nonnegative density sampled on a grid; ``flags`` records soft warnings."""

    grid: Grid
    values: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n,):
            raise DomainError(f"expected {self.grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("density values must be finite")
        if np.any(values < 0):
            raise DomainError("density values must be nonnegative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "flags", frozenset(self.flags))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def mass(self) -> float:
        return trapezoid(self.values, self.grid.dx)

    def expect(self, f) -> float:
        """Trapezoid mean of an array or callable of x."""
        vals = f(self.x) if callable(f) else np.asarray(f)
        return trapezoid(self.values * vals, self.grid.dx)

    def with_flags(self, *flags: str) -> "GridDensity":
        return GridDensity(self.grid, self.values, self.flags | set(flags))


@dataclass(frozen=True)
class DiscreteDistribution:
    probs: np.ndarray
    flags: frozenset = field(default_factory=frozenset)
    bin_width: float | None = None

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 1 or probs.size < 1:
            raise DomainError("probability vector must be 1-D and non-empty")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError("probabilities must be finite and nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise DomainError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "flags", frozenset(self.flags))

    @classmethod
    def from_weights(cls, weights, **kw) -> "DiscreteDistribution":
        w = np.asarray(weights, dtype=float)
        total = math.fsum(w)
        if total <= 0:
            raise ZeroMass("weights have no mass")
        return cls(w / total, **kw)

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class GaussianParams:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0:
            raise DomainError(f"standard deviation must be positive, got {self.std}")

    @property
    def variance(self) -> float:
        return self.std * self.std


def normalize(d: GridDensity) -> GridDensity:
    """Rescale to unit trapezoid mass.

    A density already within 1e-14 of unit mass is returned as is, which makes
    the operation exactly idempotent.
    """
    mass = d.mass
    if not mass > 1e-300:
        raise ZeroMass(f"density integrates to {mass!r}")
    if abs(mass - 1.0) <= 1e-14:
        return d
    return GridDensity(d.grid, d.values / mass, d.flags)


def _check_span(g: Grid, lo: float, hi: float, what: str, strict: bool | None) -> frozenset:
    # tolerate round-off in grid endpoints
    slack = 1e-9 * max(1.0, abs(lo), abs(hi)) + 1e-9 * g.dx
    if g.x0 <= lo + slack and g.x_end >= hi - slack:
        return frozenset()
    msg = f"grid [{g.x0:.6g}, {g.x_end:.6g}] does not cover {what} [{lo:.6g}, {hi:.6g}]"
    if strict is None:
        strict = strict_mode()
    if strict:
        raise GridTooNarrow(msg)
    warnings.warn(msg, stacklevel=3)
    return frozenset({"grid_too_narrow"})


def gaussian_values(p: GaussianParams, x: np.ndarray) -> np.ndarray:
    z = (np.asarray(x) - p.mean) / p.std
    return np.exp(-0.5 * z * z) / (p.std * math.sqrt(2.0 * math.pi))


def gaussian_on_grid(p: GaussianParams, g: Grid, strict: bool | None = None) -> GridDensity:
    flags = _check_span(g, p.mean - 6 * p.std, p.mean + 6 * p.std, "mean +/- 6 std", strict)
    return normalize(GridDensity(g, gaussian_values(p, g.x), flags))


def exponential_on_grid(lam: float, g: Grid, strict: bool | None = None) -> GridDensity:
    """``lam * exp(-lam x)`` on x >= 0, zero to the left of the origin."""
    if not lam > 0:
        raise DomainError(f"rate must be positive, got {lam}")
    flags = _check_span(g, max(g.x0, 0.0), 20.0 / lam, "[0, 20/lambda]", strict)
    x = g.x
    vals = np.where(x >= 0, lam * np.exp(-lam * np.clip(x, 0, None)), 0.0)
    return normalize(GridDensity(g, vals, flags))


def bernoulli_pmf(G: int, p: float) -> DiscreteDistribution:
    """Binomial probabilities ``C(G,n) p^n (1-p)^(G-n)``, n = 0..G, via log-gamma."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"success probability must lie in (0, 1), got {p}")
    if int(G) != G or not 1 <= G <= 10**6:
        raise DomainError(f"number of trials must be an integer in [1, 1e6], got {G}")
    G = int(G)
    n = np.arange(G + 1, dtype=float)
    logp = (
        gammaln(G + 1.0) - gammaln(n + 1.0) - gammaln(G - n + 1.0)
        + n * math.log(p) + (G - n) * math.log1p(-p)
    )
    return DiscreteDistribution.from_weights(np.exp(logp))


def moments(d: GridDensity) -> tuple[float, float]:
    """Trapezoid mean and central second moment."""
    x = d.x
    mass = d.mass
    mean = trapezoid(x * d.values, d.grid.dx) / mass
    var = trapezoid((x - mean) ** 2 * d.values, d.grid.dx) / mass
    return mean, var


def coarse_grain(d: GridDensity, r: float) -> DiscreteDistribution:
    """Bin probabilities over consecutive cells of width ``r`` starting at ``grid.x0``.

    ``r`` is rounded to a whole number of grid cells (flag ``r_rounded``); a
    shorter trailing bin is kept and flagged ``partial_trailing_bin``.
    """
    dx = d.grid.dx
    if not r > 0 or r < dx * (1 - 1e-9):
        raise ResolutionTooFine(f"bin width {r} is finer than grid spacing {dx}")
    m = max(1, int(round(r / dx)))
    flags = set()
    if abs(m * dx - r) > 1e-9 * r:
        flags.add("r_rounded")
    v = d.values
    cells = 0.5 * dx * (v[:-1] + v[1:])
    starts = np.arange(0, cells.size, m)
    if cells.size % m:
        flags.add("partial_trailing_bin")
    probs = np.add.reduceat(cells, starts)
    return DiscreteDistribution.from_weights(probs, flags=frozenset(flags), bin_width=m * dx)
