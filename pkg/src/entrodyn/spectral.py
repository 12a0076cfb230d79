"""Momentum densities and entropic uncertainty relations.

Fourier convention (angular, unitary)::

    psi~(k) = (2 pi)^(-1/2) int psi(x) exp(-i k x) dx

so a real Gaussian of position spread ``sigma`` has momentum spread
``1/(2 sigma)`` and Fisher information ``F = 4 <(k - <k>)^2>`` for real
nonnegative amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._calculus import trapezoid
from .densities import Grid, GridDensity, coarse_grain, moments, normalize
from .errors import AliasingDetected, DomainError, ResolutionTooFine
from .functionals import differential_entropy, entropy_power, fisher_information, shannon_discrete

BBM_BOUND = 1.0 + math.log(math.pi)
TAIL_LIMIT = 1e-8
MAX_FFT = 1 << 23


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex, copy=True)
        if vals.shape != (self.grid.n,):
            raise DomainError(f"expected {self.grid.n} samples, got shape {vals.shape}")
        norm = trapezoid(np.abs(vals) ** 2, self.grid.dx)
        if not norm > 0:
            raise DomainError("wave function has zero norm")
        if abs(norm - 1.0) > 1e-9:
            vals = vals / math.sqrt(norm)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def norm(self) -> float:
        return trapezoid(np.abs(self.values) ** 2, self.grid.dx)

    def density(self) -> GridDensity:
        return normalize(GridDensity(self.grid, np.abs(self.values) ** 2))

    def modulated(self, k0: float) -> "WaveFunction":
        return WaveFunction(self.grid, self.values * np.exp(1j * k0 * self.grid.x))

    @property
    def is_real_nonnegative(self) -> bool:
        v = self.values
        scale = np.max(np.abs(v))
        return bool(np.all(np.abs(v.imag) <= 1e-12 * scale) and np.all(v.real >= -1e-12 * scale))


def _transform(psi: WaveFunction, n_fft: int) -> tuple[np.ndarray, float, float]:
    """Samples of psi~ on an fftshifted k-grid; returns (values, k0, dk)."""
    g = psi.grid
    if n_fft < g.n:
        raise DomainError("FFT length shorter than the grid")
    padded = np.zeros(n_fft, dtype=complex)
    padded[: g.n] = psi.values
    dk = 2.0 * math.pi / (n_fft * g.dx)
    spectrum = np.fft.fftshift(np.fft.fft(padded))
    k = (np.arange(n_fft) - n_fft // 2) * dk
    # the grid starts at x0, not at 0: fold that shift into the phase
    spectrum *= g.dx / math.sqrt(2.0 * math.pi) * np.exp(-1j * k * g.x0)
    return spectrum, float(k[0]), dk


def _check_tails(psi: WaveFunction) -> None:
    d = np.abs(psi.values) ** 2
    if max(d[0], d[-1]) > TAIL_LIMIT:
        raise AliasingDetected(
            f"position density at the grid boundary is {max(d[0], d[-1]):.3g} > {TAIL_LIMIT}"
        )


def momentum_density(psi: WaveFunction, pad: int = 2, n_fft: int | None = None) -> GridDensity:
    """``|psi~(k)|^2`` on the conjugate k-grid of the zero-padded transform."""
    _check_tails(psi)
    n_fft = n_fft or pad * psi.grid.n
    spectrum, k0, dk = _transform(psi, n_fft)
    dens = np.abs(spectrum) ** 2
    if max(dens[0], dens[-1]) > TAIL_LIMIT * max(1.0, dens.max()):
        raise AliasingDetected("momentum density does not decay inside the Nyquist band")
    return normalize(GridDensity(Grid(k0, dk, n_fft), dens))


@dataclass(frozen=True)
class UncertaintyReport:
    s_x: float
    s_p: float
    sum: float
    bound: float
    sigma_x: float
    sigma_p: float
    entropy_power_product: float
    fisher_x: float
    # convention-adjusted chain bounds
    cramer_rao_holds: bool = True
    fisher_momentum_bound: float = math.nan
    entropy_power_x: float = math.nan
    entropy_power_p: float = math.nan

    @property
    def excess(self) -> float:
        return self.sum - self.bound


def uncertainty_report(psi: WaveFunction) -> UncertaintyReport:
    rho = psi.density()
    rho_k = momentum_density(psi)
    s_x = differential_entropy(rho).value
    s_p = differential_entropy(rho_k).value
    _, var_x = moments(rho)
    _, var_k = moments(rho_k)
    F = fisher_information(rho)
    total = s_x + s_p
    return UncertaintyReport(
        s_x=s_x,
        s_p=s_p,
        sum=total,
        bound=BBM_BOUND,
        sigma_x=math.sqrt(var_x),
        sigma_p=math.sqrt(var_k),
        entropy_power_product=math.exp(total) / (2.0 * math.pi * math.e),
        fisher_x=F,
        cramer_rao_holds=bool(F * var_x >= 1.0 - 1e-6),
        fisher_momentum_bound=4.0 * var_k,
        entropy_power_x=entropy_power(s_x),
        entropy_power_p=entropy_power(s_p),
    )


@dataclass(frozen=True)
class CoarseUncertainty:
    s_xB: float
    s_pB: float
    bound: float
    r: float
    r_tilde: float
    complement_residual: float

    def __iter__(self):
        return iter((self.s_xB, self.s_pB, self.bound))


def coarse_uncertainty(psi: WaveFunction, r: float, r_tilde: float) -> CoarseUncertainty:
    """Binned position and momentum entropies against ``1 + ln pi - ln(r r~)``.

    Position bins are whole numbers of grid cells.  The FFT is padded (to at
    least twice the grid) until a whole number of k-cells matches ``r_tilde``;
    the bound uses the bin widths actually realized.
    """
    g = psi.grid
    if r < g.dx * (1 - 1e-9):
        raise ResolutionTooFine(f"position bin {r} is finer than grid spacing {g.dx}")
    n_min = max(2 * g.n, int(math.ceil(2.0 * math.pi / (r_tilde * g.dx))))
    if n_min > MAX_FFT:
        raise ResolutionTooFine(f"momentum bin {r_tilde} needs an FFT longer than {MAX_FFT}")
    m = max(1, int(math.ceil(r_tilde * n_min * g.dx / (2.0 * math.pi) - 1e-9)))
    n_fft = max(n_min, int(round(2.0 * math.pi * m / (r_tilde * g.dx))))
    rho = psi.density()
    rho_k = momentum_density(psi, n_fft=n_fft)
    bx = coarse_grain(rho, r)
    bp = coarse_grain(rho_k, max(r_tilde, rho_k.grid.dx))
    s_xB = shannon_discrete(bx).value
    s_pB = shannon_discrete(bp).value
    r_eff, rt_eff = bx.bin_width, bp.bin_width
    bound = BBM_BOUND - math.log(r_eff * rt_eff)
    return CoarseUncertainty(s_xB, s_pB, bound, r_eff, rt_eff, s_pB - (bound - s_xB))


def gaussian_wavefunction(g: Grid, sigma: float = math.sqrt(0.5), mean: float = 0.0, k0: float = 0.0) -> WaveFunction:
    """Gaussian amplitude whose density has standard deviation ``sigma``."""
    z = (g.x - mean) / sigma
    amp = (2.0 * math.pi * sigma * sigma) ** -0.25 * np.exp(-0.25 * z * z)
    return WaveFunction(g, amp * np.exp(1j * k0 * g.x))
