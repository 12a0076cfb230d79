"""Closed-form Schroedinger wave packets in Madelung (hydrodynamic) form.

A wave function ``psi = sqrt(rho) exp(i s / 2D)`` with ``D = hbar/2m`` is
described by its density ``rho``, the velocity potential ``s`` (``v = ds/dx``)
and the volume potential ``Omega = V/m``.  The phase obeys

    ds/dt + v^2/2 + Omega - Q = 0,    Q = 2 D^2 (sqrt rho)'' / sqrt rho,

and the drift of the associated diffusion is ``b = v + u`` with
``u = D d(ln rho)/dx``.

Oscillator families (squeezed and stationary states) use ``hbar = m = omega = 1``
so ``D = 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._calculus import gradient, second_derivative, trapezoid
from .densities import (
    GaussianParams,
    Grid,
    GridDensity,
    _check_span,
    gaussian_values,
    normalize,
)
from .errors import DomainError
from .functionals import GridField, differential_entropy, quantum_potential

NODE_MASK = 1e-12
OSCILLATOR_D = 0.5


@dataclass(frozen=True)
class QuantumState:
    """Sampled Madelung data of one wave function at time ``t``.

    ``amplitude`` is the signed real amplitude (the modulus up to the sign
    changes across nodes), which keeps gradients smooth through nodes.
    """

    rho: GridDensity
    phase_s: GridField
    drift_b: GridField
    D: float
    energy_E: float
    omega_field: GridField
    velocity: GridField
    amplitude: np.ndarray
    t: float = 0.0
    label: str = ""

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    @property
    def osmotic(self) -> np.ndarray:
        """``u = b - v`` (NaN where the drift is masked)."""
        return self.drift_b.values - self.velocity.values

    def wavefunction(self) -> np.ndarray:
        """Complex samples ``amplitude * exp(i s / 2D)``."""
        return self.amplitude * np.exp(1j * self.phase_s.values / (2.0 * self.D))


@dataclass(frozen=True)
class QuantumBalanceReport:
    t: float
    S: float
    S_dot: float
    S_dot_in: float
    F_scaled: float
    F_dot: float
    E: float
    v2_mean: float
    u2_mean: float
    omega_mean: float
    # D^2 times the grid Fisher information, the independent evaluation of F_scaled
    F_grid: float = math.nan
    # power release <b v>/D of the associated diffusion (b = v + u)
    Q_dot: float = math.nan

    @property
    def fisher_mismatch(self) -> float:
        return abs(self.F_scaled - self.F_grid) / max(abs(self.F_grid), 1e-300)


def _state(g, amp, s, v, b, D, E, omega, t, label, flags=frozenset()) -> QuantumState:
    rho = normalize(GridDensity(g, amp * amp, flags))
    # keep the amplitude consistent with the normalized density
    amp = amp / math.sqrt(trapezoid(amp * amp, g.dx))
    return QuantumState(
        rho,
        GridField(g, s),
        GridField(g, b),
        float(D),
        float(E),
        GridField(g, omega),
        GridField(g, v),
        amp,
        float(t),
        label,
    )


def _gaussian_amplitude(mean: float, var: float, x: np.ndarray) -> np.ndarray:
    return np.sqrt(gaussian_values(GaussianParams(mean, math.sqrt(var)), x))


def free_packet(alpha: float, D: float, t: float, g: Grid) -> QuantumState:
    """Spreading free Gaussian packet started from ``(pi alpha^2)^(-1/4) exp(-x^2/2 alpha^2)``."""
    if not alpha > 0 or not D > 0:
        raise DomainError("alpha and D must be positive")
    w = alpha**4 + 4.0 * D * D * t * t
    var = w / (2.0 * alpha * alpha)
    flags = _check_span(g, -4 * math.sqrt(var), 4 * math.sqrt(var), "8 std", None)
    x = g.x
    v = 4.0 * D * D * t * x / w
    u = -2.0 * D * alpha * alpha * x / w
    # the time-dependent constant is fixed by the phase equation
    s = 2.0 * D * D * t * x * x / w - D * math.atan(2.0 * D * t / alpha**2)
    return _state(
        g, _gaussian_amplitude(0.0, var, x), s, v, v + u, D, D * D / alpha**2,
        np.zeros(g.n), t, "free-packet", flags,
    )


def free_packet_variance(alpha: float, D: float, t: float) -> float:
    return (alpha**4 + 4.0 * D * D * t * t) / (2.0 * alpha * alpha)


def classical_orbit(omega, q0, p0, m, t) -> tuple[float, float]:
    """Position and momentum of the classical oscillator at time t."""
    c, s = math.cos(omega * t), math.sin(omega * t)
    return q0 * c + p0 / (m * omega) * s, p0 * c - m * omega * q0 * s


def coherent_state(omega: float, q0: float, p0: float, m: float, D: float, t: float, g: Grid) -> QuantumState:
    """Ground-state shaped packet following the classical orbit of the oscillator."""
    if not (omega > 0 and m > 0 and D > 0):
        raise DomainError("omega, m and D must be positive")
    var = D / omega
    amp_orbit = math.hypot(q0, p0 / (m * omega))
    half = amp_orbit + 4.0 * math.sqrt(var)
    flags = _check_span(g, -half, half, "oscillation range + 4 std", None)
    q, p = classical_orbit(omega, q0, p0, m, t)
    x = g.x
    v = np.full(g.n, p / m)
    u = -D * (x - q) / var
    s = (x * p - 0.5 * p * q) / m - D * omega * t
    E = 0.5 * (p / m) ** 2 + 0.5 * omega**2 * q * q + D * omega
    return _state(
        g, _gaussian_amplitude(q, var, x), s, v, v + u, D, E, 0.5 * omega**2 * x * x, t,
        "coherent", flags,
    )


def squeezed_variance(gamma: float, t: float) -> float:
    """``sigma^2(t) = (sin^2 t / gamma^2 + gamma^2 cos^2 t) / 2``."""
    return 0.5 * (math.sin(t) ** 2 / gamma**2 + gamma**2 * math.cos(t) ** 2)


def _squeezed_time_phase(gamma: float, t: float) -> float:
    # -arg(cos t + i sin t / gamma^2) / 2, continued through t = pi, 3pi, ...
    theta = math.atan2(math.sin(t), gamma**2 * math.cos(t))
    theta += 2.0 * math.pi * math.floor((t + math.pi) / (2.0 * math.pi))
    return -0.5 * theta


def squeezed_state(gamma: float, t: float, g: Grid) -> QuantumState:
    """Oscillator packet started from ``exp(-x^2 / 2 gamma^2)`` (hbar = m = omega = 1)."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    D = OSCILLATOR_D
    var = squeezed_variance(gamma, t)
    vmax = 0.5 * max(gamma**2, gamma**-2)
    flags = _check_span(g, -4 * math.sqrt(vmax), 4 * math.sqrt(vmax), "8 max std", None)
    x = g.x
    k = (gamma**-2 - gamma**2) * math.sin(2.0 * t) / (4.0 * var)
    v = k * x
    u = -D * x / var
    # velocity potential s = hbar/m * phase = 2D * phase
    s = 0.5 * k * x * x + 2.0 * D * _squeezed_time_phase(gamma, t)
    E = 0.25 * (gamma**2 + gamma**-2)
    return _state(
        g, _gaussian_amplitude(0.0, var, x), s, v, v + u, D, E, 0.5 * x * x, t, "squeezed", flags
    )


def hermite_functions(n: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions ``phi_0..phi_n`` by the stable three-term recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1, x.size))
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_polynomials(n: int, x: np.ndarray) -> np.ndarray:
    """Physicists' Hermite polynomials ``H_0..H_n``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((max(n, 1) + 1, x.size))
    out[0] = 1.0
    out[1] = 2.0 * x
    for k in range(1, n):
        out[k + 1] = 2.0 * x * out[k] - 2.0 * k * out[k - 1]
    return out[: n + 1]


def stationary_drift(n: int, x: np.ndarray) -> np.ndarray:
    """``b_n = -x + 2n H_{n-1}/H_n`` (infinite at the nodes of ``H_n``)."""
    H = hermite_polynomials(n, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        extra = 2.0 * n * H[n - 1] / H[n] if n else 0.0
    return -np.asarray(x, dtype=float) + extra


def stationary_potential(n: int, x: np.ndarray) -> np.ndarray:
    """Analytic ``Q = (b^2 + b')/2`` for the n-th oscillator eigenstate (D = 1/2)."""
    x = np.asarray(x, dtype=float)
    H = hermite_polynomials(n, x)
    b = stationary_drift(n, x)
    if n == 0:
        db = -np.ones_like(x)
    else:
        Hm2 = H[n - 2] if n >= 2 else np.zeros_like(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            db = -1.0 + 2.0 * n * (2.0 * (n - 1) * Hm2 * H[n] - 2.0 * n * H[n - 1] ** 2) / H[n] ** 2
    return 0.5 * (b * b + db)


def stationary_state(n: int, g: Grid, t: float = 0.0) -> QuantumState:
    """n-th oscillator eigenstate (hbar = m = omega = 1); drift masked where rho < 1e-12."""
    if int(n) != n or n < 0:
        raise DomainError(f"level must be a nonnegative integer, got {n}")
    if n > 12:
        raise DomainError("levels above 12 are not supported")
    n = int(n)
    half = math.sqrt(2 * n + 1) + 3.0
    flags = _check_span(g, -half, half, "classical region + 3", None)
    x = g.x
    amp = hermite_functions(n, x)[n]
    b = stationary_drift(n, x)
    masked = amp * amp < NODE_MASK
    b = np.where(masked, np.nan, b)
    E = n + 0.5
    return _state(
        g, amp, np.full(g.n, -E * t), np.zeros(g.n), b, OSCILLATOR_D, E, 0.5 * x * x, t,
        f"stationary-{n}", flags | {"nodes_masked"},
    )


def hj_residual(n: int, g: Grid, numeric: bool = False) -> np.ndarray:
    """``n + 1/2 - (Omega - Q)`` on points with ``rho_n >= 1e-12`` (interior only).

    ``numeric=True`` uses the grid quantum potential instead of the analytic one.
    """
    st = stationary_state(n, g)
    x = g.x
    if numeric:
        Q = quantum_potential(st.rho, st.D).values
    else:
        Q = stationary_potential(n, x)
    keep = st.rho.values >= NODE_MASK
    keep[:2] = keep[-2:] = False
    return (n + 0.5 - (0.5 * x * x - Q))[keep]


def quantum_balance(state: QuantumState) -> QuantumBalanceReport:
    """Entropy and Fisher balance of a Madelung state.

    Terms carrying ``u`` are written with ``d rho/dx`` or the signed amplitude
    so nothing is divided by rho at nodes.  ``F_dot`` is the rate of the scaled
    Fisher information ``D^2 F``, evaluated as ``-2 <v dQ/dx>``; it equals
    ``d<u^2>/dt = -d(<v^2> + 2<Omega>)/dt`` by energy conservation.
    """
    g, D, rho = state.grid, state.D, state.rho
    dx = g.dx
    v = state.velocity.values
    omega = rho.expect(state.omega_field.values)
    v2 = rho.expect(v * v)
    damp = gradient(state.amplitude, dx)
    u2 = 4.0 * D * D * trapezoid(damp * damp, dx)
    drho = gradient(rho.values, dx)
    S_dot = -trapezoid(v * drho, dx)
    E = state.energy_E
    F_scaled = 2.0 * (E - omega) - v2
    S_dot_in = (2.0 / D) * (E - (0.5 * F_scaled + omega))
    if np.any(v != 0):
        dQ = gradient(quantum_potential(rho, D).values, dx)
        F_dot = -2.0 * rho.expect(v * dQ)
    else:
        F_dot = 0.0
    return QuantumBalanceReport(
        t=state.t,
        S=differential_entropy(rho).value,
        S_dot=S_dot,
        S_dot_in=S_dot_in,
        F_scaled=F_scaled,
        F_dot=F_dot,
        E=E,
        v2_mean=v2,
        u2_mean=u2,
        omega_mean=omega,
        F_grid=u2,
        Q_dot=(v2 + D * trapezoid(v * drho, dx)) / D,
    )


def mean_phase(state: QuantumState) -> float:
    """``<s>``; the phase relation reads ``d<-s>/dt = E - <v^2>``."""
    return state.rho.expect(state.phase_s.values)
