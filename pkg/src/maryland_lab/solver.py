"""Exact solution machinery for linear Toeplitz (Maryland-class) Hamiltonians.

H = H0 + V with H0 diagonal, (H0)_nn = n * omega(t), and V a Toeplitz
interaction.  In the interaction picture H_I(t) has entries
V_{n-m} exp(+i (n-m) Phi(t)) with Phi(t) = integral of omega; all H_I(t)
commute, so the propagator is the exponential of the accumulated
interaction integral, one coefficient per diagonal.

Delta kicks are handled symbolically (exact geometric sums over kick
times); continuous drives use adaptive quadrature per coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .laurent import (
    LaurentOperator,
    NonHermitianError,
    PropagatorBlock,
    WaveState,
    apply_operator,
    block_from_laurent,
    exp_bidiagonal,
    exp_symbol,
)

QUAD_TOL = 1e-10  # absolute tolerance per accumulated coefficient

# Relative slack when counting kicks at the horizon: the kick at t = N*tau
# is included even when N*tau rounds just above t.
_KICK_EPS = 1e-9


@dataclass(frozen=True)
class ConstantOmega:
    """Time-independent H0 slope; no interaction unless coeffs is set."""

    omega: float
    coeffs: LaurentOperator | None = None


@dataclass(frozen=True)
class KickedPotential:
    """Interaction V applied as delta kicks at t = tau, 2 tau, ..."""

    coeffs: LaurentOperator
    tau: float
    omega: float = 1.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("kick period tau must be positive")


@dataclass(frozen=True)
class SinusoidalField:
    """Diagonal field E(t) = -E sin t (period 2 pi) with static coupling."""

    amplitude: float
    coeffs: LaurentOperator


@dataclass(frozen=True)
class Tabulated:
    """omega(t) sampled on a strictly increasing time grid.

    ``coeffs`` is the static coupling; optionally ``coeff_samples`` gives
    per-sample coupling coefficient arrays (one row per time, offsets
    -B..B of ``coeffs``) for time-dependent hopping, interpolated linearly.
    """

    times: np.ndarray
    omegas: np.ndarray
    coeffs: LaurentOperator
    coeff_samples: np.ndarray | None = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        w = np.asarray(self.omegas, dtype=float)
        if t.ndim != 1 or t.shape != w.shape or len(t) < 2:
            raise ValueError("times and omegas must be matching 1-d arrays")
        if not np.all(np.diff(t) > 0):
            raise ValueError("tabulated times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "omegas", w)
        if self.coeff_samples is not None:
            cs = np.asarray(self.coeff_samples, dtype=complex)
            if cs.shape != (len(t), 2 * self.coeffs.bandwidth + 1):
                raise ValueError("coeff_samples must be (n_times, 2B+1)")
            object.__setattr__(self, "coeff_samples", cs)


DriveSpec = ConstantOmega | KickedPotential | SinusoidalField | Tabulated


class PhaseIntegral:
    """Phi(t) = integral_0^t omega(t') dt'."""

    def __init__(self, func):
        self._func = func

    def __call__(self, t: float) -> float:
        return float(self._func(t))


def phase_integral(drive: DriveSpec) -> PhaseIntegral:
    """Closed-form Phi for constant and sinusoidal drives; trapezoid for tables."""
    if isinstance(drive, (ConstantOmega, KickedPotential)):
        omega = drive.omega
        return PhaseIntegral(lambda t: omega * t)
    if isinstance(drive, SinusoidalField):
        e = drive.amplitude
        return PhaseIntegral(lambda t: e * (math.cos(t) - 1.0))
    if isinstance(drive, Tabulated):
        times = drive.times
        cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (drive.omegas[1:] + drive.omegas[:-1])
                              * np.diff(times)))
        )
        return PhaseIntegral(lambda t: np.interp(t, times, cum))
    raise TypeError(f"unknown drive type {type(drive).__name__}")


@dataclass(frozen=True)
class AccumulatedInteraction:
    """g with g_k(t) = integral_0^t V_k(t') exp(i k Phi(t')) dt'."""

    operator: LaurentOperator
    horizon: float


def _kick_count(t: float, tau: float) -> int:
    return int(math.floor(t / tau * (1.0 + _KICK_EPS)))


def accumulate_interaction(drive: DriveSpec, t: float) -> AccumulatedInteraction:
    """Accumulate the interaction-picture integral up to horizon ``t``.

    Kicked drives sum exactly over the kick times n*tau <= t (the kick at
    the horizon is included); continuous drives integrate each coefficient
    adaptively to absolute tolerance 1e-10.
    """
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    phi = phase_integral(drive)

    if isinstance(drive, KickedPotential):
        v = drive.coeffs
        n_kicks = _kick_count(t, drive.tau)
        b = v.bandwidth
        c = np.zeros(2 * b + 1, dtype=complex)
        if n_kicks:
            phases = drive.omega * drive.tau * np.arange(1, n_kicks + 1)
            for k in range(-b, b + 1):
                c[k + b] = v.coeff(k) * np.exp(1j * k * phases).sum()
        return AccumulatedInteraction(LaurentOperator.from_array(c, b), t)

    if isinstance(drive, ConstantOmega) and drive.coeffs is None:
        return AccumulatedInteraction(LaurentOperator({0: 0.0}), t)

    v = drive.coeffs
    b = v.bandwidth
    c = np.zeros(2 * b + 1, dtype=complex)
    if isinstance(drive, Tabulated) and drive.coeff_samples is not None:
        def vk(k, tp):
            return np.interp(tp, drive.times, drive.coeff_samples[:, k + b].real) \
                + 1j * np.interp(tp, drive.times, drive.coeff_samples[:, k + b].imag)
    else:
        def vk(k, tp):
            return v.coeff(k)

    # For the sinusoidal drive the integrand is 2 pi periodic, so long
    # horizons reduce to one period plus a remainder segment.
    n_full = 0
    period = 2.0 * math.pi
    if isinstance(drive, SinusoidalField) and t > period:
        n_full = int(math.floor(t / period))

    for k in range(-b, b + 1):
        def integrand_re(tp, k=k):
            return (vk(k, tp) * np.exp(1j * k * phi(tp))).real

        def integrand_im(tp, k=k):
            return (vk(k, tp) * np.exp(1j * k * phi(tp))).imag

        def segment(lo, hi):
            re, _ = quad(integrand_re, lo, hi, epsabs=QUAD_TOL,
                         epsrel=0.0, limit=400)
            im, _ = quad(integrand_im, lo, hi, epsabs=QUAD_TOL,
                         epsrel=0.0, limit=400)
            return re + 1j * im

        if n_full:
            c[k + b] = n_full * segment(0.0, period) \
                + segment(0.0, t - n_full * period)
        else:
            c[k + b] = segment(0.0, t)
    return AccumulatedInteraction(LaurentOperator.from_array(c, b), t)


def interaction_exponential(acc: AccumulatedInteraction) -> LaurentOperator:
    """exp(-i g) as a Laurent operator, using the Bessel closed form for
    bidiagonal accumulations and the symbol route otherwise."""
    g = acc.operator
    if not g.hermitian():
        raise NonHermitianError("accumulated interaction is not Hermitian")
    if g.bandwidth <= 1 and abs(g.coeff(0)) == 0.0:
        c1 = g.coeff(1)
        gamma = abs(c1)
        if gamma == 0.0:
            return LaurentOperator.identity()
        return exp_bidiagonal(gamma, float(np.angle(c1)))
    return exp_symbol(g)


def propagator_interaction(acc: AccumulatedInteraction,
                           window: tuple[int, int] | None = None
                           ) -> PropagatorBlock:
    """Interaction-picture propagator U_I = exp(-i g) on a site window."""
    u = interaction_exponential(acc)
    if window is None:
        half = u.bandwidth + 10
        window = (-half, half)
    return block_from_laurent(u, window, picture="interaction")


def to_schrodinger(u: PropagatorBlock, phi_t: float) -> PropagatorBlock:
    """Multiply row n by exp(-i n Phi(t)) to leave the interaction picture."""
    if u.picture != "interaction":
        raise ValueError("to_schrodinger expects an interaction-picture block")
    row_phase = np.exp(-1j * phi_t * u.sites.astype(float))
    return PropagatorBlock(u.n_min, u.n_max, row_phase[:, None] * u.entries,
                           picture="schrodinger")


def evolve_state(drive: DriveSpec, psi0: WaveState, t: float,
                 window: tuple[int, int] | None = None) -> WaveState:
    """psi(t) = U_S(t, 0) psi0 for any supported drive."""
    acc = accumulate_interaction(drive, t)
    u = interaction_exponential(acc)
    psi = apply_operator(u, psi0, window=window)
    phi_t = phase_integral(drive)(t)
    phases = np.exp(-1j * phi_t * psi.sites.astype(float))
    return WaveState(phases * psi.amplitudes, psi.offset)
