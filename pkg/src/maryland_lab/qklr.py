"""Quantum kicked linear rotator (the original Maryland model).

Stroboscopic closed forms for H = p + k cos(theta) sum_n delta(t - n tau):
after N kicks the interaction-picture propagator is a bidiagonal-generated
Bessel matrix with amplitude gamma = (k/2) sin(N tau / 2) / sin(tau / 2)
and phase delta = (N + 1) tau / 2.  For rational tau / 2pi = p / q the
Floquet operator has exactly the q q-th roots of unity as eigenvalues and
eigenstates assembled from an arbitrary seed on one sub-interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_array
from .laurent import (
    LaurentOperator,
    PropagatorBlock,
    WaveState,
    block_from_laurent,
    exp_bidiagonal,
)
from .solver import KickedPotential, evolve_state

# |sin(tau/2)| below this triggers the resonant limit gamma = N k / 2.
RESONANCE_TOL = 1e-9


@dataclass(frozen=True)
class QklrParams:
    """Kick strength k and period tau; (p, q) declares tau/2pi rational."""

    k: float
    tau: float
    p: int | None = None
    q: int | None = None

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("kick strength k must be positive")
        if self.tau <= 0:
            raise ValueError("kick period tau must be positive")
        if (self.p is None) != (self.q is None):
            raise ValueError("p and q must be declared together")
        if self.p is not None and math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p/q = {self.p}/{self.q} is not in lowest terms")

    @classmethod
    def rational(cls, k: float, p: int, q: int) -> "QklrParams":
        return cls(k=k, tau=2.0 * math.pi * p / q, p=p, q=q)

    def drive(self) -> KickedPotential:
        """The kicked drive V(theta) = k cos(theta), i.e. V_{+-1} = k/2."""
        half = 0.5 * self.k
        return KickedPotential(LaurentOperator({1: half, -1: half}),
                               tau=self.tau, omega=1.0)


@dataclass(frozen=True)
class FloquetSpectrum:
    """The q distinct Floquet eigenvalues (each infinitely degenerate)."""

    eigenvalues: np.ndarray
    q: int


@dataclass(frozen=True)
class FloquetEigenstate:
    """Samples of an eigenstate phi(theta_j) on a uniform 2 pi grid."""

    samples: np.ndarray
    eigenvalue: complex
    p: int
    q: int
    k: float

    @property
    def thetas(self) -> np.ndarray:
        L = len(self.samples)
        return 2.0 * np.pi * np.arange(L) / L

    def residual(self) -> float:
        """max |F phi - lambda phi| on the grid, F = e^{-iV(theta)} e^{-i p tau}."""
        L = len(self.samples)
        shift = (self.p * L) // self.q  # tau in grid points
        shifted = np.roll(self.samples, shift)  # phi(theta - tau)
        lhs = np.exp(-1j * self.k * np.cos(self.thetas)) * shifted
        return float(np.abs(lhs - self.eigenvalue * self.samples).max())


def gamma_delta(params: QklrParams, n_kicks: int) -> tuple[float, float]:
    """Stroboscopic amplitude and phase after ``n_kicks`` kicks."""
    if n_kicks < 1:
        raise ValueError("kick count must be >= 1")
    s = math.sin(0.5 * params.tau)
    delta = 0.5 * (n_kicks + 1) * params.tau
    if abs(s) < RESONANCE_TOL:
        # Resonant limit of the geometric sum (0/0 otherwise).
        return 0.5 * n_kicks * params.k, delta
    gamma = 0.5 * params.k * math.sin(0.5 * n_kicks * params.tau) / s
    return gamma, delta


def qklr_propagator(params: QklrParams, n_kicks: int,
                    window: tuple[int, int],
                    picture: str = "schrodinger") -> PropagatorBlock:
    """Closed-form propagator after N kicks on a site window.

    Interaction picture: U_{nm} = e^{-i(m-n) delta} i^{m-n} J_{n-m}(2 gamma).
    Schrodinger picture additionally carries the row phase e^{-i n N tau}.
    """
    gamma, delta = gamma_delta(params, n_kicks)
    u = exp_bidiagonal(gamma, delta)
    block = block_from_laurent(u, window, picture="interaction")
    if picture == "interaction":
        return block
    phases = np.exp(-1j * n_kicks * params.tau * block.sites.astype(float))
    return PropagatorBlock(block.n_min, block.n_max,
                           phases[:, None] * block.entries,
                           picture="schrodinger")


def floquet_eigenvalues(p: int, q: int) -> FloquetSpectrum:
    """The q q-th roots of unity, for tau / 2pi = p / q in lowest terms."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p/q = {p}/{q} is not coprime")
    lam = np.exp(2j * np.pi * np.arange(q) / q)
    return FloquetSpectrum(lam, q)


def kick_sum_residual(p: int, q: int, k: float = 1.0,
                      grid_size: int = 1024) -> float:
    """max over theta of |sum_{n=0}^{q-1} k cos(theta - n tau)|, tau = 2 pi p / q.

    Vanishes identically for q >= 2 (geometric sum over roots of unity).
    """
    if q < 2:
        raise ValueError("the kick sum only cancels for q >= 2")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p/q = {p}/{q} is not coprime")
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    tau = 2.0 * np.pi * p / q
    total = np.zeros_like(theta)
    for n in range(q):
        total = total + k * np.cos(theta - n * tau)
    return float(np.abs(total).max())


def build_eigenstate(seed: np.ndarray, lam_index: int, p: int, q: int,
                     k: float = 1.0) -> FloquetEigenstate:
    """Assemble a Floquet eigenstate from seed samples on [0, 2 pi / q).

    The seed is extended to the full circle by the recursion
    phi(theta - tau) = lambda e^{i V(theta)} phi(theta); since gcd(p, q) = 1
    the q translates of the seed interval tile [0, 2 pi).
    """
    seed = np.asarray(seed, dtype=complex)
    if seed.ndim != 1 or len(seed) == 0 or not np.abs(seed).max() > 0:
        raise ValueError("seed must be a nonempty, nonzero 1-d sample array")
    spectrum = floquet_eigenvalues(p, q)
    lam = complex(spectrum.eigenvalues[lam_index % q])
    g = len(seed)  # samples per sub-interval
    L = q * g
    thetas = 2.0 * np.pi * np.arange(L) / L
    shift = p * g  # tau in grid points
    samples = np.zeros(L, dtype=complex)
    samples[:g] = seed
    block = np.arange(g)
    prev = block
    for _ in range(q - 1):
        cur = (prev - shift) % L
        samples[cur] = lam * np.exp(1j * k * np.cos(thetas[prev])) * samples[prev]
        prev = cur
    return FloquetEigenstate(samples, lam, p, q, k)


def period_check(p: int, q: int, k: float,
                 psi0: WaveState | None = None,
                 window: tuple[int, int] = (-128, 128)) -> float:
    """Fidelity |<psi0|psi(q tau)>| after q kicks; 1 since U(q tau) = identity."""
    params = QklrParams.rational(k, p, q)
    if psi0 is None:
        psi0 = WaveState.delta(0)
    psi = evolve_state(params.drive(), psi0, q * params.tau, window=window)
    return psi0.fidelity(psi)


def mean_square_momentum(params: QklrParams, n_kicks: int) -> float:
    """<p^2> after N kicks from the delta state at 0, via the Bessel row sum."""
    gamma, _ = gamma_delta(params, n_kicks)
    a = 2.0 * abs(gamma)
    dmax = int(math.ceil(a)) + 40
    j = bessel_j_array(dmax, a)
    d = np.arange(dmax + 1, dtype=float)
    return float(2.0 * (d**2 * j**2).sum())  # +-d contribute equally, d=0 drops
