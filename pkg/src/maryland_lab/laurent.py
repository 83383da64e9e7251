"""Band-limited Laurent (doubly infinite Toeplitz) operators.

An operator is stored through its diagonal coefficients c_k for offsets
k = -B..B, where k is row index minus column index: entry (n, m) equals
c_{n-m}.  The position representation is the symbol

    A(theta) = sum_k c_k exp(-i k theta),

sampled on a uniform grid of the circle.  Any two Laurent operators
commute, so products reduce to coefficient convolutions and exponentials
to pointwise operations on the symbol.

Sign convention: exp(-i k theta) goes with offset +k (the subdiagonal
direction), applied uniformly everywhere in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_array


class GridTooSmallError(ValueError):
    """Symbol grid too coarse to resolve the operator bandwidth."""


class NonHermitianError(ValueError):
    """Operation requires a Hermitian operator (real symbol)."""


class WindowOverflowError(ValueError):
    """Amplitude reached the edge of a finite site window."""


# i**(-d) for d mod 4 = 0, 1, 2, 3
_INV_I_POW = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)


def _inv_i_pow(d: int) -> complex:
    return _INV_I_POW[d % 4]


class LaurentOperator:
    """Band-limited Laurent operator, immutable after construction."""

    def __init__(self, coeffs):
        """``coeffs`` is a mapping from integer offset to complex coefficient."""
        if not coeffs:
            coeffs = {0: 0.0}
        bandwidth = max(abs(int(k)) for k in coeffs)
        c = np.zeros(2 * bandwidth + 1, dtype=complex)
        for k, v in coeffs.items():
            c[int(k) + bandwidth] = v
        self._c = c
        self._c.flags.writeable = False
        self.bandwidth = bandwidth

    @classmethod
    def from_array(cls, c, bandwidth: int) -> "LaurentOperator":
        """Build from an array of coefficients for offsets -bandwidth..bandwidth."""
        c = np.asarray(c, dtype=complex)
        if c.shape != (2 * bandwidth + 1,):
            raise ValueError("coefficient array must have length 2*bandwidth + 1")
        op = cls.__new__(cls)
        op._c = c.copy()
        op._c.flags.writeable = False
        op.bandwidth = bandwidth
        return op

    @classmethod
    def identity(cls) -> "LaurentOperator":
        return cls({0: 1.0})

    def coeff(self, k: int) -> complex:
        if abs(k) > self.bandwidth:
            return 0.0 + 0.0j
        return self._c[k + self.bandwidth]

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients for offsets -bandwidth..bandwidth."""
        return self._c

    def offsets(self) -> np.ndarray:
        return np.arange(-self.bandwidth, self.bandwidth + 1)

    def hermitian(self, tol: float = 1e-10) -> bool:
        """True iff c_{-k} equals conj(c_k) within ``tol`` relative to max|c|."""
        scale = max(np.abs(self._c).max(), 1e-300)
        return bool(np.abs(self._c - np.conj(self._c[::-1])).max() <= tol * scale)

    def tail_mass(self, d: int) -> float:
        """Sum of |c_k|^2 over offsets |k| > d."""
        if d >= self.bandwidth:
            return 0.0
        b = self.bandwidth
        lo = np.abs(self._c[: b - d]) ** 2
        hi = np.abs(self._c[b + d + 1:]) ** 2
        return float(lo.sum() + hi.sum())

    def trimmed(self, tail: float = 1e-14) -> "LaurentOperator":
        """Shrink the bandwidth while the dropped L1 coefficient mass stays < tail."""
        b = self.bandwidth
        mags = np.abs(self._c)
        dropped = 0.0
        while b > 0:
            edge = mags[self.bandwidth - b] + mags[self.bandwidth + b]
            if dropped + edge >= tail:
                break
            dropped += edge
            b -= 1
        return LaurentOperator.from_array(
            self._c[self.bandwidth - b: self.bandwidth + b + 1], b
        )

    def dense_block(self, window: tuple[int, int]) -> np.ndarray:
        """Dense matrix of entries c_{n-m} over sites window[0]..window[1] inclusive."""
        n = np.arange(window[0], window[1] + 1)
        d = n[:, None] - n[None, :]
        out = np.zeros(d.shape, dtype=complex)
        mask = np.abs(d) <= self.bandwidth
        out[mask] = self._c[d[mask] + self.bandwidth]
        return out

    def __add__(self, other: "LaurentOperator") -> "LaurentOperator":
        b = max(self.bandwidth, other.bandwidth)
        c = np.zeros(2 * b + 1, dtype=complex)
        c[b - self.bandwidth: b + self.bandwidth + 1] += self._c
        c[b - other.bandwidth: b + other.bandwidth + 1] += other._c
        return LaurentOperator.from_array(c, b)

    def __mul__(self, scalar) -> "LaurentOperator":
        return LaurentOperator.from_array(self._c * scalar, self.bandwidth)

    __rmul__ = __mul__

    def __repr__(self):
        nz = {int(k): self.coeff(k) for k in self.offsets() if self.coeff(k) != 0}
        return f"LaurentOperator({nz})"


@dataclass(frozen=True)
class SymbolFunction:
    """Samples A(theta_j) on the uniform grid theta_j = 2 pi j / L."""

    values: np.ndarray

    @property
    def grid_size(self) -> int:
        return len(self.values)

    @property
    def thetas(self) -> np.ndarray:
        L = self.grid_size
        return 2.0 * np.pi * np.arange(L) / L


@dataclass(frozen=True)
class PropagatorBlock:
    """Center block of a propagator on a declared site window (inclusive)."""

    n_min: int
    n_max: int
    entries: np.ndarray
    picture: str  # "interaction" | "schrodinger"

    def __post_init__(self):
        if self.picture not in ("interaction", "schrodinger"):
            raise ValueError(f"unknown picture {self.picture!r}")
        dim = self.n_max - self.n_min + 1
        if self.entries.shape != (dim, dim):
            raise ValueError("entries shape does not match window")

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def unitarity_defect(self, margin: int = 0) -> float:
        """max|U^H U - I| over the interior obtained by dropping ``margin`` sites per side."""
        g = self.entries.conj().T @ self.entries - np.eye(len(self.entries))
        if margin:
            g = g[margin:-margin, margin:-margin]
        return float(np.abs(g).max())


class WaveState:
    """Complex amplitudes on a finite site window starting at ``offset``."""

    def __init__(self, amplitudes, offset: int):
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        self.offset = int(offset)

    @classmethod
    def delta(cls, site: int = 0) -> "WaveState":
        return cls([1.0], site)

    @classmethod
    def gaussian(cls, center: int, width: float, halfspan: int) -> "WaveState":
        n = np.arange(center - halfspan, center + halfspan + 1)
        amp = np.exp(-((n - center) ** 2) / (2.0 * width**2)).astype(complex)
        state = cls(amp, center - halfspan)
        return state.normalized()

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.amplitudes))

    def amplitude(self, n: int) -> complex:
        i = n - self.offset
        if 0 <= i < len(self.amplitudes):
            return self.amplitudes[i]
        return 0.0 + 0.0j

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "WaveState":
        return WaveState(self.amplitudes / self.norm(), self.offset)

    def overlap(self, other: "WaveState") -> complex:
        lo = max(self.offset, other.offset)
        hi = min(self.offset + len(self.amplitudes),
                 other.offset + len(other.amplitudes))
        if hi <= lo:
            return 0.0 + 0.0j
        a = self.amplitudes[lo - self.offset: hi - self.offset]
        b = other.amplitudes[lo - other.offset: hi - other.offset]
        return complex(np.vdot(a, b))

    def fidelity(self, other: "WaveState") -> float:
        return abs(self.overlap(other))

    def mean_square_site(self) -> float:
        p = np.abs(self.amplitudes) ** 2
        return float((self.sites.astype(float) ** 2 * p).sum() / p.sum())

    def trimmed(self, eps: float = 1e-16) -> "WaveState":
        mags = np.abs(self.amplitudes)
        keep = np.nonzero(mags > eps)[0]
        if len(keep) == 0:
            return WaveState([0.0], self.offset)
        lo, hi = keep[0], keep[-1]
        return WaveState(self.amplitudes[lo: hi + 1], self.offset + lo)


def coeffs_to_symbol(op: LaurentOperator, grid_size: int) -> SymbolFunction:
    """Sample A(theta_j) = sum_k c_k exp(-i k theta_j) on an L-point grid."""
    L = grid_size
    if L < 2 * op.bandwidth + 1:
        raise GridTooSmallError(
            f"grid size {L} < 2B+1 = {2 * op.bandwidth + 1}"
        )
    a = np.zeros(L, dtype=complex)
    for k in range(-op.bandwidth, op.bandwidth + 1):
        a[k % L] += op.coeff(k)
    # FFT computes sum_n a_n exp(-2 pi i n j / L), which is exactly the symbol sum.
    return SymbolFunction(np.fft.fft(a))


def symbol_to_coeffs(sym: SymbolFunction, bandwidth: int) -> LaurentOperator:
    """Recover c_k = (1/L) sum_j values_j exp(+i k theta_j) for |k| <= bandwidth."""
    L = sym.grid_size
    if L < 2 * bandwidth + 1:
        raise GridTooSmallError(f"grid size {L} < 2B+1 = {2 * bandwidth + 1}")
    a = np.fft.ifft(sym.values)
    c = np.array([a[k % L] for k in range(-bandwidth, bandwidth + 1)])
    return LaurentOperator.from_array(c, bandwidth)


def laurent_product(a: LaurentOperator, b: LaurentOperator) -> LaurentOperator:
    """Operator product; coefficients are the convolution of the inputs'."""
    c = np.convolve(a.coeffs, b.coeffs)
    return LaurentOperator.from_array(c, a.bandwidth + b.bandwidth)


def commutator_norm(a: LaurentOperator, b: LaurentOperator) -> float:
    """max|coeff| of ab - ba; zero to rounding for any Laurent pair."""
    ab = np.convolve(a.coeffs, b.coeffs)
    ba = np.convolve(b.coeffs, a.coeffs)
    return float(np.abs(ab - ba).max())


def bidiagonal(gamma: float, delta: float) -> LaurentOperator:
    """Hermitian operator with entry gamma*e^{i delta} on the first subdiagonal."""
    g = gamma * np.exp(1j * delta)
    return LaurentOperator({1: g, -1: np.conj(g)})


def exp_bidiagonal(gamma: float, delta: float, tail: float = 1e-14) -> LaurentOperator:
    """exp(-iM) for the bidiagonal M with M_{n+1,n} = gamma e^{i delta}.

    The coefficient at offset d is e^{i d delta} i^{-d} J_d(2 gamma); the
    bandwidth is chosen so the truncated coefficient tail is below ``tail``.
    """
    z = 2.0 * gamma
    B = int(math.ceil(2.0 * abs(gamma))) + 40
    j = bessel_j_array(B, abs(z))
    c = np.zeros(2 * B + 1, dtype=complex)
    for d in range(-B, B + 1):
        val = j[abs(d)]
        if d % 2 and ((d < 0) != (z < 0)):
            # J_{-n}(z) = (-1)^n J_n(z) and J_n(-z) = (-1)^n J_n(z);
            # the two sign flips cancel when both apply.
            val = -val
        c[d + B] = np.exp(1j * d * delta) * _inv_i_pow(d) * val
    return LaurentOperator.from_array(c, B).trimmed(tail)


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def exp_symbol(m: LaurentOperator, scale: float = 1.0,
               hermiticity_tol: float = 1e-10,
               tail: float = 1e-14) -> LaurentOperator:
    """Coefficients of exp(-i * scale * m) for Hermitian m.

    The symbol is exponentiated pointwise on a power-of-two grid with 2x
    aliasing margin over the estimated output bandwidth.
    """
    if not m.hermitian(hermiticity_tol):
        raise NonHermitianError("operator coefficients are not Hermitian")
    amp = abs(scale) * float(np.abs(m.coeffs).sum())  # bound on |scale * symbol|
    b_out = m.bandwidth + int(math.ceil(amp)) + 40
    L = _next_pow2(4 * (2 * b_out + 1))
    sym = coeffs_to_symbol(m, L)
    scale_ref = max(np.abs(sym.values).max(), 1e-300)
    if np.abs(sym.values.imag).max() > hermiticity_tol * scale_ref:
        raise NonHermitianError("symbol has a non-negligible imaginary part")
    phase = SymbolFunction(np.exp(-1j * scale * sym.values.real))
    return symbol_to_coeffs(phase, b_out).trimmed(tail)


def apply_operator(op: LaurentOperator, psi: WaveState,
                   window: tuple[int, int] | None = None,
                   edge_tol: float = 1e-12) -> WaveState:
    """(op psi)_n = sum_k c_k psi_{n-k}; the site window grows by the bandwidth.

    If ``window`` is given, the result is clipped to it; amplitude mass
    outside the window above ``edge_tol`` raises WindowOverflowError.
    """
    out = np.convolve(op.coeffs, psi.amplitudes)
    result = WaveState(out, psi.offset - op.bandwidth)
    if window is not None:
        lo, hi = window
        sites = result.sites
        outside = (sites < lo) | (sites > hi)
        lost = float((np.abs(result.amplitudes[outside]) ** 2).sum())
        if lost > edge_tol:
            raise WindowOverflowError(
                f"amplitude mass {lost:.3e} outside window [{lo}, {hi}]"
            )
        keep = ~outside
        if not keep.any():
            return WaveState([0.0], lo)
        idx = np.nonzero(keep)[0]
        result = WaveState(result.amplitudes[idx[0]: idx[-1] + 1],
                           int(sites[idx[0]]))
    return result


def block_from_laurent(op: LaurentOperator, window: tuple[int, int],
                       picture: str = "interaction") -> PropagatorBlock:
    """Materialize a Laurent operator as a dense PropagatorBlock."""
    return PropagatorBlock(window[0], window[1], op.dense_block(window), picture)
