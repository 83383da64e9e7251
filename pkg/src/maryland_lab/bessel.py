"""Integer-order Bessel functions of the first kind.

Computed with a downward (Miller) recurrence normalized by the completeness
sum J_0 + 2*sum_k J_{2k} = 1, which stays stable for the large orders that
show up in the tails of Laurent-matrix exponentials.  A plain power series
is used for small arguments.  Negative orders and arguments are folded back
with the parity identities J_{-n}(z) = (-1)^n J_n(z) and
J_n(-z) = (-1)^n J_n(z).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

# Documented working range for the argument.
MAX_ARGUMENT = 1.0e4

# Below this the power series converges in a handful of terms with no
# cancellation; above it the downward recurrence takes over.
_SERIES_CUTOFF = 2.0

# Extra start-order margin for the Miller recurrence.
_MILLER_MARGIN = 60


def _series_j(n: int, z: float) -> float:
    # Power series sum_m (-1)^m (z/2)^(n+2m) / (m! (n+m)!), n >= 0, |z| small.
    half = 0.5 * z
    term = half**n / math.factorial(n)
    total = term
    m = 0
    while abs(term) > 1e-18 * max(1.0, abs(total)) and m < 60:
        m += 1
        term *= -(half * half) / (m * (n + m))
        total += term
    return total


def _miller_array(nmax: int, z: float) -> np.ndarray:
    # J_0(z)..J_nmax(z) for z > 0 via normalized downward recurrence.
    # The start order must clear the turning-point region n ~ z + O(z^{1/3}),
    # where the seed error decays too slowly to be forgotten.
    start = int(max(nmax, z + 8.0 * z ** (1.0 / 3.0))) + _MILLER_MARGIN
    if start % 2:
        start += 1
    vals = np.zeros(start + 2)
    vals[start] = 1e-30
    for k in range(start, 0, -1):
        vals[k - 1] = (2.0 * k / z) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            vals[k - 1:] *= 1e-250
    norm = vals[0] + 2.0 * vals[2::2].sum()
    return vals[: nmax + 1] / norm


def bessel_j_array(nmax: int, z: float) -> np.ndarray:
    """Return ``J_0(z) .. J_nmax(z)`` for ``z >= 0``."""
    if z < 0:
        raise ValueError("bessel_j_array requires z >= 0; use bessel_j for negative z")
    if z > MAX_ARGUMENT:
        raise ValueError(f"argument {z} outside working range |z| <= {MAX_ARGUMENT}")
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    if z == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    if z < _SERIES_CUTOFF:
        return np.array([_series_j(n, z) for n in range(nmax + 1)])
    return _miller_array(nmax, z)


def bessel_j(n: int, z: float) -> float:
    """J_n(z) for integer order n (any sign) and real z, |z| <= 1e4."""
    if abs(z) > MAX_ARGUMENT:
        raise ValueError(f"argument {z} outside working range |z| <= {MAX_ARGUMENT}")
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if z < 0:
        z = -z
        if n % 2:
            sign = -sign
    if z == 0.0:
        return sign * (1.0 if n == 0 else 0.0)
    if z < _SERIES_CUTOFF:
        return sign * _series_j(n, z)
    return sign * _miller_array(n, z)[n]


def bessel_j0_zero(k: int) -> float:
    """The k-th positive root of J_0, for k = 1..20."""
    if not 1 <= k <= 20:
        raise ValueError("root index must be in 1..20")
    # Exactly one root of J_0 lies in ((k - 1/2) pi, k pi).
    lo = (k - 0.5) * math.pi
    hi = k * math.pi
    return brentq(lambda z: bessel_j(0, z), lo, hi, xtol=1e-12, rtol=1e-15)


def jacobi_anger_coeffs(z: float, max_order: int) -> np.ndarray:
    """Coefficients ``J_n(z) * i**n`` for n = -max_order..max_order.

    Partial sums of ``coeffs[n] * exp(i n theta)`` reconstruct
    ``exp(i z cos(theta))``.
    """
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    j = bessel_j_array(max_order, abs(z))
    out = np.zeros(2 * max_order + 1, dtype=complex)
    ipow = (1.0, 1.0j, -1.0, -1.0j)  # i**n cycle
    for n in range(-max_order, max_order + 1):
        val = j[abs(n)]
        if n < 0 and n % 2:
            val = -val
        if z < 0 and n % 2:
            val = -val
        out[n + max_order] = val * ipow[n % 4]
    return out
