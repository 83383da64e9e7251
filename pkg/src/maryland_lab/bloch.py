"""Driven single-band Bloch lattice (Dunlap-type sinusoidal field).

H(t) = T sum_m (|m><m+1| + h.c.) + E(t) sum_m m |m><m|, E(t) = -E sin t.
Over N full drive periods the accumulated off-diagonal integral is
2 pi N T J_0(E) e^{-iE}, so the stroboscopic propagator is a Bessel matrix
in the argument a = 4 pi N T J_0(E).  Spreading is ballistic, <n^2> = a^2/2,
and freezes exactly at the zeros of J_0 (dynamic localization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .bessel import bessel_j, bessel_j_array
from .laurent import LaurentOperator, PropagatorBlock, block_from_laurent, exp_bidiagonal
from .solver import SinusoidalField


@dataclass(frozen=True)
class DunlapParams:
    """Nearest-neighbor coupling T and field amplitude E (drive period 2 pi)."""

    coupling: float
    field: float

    def __post_init__(self):
        if self.field < 0:
            raise ValueError("field amplitude must be >= 0")

    def drive(self) -> SinusoidalField:
        t = self.coupling
        return SinusoidalField(self.field,
                               LaurentOperator({1: t, -1: t}))


def dunlap_argument(params: DunlapParams, n_periods: int) -> float:
    """Bessel argument a = 4 pi N T J_0(E) after N periods."""
    if n_periods < 1:
        raise ValueError("period count must be >= 1")
    return 4.0 * math.pi * n_periods * params.coupling * bessel_j(0, params.field)


def dunlap_propagator(params: DunlapParams, n_periods: int,
                      window: tuple[int, int],
                      picture: str = "schrodinger") -> PropagatorBlock:
    """Stroboscopic propagator at t = 2 pi N.

    U_{nm} = e^{i(m-n)E} i^{m-n} J_{n-m}(a).  The accumulated free phase
    over full periods vanishes, so both pictures coincide.
    """
    a = dunlap_argument(params, n_periods)
    gamma = 0.5 * a
    if gamma == 0.0:
        u = LaurentOperator.identity()
    else:
        u = exp_bidiagonal(gamma, -params.field)
    return block_from_laurent(u, window, picture=picture)


def msd(params: DunlapParams, n_periods: int) -> float:
    """<n^2> at t = 2 pi N for a delta state at site 0.

    Computed as the Bessel sum sum_d d^2 J_d(a)^2, which equals a^2 / 2 =
    8 pi^2 N^2 T^2 J_0(E)^2.
    """
    a = abs(dunlap_argument(params, n_periods))
    dmax = int(math.ceil(a)) + 40
    j = bessel_j_array(dmax, a)
    d = np.arange(dmax + 1, dtype=float)
    return float(2.0 * (d**2 * j**2).sum())


def msd_closed_form(params: DunlapParams, n_periods: int) -> float:
    """8 pi^2 N^2 T^2 J_0(E)^2, the analytic value of the Bessel sum."""
    a = dunlap_argument(params, n_periods)
    return 0.5 * a * a


def localization_scan(e_min: float, e_max: float, tolerance: float,
                      grid_step: float = 0.05) -> list[float]:
    """Field amplitudes E in [e_min, e_max] with |J_0(E)| below ``tolerance``.

    Sign changes of J_0 on a uniform grid are refined by root finding; a
    refined root is reported only if |J_0| at the root is under tolerance.
    """
    if not e_max > e_min:
        raise ValueError("empty field range")
    roots = []
    n_steps = max(int(math.ceil((e_max - e_min) / grid_step)), 1)
    grid = np.linspace(e_min, e_max, n_steps + 1)
    vals = np.array([bessel_j(0, e) for e in grid])
    for i in range(n_steps):
        if vals[i] == 0.0:
            candidate = grid[i]
        elif vals[i] * vals[i + 1] < 0:
            candidate = brentq(lambda z: bessel_j(0, z), grid[i], grid[i + 1],
                               xtol=1e-12, rtol=1e-15)
        else:
            continue
        if abs(bessel_j(0, candidate)) < tolerance:
            roots.append(float(candidate))
    return roots
