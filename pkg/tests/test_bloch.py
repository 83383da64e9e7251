"""Tests for the driven Bloch-lattice closed forms."""

import math

import numpy as np
import pytest

from maryland_lab import (
    DunlapParams,
    WaveState,
    bessel_j,
    bessel_j0_zero,
    dunlap_argument,
    dunlap_propagator,
    evolve_state,
    localization_scan,
    msd,
    msd_closed_form,
)


def test_argument_formula():
    params = DunlapParams(0.7, 1.9)
    a = dunlap_argument(params, 3)
    assert a == pytest.approx(4.0 * math.pi * 3 * 0.7 * bessel_j(0, 1.9), abs=1e-13)
    with pytest.raises(ValueError):
        dunlap_argument(params, 0)


def test_propagator_entries_bessel():
    params = DunlapParams(0.25, 1.0)
    a = dunlap_argument(params, 1)
    block = dunlap_propagator(params, 1, (-8, 8))
    # U_{nm} = e^{i(m-n)E} i^{m-n} J_{n-m}(a)
    for n in (-3, 0, 2):
        for m in (-2, 0, 4):
            d = n - m
            expected = np.exp(-1j * d * params.field) * (1j) ** (-d) \
                * bessel_j(d, a)
            i, j = n - block.n_min, m - block.n_min
            assert block.entries[i, j] == pytest.approx(expected, abs=1e-13)


def test_propagator_identity_at_j0_zero():
    params = DunlapParams(1.0, bessel_j0_zero(1))
    block = dunlap_propagator(params, 5, (-6, 6))
    assert np.abs(block.entries - np.eye(13)).max() < 1e-10


def test_pictures_coincide():
    # The free phase over full periods vanishes, so both pictures agree.
    params = DunlapParams(0.5, 2.0)
    a = dunlap_propagator(params, 2, (-5, 5), picture="interaction")
    b = dunlap_propagator(params, 2, (-5, 5), picture="schrodinger")
    assert np.abs(a.entries - b.entries).max() == 0.0


def test_msd_matches_closed_form():
    for coupling, field, n in ((0.3, 0.0, 1), (1.0, 2.0, 4), (1.7, 5.5, 9)):
        params = DunlapParams(coupling, field)
        assert msd(params, n) == pytest.approx(
            msd_closed_form(params, n), rel=1e-10, abs=1e-14)


def test_msd_ballistic_growth():
    # <n^2> proportional to N^2.
    params = DunlapParams(0.4, 1.0)
    assert msd(params, 6) == pytest.approx(9.0 * msd(params, 2), rel=1e-9)


def test_msd_from_evolved_state():
    params = DunlapParams(0.3, 1.2)
    psi = evolve_state(params.drive(), WaveState.delta(0), 2.0 * math.pi,
                       window=(-200, 200))
    assert psi.mean_square_site() == pytest.approx(
        msd_closed_form(params, 1), rel=1e-6)


def test_dynamic_localization_revival():
    psi0 = WaveState.delta(0)
    for k in (1, 2):
        params = DunlapParams(1.0, bessel_j0_zero(k))
        psi = evolve_state(params.drive(), psi0, 2.0 * math.pi * 10,
                           window=(-100, 100))
        assert psi0.fidelity(psi) == pytest.approx(1.0, abs=1e-10)
    # Away from a zero the state spreads and the overlap drops.
    spread = evolve_state(DunlapParams(1.0, 1.0).drive(), psi0,
                          2.0 * math.pi * 10, window=(-200, 200))
    assert psi0.fidelity(spread) < 0.5


def test_localization_scan_finds_j0_roots():
    roots = localization_scan(0.0, 10.0, 1e-8)
    expected = [bessel_j0_zero(k) for k in (1, 2, 3)]
    assert len(roots) == 3
    for found, ref in zip(roots, expected):
        assert found == pytest.approx(ref, abs=1e-10)


def test_localization_scan_empty_cases():
    assert localization_scan(0.0, 2.0, 1e-8) == []   # first root is at 2.40
    assert localization_scan(0.0, 12.0, 0.0) == []   # zero tolerance
    with pytest.raises(ValueError):
        localization_scan(3.0, 1.0, 1e-8)


def test_negative_field_rejected():
    with pytest.raises(ValueError):
        DunlapParams(1.0, -0.5)
