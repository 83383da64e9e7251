"""Tests for the interaction-picture accumulation and evolution layer."""

import math

import numpy as np
import pytest

from maryland_lab import (
    AccumulatedInteraction,
    ConstantOmega,
    KickedPotential,
    LaurentOperator,
    SinusoidalField,
    Tabulated,
    WaveState,
    accumulate_interaction,
    bessel_j,
    evolve_state,
    interaction_exponential,
    laurent_product,
    phase_integral,
    propagator_interaction,
    to_schrodinger,
)


def kicked_cos(k, tau):
    half = 0.5 * k
    return KickedPotential(LaurentOperator({1: half, -1: half}), tau=tau)


def test_phase_integral_constant():
    phi = phase_integral(ConstantOmega(1.5))
    assert phi(2.0) == pytest.approx(3.0)


def test_phase_integral_sinusoidal():
    # omega(t) = -E sin t integrates to E (cos t - 1).
    phi = phase_integral(SinusoidalField(2.0, LaurentOperator({1: 1.0, -1: 1.0})))
    assert phi(math.pi) == pytest.approx(-4.0)
    assert phi(2.0 * math.pi) == pytest.approx(0.0, abs=1e-14)


def test_phase_integral_tabulated_ramp():
    # omega(t) = t integrates to t^2 / 2; trapezoid is exact for linear omega.
    times = np.linspace(0.0, 1.0, 101)
    drive = Tabulated(times, times, LaurentOperator({1: 1.0, -1: 1.0}))
    phi = phase_integral(drive)
    assert phi(1.0) == pytest.approx(0.5, abs=1e-12)
    assert phi(0.4) == pytest.approx(0.08, abs=1e-4)


def test_kicked_accumulation_geometric_sum():
    # g_{+-1} after N kicks is (k/2) sum_n e^{+-i n tau}, an exact geometric sum.
    k, tau, n = 0.8, 1.3, 7
    acc = accumulate_interaction(kicked_cos(k, tau), n * tau)
    expected = 0.5 * k * sum(np.exp(1j * tau * m) for m in range(1, n + 1))
    assert acc.operator.coeff(1) == pytest.approx(expected, abs=1e-13)
    assert acc.operator.coeff(-1) == pytest.approx(np.conj(expected), abs=1e-13)
    # Magnitude matches the sin-ratio closed form.
    gamma = 0.5 * k * math.sin(0.5 * n * tau) / math.sin(0.5 * tau)
    assert abs(acc.operator.coeff(1)) == pytest.approx(abs(gamma), abs=1e-13)


def test_kick_at_horizon_included():
    acc = accumulate_interaction(kicked_cos(1.0, 0.1), 3 * 0.1)
    expected = 0.5 * sum(np.exp(1j * 0.1 * m) for m in range(1, 4))
    assert acc.operator.coeff(1) == pytest.approx(expected, abs=1e-12)


def test_sinusoidal_accumulation_closed_form():
    # Over N full periods each hopping coefficient integrates to
    # 2 pi N T J_0(E) e^{-+ i E}.
    t_hop, e_field, n = 0.7, 1.9, 2
    drive = SinusoidalField(e_field, LaurentOperator({1: t_hop, -1: t_hop}))
    acc = accumulate_interaction(drive, 2.0 * math.pi * n)
    expected = 2.0 * math.pi * n * t_hop * bessel_j(0, e_field) \
        * np.exp(-1j * e_field)
    assert acc.operator.coeff(1) == pytest.approx(expected, abs=1e-9)
    assert acc.operator.coeff(-1) == pytest.approx(np.conj(expected), abs=1e-9)


def test_constant_omega_free_evolution():
    # No interaction: site n only picks up the phase e^{-i n omega t}.
    psi0 = WaveState([1.0, 1.0j], 3).normalized()
    psi = evolve_state(ConstantOmega(0.9), psi0, 2.0)
    for n in (3, 4):
        expected = psi0.amplitude(n) * np.exp(-1j * n * 0.9 * 2.0)
        assert psi.amplitude(n) == pytest.approx(expected, abs=1e-14)


def test_tabulated_matches_constant():
    # A flat table must reproduce the constant-omega accumulation.
    coeffs = LaurentOperator({1: 0.4, -1: 0.4})
    times = np.linspace(0.0, 5.0, 401)
    tab = Tabulated(times, np.full_like(times, 1.1), coeffs)
    acc_tab = accumulate_interaction(tab, 5.0)
    acc_const = accumulate_interaction(ConstantOmega(1.1, coeffs), 5.0)
    diff = np.abs(acc_tab.operator.coeffs - acc_const.operator.coeffs).max()
    assert diff < 1e-9


def test_tabulated_time_dependent_coupling():
    # Coupling ramp T(t) = t with omega = 0: g_k = integral of T = t^2/2.
    coeffs = LaurentOperator({1: 1.0, -1: 1.0})
    times = np.linspace(0.0, 2.0, 201)
    samples = np.column_stack([times, np.zeros_like(times), times]).astype(complex)
    tab = Tabulated(times, np.zeros_like(times), coeffs, coeff_samples=samples)
    acc = accumulate_interaction(tab, 2.0)
    assert acc.operator.coeff(1) == pytest.approx(2.0, abs=1e-9)


def test_interaction_exponential_identity_at_zero():
    acc = accumulate_interaction(ConstantOmega(1.0), 3.0)
    u = interaction_exponential(acc)
    assert u.bandwidth == 0
    assert u.coeff(0) == 1.0


def test_kicked_resonance_gamma_zero():
    # tau = pi, N = 2: the two kick phases cancel exactly.
    acc = accumulate_interaction(kicked_cos(1.0, math.pi), 2.0 * math.pi)
    assert abs(acc.operator.coeff(1)) < 1e-13
    u = interaction_exponential(acc)
    assert u.coeff(0) == pytest.approx(1.0, abs=1e-14)


def test_composition_over_subintervals():
    # g is additive over adjoining intervals, so U(t2) = U(t2-t1 shifted) U(t1)
    # reduces to exp additivity of the accumulated coefficients.
    drive = kicked_cos(1.1, 0.9)
    a1 = accumulate_interaction(drive, 4 * 0.9)
    a2 = accumulate_interaction(drive, 9 * 0.9)
    u1 = interaction_exponential(a1)
    u2 = interaction_exponential(a2)
    # Segment accumulation from kick 5 to 9.
    seg = AccumulatedInteraction(a2.operator + (-1.0) * a1.operator, a2.horizon)
    useg = interaction_exponential(seg)
    prod = laurent_product(useg, u1)
    bmax = u2.bandwidth
    worst = max(abs(prod.coeff(k) - u2.coeff(k)) for k in range(-bmax, bmax + 1))
    assert worst < 1e-9


def test_picture_conversion_row_phases():
    drive = kicked_cos(0.6, 1.0)
    acc = accumulate_interaction(drive, 3.0)
    ui = propagator_interaction(acc, window=(-20, 20))
    us = to_schrodinger(ui, phase_integral(drive)(3.0))
    phases = np.exp(-1j * 3.0 * ui.sites.astype(float))
    assert np.abs(us.entries - phases[:, None] * ui.entries).max() == 0.0
    with pytest.raises(ValueError):
        to_schrodinger(us, 3.0)


def test_evolve_state_norm_preserved():
    psi0 = WaveState.gaussian(0, 2.0, 20)
    drive = SinusoidalField(1.0, LaurentOperator({1: 0.5, -1: 0.5}))
    psi = evolve_state(drive, psi0, 2.0 * math.pi, window=(-120, 120))
    assert psi.norm() == pytest.approx(1.0, abs=1e-9)


def test_negative_horizon_rejected():
    with pytest.raises(ValueError):
        accumulate_interaction(ConstantOmega(1.0), -1.0)
