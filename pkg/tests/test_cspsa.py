"""Tests for the complex simultaneous-perturbation optimizer pieces."""

import numpy as np
import pytest

from quditmse.cspsa import (
    PERTURBATION_VALUES,
    CspsaState,
    GainSchedule,
    default_gains,
    gains_at,
    gradient_estimate,
    probes,
    sample_perturbation,
    step,
)
from quditmse.errors import DegenerateIterate, InvalidGain


class TestGainSchedule:
    def test_first_iteration_values(self):
        sched = GainSchedule(a=1.0, A=0.0, s=1.0, b=1.0, r=1.0)
        a_k, c_k = gains_at(sched, 0)
        assert a_k == 1.0
        assert c_k == 1.0

    def test_decay_with_iteration(self):
        sched = GainSchedule(a=1.0, A=0.0, s=1.0, b=1.0, r=1.0)
        a_k, c_k = gains_at(sched, 9)
        assert abs(a_k - 0.1) < 1e-15
        assert abs(c_k - 0.1) < 1e-15

    def test_stability_offset_damps_early_steps(self):
        sched = GainSchedule(a=3.0, A=4.0, s=1.0, b=0.35, r=1.0 / 6.0)
        a_0, c_0 = gains_at(sched, 0)
        assert abs(a_0 - 0.6) < 1e-15
        assert abs(c_0 - 0.35) < 1e-15

    def test_monotone_decrease(self):
        sched = default_gains(2)
        prev_a, prev_c = gains_at(sched, 0)
        for k in range(1, 10_000):
            a_k, c_k = gains_at(sched, k)
            assert a_k < prev_a
            assert c_k < prev_c
            prev_a, prev_c = a_k, c_k

    def test_defaults_scale_damping_with_dimension(self):
        assert default_gains(2).A == 4.0
        assert default_gains(4).A == 8.0

    def test_invalid_parameters_rejected(self):
        with pytest.raises(InvalidGain):
            GainSchedule(a=0.0, A=0.0, s=1.0, b=1.0, r=1.0)
        with pytest.raises(InvalidGain):
            GainSchedule(a=1.0, A=-1.0, s=1.0, b=1.0, r=1.0)
        with pytest.raises(InvalidGain):
            GainSchedule(a=1.0, A=0.0, s=1.0, b=-0.5, r=1.0)


class TestPerturbation:
    def test_values_come_from_fourth_roots(self):
        rng = np.random.default_rng(3)
        allowed = set(PERTURBATION_VALUES)
        for _ in range(200):
            delta = sample_perturbation(4, rng)
            assert delta.shape == (4,)
            assert all(v in allowed for v in delta)

    def test_components_are_uniform(self):
        rng = np.random.default_rng(5)
        draws = np.concatenate([sample_perturbation(5, rng) for _ in range(20_000)])
        for value in PERTURBATION_VALUES:
            freq = np.mean(draws == value)
            assert abs(freq - 0.25) < 0.005

    def test_deterministic_under_seed(self):
        a = sample_perturbation(6, np.random.default_rng(11))
        b = sample_perturbation(6, np.random.default_rng(11))
        assert np.array_equal(a, b)


class TestProbes:
    def test_linear_in_gain(self):
        z = np.array([1.0, 1j], dtype=complex)
        delta = np.array([1.0, -1j], dtype=complex)
        state = CspsaState(iterate=z, k=0)
        plus, minus = probes(state, delta, 0.5)
        assert np.allclose(plus, z + 0.5 * delta)
        assert np.allclose(minus, z - 0.5 * delta)

    def test_probes_not_normalized(self):
        z = np.array([1.0, 0.0], dtype=complex)
        delta = np.array([1.0, 1.0], dtype=complex)
        plus, _ = probes(CspsaState(iterate=z, k=0), delta, 0.1)
        assert abs(np.linalg.norm(plus) - 1.0) > 1e-3


class TestGradientEstimate:
    def test_enumerated_average_recovers_displacement(self):
        # For the quadratic f(y) = |y - w|^2 the single-sample estimate g
        # satisfies E_delta[g] = z - w, and the average over all 4^d
        # perturbation vectors is exact.  Enumerate them for d = 2.
        rng = np.random.default_rng(0)
        z = np.array([0.3 + 0.1j, -0.4 + 0.9j])
        w = np.array([0.7 - 0.2j, 0.1 + 0.5j])
        c_k = 0.35
        total = np.zeros(2, dtype=complex)
        values = np.array(PERTURBATION_VALUES)
        count = 0
        for d0 in values:
            for d1 in values:
                delta = np.array([d0, d1])
                f_plus = np.sum(np.abs(z + c_k * delta - w) ** 2)
                f_minus = np.sum(np.abs(z - c_k * delta - w) ** 2)
                total += gradient_estimate(f_plus, f_minus, c_k, delta)
                count += 1
        assert count == 16
        assert np.allclose(total / count, z - w, atol=1e-12)

    def test_antisymmetric_in_function_values(self):
        delta = np.array([1j, -1.0])
        g1 = gradient_estimate(2.0, 1.0, 0.1, delta)
        g2 = gradient_estimate(1.0, 2.0, 0.1, delta)
        assert np.allclose(g1, -g2)

    def test_zero_gain_rejected(self):
        with pytest.raises(InvalidGain):
            gradient_estimate(1.0, 0.0, 0.0, np.array([1.0 + 0j]))


class TestStep:
    def test_moves_against_gradient(self):
        state = CspsaState(iterate=np.array([1.0, 0.0], dtype=complex), k=3)
        g = np.array([0.5, 0.0], dtype=complex)
        new = step(state, g, 1.0)
        assert np.allclose(new.iterate, [0.5, 0.0])
        assert new.k == 4

    def test_degenerate_result_rejected(self):
        state = CspsaState(iterate=np.array([1.0, 0.0], dtype=complex), k=0)
        g = np.array([1.0, 0.0], dtype=complex)
        with pytest.raises(DegenerateIterate):
            step(state, g, 1.0)
