"""Tests for cubic envelopes, counterexamples and collocation amplification sums."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from specmp import stability_lab as sl
from specmp.schemes import f_tau


def dense_envelope(tau, alpha, n=200_001):
    x = np.linspace(-alpha, alpha, n)
    return float(np.max(np.abs(f_tau(x, tau))))


def trapezoid(x):
    tri = 1 - 4 * np.abs(((x + 0.25) % 1) - 0.5)
    return np.clip(4 * tri, -1, 1)


class TestEnvelope:
    @pytest.mark.parametrize("tau, alpha, expected", [
        (0.5, 1.0, 1.0),
        (2.0, math.sqrt(2), math.sqrt(2)),
        (1.0, 2.0, 4.0),
    ])
    def test_reference_values(self, tau, alpha, expected):
        r = sl.cubic_envelope(tau, alpha)
        assert r.envelope == pytest.approx(expected, abs=1e-14)
        assert r.envelope == pytest.approx(dense_envelope(tau, alpha), abs=1e-8)

    def test_unit_step_interior_maximum(self):
        r = sl.cubic_envelope(1.0, 2.0)
        assert r.critical_value == pytest.approx(1.0887, abs=1e-4)
        assert r.attained_at == "endpoint"

    def test_landmarks(self):
        r = sl.cubic_envelope(0.5, 3.0)
        assert r.critical_point == pytest.approx(1.0)
        assert r.reflection == pytest.approx(math.sqrt(5))
        assert r.zero == pytest.approx(math.sqrt(3))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            sl.cubic_envelope(0.0, 1.0)

    @given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
    @settings(max_examples=60, deadline=None)
    def test_matches_sampling_and_bounds_samples(self, tau, alpha):
        r = sl.cubic_envelope(tau, alpha)
        assert r.envelope >= abs(f_tau(alpha, tau)) - 1e-12
        if r.critical_point <= alpha:
            assert r.envelope >= r.critical_value - 1e-12
        assert r.envelope >= r.sampled - 1e-12
        assert r.envelope == pytest.approx(r.sampled, rel=1e-6, abs=1e-9)

    @given(st.floats(0.01, 5.0), st.floats(0.01, 5.0), st.floats(0.0, 2.0))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_alpha(self, tau, a, da):
        assert sl.cubic_envelope(tau, a + da, 2).envelope >= sl.cubic_envelope(tau, a, 2).envelope - 1e-12

    @given(st.floats(1e-3, 0.5), st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_contractive_range_small_tau(self, tau, u):
        hi = math.sqrt(1 + 2 / tau)
        alpha = 1 + u * (hi - 1)
        env = sl.cubic_envelope(tau, alpha, 2).envelope
        assert env <= alpha * (1 + 1e-12)
        if 1e-6 < u < 1 - 1e-6:
            assert env < alpha

    @given(st.floats(0.5, 2.0), st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_contractive_range_moderate_tau(self, tau, u):
        lo = (2 / 3) * (1 + tau) ** 1.5 / math.sqrt(3 * tau)
        hi = math.sqrt((2 + tau) / tau)
        assume(hi - lo > 1e-9)
        alpha = lo + u * (hi - lo)
        env = sl.cubic_envelope(tau, alpha, 2).envelope
        assert env <= alpha * (1 + 1e-12)
        if 1e-6 < u < 1 - 1e-6:
            assert env < alpha

    @given(st.floats(0.05, 2.0))
    @settings(max_examples=30, deadline=None)
    def test_expands_beyond_reflection_point(self, tau):
        alpha = 1.01 * math.sqrt((2 + tau) / tau)
        assert sl.cubic_envelope(tau, alpha, 2).envelope > alpha


class TestIteration:
    def test_monotone_to_one(self):
        r = sl.prototype_iteration(0.25, 0.0, 2.0)
        assert r.lower_ok and r.upper_ok and not r.diverged
        n = np.arange(r.alphas.size)
        assert np.all(r.alphas[1:] <= 1 + 0.5 ** n[1:] + 1e-12)
        assert np.all(np.diff(r.alphas) <= 1e-15)
        assert r.alphas[-1] == pytest.approx(1.0, abs=1e-12)

    def test_sandwich_with_forcing(self):
        r = sl.prototype_iteration(0.25, 1e-3, 2.0)
        assert r.lower_ok and r.upper_ok

    def test_diverges_for_large_step(self):
        r = sl.prototype_iteration(3.0, 0.0, 2 / 3, n_max=50)
        assert r.diverged or r.alphas.max() > 1e3
        assert np.argmax(r.alphas > 1e3) <= 50

    @given(st.floats(2.05, 6.0))
    @settings(max_examples=20, deadline=None)
    def test_critical_start_escapes(self, tau):
        x = math.sqrt((1 + tau) / (3 * tau))
        for _ in range(400):
            x = f_tau(x, tau)
            if abs(x) > 1e6:
                break
        assert abs(x) > 1e6

    @given(st.floats(0.01, 0.5), st.floats(0.1, 2.0), st.floats(0.0, 1e-2))
    @settings(max_examples=40, deadline=None)
    def test_sandwich_property(self, tau, alpha0, eta):
        r = sl.prototype_iteration(tau, eta, alpha0, n_max=40)
        assert r.upper_ok
        if alpha0 >= 1:
            assert r.lower_ok


class TestTau1:
    def test_root(self):
        t = sl.tau1_root()
        assert t.root == pytest.approx(0.860018, abs=5e-7)
        assert t.root == pytest.approx(t.closed_form, abs=1e-12)
        assert abs(t.residual) < 1e-12

    def test_closed_form_independent(self):
        r6 = math.sqrt(6)
        closed = 0.5 * (-2 + (9 - 3 * r6) ** (1 / 3) + (9 + 3 * r6) ** (1 / 3))
        x = closed
        lhs = 0.5 + 1 / x
        rhs = 1.5 * ((2 / 3) * (1 + x) ** 1.5 / math.sqrt(3 * x)) ** 2
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_margin_nonnegative_on_grid(self):
        m = sl.tau1_margin()
        assert m.size == 10_000 and np.all(m >= 0)


class TestCounterexamples:
    def test_small_tau_overshoot(self):
        w = sl.counterexample_prop_small_tau()
        assert w.overshoot > w.threshold == pytest.approx(3 * 0.05**2 / 8)

    def test_tau2_overshoot(self):
        w = sl.counterexample_tau2(0.05)
        lo, hi = w.window
        assert lo <= w.N <= hi
        assert w.u0_function_max <= math.sqrt(2) + 1e-15
        assert w.overshoot > 0
        assert -w.u1_at_origin > math.sqrt(2)

    def test_tau2_identity_two_routes(self):
        w = sl.counterexample_tau2(0.05)
        # spectral route and real-space quadrature route agree, and both equal the squared negative part
        assert w.t_eta_origin_spectral == pytest.approx(w.t_eta_origin_quadrature, rel=1e-10)
        assert w.t_eta_origin_quadrature == pytest.approx(w.neg_part_l2sq, rel=1e-10)
        assert w.pos_pairing == 0.0
        assert w.t_eta_origin_quadrature == pytest.approx(w.pos_pairing - w.neg_pairing, rel=1e-12)
        assert w.t_eta_origin_spectral > 0

    def test_tau2_positive_kernel_raises(self):
        with pytest.raises(ValueError, match="window mismatch"):
            sl.counterexample_tau2(0.05, N=1000)


class TestAmplification:
    def test_heat_table(self):
        b = sl.heat_beta(1.0, 3)
        np.testing.assert_allclose(b, [0.54934, 0.219568, 0.0031275, 0.00413676], rtol=0, atol=5e-6)
        assert b[0] + 2 * b[1:].sum() >= 1.002

    def test_resolvent_table(self):
        b = sl.resolvent_beta(0.5, 4)
        np.testing.assert_allclose(b, [0.639093, 0.165881, 0.00883796, 0.00691018, -0.00220351], rtol=0, atol=5e-7)
        assert b[0] + 2 * np.abs(b[1:4]).sum() > 1.0023

    def test_table_against_direct_quadrature(self):
        b = math.pi**2 / 4
        for j in (0, 3, 11):
            ref, _ = integrate.quad(lambda s: math.exp(-b * s * s) * math.cos(math.pi * j * s), 0, 1,
                                    epsabs=1e-14, limit=200)
            assert sl.heat_beta(1.0, j)[j] == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("b", [0.05, 0.3])
    def test_closed_form_matches_table(self, b):
        k0 = 2 * math.sqrt(b) / math.pi
        N = 64
        a = sl.heat_amplification(N, (k0 / (2 * N)) ** 2)
        assert a.closed_form == pytest.approx(a.table_total, abs=1e-9)
        assert a.direct == pytest.approx(a.table_total, abs=1e-3)

    def test_closed_form_limit(self):
        assert sl.heat_closed_form(1e-12) == pytest.approx(1.0, abs=1e-10)
        assert sl.heat_closed_form(0.0) == 1.0

    @given(st.integers(2, 64), st.floats(1e-7, 1.0))
    @settings(max_examples=30, deadline=None)
    def test_heat_mass_at_least_one(self, half, t):
        a = sl.heat_amplification(2 * half, t, J=8)
        assert a.direct >= 1 - 1e-12
        assert a.node_weights.sum() == pytest.approx(1.0, abs=1e-12)

    @given(st.integers(2, 64), st.floats(1e-7, 1.0), st.integers(1, 20))
    @settings(max_examples=30, deadline=None)
    def test_resolvent_mass_at_least_one(self, half, tau, n):
        assert sl.resolvent_amplification(2 * half, tau, n, J=8).direct >= 1 - 1e-12

    @pytest.mark.parametrize("b", [0.05, 0.2, 0.5])
    def test_sign_structure_small_parameter(self, b):
        k0 = 2 * math.sqrt(b) / math.pi
        for beta in (sl.heat_beta(k0, 20), sl.resolvent_beta(k0 / 2, 20)):
            j = np.arange(beta.size)
            assert np.all(beta[(j % 2 == 1)] >= 0)
            assert np.all(beta[(j % 2 == 0) & (j > 0)] <= 0)

    def test_large_time_heat(self):
        N = 256
        a = sl.heat_amplification(N, 100 * math.log(N) / N**2, J=8)
        assert a.direct - 1 <= 1 / N

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_large_step_resolvent(self, n):
        N = 256
        assert sl.resolvent_amplification(N, 0.5, n, J=8).direct - 1 <= 1 / N

    def test_bridge_identity(self):
        exact, integral = sl.bridge_identity(1 + 0.3 * 4, 5)
        assert integral == pytest.approx(exact, rel=1e-12)

    def test_odd_N_rejected(self):
        with pytest.raises(ValueError):
            sl.heat_amplification(9, 0.1)
        with pytest.raises(ValueError):
            sl.resolvent_amplification(9, 0.1)


class TestAdversarial:
    @pytest.mark.parametrize("mode", ["heat", "resolvent"])
    def test_overshoot_at_512(self, mode):
        a = sl.adversarial_data(512, mode)
        assert np.max(np.abs(a.values)) <= 1.0
        assert abs(a.achieved) >= 1.001
        assert a.witness == 128 and a.buffer == 8

    def test_buffer_is_zero(self):
        a = sl.adversarial_data(256)
        for j in range(4, a.buffer + 1):
            assert a.values[(a.witness + j) % 256] == 0 and a.values[(a.witness - j) % 256] == 0

    def test_small_N_rejected(self):
        with pytest.raises(ValueError):
            sl.adversarial_data(32)

    @pytest.mark.parametrize("mode", ["heat", "resolvent"])
    def test_smooth_samples_do_not_overshoot(self, mode):
        for N in (64, 256, 1024):
            x = np.arange(N) / N
            assert sl.step_overshoot(np.sin(2 * np.pi * x), mode) <= 1e-12

    @pytest.mark.parametrize("mode", ["heat", "resolvent"])
    def test_continuous_data_controlled_by_modulus(self, mode):
        over = []
        for N in (64, 256, 1024, 4096):
            x = np.arange(N) / N
            o = sl.step_overshoot(trapezoid(x), mode)
            assert o <= sl.modulus_of_continuity(trapezoid, N ** (-2 / 3))
            over.append(o)
        assert all(b < a for a, b in zip(over, over[1:]))

    def test_modulus_of_linear_pieces(self):
        assert sl.modulus_of_continuity(trapezoid, 0.01) == pytest.approx(0.16, abs=1e-3)
