"""Tests for transforms, projections and spectral operators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specmp import fourier_core as fc
from specmp import kernel_lab


def random_field(N, d=1, seed=0):
    grid = fc.galerkin_grid(N, d=d)
    rng = np.random.default_rng(seed)
    return fc.SpectralField.from_values(grid, rng.standard_normal((grid.M,) * d))


def brute_force_convolution(a, b):
    """Coefficients of the product of two 1D band-limited series, truncated to the band of ``a``."""
    N = (a.size - 1) // 2
    out = np.zeros_like(a)
    for i, ki in enumerate(range(-N, N + 1)):
        for j, kj in enumerate(range(-N, N + 1)):
            k = ki + kj
            if abs(k) <= N:
                out[k + N] += a[i] * b[j]
    return out


class TestGridSpec:
    def test_galerkin_sample_count_dealiases_cubic(self):
        for N in (1, 5, 64, 300):
            g = fc.galerkin_grid(N)
            assert g.M >= 3 * (2 * N + 1)

    def test_collocation_requires_even(self):
        with pytest.raises(ValueError):
            fc.collocation_grid(7)

    def test_collocation_band(self):
        k = fc.collocation_grid(8).wavenumbers()
        assert k[0] == -3 and k[-1] == 4 and k.size == 8

    def test_galerkin_rejects_small_M(self):
        with pytest.raises(ValueError):
            fc.GridSpec(1, 4, 20, "galerkin")

    def test_nodes_uniform(self):
        g = fc.collocation_grid(6)
        np.testing.assert_allclose(g.nodes(), np.arange(6) / 6)


class TestSpectralField:
    def test_round_trip(self):
        u = random_field(12, seed=3)
        v = fc.SpectralField.from_coeffs(u.grid, u.coeffs)
        np.testing.assert_allclose(v.values, u.values, rtol=0, atol=1e-12 * np.abs(u.values).max())

    def test_band_only(self):
        u = random_field(5)
        assert u.coeff((9,)) == 0

    def test_evaluate_matches_nodes(self):
        u = random_field(6, seed=1)
        x = u.grid.nodes()
        np.testing.assert_allclose(u(x), u.values, atol=1e-12)

    def test_two_dimensional_evaluation(self):
        g = fc.galerkin_grid(3, d=2)
        f = fc.SpectralField.from_function(g, lambda x, y: np.cos(2 * np.pi * x) * np.sin(4 * np.pi * y))
        val = f(np.array([0.1]), np.array([0.3]))
        assert val[0] == pytest.approx(np.cos(0.2 * np.pi) * np.sin(1.2 * np.pi), abs=1e-12)

    @given(st.integers(1, 12), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_hermitian_symmetry(self, N, seed):
        u = random_field(N, seed=seed)
        np.testing.assert_allclose(u.coeffs, np.conj(u.coeffs[::-1]), atol=1e-12 * np.abs(u.coeffs).max())

    @given(st.integers(1, 12), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_parseval(self, N, seed):
        u = random_field(N, seed=seed)
        fine = u.sample(8 * (2 * N + 1))
        assert fc.l2_norm(u) ** 2 == pytest.approx(np.mean(fine**2), rel=1e-12)

    @given(st.integers(1, 10), st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_collocation_parseval_discrete_inner(self, half, seed):
        N = 2 * half
        U = np.random.default_rng(seed).standard_normal(N)
        f = fc.SpectralField.from_values(fc.collocation_grid(N), U)
        assert fc.discrete_inner(U, U) == pytest.approx(np.sum(np.abs(f.coeffs) ** 2), rel=1e-12)


class TestProjectGalerkin:
    def test_constant_fixed(self):
        g = fc.galerkin_grid(4)
        f = fc.SpectralField.from_values(g, np.full(g.M, 2.5))
        p = fc.project_galerkin(f, 2)
        np.testing.assert_allclose(p.values, 2.5)

    def test_mode_outside_band_removed(self):
        g = fc.galerkin_grid(4)
        f = fc.SpectralField.from_function(g, lambda x: np.cos(6 * np.pi * x))
        p = fc.project_galerkin(f, 2)
        assert np.max(np.abs(p.values)) < 1e-14

    def test_cutoff_too_large(self):
        with pytest.raises(ValueError, match="cutoff too large for grid"):
            fc.project_galerkin(random_field(3), 4)

    @given(st.integers(2, 10), st.integers(0, 2**31), st.data())
    @settings(max_examples=25, deadline=None)
    def test_idempotent_contraction(self, N, seed, data):
        n = data.draw(st.integers(0, N))
        f = random_field(N, seed=seed)
        p = fc.project_galerkin(f, n)
        pp = fc.project_galerkin(p, n)
        np.testing.assert_allclose(pp.coeffs, p.coeffs, atol=1e-14)
        assert fc.l2_norm(p) <= fc.l2_norm(f) * (1 + 1e-12)

    def test_sign_of_dirichlet_lower_bound_grows(self):
        # (Pi_N f)(0) for f = sign(D_N) equals ||D_N||_1, which grows like (4/pi^2) log N
        vals = []
        for N in (4, 16, 64, 256):
            m = kernel_lab.dirichlet_sign_masses(N)
            vals.append(m.pos_mass + m.neg_mass)
        assert all(b > a for a, b in zip(vals, vals[1:]))
        slope = np.polyfit(np.log([4, 16, 64, 256]), vals, 1)[0]
        assert 0.3 < slope < 0.5  # 4/pi^2 = 0.405

    def test_dirichlet_convolution_by_quadrature(self):
        # independent route: sample D_N * sign(D_N) at 0 on a fine grid
        N = 16
        x = (np.arange(200_000) + 0.5) / 200_000
        D = 1 + 2 * sum(np.cos(2 * np.pi * k * x) for k in range(1, N + 1))
        m = kernel_lab.dirichlet_sign_masses(N)
        assert np.mean(np.abs(D)) == pytest.approx(m.pos_mass + m.neg_mass, rel=1e-6)


class TestCollocationInterpolant:
    def test_constant(self):
        Q = fc.collocation_interpolant(np.ones(8))
        np.testing.assert_allclose(Q(np.linspace(0, 1, 33)), 1.0, atol=1e-14)

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            fc.collocation_interpolant(np.ones(5))

    def test_reproduces_symmetric_band_limited(self):
        N = 16
        rng = np.random.default_rng(4)
        a = rng.standard_normal(N // 2 + 1)
        b = rng.standard_normal(N // 2 + 1)

        def f(x):
            out = a[0] + a[N // 2] * np.cos(np.pi * N * x)
            for k in range(1, N // 2):
                out = out + a[k] * np.cos(2 * np.pi * k * x) + b[k] * np.sin(2 * np.pi * k * x)
            return out

        Q = fc.collocation_interpolant(f(np.arange(N) / N))
        x = np.random.default_rng(5).random(1024)
        np.testing.assert_allclose(Q(x), f(x), atol=1e-10)

    @given(st.integers(1, 16), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_nodes_reproduced(self, half, seed):
        N = 2 * half
        U = np.random.default_rng(seed).uniform(-1, 1, N)
        Q = fc.collocation_interpolant(U)
        np.testing.assert_allclose(Q(np.arange(N) / N), U, atol=1e-12)

    def test_cardinal_sum_matches(self):
        N = 12
        U = np.random.default_rng(2).standard_normal(N)
        x = np.array([0.013, 0.37, 0.811])
        direct = sum(U[j] * fc.interpolation_kernel(x - j / N, N) for j in range(N))
        np.testing.assert_allclose(fc.collocation_interpolant(U)(x), direct, atol=1e-12)

    @staticmethod
    def _even_block(N, lower):
        j = np.arange(N)
        return ((j % 2 == 0) & (j >= lower) & (j <= N / 10)).astype(float)

    def test_log_growth(self):
        # U = 1 on even j in [1, N/10]; |Q_N U(eps/N)| grows like log(N)/(2 pi)
        eps0 = 0.5
        vals = []
        Ns = [64, 128, 256, 512, 1024]
        for N in Ns:
            U = self._even_block(N, 1)
            direct = sum(fc.interpolation_kernel(eps0 / N - i / N, N) for i in np.nonzero(U)[0])
            q = fc.collocation_interpolant(U)(np.array([eps0 / N]))[0]
            assert q == pytest.approx(direct, abs=1e-10)
            vals.append(abs(q))
        slope = np.polyfit(np.log(Ns), vals, 1)[0]
        assert slope == pytest.approx(1 / (2 * np.pi), rel=0.05)

    def test_fixed_ratio_block_stays_bounded(self):
        # with the block on [N/100, N/10] the harmonic sum covers a fixed ratio,
        # so the value settles near log(10)/(2 pi) instead of growing
        vals = [abs(fc.collocation_interpolant(self._even_block(N, N / 100))(np.array([0.5 / N]))[0])
                for N in (256, 1024, 4096)]
        np.testing.assert_allclose(vals, np.log(10) / (2 * np.pi), rtol=0.05)


class TestOperators:
    def test_helmholtz_constant(self):
        g = fc.galerkin_grid(3)
        f = fc.SpectralField.from_values(g, np.full(g.M, 1.7))
        np.testing.assert_allclose(fc.apply_helmholtz_inverse(f, 0.3).values, 1.7)

    def test_helmholtz_single_mode(self):
        g = fc.galerkin_grid(3)
        f = fc.SpectralField.from_function(g, lambda x: np.cos(2 * np.pi * x))
        out = fc.apply_helmholtz_inverse(f, 1.0)
        assert out.coeff(1).real == pytest.approx(0.5 / (1 + 4 * np.pi**2), rel=1e-13)

    def test_helmholtz_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            fc.apply_helmholtz_inverse(random_field(2), 0.0)

    @given(st.integers(1, 10), st.floats(1e-4, 10), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_inverse_pair(self, N, beta, seed):
        f = random_field(N, seed=seed)
        back = fc.apply_helmholtz(fc.apply_helmholtz_inverse(f, beta), beta)
        np.testing.assert_allclose(back.coeffs, f.coeffs, atol=1e-12 * np.abs(f.coeffs).max())

    def test_derivative_of_sine(self):
        g = fc.galerkin_grid(4)
        f = fc.SpectralField.from_function(g, lambda x: np.sin(2 * np.pi * x))
        np.testing.assert_allclose(fc.derivative(f).values, 2 * np.pi * np.cos(2 * np.pi * g.nodes()), atol=1e-12)

    def test_collocation_nyquist_derivative_vanishes(self):
        N = 8
        U = np.cos(np.pi * N * np.arange(N) / N)
        d = fc.derivative(fc.SpectralField.from_values(fc.collocation_grid(N), U))
        assert np.max(np.abs(d.values)) < 1e-12

    def test_laplacian_multiplier(self):
        g = fc.galerkin_grid(4)
        f = fc.SpectralField.from_function(g, lambda x: np.cos(4 * np.pi * x))
        np.testing.assert_allclose(fc.laplacian(f).values, -16 * np.pi**2 * f.values, atol=1e-10)


class TestDealiasedProduct:
    def test_square_of_cosine(self):
        g = fc.galerkin_grid(4)
        u = fc.SpectralField.from_function(g, lambda x: np.cos(2 * np.pi * x))
        sq = fc.dealiased_product(u, u)
        assert sq.coeff(0).real == pytest.approx(0.5, abs=1e-15)
        assert sq.coeff(2).real == pytest.approx(0.25, abs=1e-15)

    def test_cube_of_cosine(self):
        g = fc.galerkin_grid(4)
        u = fc.SpectralField.from_function(g, lambda x: np.cos(2 * np.pi * x))
        cube = fc.dealiased_product(u, u, u)
        assert cube.coeff(1).real == pytest.approx(3 / 8, abs=1e-15)
        assert cube.coeff(3).real == pytest.approx(1 / 8, abs=1e-15)

    def test_mismatched_grids(self):
        with pytest.raises(ValueError, match="mismatched grids"):
            fc.dealiased_product(random_field(2), random_field(3))

    @given(st.integers(1, 16), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_matches_brute_force(self, N, seed):
        u, v = random_field(N, seed=seed), random_field(N, seed=seed + 1)
        got = fc.dealiased_product(u, v).coeffs
        want = brute_force_convolution(u.coeffs, v.coeffs)
        np.testing.assert_allclose(got, want, atol=1e-12 * max(1.0, np.abs(want).max()))

    def test_collocation_keeps_aliasing(self):
        N = 6
        U = np.sin(2 * np.pi * 2 * np.arange(N) / N)
        g = fc.collocation_grid(N)
        sq = fc.dealiased_product(fc.SpectralField.from_values(g, U), fc.SpectralField.from_values(g, U))
        np.testing.assert_allclose(sq.values, U * U, atol=1e-14)


class TestNorms:
    def test_linf_oversampled(self):
        g = fc.galerkin_grid(3)
        f = fc.SpectralField.from_function(g, lambda x: np.sin(2 * np.pi * x + 0.3))
        M = fc.galerkin_sample_size(3, factor=8)
        est = fc.linf_norm(f)
        # sampling misses the peak by at most half a grid cell
        assert 1 - (1 - np.cos(np.pi / M)) - 1e-14 <= est <= 1.0 + 1e-14

    def test_collocation_linf_is_node_max(self):
        U = np.array([0.1, -0.7, 0.3, 0.2])
        f = fc.SpectralField.from_values(fc.collocation_grid(4), U)
        assert fc.linf_norm(f) == 0.7
