import math

import numpy as np
import pytest
import scipy.integrate

from chlab.spectral import (
    Field,
    GridSpec,
    ResolutionWarning,
    Spectrum,
    antiderivative,
    apply_multiplier,
    cosine_field,
    dealias,
    dealiased_product,
    derivative,
    embed_zero_padded,
    lp_norm,
    make_grid,
    nonlocal_P,
    random_band_limited,
    sine_field,
    to_field,
    to_spectrum,
)

from util import slow_dft, slow_idft


@pytest.fixture
def grid():
    return make_grid(16.0, 256)


class TestMakeGrid:
    def test_spacing_and_nyquist(self):
        g = make_grid(64.0, 4096)
        assert g.dx == 0.03125
        assert np.isclose(g.xi_max, np.pi * 4096 / 128.0)  # pi*N/(2L) = 32*pi

    def test_unit_frequencies_on_pi_domain(self):
        g = make_grid(np.pi, 16)
        assert np.allclose(g.xi, np.arange(-8, 8))

    def test_rejects_odd_n(self):
        with pytest.raises(ValueError):
            make_grid(64.0, 15)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            make_grid(-1.0, 256)
        with pytest.raises(ValueError):
            make_grid(16.0, 8)

    def test_exact_grid_identities(self):
        g = make_grid(64.0, 4096)
        assert g.dx * g.N == 2 * g.L
        assert g.xi[g.N // 2 + 1] == np.pi / g.L


class TestTransforms:
    def test_sine_has_two_lines(self, grid):
        u = sine_field(grid, 1)
        c = to_spectrum(u).coefficients
        mid = grid.N // 2
        big = np.abs(c) > 1e-10 * np.max(np.abs(c))
        assert set(np.nonzero(big)[0]) == {mid - 1, mid + 1}
        # sin(xi_1 x) has coefficients -i*L at +xi_1 and +i*L at -xi_1
        assert np.isclose(c[mid + 1], -1j * grid.L)
        assert np.isclose(c[mid - 1], 1j * grid.L)

    def test_matches_slow_dft(self, grid):
        rng = np.random.default_rng(7)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 4)
        c = to_spectrum(u).coefficients
        ref = slow_dft(u)
        assert np.max(np.abs(c - ref)) <= 1e-9 * np.max(np.abs(ref))

    def test_inverse_matches_slow_idft(self, grid):
        rng = np.random.default_rng(8)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 4)
        spec = to_spectrum(u)
        ref = slow_idft(spec)
        assert np.max(np.abs(to_field(spec).samples - ref.real)) <= 1e-12

    def test_round_trip(self, grid):
        rng = np.random.default_rng(1)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 3)
        v = to_field(to_spectrum(u))
        assert np.max(np.abs(v.samples - u.samples)) <= 1e-12 * lp_norm(u, math.inf)

    def test_parseval_on_cosine(self, grid):
        u = cosine_field(grid, 3)
        c = to_spectrum(u).coefficients
        phys = grid.dx * np.sum(u.samples**2)
        spec = np.sum(np.abs(c) ** 2) / (2.0 * grid.L)
        assert abs(phys - spec) <= 1e-10 * phys

    def test_parseval_random(self, grid):
        rng = np.random.default_rng(2)
        for _ in range(5):
            u = random_band_limited(grid, rng, band_xi=grid.xi_max / 2)
            c = to_spectrum(u).coefficients
            phys = grid.dx * np.sum(u.samples**2)
            spec = np.sum(np.abs(c) ** 2) / (2.0 * grid.L)
            assert abs(phys - spec) <= 1e-10 * phys

    def test_hermitian_symmetry_of_real_fields(self, grid):
        rng = np.random.default_rng(3)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 2)
        spec = to_spectrum(u)
        assert spec.hermitian_defect() <= 1e-12 * np.max(np.abs(spec.coefficients))

    def test_hermitian_defect_flags_lone_line(self, grid):
        c = np.zeros(grid.N, dtype=complex)
        c[grid.N // 2 + 5] = 1.0  # lone positive-frequency line
        assert Spectrum(grid, c).hermitian_defect() == 1.0

    def test_grid_mismatch_rejected(self, grid):
        other = make_grid(16.0, 512)
        with pytest.raises(ValueError, match="grid mismatch"):
            Field(grid, np.zeros(grid.N)) + Field(other, np.zeros(other.N))


class TestApplyMultiplier:
    def test_identity(self, grid):
        rng = np.random.default_rng(4)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 2)
        v = apply_multiplier(u, lambda xi: np.ones_like(xi))
        assert np.max(np.abs(v.samples - u.samples)) <= 1e-12

    def test_differentiation_multiplier(self, grid):
        k = 5
        u = sine_field(grid, k)
        v = apply_multiplier(u, lambda xi: 1j * xi)
        expected = (k * np.pi / grid.L) * cosine_field(grid, k).samples
        assert np.max(np.abs(v.samples - expected)) <= 1e-10

    def test_helmholtz_inverse_line(self, grid):
        k = 4
        xi_k = k * np.pi / grid.L
        u = cosine_field(grid, k)
        v = apply_multiplier(u, lambda xi: 1.0 / (1.0 + xi**2))
        assert np.max(np.abs(v.samples - u.samples / (1.0 + xi_k**2))) <= 1e-12

    def test_linearity(self, grid):
        rng = np.random.default_rng(5)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 2)
        v = random_band_limited(grid, rng, band_xi=grid.xi_max / 2)
        m = lambda xi: 1j * xi / (1.0 + xi**2)
        left = apply_multiplier(2.0 * u + 3.0 * v, m)
        right = 2.0 * apply_multiplier(u, m) + 3.0 * apply_multiplier(v, m)
        scale = max(lp_norm(left, math.inf), 1e-30)
        assert np.max(np.abs(left.samples - right.samples)) <= 1e-12 * scale

    def test_rejects_non_hermitian_multiplier(self, grid):
        u = sine_field(grid, 1)
        with pytest.raises(ValueError, match="Hermitian"):
            apply_multiplier(u, lambda xi: (xi > 0).astype(complex))

    def test_rejects_non_finite_multiplier(self, grid):
        u = sine_field(grid, 1)

        def m(xi):
            with np.errstate(divide="ignore"):
                return 1.0 / xi

        with pytest.raises(ValueError, match="finite"):
            apply_multiplier(u, m)


class TestDerivative:
    def test_constant_maps_to_zero(self, grid):
        u = Field(grid, np.full(grid.N, 3.7))
        assert lp_norm(derivative(u), math.inf) <= 1e-12

    def test_sine(self, grid):
        u = sine_field(grid, 2)
        xi2 = 2 * np.pi / grid.L
        expected = xi2 * cosine_field(grid, 2).samples
        assert np.max(np.abs(derivative(u).samples - expected)) <= 1e-10

    def test_against_centered_differences(self):
        # FD oracle: centered differences converge at order dx^2 with
        # constant max|f'''|/6.
        g = make_grid(16.0, 1024)
        u = Field(g, np.sin(3 * np.pi / g.L * g.x) + 0.5 * np.cos(5 * np.pi / g.L * g.x))
        du = derivative(u).samples
        fd = (np.roll(u.samples, -1) - np.roll(u.samples, 1)) / (2 * g.dx)
        k3, k5 = 3 * np.pi / g.L, 5 * np.pi / g.L
        c_fd = (k3**3 + 0.5 * k5**3) / 6.0
        assert np.max(np.abs(du - fd)) <= 1.1 * c_fd * g.dx**2

    def test_warns_on_unresolved_field(self, grid):
        rng = np.random.default_rng(6)
        u = Field(grid, rng.standard_normal(grid.N))  # white noise: full band
        with pytest.warns(ResolutionWarning):
            derivative(u)

    def test_antiderivative_inverts_on_zero_mean(self, grid):
        rng = np.random.default_rng(9)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 3)
        u = u - Field(grid, np.full(grid.N, float(np.mean(u.samples))))
        v = antiderivative(derivative(u))
        assert np.max(np.abs(v.samples - u.samples)) <= 1e-10 * lp_norm(u, math.inf)

    def test_antiderivative_rejects_nonzero_mean(self, grid):
        u = Field(grid, np.full(grid.N, 1.0))
        with pytest.raises(ValueError, match="zero-mean"):
            antiderivative(u)


class TestNonlocalP:
    def test_zero(self, grid):
        z = Field(grid, np.zeros(grid.N))
        assert lp_norm(nonlocal_P(z), math.inf) == 0.0

    def test_constant(self, grid):
        u = Field(grid, np.full(grid.N, 2.0))
        assert lp_norm(nonlocal_P(u), math.inf) <= 1e-12

    def test_sine_closed_form(self):
        # On an integer-pi torus, u = sin(x) gives u^2 + u_x^2/2
        # = 3/4 - cos(2x)/4, and the multiplier at xi = 2 yields
        # P(u) = -(1/10) sin(2x).
        g = make_grid(4 * np.pi, 512)
        u = Field(g, np.sin(g.x))
        expected = -0.1 * np.sin(2 * g.x)
        assert np.max(np.abs(nonlocal_P(u).samples - expected)) <= 1e-12


class TestLpNorm:
    def test_zero(self, grid):
        assert lp_norm(Field(grid, np.zeros(grid.N)), 2) == 0.0

    def test_constant_sup(self, grid):
        assert lp_norm(Field(grid, np.full(grid.N, -2.5)), math.inf) == 2.5

    def test_sine_l2_quadrature_oracle(self, grid):
        u = sine_field(grid, 1)
        ref, _ = scipy.integrate.quad(
            lambda x: np.sin(np.pi / grid.L * x) ** 2, -grid.L, grid.L
        )
        assert abs(lp_norm(u, 2) - math.sqrt(ref)) <= 1e-10 * math.sqrt(ref)
        assert np.isclose(lp_norm(u, 2), math.sqrt(grid.L))

    def test_rejects_p_below_one(self, grid):
        with pytest.raises(ValueError):
            lp_norm(sine_field(grid, 1), 0.5)

    def test_zero_padding_preserves_norms(self, grid):
        rng = np.random.default_rng(10)
        u = random_band_limited(grid, rng, band_xi=grid.xi_max / 2)
        big = make_grid(2 * grid.L, 2 * grid.N)
        v = embed_zero_padded(u, big)
        for p in (1.0, 2.0, 4.0, math.inf):
            assert lp_norm(v, p) >= lp_norm(u, p) * (1 - 1e-14)
            assert np.isclose(lp_norm(v, p), lp_norm(u, p), rtol=1e-12)


class TestDealias:
    def test_product_of_band_limited_fields_is_exact(self, grid):
        # Modes low enough that the product is alias-free: dealiased and
        # plain products must agree.
        u = sine_field(grid, 5)
        v = cosine_field(grid, 7)
        w = dealiased_product(u, v)
        assert np.max(np.abs(w.samples - u.samples * v.samples)) <= 1e-12

    def test_top_third_removed(self, grid):
        kc = grid.dealias_mode_cutoff
        u = sine_field(grid, kc + 3)
        w = dealias(u)
        assert lp_norm(w, math.inf) <= 1e-12

    def test_aliasing_junk_removed(self, grid):
        # Squaring a mode just above half-Nyquist aliases on the raw grid;
        # the 2/3 rule must keep the retained band exact.
        k = grid.N // 2 - 10
        u = cosine_field(grid, k)
        w = dealiased_product(u, u)
        assert lp_norm(w, math.inf) <= 1e-12  # inputs are zeroed first
