"""Transforms, projection, dealiased products, and lattice norms."""

import numpy as np
import pytest

from conftest import rel_err
from nseb import (
    ConfigError,
    GridSpec,
    PhysicalField,
    SpectralField,
    dealiased_product,
    kinetic_energy,
    leray_project,
    lp_norm,
    random_band_field,
    to_physical,
    to_spectral,
)
from nseb.fields import divergence_defect, l2_inner
from nseb.oracles import direct_dft, direct_idft, quadrature_l2_sq, zero_pad_product


def single_mode_field(grid, component, k, amplitude):
    """Hermitian pair amplitude * e^{ikx} + conj at -k."""
    coeffs = np.zeros((3, grid.n, grid.n, grid.n), dtype=complex)
    idx = tuple(int(ki) % grid.n for ki in k)
    neg = tuple(int(-ki) % grid.n for ki in k)
    coeffs[(component,) + idx] = amplitude
    coeffs[(component,) + neg] = np.conj(amplitude)
    return SpectralField(grid, coeffs)


class TestGridSpec:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ConfigError):
            GridSpec(24)
        with pytest.raises(ConfigError):
            GridSpec(4)

    def test_rejects_bad_fraction(self):
        with pytest.raises(ConfigError):
            GridSpec(16, dealias_fraction=0.0)
        with pytest.raises(ConfigError):
            GridSpec(16, dealias_fraction=1.2)

    @pytest.mark.parametrize("n,expected", [(16, 3), (32, 4), (64, 5)])
    def test_q_max(self, n, expected):
        assert GridSpec(n).q_max == expected

    def test_dealias_mask_cut(self, grid32):
        cut = grid32.dealias_fraction * grid32.n / 2
        inside = np.abs(grid32.k1) <= cut
        assert grid32.dealias_mask[:, 0, 0].tolist() == inside.tolist()


class TestTransforms:
    def test_zero_field(self, grid16):
        f = SpectralField(grid16, np.zeros((3, 16, 16, 16), dtype=complex))
        assert np.all(to_physical(f).values == 0.0)

    def test_single_mode_is_sine(self, grid16):
        # uhat(k=(1,0,0)) = (0, -i/2, 0) plus the conjugate mode -> (0, sin x1, 0)
        f = single_mode_field(grid16, 1, (1, 0, 0), -0.5j)
        x = grid16.axis_points()
        expected = np.sin(x)[:, None, None] * np.ones((1, 16, 16))
        phys = to_physical(f)
        assert rel_err(phys.values[1], expected) < 1e-14
        assert np.abs(phys.values[[0, 2]]).max() < 1e-15

    def test_inverse_pair_of_sine(self, grid16):
        x = grid16.axis_points()
        values = np.zeros((3, 16, 16, 16))
        values[1] = np.sin(x)[:, None, None]
        f = to_spectral(PhysicalField(grid16, values))
        assert abs(f.coeffs[1, 1, 0, 0] - (-0.5j)) < 1e-15
        assert abs(f.coeffs[1, -1, 0, 0] - 0.5j) < 1e-15

    def test_constant_field_only_zero_mode(self, grid16):
        values = np.full((3, 16, 16, 16), 2.5)
        f = to_spectral(PhysicalField(grid16, values))
        assert abs(f.coeffs[0, 0, 0, 0] - 2.5) < 1e-14
        off = f.coeffs.copy()
        off[:, 0, 0, 0] = 0.0
        assert np.abs(off).max() < 1e-14

    def test_matches_direct_dft_oracle(self, grid16):
        f = random_band_field(grid16, seed=31, k_min=1, k_max=5, energy=1.0)
        phys = to_physical(f)
        assert rel_err(direct_dft(grid16, phys.values), f.coeffs) < 1e-10
        assert rel_err(direct_idft(grid16, f.coeffs).real, phys.values) < 1e-10

    @pytest.mark.parametrize("n", [16, 32, 64])
    def test_roundtrip(self, n):
        grid = GridSpec(n)
        f = random_band_field(grid, seed=n, k_min=1, k_max=n // 4, energy=1.0)
        g = to_spectral(to_physical(f))
        assert rel_err(g.coeffs, f.coeffs) < 1e-13

    def test_parseval(self, field32):
        lattice = lp_norm(to_physical(field32), 2) ** 2
        assert abs(lattice - kinetic_energy(field32)) < 1e-12 * lattice


class TestLerayProjection:
    def test_divergence_free_unchanged(self, field32):
        proj = leray_project(field32)
        assert rel_err(proj.coeffs, field32.coeffs) < 1e-14

    def test_pure_gradient_killed(self, grid16):
        rng = np.random.default_rng(5)
        scalar = rng.standard_normal((16, 16, 16)) + 1j * rng.standard_normal((16, 16, 16))
        coeffs = np.stack(
            [1j * grid16.kx * scalar, 1j * grid16.ky * scalar, 1j * grid16.kz * scalar]
        )
        proj = leray_project(SpectralField(grid16, coeffs))
        assert np.abs(proj.coeffs[:, 1:, 1:, 1:]).max() < 1e-13 * np.abs(scalar).max()

    def test_idempotent_and_solenoidal(self, grid32):
        rng = np.random.default_rng(6)
        f = to_spectral(PhysicalField(grid32, rng.standard_normal((3, 32, 32, 32))))
        p1 = leray_project(f)
        p2 = leray_project(p1)
        assert divergence_defect(p1) < 1e-12
        assert rel_err(p2.coeffs, p1.coeffs) < 1e-12

    def test_self_adjoint(self, grid32):
        rng = np.random.default_rng(7)
        f = to_spectral(PhysicalField(grid32, rng.standard_normal((3, 32, 32, 32))))
        g = to_spectral(PhysicalField(grid32, rng.standard_normal((3, 32, 32, 32))))
        lhs = l2_inner(leray_project(f), g)
        rhs = l2_inner(f, leray_project(g))
        assert abs(lhs - rhs) < 1e-12 * abs(lhs)


class TestDealiasedProduct:
    def test_zero_factor(self, grid16, field32):
        zero = SpectralField(grid16, np.zeros((3, 16, 16, 16), dtype=complex))
        other = random_band_field(grid16, seed=8, k_min=1, k_max=4)
        assert np.abs(dealiased_product(zero, other)).max() == 0.0

    def test_grid_mismatch(self, grid16, grid32):
        f = random_band_field(grid16, 1, 1, 4)
        g = random_band_field(grid32, 1, 1, 4)
        with pytest.raises(ConfigError):
            dealiased_product(f, g)

    def test_low_modes_exact_convolution(self, grid16):
        # sin x1 * sin x1 = 1/2 - cos(2 x1)/2: modes 0 and +-2 only
        f = single_mode_field(grid16, 0, (1, 0, 0), -0.5j)
        tensor = dealiased_product(f, f)
        t00 = tensor[0, 0]
        assert abs(t00[0, 0, 0] - 0.5) < 1e-15
        assert abs(t00[2, 0, 0] + 0.25) < 1e-15
        assert abs(t00[-2, 0, 0] + 0.25) < 1e-15
        probe = t00.copy()
        probe[0, 0, 0] = probe[2, 0, 0] = probe[-2, 0, 0] = 0.0
        assert np.abs(probe).max() < 1e-16

    def test_matches_zero_padding_oracle(self, grid32):
        f = random_band_field(grid32, seed=9, k_min=1, k_max=10)
        g = random_band_field(grid32, seed=10, k_min=1, k_max=10)
        assert rel_err(dealiased_product(f, g), zero_pad_product(f, g)) < 1e-10

    def test_bilinear_and_symmetric(self, grid16):
        f = random_band_field(grid16, seed=11, k_min=1, k_max=5)
        g = random_band_field(grid16, seed=12, k_min=1, k_max=5)
        left = dealiased_product(f, g)
        right = dealiased_product(g, f)
        assert rel_err(left, right.transpose(1, 0, 2, 3, 4)) < 1e-14
        scaled = dealiased_product(2.0 * f, g)
        assert rel_err(scaled, 2.0 * left) < 1e-14


class TestLpNorm:
    def test_sine_l2(self, grid32):
        f = single_mode_field(grid32, 0, (1, 0, 0), -0.5j)
        norm_sq = lp_norm(to_physical(f), 2) ** 2
        assert abs(norm_sq - (2 * np.pi) ** 3 / 2) < 1e-12 * norm_sq

    def test_zero_field(self, grid16):
        z = PhysicalField(grid16, np.zeros((3, 16, 16, 16)))
        for p in (2, 3, np.inf):
            assert lp_norm(z, p) == 0.0

    def test_taylor_green_energy_vs_quadrature_oracle(self, grid32):
        from nseb.solver import SolverConfig, TaylorGreen, initial_field

        config = SolverConfig(
            grid32, nu=0.1, dt=1e-3, t_end=1e-3, snapshot_interval=1e-3,
            initial_condition=TaylorGreen(1.0),
        )
        u0 = initial_field(config)
        norm_sq = lp_norm(to_physical(u0), 2) ** 2
        oracle = quadrature_l2_sq(
            lambda x, y, z: np.sin(x) * np.cos(y) * np.cos(z)
        ) + quadrature_l2_sq(lambda x, y, z: -np.cos(x) * np.sin(y) * np.cos(z))
        assert abs(oracle - 2 * np.pi**3) < 1e-10 * oracle
        assert abs(norm_sq - oracle) < 1e-10 * oracle

    def test_rejects_unsupported_exponent(self, grid16):
        z = PhysicalField(grid16, np.zeros((3, 16, 16, 16)))
        with pytest.raises(ConfigError):
            lp_norm(z, 4)
