"""Dyadic blocks, cutoff profiles, Besov/Sobolev norms, kernel constants."""

import numpy as np
import pytest

from conftest import rel_err
from nseb import (
    BesovParams,
    ConfigError,
    GridSpec,
    SpectralField,
    besov_norm,
    decompose,
    lp_norm,
    partial_sum,
    random_band_field,
    sobolev_norm,
    to_physical,
)
from nseb.dyadic import (
    bandpass_weight,
    bernstein_constant,
    bernstein_young_bounds,
    block_weights,
    crit_integrand_profile,
    embedding_constant,
    lowpass_weight,
    partition_defect,
    sobolev_norm_multiplier,
)
from nseb.fields import gradient_norm_sq
from nseb.oracles import block_convolution
from test_fields import single_mode_field


class TestProfiles:
    def test_plateau_and_support(self):
        assert lowpass_weight(0.5) == 1.0
        assert lowpass_weight(1.0) == 1.0
        assert lowpass_weight(2.0) == 0.0
        assert lowpass_weight(3.0) == 0.0

    def test_band_support_arithmetic(self):
        assert bandpass_weight(1.0) == 0.0
        assert bandpass_weight(4.0) == 0.0
        assert bandpass_weight(0.5) == 0.0

    def test_midpoint_symmetry(self):
        assert abs(lowpass_weight(1.5) - 0.5) < 1e-15
        assert abs(bandpass_weight(1.5) - 0.5) < 1e-15
        r = np.linspace(1.01, 1.99, 101)
        assert np.abs(lowpass_weight(1.5 + (r - 1.5)) + lowpass_weight(1.5 - (r - 1.5)) - 1).max() < 1e-14

    def test_monotone_on_transition(self):
        r = np.linspace(1.0, 2.0, 501)
        w = lowpass_weight(r)
        assert np.all(np.diff(w) <= 1e-15)

    def test_partition_of_unity(self):
        radii = np.linspace(0.0, 512.0, 10_000)
        assert partition_defect(radii, 8) <= 1e-12

    def test_values_in_unit_interval(self):
        r = np.linspace(0, 10, 2001)
        for w in (lowpass_weight(r), bandpass_weight(r)):
            assert np.all((0.0 <= w) & (w <= 1.0))


class TestDecompose:
    def test_single_low_mode_in_lowpass_block(self, grid16):
        f = single_mode_field(grid16, 1, (1, 0, 0), -0.5j)
        dec = decompose(f)
        assert rel_err(dec.block(-1).coeffs, f.coeffs) < 1e-15
        for q in range(0, dec.q_max + 1):
            assert np.abs(dec.block(q).coeffs).max() == 0.0

    def test_mode_at_radius_three_splits_in_half(self, grid16):
        f = single_mode_field(grid16, 0, (3, 0, 0), 1.0 + 0.5j)
        dec = decompose(f)
        assert rel_err(dec.block(0).coeffs, 0.5 * f.coeffs) < 1e-14
        assert rel_err(dec.block(1).coeffs, 0.5 * f.coeffs) < 1e-14
        for q in (-1, 2, 3):
            assert np.abs(dec.block(q).coeffs).max() < 1e-16

    def test_block_support(self, field32):
        dec = decompose(field32)
        kmag = field32.grid.k_mag
        for q in range(0, dec.q_max + 1):
            outside = (kmag <= 2.0**q) | (kmag >= 2.0 ** (q + 2))
            assert np.abs(dec.block(q).coeffs[:, outside]).max() == 0.0
        outside = kmag >= 2.0
        assert np.abs(dec.block(-1).coeffs[:, outside]).max() == 0.0

    def test_reconstruction(self, field32):
        dec = decompose(field32)
        rec = partial_sum(dec, dec.q_max)
        assert rel_err(rec.coeffs, field32.coeffs) < 1e-12

    def test_matches_convolution_oracle(self, grid16):
        f = random_band_field(grid16, seed=40, k_min=1, k_max=5)
        dec = decompose(f)
        qs = [0, 1, 2]
        direct = block_convolution(f, qs)
        for i, q in enumerate(qs):
            assert rel_err(to_physical(dec.block(q)).values, direct[i]) < 1e-8

    def test_norms_populated(self, field32):
        dec = decompose(field32)
        for q in dec.qs:
            b = dec.norms[q]
            phys = to_physical(dec.block(q))
            assert b.l2 == pytest.approx(lp_norm(phys, 2), rel=1e-14)
            assert b.l3 == pytest.approx(lp_norm(phys, 3), rel=1e-14)
            assert b.linf == pytest.approx(lp_norm(phys, np.inf), rel=1e-14)


class TestPartialSum:
    def test_equals_lowpass_multiplier(self, field32):
        dec = decompose(field32)
        for q in (-1, 0, 2):
            summed = partial_sum(dec, q)
            w = lowpass_weight(field32.grid.k_mag / 2.0 ** (q + 1))
            assert rel_err(summed.coeffs, field32.coeffs * w) < 1e-13

    def test_lowest_is_first_block(self, field32):
        dec = decompose(field32)
        assert rel_err(partial_sum(dec, -1).coeffs, dec.block(-1).coeffs) < 1e-15

    def test_residual_telescopes(self, field32):
        dec = decompose(field32)
        q = 1
        low = partial_sum(dec, q).coeffs
        high = sum(dec.block(p).coeffs for p in range(q + 1, dec.q_max + 1))
        assert rel_err(low + high, field32.coeffs) < 1e-12


class TestBesovNorm:
    def test_zero_field(self, grid16):
        f = SpectralField(grid16, np.zeros((3, 16, 16, 16), dtype=complex))
        assert besov_norm(decompose(f), BesovParams(-1.0, np.inf)) == 0.0

    def test_lowpass_block_weight_is_two(self, grid16):
        f = single_mode_field(grid16, 1, (1, 0, 0), -0.5j)
        dec = decompose(f)
        a = dec.norms[-1].linf
        assert besov_norm(dec, BesovParams(-1.0, np.inf)) == pytest.approx(2 * a, rel=1e-14)

    def test_matches_oracle_blocks(self, grid16):
        f = random_band_field(grid16, seed=41, k_min=1, k_max=5)
        dec = decompose(f)
        qs = dec.qs
        direct = block_convolution(f, qs)
        cell = grid16.cell_volume
        expected = max(
            2.0**-q * np.sqrt((direct[i] ** 2).sum(axis=0)).max()
            for i, q in enumerate(qs)
        )
        assert besov_norm(dec, BesovParams(-1.0, np.inf)) == pytest.approx(expected, rel=1e-8)

    def test_homogeneous_degree_one(self, field32):
        dec1 = decompose(field32)
        dec3 = decompose(3.0 * field32)
        p = BesovParams(-1.0, np.inf)
        assert besov_norm(dec3, p) == pytest.approx(3.0 * besov_norm(dec1, p), rel=1e-12)

    def test_crit_profile_drops_when_block_removed(self, field32):
        dec = decompose(field32)
        profile = crit_integrand_profile(dec, r=3.0)
        full = profile.max()
        for i in range(len(profile)):
            assert np.delete(profile, i).max() <= full + 1e-18


class TestSobolevNorm:
    def test_s_zero_close_to_l2(self, field_battery32):
        for f in field_battery32[:3]:
            dec = decompose(f)
            ratio = sobolev_norm(dec, 0.0) / lp_norm(to_physical(f), 2)
            assert 0.5 <= ratio <= 2.0

    def test_single_mode(self, grid16):
        f = single_mode_field(grid16, 1, (1, 0, 0), -0.5j)
        dec = decompose(f)
        s = 0.7
        assert sobolev_norm(dec, s) == pytest.approx(
            2.0**-s * dec.norms[-1].l2, rel=1e-14
        )

    def test_s_one_vs_gradient_norm(self, field_battery32):
        for f in field_battery32[:3]:
            dec = decompose(f)
            ratio = sobolev_norm(dec, 1.0) / np.sqrt(gradient_norm_sq(f))
            assert 0.25 <= ratio <= 4.0

    def test_multiplier_cross_check(self, field32):
        # dyadic and (1+|k|^2)^(s/2) versions agree up to overlap constants
        dyadic = sobolev_norm(decompose(field32), 0.5)
        mult = sobolev_norm_multiplier(field32, 0.5)
        assert 0.25 <= dyadic / mult <= 4.0


class TestBernstein:
    def test_equal_exponents(self):
        assert bernstein_constant(2, 2) == 1.0
        assert bernstein_constant(3, 3) == 1.0

    def test_rejects_bad_exponents(self):
        with pytest.raises(ConfigError):
            bernstein_constant(4, np.inf)
        with pytest.raises(ConfigError):
            bernstein_constant(np.inf, 2)

    def test_amplitude_invariance(self, grid16):
        f = random_band_field(grid16, seed=42, k_min=1, k_max=5)
        dec1 = decompose(f)
        dec2 = decompose(10.0 * f)
        scale = 3.0 / 2.0
        for q in dec1.qs:
            if dec1.norms[q].l2 == 0.0:
                continue
            r1 = dec1.norms[q].linf / (2.0 ** (q * scale) * dec1.norms[q].l2)
            r2 = dec2.norms[q].linf / (2.0 ** (q * scale) * dec2.norms[q].l2)
            assert r1 == pytest.approx(r2, rel=1e-12)

    def test_measured_below_kernel_bound(self, grid32, field_battery32):
        bounds = bernstein_young_bounds(grid32, 2, np.inf)
        for f in field_battery32:
            dec = decompose(f)
            for q in dec.qs:
                b = dec.norms[q]
                if b.l2 == 0.0:
                    continue
                measured = b.linf / (2.0 ** (q * 1.5) * b.l2)
                assert measured <= bounds[q] * (1 + 1e-12)

    def test_battery_constant_finite(self):
        c = bernstein_constant(2, np.inf, num_fields=3)
        assert np.isfinite(c) and c > 0.0


class TestEmbeddingConstant:
    def test_besov_bounded_by_l3(self, field_battery32, grid32):
        c_emb = embedding_constant(grid32)
        for f in field_battery32:
            lhs = besov_norm(decompose(f), BesovParams(-1.0, np.inf))
            rhs = lp_norm(to_physical(f), 3)
            assert lhs <= c_emb * rhs * (1 + 1e-12)

    def test_constant_is_order_one(self, grid32):
        assert 0.1 < embedding_constant(grid32) < 10.0
