"""Brute-force reference implementations used to validate the fast paths.

Everything here avoids the FFT-multiplier route it is meant to check:
transforms are direct summations of the defining formula, band blocks are
physical-space circular convolutions with the periodized kernel, products
are evaluated on a zero-padded lattice. These run in O(n^4)--O(n^6) and are
only meant for small grids inside tests and the CLI selftest.
"""

from __future__ import annotations

import numpy as np

from .dyadic import block_weights
from .fields import PhysicalField, SpectralField
from .grid import GridSpec


def _dft_matrix(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n)
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, j) / n)


def direct_dft(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """Mode amplitudes by direct summation (per-axis DFT matrices, no FFT)."""
    e = _dft_matrix(grid.n)
    return np.einsum("ai,bj,dk,cijk->cabd", e, e, e, values, optimize=True) / grid.n**3


def direct_idft(grid: GridSpec, coeffs: np.ndarray) -> np.ndarray:
    """Lattice samples sum_k c_k exp(i k . x) by direct summation."""
    e = np.conj(_dft_matrix(grid.n))
    return np.einsum("ai,bj,dk,cabd->cijk", e, e, e, coeffs, optimize=True)


def periodized_kernels(grid: GridSpec, qs: list[int]) -> np.ndarray:
    """Lattice samples of the periodized band kernels, one per requested q."""
    weights = block_weights(grid)
    stacked = np.stack([weights[q].astype(complex) for q in qs])
    return direct_idft(grid, stacked).real


def block_convolution(f: SpectralField, qs: list[int]) -> np.ndarray:
    """Dyadic blocks via direct circular convolution with the periodized
    kernel: u_q(x) = (1/n^3) sum_y K_q(y) u(x - y). Returns physical values,
    shape (len(qs), 3, n, n, n)."""
    grid = f.grid
    n = grid.n
    kernels = periodized_kernels(grid, qs).reshape(len(qs), -1)
    u = direct_idft(grid, f.coeffs).real
    tiled = np.tile(u, (1, 2, 2, 2))
    acc = np.zeros((len(qs), 3, n, n, n))
    flat = 0
    for jx in range(n):
        for jy in range(n):
            for jz in range(n):
                shifted = tiled[:, n - jx : 2 * n - jx, n - jy : 2 * n - jy, n - jz : 2 * n - jz]
                acc += kernels[:, flat, None, None, None, None] * shifted
                flat += 1
    return acc / n**3


def commutator_direct(f: SpectralField, qs: list[int]) -> np.ndarray:
    """r_q(u, u) via the defining displacement integral, by direct summation:

        r_q(x) = (1/n^3) sum_y K_q(y) (u(x-y) - u(x)) (x) (u(x-y) - u(x)).

    Returns physical tensor values, shape (len(qs), 3, 3, n, n, n). Only
    comparable with the dealiased algebraic route when the field is band
    limited so that products neither alias nor spill past the retained band
    (|k_i| <= n/6 suffices with the 2/3 rule).
    """
    grid = f.grid
    n = grid.n
    kernels = periodized_kernels(grid, qs).reshape(len(qs), -1)
    u = direct_idft(grid, f.coeffs).real
    tiled = np.tile(u, (1, 2, 2, 2))
    acc = np.zeros((len(qs), 3, 3, n, n, n))
    flat = 0
    for jx in range(n):
        for jy in range(n):
            for jz in range(n):
                shifted = tiled[:, n - jx : 2 * n - jx, n - jy : 2 * n - jy, n - jz : 2 * n - jz]
                diff = shifted - u
                outer = diff[:, None] * diff[None, :]
                acc += kernels[:, flat, None, None, None, None, None] * outer
                flat += 1
    return acc / n**3


def zero_pad_product(f: SpectralField, g: SpectralField) -> np.ndarray:
    """u (x) v on a doubled lattice (alias-free), truncated to the retained
    band of the original grid; the reference for dealiased_product."""
    grid = f.grid
    n, m = grid.n, 2 * grid.n
    mask = grid.dealias_mask

    def pad(coeffs):
        out = np.zeros((3, m, m, m), dtype=complex)
        src = np.fft.fftshift(coeffs * mask, axes=(1, 2, 3))
        lo = m // 2 - n // 2
        out_sh = np.zeros_like(out)
        out_sh[:, lo : lo + n, lo : lo + n, lo : lo + n] = src
        return np.fft.ifftshift(out_sh, axes=(1, 2, 3))

    fu = np.fft.ifftn(pad(f.coeffs), axes=(1, 2, 3)) * m**3
    gu = np.fft.ifftn(pad(g.coeffs), axes=(1, 2, 3)) * m**3
    prod = fu.real[:, None] * gu.real[None, :]
    big = np.fft.fftn(prod, axes=(2, 3, 4)) / m**3

    big_sh = np.fft.fftshift(big, axes=(2, 3, 4))
    lo = m // 2 - n // 2
    out = np.fft.ifftshift(
        big_sh[:, :, lo : lo + n, lo : lo + n, lo : lo + n], axes=(2, 3, 4)
    )
    out *= mask
    return out


def quadrature_l2_sq(values_fn, n_ref: int = 128) -> float:
    """High-resolution lattice quadrature of ||g||_2^2 for a callable field
    g(x, y, z), used to pin closed-form norms independently."""
    x = np.arange(n_ref) * (2.0 * np.pi / n_ref)
    xx, yy, zz = np.meshgrid(x, x, x, indexing="ij")
    g = values_fn(xx, yy, zz)
    return float(np.sum(np.asarray(g) ** 2) * (2.0 * np.pi / n_ref) ** 3)
