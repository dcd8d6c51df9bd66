"""Vector fields on the periodic torus and their basic spectral operations.

Transform convention: coefficients are mode amplitudes, i.e.

    u(x) = sum_k uhat(k) exp(i k . x),

so a single stored mode reproduces that literal function on the lattice and
Parseval reads ||u||_2^2 = (2*pi)^3 * sum_k |uhat(k)|^2.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .errors import ConfigError
from .grid import GridSpec


def fft_workers() -> int:
    """Worker count for FFT calls; capped by the NSEB_THREADS env var."""
    cap = os.environ.get("NSEB_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        workers = max(1, min(workers, int(cap)))
    return workers


@dataclass(frozen=True)
class SpectralField:
    """Divergence-free velocity snapshot as complex Fourier coefficients.

    coeffs has shape (3, n, n, n) in NumPy FFT ordering. time and nu carry
    the snapshot's context through analysis pipelines.
    """

    grid: GridSpec
    coeffs: np.ndarray
    time: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        n = self.grid.n
        if self.coeffs.shape != (3, n, n, n):
            raise ConfigError(
                f"coeffs shape {self.coeffs.shape} does not match grid n={n}"
            )
        if self.coeffs.dtype != np.complex128:
            object.__setattr__(self, "coeffs", self.coeffs.astype(np.complex128))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _require_same_grid(self, other)
        return replace(self, coeffs=self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _require_same_grid(self, other)
        return replace(self, coeffs=self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return replace(self, coeffs=self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class PhysicalField:
    """Real-valued velocity samples, shape (3, n, n, n) in C order."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        n = self.grid.n
        if self.values.shape != (3, n, n, n):
            raise ConfigError(
                f"values shape {self.values.shape} does not match grid n={n}"
            )


def _require_same_grid(f, g):
    if f.grid != g.grid:
        raise ConfigError("fields live on different grids")


def to_physical(f: SpectralField) -> PhysicalField:
    """Inverse transform to lattice samples (real part; input is Hermitian)."""
    n3 = f.grid.n**3
    values = sfft.ifftn(f.coeffs, axes=(1, 2, 3), workers=fft_workers()) * n3
    return PhysicalField(f.grid, np.ascontiguousarray(values.real))


def to_spectral(g: PhysicalField, time: float = 0.0, nu: float = 0.0) -> SpectralField:
    """Forward transform of lattice samples to mode amplitudes."""
    n3 = g.grid.n**3
    coeffs = sfft.fftn(g.values, axes=(1, 2, 3), workers=fft_workers()) / n3
    return SpectralField(g.grid, coeffs, time=time, nu=nu)


def leray_project(f: SpectralField) -> SpectralField:
    """Remove the gradient part: uhat -> uhat - k (k . uhat) / |k|^2.

    The k = 0 mode is untouched. Idempotent and self-adjoint.
    """
    g = f.grid
    k_sq = np.where(g.k_sq == 0.0, 1.0, g.k_sq)
    dot = (g.kx * f.coeffs[0] + g.ky * f.coeffs[1] + g.kz * f.coeffs[2]) / k_sq
    out = np.empty_like(f.coeffs)
    out[0] = f.coeffs[0] - g.kx * dot
    out[1] = f.coeffs[1] - g.ky * dot
    out[2] = f.coeffs[2] - g.kz * dot
    return replace(f, coeffs=out)


def divergence_defect(f: SpectralField) -> float:
    """max_k |k . uhat(k)| normalized by the peak coefficient magnitude.

    Zero for a solenoidal field up to roundoff; normalizing by the peak
    (rather than per mode) keeps negligible roundoff-noise modes from
    dominating the ratio.
    """
    g = f.grid
    dot = np.abs(g.kx * f.coeffs[0] + g.ky * f.coeffs[1] + g.kz * f.coeffs[2])
    peak = _kernels.vector_magnitude(np.abs(f.coeffs)).max()
    if peak == 0.0:
        return 0.0
    return float(dot.max() / peak)


def dealiased_product(f: SpectralField, g: SpectralField) -> np.ndarray:
    """Spectral tensor of the pointwise product u (x) v, 2/3-rule dealiased.

    Both inputs are truncated to the retained band, multiplied pointwise in
    physical space, transformed back, and truncated identically. Returns a
    (3, 3, n, n, n) complex array with entry [i, j] = (u_i v_j)^hat.
    """
    _require_same_grid(f, g)
    grid = f.grid
    mask = grid.dealias_mask
    n3 = grid.n**3
    workers = fft_workers()
    fu = np.ascontiguousarray(
        (sfft.ifftn(f.coeffs * mask, axes=(1, 2, 3), workers=workers) * n3).real
    )
    if g is f or np.shares_memory(g.coeffs, f.coeffs):
        prod = _kernels.outer_product_sym(fu)
    else:
        gu = np.ascontiguousarray(
            (sfft.ifftn(g.coeffs * mask, axes=(1, 2, 3), workers=workers) * n3).real
        )
        prod = _kernels.outer_product(fu, gu)
    tensor = sfft.fftn(prod, axes=(2, 3, 4), workers=workers) / n3
    tensor *= mask
    return tensor


def lp_norm(g: PhysicalField, p: float) -> float:
    """Lattice quadrature of the L^p norm of |g| for p in {2, 3, inf}.

    |g| is the pointwise Euclidean magnitude; cells carry weight (2*pi/n)^3;
    p = inf is the lattice maximum.
    """
    mag = _kernels.vector_magnitude(g.values)
    if p == np.inf:
        return float(mag.max()) if mag.size else 0.0
    if p == 2:
        return float(np.sqrt(np.sum(mag**2) * g.grid.cell_volume))
    if p == 3:
        return float(np.cbrt(np.sum(mag**3) * g.grid.cell_volume))
    raise ConfigError(f"p must be 2, 3 or inf, got {p}")


def kinetic_energy(f: SpectralField) -> float:
    """||u||_2^2 evaluated spectrally via Parseval."""
    return float(f.grid.volume * np.sum(np.abs(f.coeffs) ** 2))


def gradient_norm_sq(f: SpectralField) -> float:
    """||grad u||_2^2 via the spectral multiplier |k|^2."""
    return float(f.grid.volume * np.sum(f.grid.k_sq * np.abs(f.coeffs) ** 2))


def l2_inner(f: SpectralField, g: SpectralField) -> float:
    """L^2 inner product of two real fields, evaluated spectrally."""
    _require_same_grid(f, g)
    return float(f.grid.volume * np.sum(f.coeffs * np.conj(g.coeffs)).real)


def gradient_tensor_physical(f: SpectralField, mask: np.ndarray | None = None) -> np.ndarray:
    """Physical-space gradient with layout out[j, i] = d_j u_i.

    Matches the project-wide trace convention tr[A . B] = sum_ij A_ij B_ji
    with (grad u)_ji = d_j u_i, so trace contractions pair directly.
    """
    g = f.grid
    n3 = g.n**3
    workers = fft_workers()
    kvec = (g.kx, g.ky, g.kz)
    coeffs = f.coeffs if mask is None else f.coeffs * mask
    out = np.empty((3, 3, g.n, g.n, g.n), dtype=np.float64)
    for j in range(3):
        for i in range(3):
            out[j, i] = (
                sfft.ifftn(1j * kvec[j] * coeffs[i], workers=workers) * n3
            ).real
    return out


def random_band_field(
    grid: GridSpec,
    seed: int,
    k_min: float,
    k_max: float,
    energy: float = 1.0,
    time: float = 0.0,
    nu: float = 0.0,
) -> SpectralField:
    """Random divergence-free field supported on k_min <= |k| <= k_max.

    Gaussian coefficients (Hermitian by construction), Leray-projected,
    restricted to the dealiased band, and rescaled to the requested energy.
    """
    band_limit = grid.dealias_fraction * grid.n / 2.0
    if k_max > band_limit:
        raise ConfigError(
            f"k_max={k_max} exceeds the dealiased band |k_i| <= {band_limit:.3f}"
        )
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((3, grid.n, grid.n, grid.n))
    coeffs = sfft.fftn(noise, axes=(1, 2, 3), workers=fft_workers()) / grid.n**3
    shell = (grid.k_mag >= k_min) & (grid.k_mag <= k_max)
    coeffs *= shell & grid.dealias_mask
    f = leray_project(SpectralField(grid, coeffs, time=time, nu=nu))
    f.coeffs[:, 0, 0, 0] = 0.0
    e = kinetic_energy(f)
    if e == 0.0:
        raise ConfigError("requested band contains no lattice modes")
    return replace(f, coeffs=f.coeffs * np.sqrt(energy / e))
