"""Periodic grid geometry and wavenumber bookkeeping.

The domain is the torus [0, 2*pi)^3 sampled on n points per axis, so the
wavenumber lattice is the integer cube {-n/2, ..., n/2 - 1}^3 and dyadic
shells 2^q fall exactly on lattice radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Cubic periodic grid: n points per axis on [0, 2*pi)^3.

    Parameters
    ----------
    n : int
        Points per axis; power of two, at least 8.
    domain_length : float
        Fixed to 2*pi; kept as a field so file headers are explicit.
    dealias_fraction : float
        Fraction of the Nyquist band retained in products (2/3 rule).
    """

    n: int
    domain_length: float = TWO_PI
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ConfigError(f"n must be a power of two >= 8, got {self.n}")
        if abs(self.domain_length - TWO_PI) > 1e-12 * TWO_PI:
            raise ConfigError("domain_length is fixed to 2*pi")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ConfigError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}"
            )

        n = self.n
        k1 = np.fft.fftfreq(n, d=1.0 / n)  # integer wavenumbers in FFT order
        kx = k1.reshape(n, 1, 1)
        ky = k1.reshape(1, n, 1)
        kz = k1.reshape(1, 1, n)
        k_sq = kx**2 + ky**2 + kz**2
        cut = self.dealias_fraction * n / 2.0
        mask = (np.abs(kx) <= cut) & (np.abs(ky) <= cut) & (np.abs(kz) <= cut)

        # Half-spectrum (rfft) layout along the last axis, for real fields.
        k1h = k1[: n // 2 + 1].copy()
        k1h[-1] = n // 2  # rfft Nyquist bin is +n/2
        kzh = k1h.reshape(1, 1, n // 2 + 1)
        k_sq_h = kx**2 + ky**2 + kzh**2
        mask_h = (np.abs(kx) <= cut) & (np.abs(ky) <= cut) & (np.abs(kzh) <= cut)
        # Hermitian multiplicity of each half-spectrum bin within the full cube.
        herm = np.full(n // 2 + 1, 2.0)
        herm[0] = 1.0
        herm[-1] = 1.0
        herm_weight = np.broadcast_to(herm.reshape(1, 1, -1), k_sq_h.shape)

        set_ = object.__setattr__
        set_(self, "k1", k1)
        set_(self, "kx", kx)
        set_(self, "ky", ky)
        set_(self, "kz", kz)
        set_(self, "k_sq", k_sq)
        set_(self, "k_mag", np.sqrt(k_sq))
        set_(self, "dealias_mask", mask)
        set_(self, "k1_half", k1h)
        set_(self, "kz_half", kzh)
        set_(self, "k_sq_half", k_sq_h)
        set_(self, "dealias_mask_half", mask_h)
        set_(self, "hermitian_weight", herm_weight)

    @property
    def spacing(self) -> float:
        return self.domain_length / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    @property
    def volume(self) -> float:
        return self.domain_length**3

    @property
    def q_max(self) -> int:
        """Largest dyadic index with a nonzero band multiplier on this lattice.

        ceil(log2(n * dealias_fraction / 2)), floored below by the shell that
        still covers the lattice corners so reconstruction is exact for any
        field living on the full cube.
        """
        from_fraction = math.ceil(math.log2(self.n * self.dealias_fraction / 2.0))
        corner = math.ceil(math.log2(math.sqrt(3.0) * self.n / 4.0))
        return max(from_fraction, corner)

    def axis_points(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    def meshgrid(self):
        x = self.axis_points()
        return np.meshgrid(x, x, x, indexing="ij")
