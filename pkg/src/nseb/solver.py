"""Pseudo-spectral integrator for unforced incompressible Navier-Stokes.

Time stepping is classical 4-stage Runge-Kutta applied in integrating-factor
variables exp(nu |k|^2 t) uhat(k, t), so the stiff viscous term is handled
exactly and the observable order is that of the advective part. The
nonlinear term is the projected divergence of the 2/3-dealiased tensor
u (x) u, which is energy-neutral on the retained band to roundoff.

The integration loop runs in the half (rfft) spectrum; snapshots are
expanded to the full complex lattice on emission.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .errors import ConfigError, NumericalAbort
from .fields import (
    PhysicalField,
    SpectralField,
    fft_workers,
    lp_norm,
    random_band_field,
    to_physical,
    to_spectral,
)
from .grid import GridSpec

_SYM = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
_SYM_ROWS = ((0, 1, 2), (1, 3, 4), (2, 4, 5))  # row i of the tensor in 6-pack indices


@dataclass(frozen=True)
class TaylorGreen:
    """amplitude * (sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0)."""

    amplitude: float = 1.0


@dataclass(frozen=True)
class RandomBandLimited:
    """Random solenoidal field on k_min <= |k| <= k_max with given energy."""

    seed: int
    k_min: float
    k_max: float
    energy: float = 1.0


InitialCondition = Union[TaylorGreen, RandomBandLimited]


@dataclass(frozen=True)
class SolverConfig:
    grid: GridSpec
    nu: float
    dt: float
    t_end: float
    snapshot_interval: float
    initial_condition: InitialCondition

    def __post_init__(self):
        if self.nu <= 0.0:
            raise ConfigError(f"nu must be positive, got {self.nu}")
        if self.dt <= 0.0 or self.t_end <= 0.0 or self.snapshot_interval <= 0.0:
            raise ConfigError("dt, t_end and snapshot_interval must be positive")
        if _divisor_mismatch(self.t_end, self.dt):
            raise ConfigError("t_end must be an integer multiple of dt")
        if _divisor_mismatch(self.snapshot_interval, self.dt):
            raise ConfigError("snapshot_interval must be an integer multiple of dt")

    @property
    def total_steps(self) -> int:
        return round(self.t_end / self.dt)

    @property
    def snapshot_stride(self) -> int:
        return round(self.snapshot_interval / self.dt)


def _divisor_mismatch(span: float, dt: float) -> bool:
    ratio = span / dt
    return abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1


@dataclass
class EnergyLedger:
    """Per-step kinetic energy and cumulative dissipation 2 nu int ||grad u||^2.

    For smooth decaying runs kinetic[i] + dissipation_integral[i] stays equal
    to kinetic[0] up to integrator tolerance, which verifies the energy
    budget with equality.
    """

    times: np.ndarray
    kinetic: np.ndarray
    dissipation_integral: np.ndarray

    def energy_residual(self) -> float:
        """max over recorded time pairs of |E(t) + D(t) - D(t0) - E(t0)|."""
        invariant = self.kinetic + self.dissipation_integral
        return float(invariant.max() - invariant.min())


def initial_field(config: SolverConfig) -> SpectralField:
    """Divergence-free, zero-mean initial snapshot for the configured run."""
    ic = config.initial_condition
    grid = config.grid
    if isinstance(ic, TaylorGreen):
        x, y, z = grid.meshgrid()
        values = np.stack(
            [
                ic.amplitude * np.sin(x) * np.cos(y) * np.cos(z),
                -ic.amplitude * np.cos(x) * np.sin(y) * np.cos(z),
                np.zeros_like(x),
            ]
        )
        f = to_spectral(PhysicalField(grid, values), time=0.0, nu=config.nu)
        return SpectralField(grid, f.coeffs * grid.dealias_mask, 0.0, config.nu)
    if isinstance(ic, RandomBandLimited):
        return random_band_field(
            grid, ic.seed, ic.k_min, ic.k_max, ic.energy, time=0.0, nu=config.nu
        )
    raise ConfigError(f"unknown initial condition {ic!r}")


class _HalfSpectrum:
    """Half (rfft) spectrum workspace bound to one grid."""

    def __init__(self, grid: GridSpec):
        self.grid = grid
        self.n3 = grid.n**3
        self.mask = grid.dealias_mask_half
        self.kvec = (grid.kx, grid.ky, grid.kz_half)
        k_sq = grid.k_sq_half
        self.k_sq = k_sq
        self.k_sq_safe = np.where(k_sq == 0.0, 1.0, k_sq)
        self.parseval_weight = grid.hermitian_weight

    def from_field(self, f: SpectralField) -> np.ndarray:
        nh = self.grid.n // 2 + 1
        return np.ascontiguousarray(f.coeffs[:, :, :, :nh])

    def to_field(self, h: np.ndarray, time: float, nu: float) -> SpectralField:
        values = self.to_values(h)
        return to_spectral(PhysicalField(self.grid, values), time=time, nu=nu)

    def to_values(self, h: np.ndarray) -> np.ndarray:
        n = self.grid.n
        return sfft.irfftn(
            h * self.n3, s=(n, n, n), axes=(1, 2, 3), workers=fft_workers()
        )

    def energy(self, h: np.ndarray) -> float:
        return float(
            self.grid.volume * np.sum(self.parseval_weight * np.abs(h) ** 2)
        )

    def gradient_norm_sq(self, h: np.ndarray) -> float:
        return float(
            self.grid.volume
            * np.sum(self.parseval_weight * self.k_sq * np.abs(h) ** 2)
        )

    def nonlinear(self, h: np.ndarray) -> np.ndarray:
        """-P[div(u (x) u)] with 2/3 dealiasing, in half-spectrum layout."""
        workers = fft_workers()
        n = self.grid.n
        u = sfft.irfftn(
            h * (self.mask * self.n3), s=(n, n, n), axes=(1, 2, 3), workers=workers
        )
        prod = _kernels.outer_product_sym(u)
        unique = np.stack([prod[i, j] for i, j in _SYM])
        t_hat = sfft.rfftn(unique, axes=(1, 2, 3), workers=workers) / self.n3
        t_hat *= self.mask
        kx, ky, kz = self.kvec
        out = np.empty_like(h)
        for i, (a, b, c) in enumerate(_SYM_ROWS):
            out[i] = -1j * (kx * t_hat[a] + ky * t_hat[b] + kz * t_hat[c])
        dot = (kx * out[0] + ky * out[1] + kz * out[2]) / self.k_sq_safe
        out[0] -= kx * dot
        out[1] -= ky * dot
        out[2] -= kz * dot
        return out


class _Stepper:
    """Integrating-factor RK4 bound to a fixed (grid, nu, dt)."""

    def __init__(self, ws: _HalfSpectrum, nu: float, dt: float):
        self.ws = ws
        self.dt = dt
        self.half_decay = np.exp(-nu * ws.k_sq * (dt / 2.0))
        self.full_decay = self.half_decay * self.half_decay

    def advance(self, h: np.ndarray) -> np.ndarray:
        ws, dt = self.ws, self.dt
        e, e2 = self.half_decay, self.full_decay
        n1 = ws.nonlinear(h)
        n2 = ws.nonlinear(e * (h + (dt / 2.0) * n1))
        n3 = ws.nonlinear(e * h + (dt / 2.0) * n2)
        n4 = ws.nonlinear(e2 * h + dt * (e * n3))
        return e2 * h + (dt / 6.0) * (e2 * n1 + 2.0 * (e * (n2 + n3)) + n4)


def step(u: SpectralField, dt: float) -> SpectralField:
    """Advance one snapshot by a single RK4 step; output stays solenoidal."""
    ws = _HalfSpectrum(u.grid)
    h = _Stepper(ws, u.nu, dt).advance(ws.from_field(u))
    if not np.isfinite(ws.energy(h)):
        raise NumericalAbort(
            f"non-finite state after step at t={u.time + dt:.6g} (check CFL)"
        )
    return ws.to_field(h, time=u.time + dt, nu=u.nu)


def cfl_limit(u0: SpectralField) -> float:
    """Advective step bound 0.5 * dx / ||u||_inf from the given snapshot."""
    umax = lp_norm(to_physical(u0), np.inf)
    if umax == 0.0:
        return np.inf
    return 0.5 * u0.grid.spacing / umax


def run(config: SolverConfig) -> tuple[list[SpectralField], EnergyLedger]:
    """Integrate to t_end; return snapshots at the configured interval plus
    the per-step energy ledger. Aborts cleanly on non-finite states."""
    u0 = initial_field(config)
    bound = cfl_limit(u0)
    if config.dt > bound:
        raise ConfigError(
            f"dt={config.dt} exceeds the advective CFL bound {bound:.5g} "
            "computed from the initial data"
        )

    ws = _HalfSpectrum(config.grid)
    stepper = _Stepper(ws, config.nu, config.dt)
    h = ws.from_field(u0)

    steps = config.total_steps
    times = np.arange(steps + 1) * config.dt
    kinetic = np.empty(steps + 1)
    grad_sq = np.empty(steps + 1)
    kinetic[0] = ws.energy(h)
    grad_sq[0] = ws.gradient_norm_sq(h)

    snapshots = [u0]
    stride = config.snapshot_stride
    for i in range(1, steps + 1):
        h = stepper.advance(h)
        kinetic[i] = ws.energy(h)
        grad_sq[i] = ws.gradient_norm_sq(h)
        if not np.isfinite(kinetic[i]):
            raise NumericalAbort(
                f"non-finite energy at t={times[i]:.6g} after step {i} (check CFL)"
            )
        if i % stride == 0:
            snapshots.append(ws.to_field(h, time=float(times[i]), nu=config.nu))

    dissipation = np.zeros(steps + 1)
    np.cumsum(
        config.nu * config.dt * (grad_sq[:-1] + grad_sq[1:]), out=dissipation[1:]
    )
    ledger = EnergyLedger(times, kinetic, dissipation)
    return snapshots, ledger
