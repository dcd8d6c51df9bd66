"""Fast oracle-equivalence checks behind the `nseb selftest` subcommand.

Each check compares a production path against an independent brute-force
route (direct DFT summation, physical-space circular convolution,
zero-padded products) or a closed-form identity, on small grids.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np
import scipy.fft as sfft

from .dyadic import decompose, partial_sum, partition_defect
from .fields import (
    PhysicalField,
    dealiased_product,
    divergence_defect,
    kinetic_energy,
    l2_inner,
    leray_project,
    lp_norm,
    random_band_field,
    to_physical,
    to_spectral,
)
from .flux import commutator
from .grid import GridSpec
from .oracles import block_convolution, commutator_direct, direct_dft, zero_pad_product
from .solver import SolverConfig, TaylorGreen, run


class CheckResult(NamedTuple):
    name: str
    passed: bool
    measured: float
    tolerance: float


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    denom = np.linalg.norm(b.ravel())
    return float(np.linalg.norm((a - b).ravel()) / (denom if denom else 1.0))


def _check_partition() -> CheckResult:
    radii = np.linspace(0.0, 2.0**9, 10_000)
    defect = partition_defect(radii, 8)
    return CheckResult("partition_of_unity", defect <= 1e-12, defect, 1e-12)


def _check_roundtrip(n: int) -> CheckResult:
    f = random_band_field(GridSpec(n), seed=3 + n, k_min=1, k_max=n / 4, energy=1.0)
    g = to_spectral(to_physical(f))
    err = _rel(g.coeffs, f.coeffs)
    return CheckResult(f"transform_roundtrip_n{n}", err <= 1e-13, err, 1e-13)


def _check_dft_oracle() -> CheckResult:
    grid = GridSpec(16)
    f = random_band_field(grid, seed=5, k_min=1, k_max=5, energy=1.0)
    phys = to_physical(f)
    err = _rel(direct_dft(grid, phys.values), f.coeffs)
    return CheckResult("direct_dft_oracle_n16", err <= 1e-10, err, 1e-10)


def _check_parseval() -> CheckResult:
    grid = GridSpec(32)
    f = random_band_field(grid, seed=7, k_min=1, k_max=9, energy=2.5)
    lattice = lp_norm(to_physical(f), 2) ** 2
    spectral = kinetic_energy(f)
    err = abs(lattice - spectral) / spectral
    return CheckResult("parseval_n32", err <= 1e-12, err, 1e-12)


def _check_leray() -> CheckResult:
    grid = GridSpec(32)
    rng = np.random.default_rng(11)
    f = to_spectral(PhysicalField(grid, rng.standard_normal((3, 32, 32, 32))))
    p1 = leray_project(f)
    p2 = leray_project(p1)
    idem = _rel(p2.coeffs, p1.coeffs)
    g = to_spectral(PhysicalField(grid, rng.standard_normal((3, 32, 32, 32))))
    adj = abs(l2_inner(leray_project(f), g) - l2_inner(f, leray_project(g)))
    adj /= abs(l2_inner(f, g)) + 1.0
    div = divergence_defect(p1)
    worst = max(idem, adj, div)
    return CheckResult("leray_projection_n32", worst <= 1e-12, worst, 1e-12)


def _check_reconstruction() -> CheckResult:
    grid = GridSpec(32)
    f = random_band_field(grid, seed=13, k_min=1, k_max=10, energy=1.0)
    rec = partial_sum(decompose(f), grid.q_max)
    err = _rel(rec.coeffs, f.coeffs)
    return CheckResult("block_reconstruction_n32", err <= 1e-12, err, 1e-12)


def _check_block_convolution() -> CheckResult:
    grid = GridSpec(16)
    f = random_band_field(grid, seed=17, k_min=1, k_max=5, energy=1.0)
    dec = decompose(f)
    qs = [0, 1, 2]
    direct = block_convolution(f, qs)
    worst = 0.0
    for i, q in enumerate(qs):
        spectral = to_physical(dec.block(q)).values
        worst = max(worst, _rel(spectral, direct[i]))
    return CheckResult("block_convolution_oracle_n16", worst <= 1e-8, worst, 1e-8)


def _check_zero_pad_product() -> CheckResult:
    grid = GridSpec(32)
    f = random_band_field(grid, seed=19, k_min=1, k_max=10, energy=1.0)
    g = random_band_field(grid, seed=23, k_min=1, k_max=10, energy=1.0)
    fast = dealiased_product(f, g)
    slow = zero_pad_product(f, g)
    err = _rel(fast, slow)
    return CheckResult("dealiased_product_oracle_n32", err <= 1e-10, err, 1e-10)


def _check_commutator_oracle() -> CheckResult:
    grid = GridSpec(16)
    f = random_band_field(grid, seed=29, k_min=1, k_max=2, energy=1.0)
    direct = commutator_direct(f, [1])[0]
    algebraic = sfft.ifftn(commutator(f, 1), axes=(2, 3, 4)).real * grid.n**3
    err = _rel(algebraic, direct)
    return CheckResult("commutator_oracle_n16", err <= 1e-8, err, 1e-8)


def _check_energy_budget() -> CheckResult:
    config = SolverConfig(
        GridSpec(16),
        nu=0.2,
        dt=5e-3,
        t_end=0.1,
        snapshot_interval=0.05,
        initial_condition=TaylorGreen(1.0),
    )
    _, ledger = run(config)
    rel = ledger.energy_residual() / ledger.kinetic[0]
    return CheckResult("energy_budget_n16", rel <= 1e-6, rel, 1e-6)


_CHECKS: list[Callable[[], CheckResult]] = [
    _check_partition,
    lambda: _check_roundtrip(16),
    lambda: _check_roundtrip(32),
    _check_dft_oracle,
    _check_parseval,
    _check_leray,
    _check_reconstruction,
    _check_block_convolution,
    _check_zero_pad_product,
    _check_commutator_oracle,
    _check_energy_budget,
]


def run_selftest(report=print) -> bool:
    """Run every check, print one pass/fail line each; True if all passed."""
    all_ok = True
    for check in _CHECKS:
        result = check()
        status = "PASS" if result.passed else "FAIL"
        report(
            f"[{status}] {result.name}: measured {result.measured:.3e} "
            f"(tolerance {result.tolerance:.0e})"
        )
        all_ok &= result.passed
    return all_ok
