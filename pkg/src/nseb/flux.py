"""Frequency-localized energy flux, commutator decomposition, and the
weighted block-norm sums that bound the nonlinear term.

Index conventions, fixed project-wide: (u (x) v)_ij = u_i v_j,
(grad u)_ji = d_j u_i, and tr[A . B] = sum_ij A_ij B_ji, so

    flux_q = int tr[(u (x) u)_q . grad u_q] dx
           = sum_ij int (u_i u_j)_q d_j (u_q)_i dx.

Two per-band flux quantities coexist deliberately. localized_flux applies
the band multiplier to both factors, which is the quantity the dyadic
energy inequality controls (it arises from testing with the twice-filtered
block). shell_transfer applies one net multiplier, which makes the sum over
bands telescope to int tr[(u (x) u) . grad u] dx = 0 for solenoidal fields;
that exact cancellation is the incompressibility check. The twice-filtered
sum does not cancel (the multiplier enters squared), so it is reported but
never asserted to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .dyadic import BlockDecomposition, block_weights, decompose, lowpass_weight
from .errors import ConfigError
from .fields import SpectralField, dealiased_product, fft_workers
from .grid import GridSpec


def _tensor_to_physical(grid: GridSpec, tensor_hat: np.ndarray) -> np.ndarray:
    n3 = grid.n**3
    vals = sfft.ifftn(tensor_hat, axes=(2, 3, 4), workers=fft_workers()) * n3
    return np.ascontiguousarray(vals.real)


def _gradient_physical(
    grid: GridSpec, coeffs: np.ndarray, weight: np.ndarray | None = None
) -> np.ndarray:
    """out[j, i] = d_j u_i in physical space, optionally band-filtered."""
    n3 = grid.n**3
    workers = fft_workers()
    kvec = (grid.kx, grid.ky, grid.kz)
    src = coeffs if weight is None else coeffs * weight
    out = np.empty((3, 3, grid.n, grid.n, grid.n))
    for j in range(3):
        for i in range(3):
            out[j, i] = (sfft.ifftn(1j * kvec[j] * src[i], workers=workers) * n3).real
    return out


def localized_flux(u: SpectralField, q: int) -> float:
    """int tr[(u (x) u)_q . grad u_q] dx with the band multiplier on both
    factors (energy flux into band q, units energy/time)."""
    if q < -1:
        raise ConfigError(f"q must be >= -1, got {q}")
    tensor = dealiased_product(u, u)
    return _flux_from_tensor(u, tensor, q)


def _flux_from_tensor(u: SpectralField, tensor: np.ndarray, q: int) -> float:
    grid = u.grid
    w = block_weights(grid)[q]
    tq = _tensor_to_physical(grid, tensor * w)
    gq = _gradient_physical(grid, u.coeffs, w)
    return _kernels.trace_pair_sum(tq, gq) * grid.cell_volume


def shell_transfer(u: SpectralField, q: int) -> float:
    """int tr[(u (x) u)_q . grad u] dx; sums over q telescope to zero for
    solenoidal fields (incompressibility cancellation)."""
    if q < -1:
        raise ConfigError(f"q must be >= -1, got {q}")
    tensor = dealiased_product(u, u)
    return _transfer_from_tensor(u, tensor, q)


def _transfer_from_tensor(u: SpectralField, tensor: np.ndarray, q: int) -> float:
    grid = u.grid
    w = block_weights(grid)[q]
    tq = _tensor_to_physical(grid, tensor * w)
    g = _gradient_physical(grid, u.coeffs)
    return _kernels.trace_pair_sum(tq, g) * grid.cell_volume


def commutator(u: SpectralField, q: int) -> np.ndarray:
    """Spectral tensor r_q(u, u) = (u (x) u)_q - u_q (x) u - u (x) u_q.

    Exact for q >= 0 because the band kernel has zero mean; q = -1 is
    rejected (the lowpass kernel has nonzero mean, so the algebraic and
    integral forms differ there).
    """
    if q < 0:
        raise ConfigError("commutator requires q >= 0 (band kernels have zero mean)")
    tensor = dealiased_product(u, u)
    return _commutator_from_tensor(u, tensor, q)[0]


def _commutator_from_tensor(u: SpectralField, tensor: np.ndarray, q: int):
    grid = u.grid
    w = block_weights(grid)[q]
    uq = SpectralField(grid, u.coeffs * w, u.time, u.nu)
    cross = dealiased_product(uq, u)  # cross[i, j] = ((u_q)_i u_j)^hat
    r = tensor * w - cross - cross.transpose(1, 0, 2, 3, 4)
    return r, cross


def _residual_floor(u: SpectralField) -> float:
    # Roundoff floor for flux-sized quantities (flux scales like E^(3/2)),
    # so fields with no flux report ~0 residuals instead of 0/0 noise.
    from .fields import kinetic_energy

    return np.finfo(float).tiny + 1e-13 * kinetic_energy(u) ** 1.5


def flux_identity_residual(u: SpectralField, q: int, cutoff: int | None = None) -> float:
    """Relative residual of the localized-flux identity

        int tr[(u (x) u)_q . grad u_q] = int r_q . grad u_q
                                         - int u_q . grad u_{<=cutoff} . u_q.

    cutoff defaults to q + 2, where multiplier support arithmetic closes the
    identity exactly; smaller cutoffs are measurable but not asserted.
    """
    if q < 0:
        raise ConfigError("the flux identity needs q >= 0")
    if cutoff is None:
        cutoff = q + 2
    grid = u.grid
    tensor = dealiased_product(u, u)
    lhs = _flux_from_tensor(u, tensor, q)

    w = block_weights(grid)[q]
    gq = _gradient_physical(grid, u.coeffs, w)
    r, _ = _commutator_from_tensor(u, tensor, q)
    term_r = _kernels.trace_pair_sum(_tensor_to_physical(grid, r), gq) * grid.cell_volume

    n3 = grid.n**3
    uq_phys = np.ascontiguousarray(
        (sfft.ifftn(u.coeffs * w, axes=(1, 2, 3), workers=fft_workers()) * n3).real
    )
    w_le = lowpass_weight(grid.k_mag / 2.0 ** (cutoff + 1))
    g_le = _gradient_physical(grid, u.coeffs, w_le)
    # (u_q (x) u_q) is symmetric, so the swapped contraction in trace_pair_sum
    # equals sum_ij (u_q)_j (d_j u_i) (u_q)_i.
    sweep = _kernels.outer_product_sym(uq_phys)
    term_sweep = _kernels.trace_pair_sum(sweep, g_le) * grid.cell_volume

    rhs = term_r - term_sweep
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + _residual_floor(u))


class BoundTerms(NamedTuple):
    """The three weighted double sums bounding the nonlinear term for bands
    q >= q_start: low-band commutator part, high-band commutator part, and
    the transport (sweeping) part."""

    low: float
    high: float
    transport: float

    @property
    def total(self) -> float:
        return self.low + self.high + self.transport


def _l3_profile(obj):
    """L3 norm profile from a BlockDecomposition or a bare {q: BlockNorms}."""
    norms = getattr(obj, "norms", obj)
    qs = np.array(sorted(norms))
    lam = 2.0 ** qs.astype(float)
    x3 = np.array([norms[q].l3 for q in sorted(norms)])
    return qs, lam, x3


def flux_bound_terms(dec: BlockDecomposition, q_start: int, eps: float) -> BoundTerms:
    """Evaluate the three double sums exactly as displayed, truncated at the
    lattice's top band."""
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"eps must lie in (0, 1), got {eps}")
    if q_start < 0:
        raise ConfigError(f"q_start must be >= 0, got {q_start}")
    qs, lam, x3 = _l3_profile(dec)
    outer = qs >= q_start

    inner_low = np.cumsum(lam**2 * x3**2)  # sum_{p <= q}
    low = float(np.sum((lam**eps * x3 * inner_low)[outer]))

    tail = np.cumsum((x3**2)[::-1])[::-1]  # sum_{p >= q}
    inner_high = np.concatenate([tail[1:], [0.0]])  # sum_{p >= q+1}
    high = float(np.sum((lam ** (2.0 + eps) * x3 * inner_high)[outer]))

    lead = np.cumsum(lam * x3)  # sum_{p <= q}
    inner_tr = np.concatenate([lead[1:], [lead[-1]]])  # sum_{p <= q+1}, capped
    transport = float(np.sum((lam ** (1.0 + eps) * x3**2 * inner_tr)[outer]))

    return BoundTerms(low, high, transport)


def flux_bound_remainder(
    history: Sequence[BlockDecomposition], q_start: int, eps: float
) -> float:
    """sup over snapshots of sum_{q < q_start} (2^q)^(2+eps) ||u_q||_3^3."""
    if not history:
        raise ConfigError("remainder needs a nonempty history")
    best = 0.0
    for dec in history:
        qs, lam, x3 = _l3_profile(dec)
        below = qs < q_start
        best = max(best, float(np.sum((lam ** (2.0 + eps) * x3**3)[below])))
    return best


def tail_cube_sum(dec: BlockDecomposition, q_start: int, eps: float) -> float:
    """sum_{q >= q_start} (2^q)^(2+eps) ||u_q||_3^3."""
    qs, lam, x3 = _l3_profile(dec)
    return float(np.sum((lam ** (2.0 + eps) * x3**3)[qs >= q_start]))


def flux_bound_ratio(
    dec: BlockDecomposition,
    q_start: int,
    eps: float,
    history: Sequence[BlockDecomposition] | None = None,
) -> float:
    """(low + high + transport) / (tail cube sum + remainder); 0 on the zero
    field. Amplitude-invariant (both sides are cubic)."""
    terms = flux_bound_terms(dec, q_start, eps)
    denom = tail_cube_sum(dec, q_start, eps) + flux_bound_remainder(
        history if history is not None else [dec], q_start, eps
    )
    if denom == 0.0:
        return 0.0
    return terms.total / denom


def interpolation_slack(dec: BlockDecomposition) -> float:
    """Worst relative slack of ||u_q||_3^3 <= ||u_q||_2^2 ||u_q||_inf over
    blocks; nonnegative up to lattice roundoff."""
    worst = np.inf
    for q in dec.qs:
        b = dec.norms[q]
        bound = b.l2**2 * b.linf
        slack = (bound - b.l3**3) / max(bound, np.finfo(float).tiny)
        worst = min(worst, slack)
    return float(worst)


@dataclass(frozen=True)
class TrilinearBoundReport:
    """Per-band |flux| against the convolution-weighted cube sum
    sum_p (2^|q-p|)^(-2/3) (2^p) ||u_p||_3^3; the largest ratio is the
    measured leading constant."""

    qs: list[int]
    lhs: np.ndarray
    rhs: np.ndarray
    ratios: np.ndarray
    c1: float


def trilinear_bound_report(dec: BlockDecomposition) -> TrilinearBoundReport:
    u = dec.source
    tensor = dealiased_product(u, u)
    qs, lam, x3 = _l3_profile(dec)
    lhs = np.array([abs(_flux_from_tensor(u, tensor, q)) for q in dec.qs])
    rhs = np.array(
        [
            float(np.sum(2.0 ** (-2.0 / 3.0 * np.abs(q - qs)) * lam * x3**3))
            for q in dec.qs
        ]
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(rhs > 0.0, lhs / np.where(rhs > 0.0, rhs, 1.0), 0.0)
    c1 = float(ratios.max()) if ratios.size else 0.0
    return TrilinearBoundReport(list(dec.qs), lhs, rhs, ratios, c1)


@dataclass(frozen=True)
class FluxReport:
    """Per-band flux diagnostics for one snapshot."""

    time: float
    eps: float
    q_start: int
    qs: list[int]
    flux: np.ndarray  # twice-filtered band flux
    transfer: np.ndarray  # single-filter transfer (sums to ~0)
    commutator_residual: np.ndarray  # pairing closure of the decomposition, q >= 0
    identity_residual: np.ndarray  # flux identity at cutoff q+2, q >= 0
    bound_terms: BoundTerms
    remainder: float
    tail_cubes: float
    bound_ratio: float
    extras: dict = field(default_factory=dict)


def flux_report(
    u: SpectralField,
    eps: float = 0.5,
    q_start: int = 2,
    history: Sequence[BlockDecomposition] | None = None,
    dec: BlockDecomposition | None = None,
) -> FluxReport:
    """Assemble the full per-snapshot flux diagnostics."""
    grid = u.grid
    if dec is None:
        dec = decompose(u)
    tensor = dealiased_product(u, u)
    weights = block_weights(grid)
    grad_full = _gradient_physical(grid, u.coeffs)

    qs = dec.qs
    floor = _residual_floor(u)
    flux = np.empty(len(qs))
    transfer = np.empty(len(qs))
    comm_res = np.full(len(qs), np.nan)
    ident_res = np.full(len(qs), np.nan)
    for idx, q in enumerate(qs):
        w = weights[q]
        tq = _tensor_to_physical(grid, tensor * w)
        gq = _gradient_physical(grid, u.coeffs, w)
        flux[idx] = _kernels.trace_pair_sum(tq, gq) * grid.cell_volume
        transfer[idx] = _kernels.trace_pair_sum(tq, grad_full) * grid.cell_volume
        if q < 0:
            continue
        r, cross = _commutator_from_tensor(u, tensor, q)
        term_r = _kernels.trace_pair_sum(_tensor_to_physical(grid, r), gq)
        cross_p = _tensor_to_physical(grid, cross)
        term_a = _kernels.trace_pair_sum(cross_p, gq)
        term_b = _kernels.trace_pair_sum(
            np.ascontiguousarray(cross_p.transpose(1, 0, 2, 3, 4)), gq
        )
        parts = (term_r + term_a + term_b) * grid.cell_volume
        comm_res[idx] = abs(flux[idx] - parts) / (abs(flux[idx]) + abs(parts) + floor)
        ident_res[idx] = flux_identity_residual(u, q)

    terms = flux_bound_terms(dec, q_start, eps)
    remainder = flux_bound_remainder(
        history if history is not None else [dec], q_start, eps
    )
    cubes = tail_cube_sum(dec, q_start, eps)
    denom = cubes + remainder
    ratio = terms.total / denom if denom > 0.0 else 0.0
    return FluxReport(
        time=u.time,
        eps=eps,
        q_start=q_start,
        qs=list(qs),
        flux=flux,
        transfer=transfer,
        commutator_residual=comm_res,
        identity_residual=ident_res,
        bound_terms=terms,
        remainder=remainder,
        tail_cubes=cubes,
        bound_ratio=ratio,
    )
