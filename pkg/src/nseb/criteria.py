"""Regularity-criterion evaluation on snapshot sequences.

Each criterion compares a monitored quantity against a threshold
proportional to the viscosity (or to the closed-form bound for the
time-integral case) and reports the margin. The lattice truncates
frequencies and snapshots discretize time, so the high-frequency limsup is
approximated by a tail maximum over q >= q_tail and the left-limit in time
by a trailing window of snapshots; both approximations are configurable
and reported, never silently resolved. The absolute constants in the
thresholds are existential in the underlying estimates, so the monitor
takes c as an input (default 1) and reports margins rather than absolute
verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .dyadic import (
    BesovParams,
    BlockDecomposition,
    bernstein_young_bounds,
    besov_norm,
    decompose,
    lambda_q,
)
from .errors import ConfigError
from .fields import SpectralField, lp_norm, to_physical

BOUNDARY_FLOOR = 1e-10


@dataclass(frozen=True)
class CriterionConfig:
    c: float = 1.0  # user-supplied absolute constant in the thresholds
    r: float = 3.0  # time-integrability exponent, in (2, inf) where used
    q_tail: int = 2  # start of the high-frequency tail
    jump_window: int = 1  # trailing snapshots approximating the left limit

    def __post_init__(self):
        if self.c <= 0.0:
            raise ConfigError(f"c must be positive, got {self.c}")
        if self.q_tail < 0:
            raise ConfigError(f"q_tail must be >= 0, got {self.q_tail}")
        if self.jump_window < 1:
            raise ConfigError(f"jump_window must be >= 1, got {self.jump_window}")


@dataclass(frozen=True)
class CriterionReport:
    """Time/band matrices of a monitored quantity plus the scalar verdict.

    margin = threshold - summary; verdict is satisfied / violated /
    boundary (|margin| below a resolution floor relative to the threshold).
    """

    name: str
    summary: float
    threshold: float
    margin: float
    verdict: str
    times: np.ndarray
    qs: list[int] | None = None
    values: np.ndarray | None = None
    extras: dict = field(default_factory=dict)


def _verdict(summary: float, threshold: float) -> tuple[float, str]:
    margin = threshold - summary
    if abs(margin) <= BOUNDARY_FLOOR * abs(threshold):
        return margin, "boundary"
    return margin, "satisfied" if margin > 0 else "violated"


def _decompose_history(
    history: Sequence[SpectralField],
    precomputed: Sequence[BlockDecomposition] | None,
) -> list[BlockDecomposition]:
    if precomputed is not None:
        return list(precomputed)
    if not history:
        raise ConfigError("criterion needs a nonempty history")
    return [decompose(f) for f in history]


def _times(history: Sequence[SpectralField]) -> np.ndarray:
    return np.array([f.time for f in history])


def tail_sup_criterion(
    history: Sequence[SpectralField],
    config: CriterionConfig,
    decompositions: Sequence[BlockDecomposition] | None = None,
) -> CriterionReport:
    """max over q >= q_tail and recorded t of (2^q)^(-1) ||u_q(t)||_inf,
    compared against c * nu."""
    decs = _decompose_history(history, decompositions)
    qs = decs[0].qs
    if config.q_tail > max(qs):
        raise ConfigError(
            f"q_tail={config.q_tail} exceeds the top band q_max={max(qs)}"
        )
    values = np.array(
        [[lambda_q(q) ** -1.0 * d.norms[q].linf for q in qs] for d in decs]
    )
    per_band = values.max(axis=0)
    tail = [i for i, q in enumerate(qs) if q >= config.q_tail]
    summary = float(per_band[tail].max())
    threshold = config.c * history[0].nu
    margin, verdict = _verdict(summary, threshold)
    return CriterionReport(
        "tail_sup",
        summary,
        threshold,
        margin,
        verdict,
        _times(history),
        qs,
        values,
        extras={"per_band_sup": dict(zip(qs, per_band.tolist()))},
    )


def sup_besov_criterion(
    history: Sequence[SpectralField],
    config: CriterionConfig,
    decompositions: Sequence[BlockDecomposition] | None = None,
) -> CriterionReport:
    """sup over recorded t of the (-1, inf) Besov norm against c * nu."""
    decs = _decompose_history(history, decompositions)
    series = np.array([besov_norm(d, BesovParams(-1.0, np.inf)) for d in decs])
    summary = float(series.max())
    threshold = config.c * history[0].nu
    margin, verdict = _verdict(summary, threshold)
    return CriterionReport(
        "sup_besov",
        summary,
        threshold,
        margin,
        verdict,
        _times(history),
        None,
        series,
    )


def jump_criterion(
    history: Sequence[SpectralField], config: CriterionConfig
) -> CriterionReport:
    """max over snapshots of the largest (-1, inf)-Besov jump from the
    trailing window, against c * nu.

    Summaries for window sizes 1 and 2 are reported alongside so the
    refinement toward the left-limit surrogate is visible.
    """
    if len(history) < 2:
        raise ConfigError("jump criterion needs at least two snapshots")
    window = config.jump_window
    params = BesovParams(-1.0, np.inf)
    jumps = np.zeros((len(history), window))
    for i in range(1, len(history)):
        for w in range(1, min(window, i) + 1):
            diff = history[i] - history[i - w]
            jumps[i, w - 1] = besov_norm(decompose(diff), params)
    per_snapshot = jumps.max(axis=1)
    summary = float(per_snapshot[1:].max())
    window_summaries = {
        w: float(jumps[:, :w].max()) for w in range(1, window + 1)
    }
    threshold = config.c * history[0].nu
    margin, verdict = _verdict(summary, threshold)
    return CriterionReport(
        "jump",
        summary,
        threshold,
        margin,
        verdict,
        _times(history),
        None,
        per_snapshot,
        extras={"window_summaries": window_summaries},
    )


def time_integral_threshold(nu: float, c: float, r: float) -> float:
    """nu^(r-1) * c^r * (r / (r-1))^(r-1)."""
    if nu <= 0.0 or c <= 0.0:
        raise ConfigError("nu and c must be positive")
    if r <= 1.0:
        raise ConfigError(f"r must exceed 1, got {r}")
    return nu ** (r - 1.0) * c**r * (r / (r - 1.0)) ** (r - 1.0)


def time_integral_criterion(
    history: Sequence[SpectralField],
    config: CriterionConfig,
    decompositions: Sequence[BlockDecomposition] | None = None,
) -> CriterionReport:
    """Trailing-window trapezoid integrals of ((2^q)^(2/r-1) ||u_q||_inf)^r
    for q >= q_tail, against the closed-form threshold.

    The summary takes the shortest (one-interval) window, the discrete
    surrogate of the left limit; wider windows are reported in extras.
    """
    if not 2.0 < config.r < np.inf:
        raise ConfigError(f"r must lie in (2, inf), got {config.r}")
    if len(history) < 2:
        raise ConfigError("time-integral criterion needs at least two snapshots")
    decs = _decompose_history(history, decompositions)
    qs = decs[0].qs
    if config.q_tail > max(qs):
        raise ConfigError(
            f"q_tail={config.q_tail} exceeds the top band q_max={max(qs)}"
        )
    r = config.r
    times = _times(history)
    integrand = np.array(
        [[(lambda_q(q) ** (2.0 / r - 1.0) * d.norms[q].linf) ** r for q in qs] for d in decs]
    )
    tail = [i for i, q in enumerate(qs) if q >= config.q_tail]

    window = config.jump_window
    n_t = len(history)
    # cumulative trapezoid along time, per band
    seg = 0.5 * np.diff(times)[:, None] * (integrand[1:] + integrand[:-1])
    cum = np.vstack([np.zeros((1, len(qs))), np.cumsum(seg, axis=0)])
    full_window = np.full((n_t, len(qs)), np.nan)
    shortest = np.full((n_t, len(qs)), np.nan)
    for i in range(1, n_t):
        w = min(window, i)
        full_window[i] = cum[i] - cum[i - w]
        shortest[i] = cum[i] - cum[i - 1]
    summary = float(np.nanmax(shortest[1:, tail]))
    window_summaries = {}
    for w in range(1, window + 1):
        vals = [cum[i] - cum[i - min(w, i)] for i in range(1, n_t)]
        window_summaries[w] = float(np.max(np.array(vals)[:, tail]))
    threshold = time_integral_threshold(history[0].nu, config.c, r)
    margin, verdict = _verdict(summary, threshold)
    return CriterionReport(
        "time_integral",
        summary,
        threshold,
        margin,
        verdict,
        times,
        qs,
        full_window,
        extras={"window_summaries": window_summaries, "r": r},
    )


def besov_lr_integral(history: Sequence[SpectralField], r: float) -> float:
    """Trapezoid integral over the run of ||u(t)||^r in the (2/r - 1, inf)
    Besov norm."""
    if not 2.0 < r < np.inf:
        raise ConfigError(f"r must lie in (2, inf), got {r}")
    if not history:
        raise ConfigError("criterion needs a nonempty history")
    params = BesovParams(2.0 / r - 1.0, np.inf)
    series = np.array([besov_norm(decompose(f), params) ** r for f in history])
    return float(np.trapezoid(series, _times(history)))


class LpsResult(NamedTuple):
    """Slack of 2/r + 3/s = 1 and its status; s = 3 with zero slack is the
    endpoint boundary case."""

    slack: float
    status: str


def lps_relation(r: float, s: float) -> LpsResult:
    if r <= 0.0 or s <= 0.0:
        raise ConfigError("r and s must be positive (or inf)")
    slack = (0.0 if r == np.inf else 2.0 / r) + (0.0 if s == np.inf else 3.0 / s) - 1.0
    if abs(slack) <= 1e-12:
        status = "satisfied" if s > 3.0 else "boundary"
    else:
        status = "violated"
    return LpsResult(float(slack), status)


@dataclass(frozen=True)
class EmbeddingReport:
    """Measured embedding ratios over a field battery.

    besov_ratios: ||u||_{B^{2/r-1}_{inf}} / ||u||_{B^{3/s+2/r-1}_{s}};
    bounded by the per-band kernel constants (reported as bernstein_bound).
    lp_ratios: ||u||_{B^0_{s}} / ||u||_{L^s}.
    """

    s: float
    r: float
    besov_ratios: np.ndarray
    lp_ratios: np.ndarray
    max_besov_ratio: float
    max_lp_ratio: float
    bernstein_bound: float


def embedding_report(
    fields: Sequence[SpectralField], s: float, r: float
) -> EmbeddingReport:
    if s not in (2.0, 3.0):
        raise ConfigError(f"s must be 2 or 3, got {s}")
    besov_ratios = []
    lp_ratios = []
    bound = 0.0
    young = None
    for f in fields:
        dec = decompose(f)
        denom_lp = lp_norm(to_physical(f), s)
        if denom_lp == 0.0:
            continue  # zero fields are skipped
        if young is None:
            young = bernstein_young_bounds(f.grid, s, np.inf)
        num = besov_norm(dec, BesovParams(2.0 / r - 1.0, np.inf))
        den = besov_norm(dec, BesovParams(3.0 / s + 2.0 / r - 1.0, s))
        besov_ratios.append(num / den)
        lp_ratios.append(besov_norm(dec, BesovParams(0.0, s)) / denom_lp)
        active = [q for q in dec.qs if dec.norm(q, s) > 0.0]
        bound = max(bound, max(young[q] for q in active))
    besov_arr = np.array(besov_ratios)
    lp_arr = np.array(lp_ratios)
    return EmbeddingReport(
        s,
        r,
        besov_arr,
        lp_arr,
        float(besov_arr.max()) if besov_arr.size else 0.0,
        float(lp_arr.max()) if lp_arr.size else 0.0,
        bound,
    )
