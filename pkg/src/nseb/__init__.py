"""Pseudo-spectral Navier-Stokes on the periodic 3-torus with dyadic-band
energy-flux decomposition and regularity-criterion diagnostics."""

from .dyadic import (
    BesovParams,
    BlockDecomposition,
    bandpass_weight,
    besov_norm,
    besov_norm_field,
    decompose,
    lowpass_weight,
    partial_sum,
    sobolev_norm,
)
from .errors import ConfigError, NumericalAbort, SnapshotFormatError
from .fields import (
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
from .grid import GridSpec

__version__ = "0.1.0"

__all__ = [
    "BesovParams",
    "BlockDecomposition",
    "ConfigError",
    "GridSpec",
    "NumericalAbort",
    "PhysicalField",
    "SnapshotFormatError",
    "SpectralField",
    "bandpass_weight",
    "besov_norm",
    "besov_norm_field",
    "dealiased_product",
    "decompose",
    "kinetic_energy",
    "leray_project",
    "lowpass_weight",
    "lp_norm",
    "partial_sum",
    "random_band_field",
    "sobolev_norm",
    "to_physical",
    "to_spectral",
    "__version__",
]
