"""NumPy reference implementations of the hot pointwise kernels.

These are the import-time fallback when the compiled extension is absent;
they are also the ground truth the compiled kernels are tested against.
All functions take C-contiguous float64 arrays whose leading axes are the
vector/tensor components and whose trailing axes are lattice points.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def outer_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise tensor product: out[i, j, ...] = a[i, ...] * b[j, ...]."""
    return np.einsum("i...,j...->ij...", a, b)


def outer_product_sym(a: np.ndarray) -> np.ndarray:
    """Pointwise a (x) a, exploiting symmetry of the six unique entries."""
    out = np.empty((3, 3) + a.shape[1:], dtype=np.float64)
    for i in range(3):
        for j in range(i, 3):
            out[i, j] = a[i] * a[j]
            if i != j:
                out[j, i] = out[i, j]
    return out


def vector_magnitude(a: np.ndarray) -> np.ndarray:
    """Pointwise Euclidean magnitude over the leading component axis."""
    return np.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def trace_pair_sum(t: np.ndarray, g: np.ndarray) -> float:
    """sum over points of tr[T . G] = sum_{ij} T[i, j, ...] * G[j, i, ...]."""
    return float(np.sum(t * np.swapaxes(g, 0, 1)))
