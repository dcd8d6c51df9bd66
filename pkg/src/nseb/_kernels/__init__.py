"""Hot pointwise kernels with a compiled core and a NumPy fallback.

The compiled extension (nseb._kernels._core, built from _core.pyx) is used
when importable; otherwise the NumPy reference implementations take over.
Set NSEB_PURE_PYTHON=1 to force the fallback, e.g. to compare backends.
"""

import os

from . import _ref

if os.environ.get("NSEB_PURE_PYTHON"):
    _impl = _ref
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

outer_product = _impl.outer_product
outer_product_sym = _impl.outer_product_sym
vector_magnitude = _impl.vector_magnitude
trace_pair_sum = _impl.trace_pair_sum


def backend() -> str:
    """Name of the active kernel backend ("cython" or "numpy")."""
    return _impl.BACKEND
