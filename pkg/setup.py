"""Builds the optional compiled kernel extension.

The package is fully functional without the extension: nseb._kernels falls
back to the NumPy reference implementations when the compiled module is
missing (or when NSEB_PURE_PYTHON is set).
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "nseb._kernels._core",
                ["src/nseb/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
