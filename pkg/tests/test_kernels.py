"""Compiled kernels agree with the NumPy reference implementations."""

import os
import subprocess
import sys

import numpy as np
import pytest

from nseb import _kernels
from nseb._kernels import _ref

try:
    from nseb._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


@pytest.fixture
def vec():
    rng = np.random.default_rng(90)
    return rng.standard_normal((3, 12, 12, 12))


@pytest.fixture
def pair():
    rng = np.random.default_rng(91)
    return rng.standard_normal((3, 3, 12, 12, 12)), rng.standard_normal((3, 3, 12, 12, 12))


@needs_core
class TestBackendsAgree:
    def test_outer_product(self, vec):
        b = vec[::-1].copy()
        assert np.array_equal(_core.outer_product(vec, b), _ref.outer_product(vec, b))

    def test_outer_product_sym(self, vec):
        assert np.array_equal(_core.outer_product_sym(vec), _ref.outer_product_sym(vec))

    def test_vector_magnitude(self, vec):
        assert np.array_equal(_core.vector_magnitude(vec), _ref.vector_magnitude(vec))

    def test_trace_pair_sum(self, pair):
        t, g = pair
        a = _core.trace_pair_sum(t, g)
        b = _ref.trace_pair_sum(t, g)
        assert a == pytest.approx(b, rel=1e-13)

    def test_trace_pair_sum_matches_exact_on_ill_conditioned(self):
        # compensated summation must stay accurate when terms nearly cancel
        rng = np.random.default_rng(92)
        t = rng.standard_normal((3, 3, 4096))
        g = rng.standard_normal((3, 3, 4096))
        exact = float(
            np.sum(
                (t.astype(np.longdouble) * np.swapaxes(g, 0, 1).astype(np.longdouble))
            )
        )
        assert _core.trace_pair_sum(t, g) == pytest.approx(exact, rel=1e-14)


class TestSemantics:
    def test_outer_layout(self):
        a = np.arange(6, dtype=float).reshape(3, 2)
        b = np.arange(6, 12, dtype=float).reshape(3, 2)
        out = _kernels.outer_product(a, b)
        assert out.shape == (3, 3, 2)
        assert out[1, 2, 0] == a[1, 0] * b[2, 0]

    def test_sym_matches_general(self, vec):
        assert np.array_equal(
            _kernels.outer_product_sym(vec), _kernels.outer_product(vec, vec)
        )

    def test_trace_convention(self):
        t = np.zeros((3, 3, 1))
        g = np.zeros((3, 3, 1))
        t[0, 1, 0] = 2.0
        g[1, 0, 0] = 5.0  # pairs with t[0, 1] under the swapped contraction
        assert _kernels.trace_pair_sum(t, g) == 10.0

    def test_backend_name(self):
        assert _kernels.backend() in ("cython", "numpy")


class TestDispatch:
    def test_pure_python_env_forces_fallback(self):
        code = "import nseb._kernels as k; print(k.backend())"
        env = dict(os.environ, NSEB_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.stdout.strip() == "numpy"

    def test_results_identical_across_backends(self, vec):
        # the full pipeline must not depend on the backend: spot-check a norm
        code = (
            "import numpy as np\n"
            "from nseb import GridSpec, random_band_field, to_physical, lp_norm\n"
            "f = random_band_field(GridSpec(16), 7, 1, 5)\n"
            "print(repr(lp_norm(to_physical(f), 3)))\n"
        )
        outs = []
        for force in ("", "1"):
            env = dict(os.environ)
            if force:
                env["NSEB_PURE_PYTHON"] = force
            elif "NSEB_PURE_PYTHON" in env:
                del env["NSEB_PURE_PYTHON"]
            r = subprocess.run(
                [sys.executable, "-c", code], env=env, capture_output=True, text=True
            )
            assert r.returncode == 0, r.stderr
            outs.append(r.stdout.strip())
        assert float(outs[0]) == pytest.approx(float(outs[1]), rel=1e-14)
