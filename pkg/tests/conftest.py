import numpy as np
import pytest

from nseb import GridSpec, random_band_field


def rel_err(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    denom = np.linalg.norm(b.ravel())
    return float(np.linalg.norm((a - b).ravel()) / (denom if denom else 1.0))


@pytest.fixture(scope="session")
def grid16():
    return GridSpec(16)


@pytest.fixture(scope="session")
def grid32():
    return GridSpec(32)


@pytest.fixture(scope="session")
def grid64():
    return GridSpec(64)


@pytest.fixture(scope="session")
def field32():
    """One broad-band random solenoidal field on the n=32 grid."""
    return random_band_field(GridSpec(32), seed=101, k_min=1.5, k_max=10.0, energy=1.0)


@pytest.fixture(scope="session")
def field_battery32():
    """Small battery of random solenoidal fields for property tests."""
    grid = GridSpec(32)
    return [
        random_band_field(grid, seed=200 + i, k_min=1.0, k_max=10.0, energy=1.0)
        for i in range(10)
    ]
