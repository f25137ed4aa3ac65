import numpy as np
import pytest

from illposed import (DataSpec1D, DataSpec2D, UniformPeriodicGrid,
                      build_profiles, build_u0_1d, build_u0_2d)

BOX = 16.0


@pytest.fixture(scope="session")
def grid1d_small():
    return UniformPeriodicGrid(1, 1 << 13, BOX)


@pytest.fixture(scope="session")
def grid1d_med():
    # Nyquist 2048: resolves shells through j = 9
    return UniformPeriodicGrid(1, 1 << 16, BOX)


@pytest.fixture(scope="session")
def grid2d_small():
    # axis-0 Nyquist 64 resolves shells through j = 4
    return UniformPeriodicGrid(2, (2048, 64), BOX)


@pytest.fixture(scope="session")
def profiles1d(grid1d_med):
    return build_profiles(grid1d_med)


@pytest.fixture(scope="session")
def profiles2d(grid2d_small):
    return build_profiles(grid2d_small, d=2)


@pytest.fixture(scope="session")
def u0_med(grid1d_med, profiles1d):
    return build_u0_1d(DataSpec1D(s=2.0, j_max=9), profiles1d, grid1d_med)


@pytest.fixture(scope="session")
def u0_2d_small(grid2d_small, profiles2d):
    return build_u0_2d(DataSpec2D(s=2.5, j_max=4), profiles2d, grid2d_small)


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.sum((a - b) ** 2) / max(np.sum(b**2), 1e-300)))
