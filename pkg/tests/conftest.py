"""Shared fixtures."""

import numpy as np
import pytest

from src.geometry import GridGeometry, Material, build_bypass_geometry

ARM = Material("arm", 1.0, 0.9, 0.1)
ABSORBER = Material("absorber", 1.0, 0.0, 1.0)
SCATTERER = Material("scatterer", 1.0, 1.0, 0.0)


def homogeneous(n_x: int, n_y: int, material: Material = ARM, cell_size: float = 1.0):
    """Single-material grid."""
    cells = np.zeros((1 << n_x, 1 << n_y), dtype=np.int64)
    return GridGeometry(n_x, n_y, cell_size, (material,), cells)


@pytest.fixture
def bypass():
    """8x8 bypass grid over a 10 cm domain."""
    return build_bypass_geometry(3, 3, 1.25)


@pytest.fixture
def small_bypass():
    """4x4 bypass grid over a 10 cm domain."""
    return build_bypass_geometry(2, 2, 2.5)


@pytest.fixture
def arm_grid():
    return homogeneous(2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
