"""Shared fixtures: small grids and smooth compactly-concentrated fields."""

import numpy as np
import pytest

from ckdv import Grid, field_from_callable


@pytest.fixture
def grid64():
    return Grid(64, 2.0 * np.pi)


@pytest.fixture
def grid128():
    return Grid(128, 8.0 * np.pi)


@pytest.fixture
def gaussian128(grid128):
    return field_from_callable(lambda x: np.exp(-((x / 1.5) ** 2)), grid128)


def seeded(seed):
    return np.random.default_rng(seed)
