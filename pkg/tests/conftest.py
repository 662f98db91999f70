import numpy as np
import pytest

from nlkg.spectral import SpectralGrid


@pytest.fixture(scope="session")
def small_grid():
    return SpectralGrid(30.0, 512)


@pytest.fixture(scope="session")
def medium_grid():
    return SpectralGrid(80.0, 1024)


@pytest.fixture(scope="session")
def wide_grid():
    # acceptance-scale frequency resolution without acceptance-scale cost
    return SpectralGrid(400.0, 8192)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
