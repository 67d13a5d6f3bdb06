import numpy as np
import pytest

from groupoidal import fixtures, repmod
from groupoidal.convalg import GFunction


def randf(mg, rng, scale=1.0):
    """Random complex Gaussian function on the arrows of mg."""
    n = mg.n_arrows
    vals = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return GFunction(mg, scale * vals)


@pytest.fixture(scope="session")
def bundled():
    return fixtures.bundled_all()


@pytest.fixture(scope="session")
def contexts(bundled):
    return {name: repmod.RepContext(mg) for name, mg in bundled.items()}


@pytest.fixture()
def rng():
    return np.random.default_rng(20240913)
