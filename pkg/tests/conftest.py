import numpy as np
import pytest

from qidcodes.sampling import Seed


@pytest.fixture
def seed():
    return Seed(0xC0DE, 0)


@pytest.fixture
def rng():
    return Seed(0xC0DE, 99).generator()


def random_density(rng, d: int) -> np.ndarray:
    from qidcodes.sampling import complex_gaussians

    g = complex_gaussians(rng, (d, d))
    w = g @ g.conj().T
    return w / float(np.trace(w).real)
