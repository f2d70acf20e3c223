import numpy as np
import pytest

from crackqc.material import validate


@pytest.fixture
def params():
    """Reference parameter set used throughout: k1=4, k2=0.4, k3=20, c=0.5."""
    return validate(4.0, 0.4, 20.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def random_params(rng, u_cut=0.5):
    """A random admissible parameter set away from the marginal boundary."""
    k1 = rng.uniform(0.5, 8.0)
    k2 = rng.uniform(0.05, 1.5)
    k3 = rng.uniform(1.0, 50.0)
    return validate(k1, k2, k3, u_cut)
