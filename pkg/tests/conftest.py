import pytest

from monadforge.monad import build_monad
from monadforge.picard import Polarization, SpaceSpec


def make(dims, alphas, k, profile="paper"):
    return build_monad(SpaceSpec(tuple(dims)), Polarization(tuple(alphas)), k, profile)


@pytest.fixture
def hom11():
    """Homogeneous profile on (P^1)^2 with alpha = 1, k = 1."""
    return make((1,), (1,), 1, "homogeneous")


@pytest.fixture
def paper11():
    return make((1,), (1,), 1, "paper")
