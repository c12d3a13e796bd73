import numpy as np
import pytest

from fisherbound.fop import catalog
from fisherbound.states import DensityMatrix, make_rng, random_observable, random_state


@pytest.fixture
def rng():
    return make_rng(20240611)


@pytest.fixture(params=catalog(), ids=lambda f: f.label)
def any_f(request):
    return request.param


@pytest.fixture(params=catalog(regular_only=True), ids=lambda f: f.label)
def regular_f(request):
    return request.param


def random_triple(rng, dim):
    return random_state(rng, dim), random_observable(rng, dim), random_observable(rng, dim)


def two_level(l1):
    return DensityMatrix(np.diag([l1, 1.0 - l1]).astype(complex))


def random_pd(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g @ g.conj().T + 0.1 * np.eye(dim)
