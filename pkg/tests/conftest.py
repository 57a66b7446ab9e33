import numpy as np
import pytest

from fcontact import catalog
from fcontact.chart import Chart, sample_points
from fcontact.deformations import RotationMatrix


@pytest.fixture
def plane():
    return Chart(['x1', 'x2'])


@pytest.fixture(scope='session')
def sasakian():
    return catalog.get('sasakian-model', {'n': 1})


@pytest.fixture(scope='session')
def s_model():
    return catalog.get('s-model', {'n': 1, 's': 2})


@pytest.fixture(scope='session')
def s_model_3():
    return catalog.get('s-model', {'n': 1, 's': 3})


@pytest.fixture
def points():
    """Sample points of a structure's chart, kept small so that the suite stays fast."""
    def draw(structure, count=8, seed=3):
        return sample_points(structure.chart, count, seed)
    return draw


def random_rotation(s, rng):
    """A random orthogonal matrix whose row sums stay away from zero."""
    while True:
        Q, R = np.linalg.qr(rng.normal(size=(s, s)))
        Q = Q * np.sign(np.diag(R))
        if np.min(np.abs(Q.sum(axis=1))) > 0.1:
            return RotationMatrix(Q)


@pytest.fixture
def rotation_factory():
    return random_rotation
