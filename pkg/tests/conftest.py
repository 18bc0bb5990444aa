import math

import numpy as np
import pytest

from zonalflow import bundled_field
from zonalflow.kaula import OrbitGeometry


@pytest.fixture(scope="session")
def lunar():
    return bundled_field()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_geometry(field, rng, e_max=0.9, a_span=(1.05, 3.0)):
    return OrbitGeometry(
        a=field.reference_radius * rng.uniform(*a_span),
        e=rng.uniform(0.0, e_max),
        inc=rng.uniform(0.01, math.pi - 0.01),
    )
