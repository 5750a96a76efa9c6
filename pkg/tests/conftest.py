import os

# keep test runs from writing rotating log files
os.environ.setdefault("LOG_TO_FILE", "false")
os.environ.setdefault("LOG_LEVEL", "WARNING")

import numpy as np
import pytest

from santalo.bodies.service import cross_polytope, cube, linear_image, make_lp_ball
from santalo.schemas import McConfig

SHEAR = [[1.0, 0.5], [0.0, 1.0]]


@pytest.fixture
def square():
    return cube(2)


@pytest.fixture
def diamond():
    return cross_polytope(2)


@pytest.fixture
def sheared_square():
    """Parallelogram with vertices ±(1.5, 1), ±(0.5, -1); area 4."""
    return linear_image(cube(2), np.array(SHEAR), label="sheared")


@pytest.fixture
def disc():
    return make_lp_ball(2, 2)


@pytest.fixture
def mc():
    return McConfig(samples=200_000, batch=50_000, seed=7)
