import os
import sys

import mpmath as mp
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from zpower.lattice import evolve_grid  # noqa: E402
from zpower.numerics import PrecisionContext  # noqa: E402


@pytest.fixture(autouse=True)
def working_precision():
    with mp.workprec(256):
        yield


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(256, 1e-40)


@pytest.fixture(scope="session")
def grids22():
    with mp.workprec(256):
        return {a: evolve_grid(a, 22) for a in ("0.5", "2/3", "1.5")}
