import math

import numpy as np
import pytest

from halfheat import ArcInterval, AnnularSector, EXTERIOR, INTERIOR


@pytest.fixture(scope="session")
def quarter_arc():
    return ArcInterval(0.0, math.pi / 2)


@pytest.fixture(scope="session")
def centered_arc():
    return ArcInterval(-math.pi / 2, math.pi / 2)


@pytest.fixture(scope="session")
def ext_quarter_ln2(quarter_arc):
    return AnnularSector(EXTERIOR, math.log(2.0), quarter_arc)


@pytest.fixture(scope="session")
def int_quarter_ln2(quarter_arc):
    return AnnularSector(INTERIOR, math.log(2.0), quarter_arc)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


def sector_quadrature_oracle(sector, fun, n_r=120, n_t=160):
    """Independent 2-D tensor quadrature of fun over the sector."""
    z, w = sector.quadrature(n_r, n_t)
    return np.sum(w * fun(z))
