import math

import mpmath
import numpy as np
import pytest

from halfheat.dilog import dilog, dilog_partial

mpmath.mp.dps = 30


def reference(z):
    return complex(mpmath.polylog(2, complex(z)))


def test_zero():
    assert dilog(0.0) == 0.0


def test_basel_value():
    assert dilog(1.0) == pytest.approx(math.pi**2 / 6.0, abs=1e-12)


def test_alternating_value():
    # cross-check of the known alternating sum; the implementation itself is
    # the direct series with the tail estimate
    assert dilog(-1.0) == pytest.approx(-math.pi**2 / 12.0, abs=1e-9)
    assert dilog(-1.0) == pytest.approx(reference(-1.0), abs=1e-9)


def test_domain_rejected():
    with pytest.raises(ValueError):
        dilog(1.0000001)


@pytest.mark.parametrize(
    "z",
    [
        0.5,
        -0.25 + 0.1j,
        0.999999,
        1.0 - 1e-6,
        (1.0 - 1e-6) * np.exp(0.003j),
        0.99 * np.exp(2.0j),
        1j * 0.7,
    ],
)
def test_interior_accuracy(z):
    assert dilog(z) == pytest.approx(reference(z), abs=1e-12)


@pytest.mark.parametrize("theta", [0.01, 0.5, math.pi / 4, 2.0, 3.0, 3.14, -1.2, -3.0])
def test_circle_accuracy(theta):
    z = np.exp(1j * theta)
    assert dilog(z) == pytest.approx(reference(z), abs=1e-9)


def test_vectorized_matches_scalar():
    zs = np.exp(1j * np.linspace(-3.0, 3.0, 17))
    vals = dilog(zs)
    for z, v in zip(zs, vals):
        assert v == pytest.approx(dilog(complex(z)), abs=1e-14)


def test_partial_sum_definition():
    z = 0.3 + 0.4j
    n = np.arange(1, 51)
    direct = np.sum(z**n / n**2)
    assert dilog_partial(z, 50) == pytest.approx(direct, abs=1e-15)
