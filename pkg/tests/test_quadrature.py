import math

import numpy as np
import pytest

from cesaro.quadrature import QuadScheme, QuadratureError, integrate_half_line, integrate_interval


def test_smooth_interval():
    assert integrate_interval(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-15)


@pytest.mark.parametrize("sigma", [-0.3, -0.45, -0.3 + 2j, 0.5 + 1j, 7.0])
def test_endpoint_power(sigma):
    val = integrate_interval(lambda t: t**sigma, 0.0, 1.0, QuadScheme(singular_exponent=sigma))
    assert val == pytest.approx(1 / (sigma + 1), rel=1e-12)


def test_breakpoints():
    f = lambda t: np.where(t < 0.3, 1.0, 0.0)
    val = integrate_interval(f, 0.0, 1.0, QuadScheme(breakpoints=(0.3,)))
    assert val == pytest.approx(0.3, rel=1e-14)


def test_reversed_interval():
    assert integrate_interval(np.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), rel=1e-15)


def test_half_line():
    assert integrate_half_line(lambda x: np.exp(-x)) == pytest.approx(1.0, rel=1e-15)
    val = integrate_half_line(lambda x: x**-0.25 * np.exp(-x), QuadScheme(singular_exponent=-0.25))
    assert val == pytest.approx(math.gamma(0.75), rel=1e-13)


def test_half_line_non_convergence_raises():
    with pytest.raises(QuadratureError):
        integrate_half_line(lambda x: np.ones_like(x), QuadScheme(max_panels=30))
