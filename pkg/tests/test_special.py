import math

import numpy as np
import pytest
import scipy.special as sp

from cesaro.special import digamma, gamma, gamma_derivatives, lower_gamma_series


def _grid(re_lo, re_hi):
    x = np.linspace(re_lo, re_hi, 13)
    y = np.linspace(-6, 6, 13)
    return (x[:, None] + 1j * y[None, :]).ravel()


def test_gamma_right_half_plane_against_scipy():
    z = _grid(0.5, 12)
    np.testing.assert_allclose(gamma(z), sp.gamma(z), rtol=5e-14)


def test_gamma_reflection_region_against_scipy():
    z = _grid(-4.3, 0.45)
    np.testing.assert_allclose(gamma(z), sp.gamma(z), rtol=1e-12)


def test_gamma_integers_and_half():
    for n in range(1, 12):
        assert gamma(n).real == pytest.approx(math.factorial(n - 1), rel=1e-14)
    assert gamma(0.5).real == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_digamma_against_scipy():
    z = _grid(0.5, 10)
    np.testing.assert_allclose(digamma(z), sp.psi(z), rtol=1e-12, atol=1e-13)


def test_digamma_left_half_plane_refused():
    with pytest.raises(ValueError):
        digamma(0.2)


@pytest.mark.parametrize("x", [1.5, 2.5, 1.5 + 0.5j])
def test_gamma_derivatives(x):
    d = gamma_derivatives(x, 2)
    g, psi, psi1 = sp.gamma(x), sp.psi(x), sp.polygamma(1, x.real) if np.isreal(x) else None
    assert d[0] == pytest.approx(g, rel=1e-13)
    assert d[1] == pytest.approx(g * psi, rel=1e-12)
    if psi1 is not None:
        assert d[2] == pytest.approx(g * (psi**2 + psi1), rel=1e-11)


@pytest.mark.parametrize("a, x", [(0.5, 1.0), (1.0, 1.0), (2.7, 3.0), (1.3, 0.2)])
def test_lower_gamma_series_against_scipy(a, x):
    assert lower_gamma_series(a, x).real == pytest.approx(sp.gammainc(a, x) * sp.gamma(a), rel=1e-14)


def test_lower_gamma_exponential_case():
    assert lower_gamma_series(1.0, 2.0) == pytest.approx(1 - math.exp(-2.0), rel=1e-15)
