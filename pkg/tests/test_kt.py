import math

import numpy as np
import pytest
from scipy.special import gamma as sp_gamma

from cesaro.h2core import CoeffFun, cauchy_kernel, power_series
from cesaro.kt import (
    KTPoint,
    U_alpha,
    U_alpha_norm_proxy,
    U_alpha_reference,
    h2mu_norm,
    intertwine_residual,
    kt_basis_g,
    kt_of_polynomial_image_under_C,
    kt_transform,
    mu_circle,
    richardson_tail_sum,
    sstar_identity,
)
from cesaro.model import sobol_disk_points
from cesaro.ops import ConvergenceError, apply_C, apply_C_star, cstar_tail_bound

W07 = sobol_disk_points(64, 0.7)


def test_kt_point():
    p = KTPoint(0.5)
    assert p.nu == 1.0
    with pytest.raises(ValueError):
        KTPoint(1.0)
    for w in sobol_disk_points(200, 0.999):
        assert KTPoint(w).nu.real > -0.5


def test_transform_of_constant():
    for w in W07[:10]:
        assert kt_transform([1.0], w, polynomial=True) == 1.0


def test_transform_of_one_minus_z():
    # pairing with the explicit coefficients (1, -1) gives 1 + nu
    for w in W07[:10]:
        nu = w / (1 - w)
        assert kt_transform([1.0, -1.0], w, polynomial=True) == pytest.approx(1 + nu, abs=1e-15)


@pytest.mark.parametrize("lam", [0.3, 0.6, 0.4 + 0.3j])
def test_transform_of_cauchy_kernel(lam):
    k = cauchy_kernel(lam, 2048)
    for w in W07[:16]:
        nu = w / (1 - w)
        assert abs(kt_transform(k, w) - (1 - np.conj(lam)) ** nu) <= 1e-9


def test_transform_detects_truncation():
    f = power_series(0.2, 64)
    with pytest.raises(ConvergenceError):
        kt_transform(f, 0.6)


def test_generalized_binomials_against_gamma_ratio():
    nu = 0.3 + 0.4j
    c = power_series(nu, 51).coeffs
    ref = sp_gamma(50 - nu) / (sp_gamma(-nu) * sp_gamma(51))
    assert c[50] == pytest.approx(ref, rel=1e-12)


def test_richardson_tail_against_direct_sum():
    nu = 1.5
    c = power_series(nu, 2**20).coeffs
    direct = np.sum(c[10:] / np.arange(11, 2**20 + 1))
    assert richardson_tail_sum(nu, 10) == pytest.approx(direct, abs=1e-12)


def test_intertwining_on_polynomials():
    rng = np.random.default_rng(6)
    for _ in range(10):
        f = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        assert intertwine_residual(f, W07) <= 1e-8
    assert intertwine_residual(np.zeros(4), W07[:5]) == 0.0


def test_image_under_C_of_constant():
    # C 1 = sum z^n/(n+1), whose transform is (1 - w) K1 = 1 - w
    for w in W07[:8]:
        assert kt_of_polynomial_image_under_C([1.0], w) == pytest.approx(1 - w, abs=1e-12)


@pytest.mark.parametrize("a", [0.3, 0.5])
def test_eigen_identity_at_kt_points(a):
    N = 4096
    q = power_series(a / (1 - a), N)
    r = apply_C_star(q).coeffs - (1 - a) * q.coeffs
    # the truncated C* misses one constant in every entry; bound it and carry it through K
    delta = cstar_tail_bound(q, 1 + a / (1 - a)) / math.sqrt(N)
    for w in sobol_disk_points(16, 0.5):
        c = power_series(w / (1 - w), N).coeffs
        val = kt_transform(r, w, polynomial=True)
        assert abs(val) <= 2 * delta * np.sum(np.abs(c)) + 1e-13


def test_h2mu_norm_examples():
    assert h2mu_norm([1.0], 100) == 1.0
    vals = [h2mu_norm([0.0, 1.0], N) for N in (10**4, 10**5, 10**6)]
    assert vals == sorted(vals)
    assert abs(vals[-1] - math.sqrt(math.pi**2 / 6 - 1)) <= 1e-6


def test_h2mu_norm_of_z_squared_closed_form():
    # (I - C)^2 1 has coefficients (H_{n+1} - 2)/(n + 1) for n >= 1
    N = 10**6
    n = np.arange(1, N)
    H = np.cumsum(1.0 / np.arange(1, N + 1))
    c = (H[n] - 2) / (n + 1)
    for M in (10**5, N):
        assert h2mu_norm([0, 0, 1], M) == pytest.approx(np.linalg.norm(c[: M - 1]), rel=1e-12)
    lo, hi = h2mu_norm([0, 0, 1], 10**5), h2mu_norm([0, 0, 1], N)
    assert hi**2 - lo**2 == pytest.approx(np.sum(c[10**5 - 1 :] ** 2), rel=1e-9)


def test_h2mu_matches_apply_C_pipeline():
    one = np.zeros(64)
    one[0] = 1
    t = one - apply_C(one).coeffs
    assert h2mu_norm([0, 1], 64) == pytest.approx(np.linalg.norm(t), rel=1e-15)


def test_U_alpha_origin():
    for alpha in (0.5, 1.0, 3.0):
        assert abs(U_alpha(alpha, 0.0) - (1 - math.exp(-alpha))) <= 1e-10


@pytest.mark.parametrize("w", [0.2, 0.5, 0.7])
def test_U_alpha_large_alpha_limit(w):
    nu = w / (1 - w)
    assert U_alpha(60.0, w) == pytest.approx(2**nu, rel=1e-10)


def test_U_alpha_matches_series():
    for w in sobol_disk_points(40, 0.8):
        assert U_alpha(1.0, w) == pytest.approx(U_alpha_reference(1.0, w), rel=1e-9, abs=1e-12)


def test_U_alpha_zero_free_on_grid():
    pts = sobol_disk_points(1000, 0.8)
    assert min(abs(U_alpha(1.0, w)) for w in pts) > 0


def test_U_alpha_norm_proxy_grows():
    vals = [U_alpha_norm_proxy(1.0, 1 - 2.0**-k, 128) for k in (2, 3, 4, 5)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_sstar_identity_examples():
    z = sobol_disk_points(50, 0.9)
    assert sstar_identity([1.0], z) <= 1e-15
    assert sstar_identity(cauchy_kernel(0.5, 200), z) <= 1e-9
    f = np.random.default_rng(7).standard_normal(9)
    assert sstar_identity(f, z) <= 1e-8


def test_kt_basis_g_examples():
    assert kt_basis_g(0, 0.3) == 1
    assert kt_basis_g(1, 0.5) == pytest.approx(1.0)
    for n in range(1, 7):
        nodes = np.array([j / (j + 1) for j in range(n)])
        assert np.max(np.abs(kt_basis_g(n, nodes))) <= 1e-15
    with pytest.raises(ValueError):
        kt_basis_g(2, 1.0)


def test_mu_circles():
    c0, c3 = mu_circle(0), mu_circle(3)
    assert (c0.center, c0.radius) == (0.0, 1.0)
    assert (c3.center, c3.radius, c3.mass) == (0.75, 0.25, 1 / 16)
    for K in (0, 5, 20):
        assert sum(mu_circle(n).mass for n in range(K + 1)) == pytest.approx(1 - 2.0 ** (-K - 1))
    # every circle passes through 1
    for n in range(6):
        c = mu_circle(n)
        assert c.center + c.radius == pytest.approx(1.0)


def test_kt_of_coefffun_input():
    assert kt_transform(CoeffFun([2.0]), 0.1, polynomial=True) == 2.0
