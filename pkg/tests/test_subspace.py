import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cesaro.h2core import CoeffFun, PowerLogParams, eval_coeffs, power_log_series, power_series
from cesaro.model import RankCollapseError
from cesaro.ops import apply_C_star
from cesaro.subspace import (
    LambdaSequence,
    SubspaceBasis,
    b_r_series,
    chain_members,
    chain_membership_probe,
    classify_density,
    cstar_image_defect,
    cstar_jordan_matrix,
    cstar_on_powerlog,
    invariance_residual_span,
    pn_density_check,
    q_lambda_divide,
)

R = np.logspace(4, 6, 21)


def test_cstar_eigenvalue_examples():
    img = cstar_on_powerlog(PowerLogParams(1.0, 0))
    np.testing.assert_allclose(img.coeffs, [0.5])
    assert cstar_on_powerlog(PowerLogParams(0.0, 0)).coeffs[0] == 1.0
    np.testing.assert_allclose(apply_C_star(power_series(0, 10)).coeffs[0], 1.0)


def test_cstar_jordan_j1_formula():
    mu = 0.3 + 0.4j
    np.testing.assert_allclose(cstar_on_powerlog(PowerLogParams(mu, 1)).coeffs,
                               [-(mu + 1) ** -2, (mu + 1) ** -1])


@pytest.mark.parametrize("mu", [1.0, 0.5, 0.3 + 0.4j])
@pytest.mark.parametrize("j", [0, 1, 2])
def test_cstar_image_within_truncation_bound(mu, j):
    d, tol = cstar_image_defect(PowerLogParams(mu, j), 10**5)
    assert d <= max(tol, 1e-14)


def test_cstar_image_on_polynomial_is_exact():
    d, tol = cstar_image_defect(PowerLogParams(2.0, 0), 64)
    assert d <= 1e-14 and tol == 0.0


def test_cstar_image_matches_finite_difference_in_mu():
    # the j = 1 image is the mu-derivative of the j = 0 identity
    mu, h, N = 0.5, 1e-6, 200
    lhs = lambda m: apply_C_star(power_series(m, N)).coeffs
    fd = (lhs(mu + h) - lhs(mu - h)) / (2 * h)
    direct = apply_C_star(power_log_series(PowerLogParams(mu, 1), N)).coeffs
    assert np.max(np.abs(fd - direct)) <= 1e-7


def test_jordan_matrix_shape():
    Rm = cstar_jordan_matrix(0.5, 3)
    assert np.allclose(np.tril(Rm, -1), 0)
    np.testing.assert_allclose(np.diag(Rm), 1 / 1.5)


def test_span_invariance_examples():
    a = invariance_residual_span(SubspaceBasis.powerlog(1.0, 0, 64))
    assert a["residual"] <= 1e-14
    N = 10**5
    b = invariance_residual_span(SubspaceBasis.powerlog(0.5, 1, N), decay_exponent=1.5)
    assert b["residual"] <= b["tolerance"]
    c = invariance_residual_span(SubspaceBasis((power_series(0.5, N), CoeffFun.monomial(1, N))))
    assert c["residual"] >= 1e-2


def test_jordan_structure_of_representation():
    mu, k, N = 0.5, 2, 10**5
    r = invariance_residual_span(SubspaceBasis.powerlog(mu, k, N), decay_exponent=1 + mu)
    Rm = r["representation"]
    assert np.max(np.abs(np.tril(Rm, -1))) <= 1e-3
    assert np.max(np.abs(np.diag(Rm) - 1 / (mu + 1))) <= 1e-3
    assert np.max(np.abs(Rm - cstar_jordan_matrix(mu, k))) <= 1e-3


def test_span_rank_collapse():
    f = power_series(0.5, 100)
    with pytest.raises(RankCollapseError):
        invariance_residual_span(SubspaceBasis((f, 2 * f)))
    with pytest.raises(RankCollapseError):
        invariance_residual_span(SubspaceBasis((f, CoeffFun.zeros(100))))


def test_basis_gram_and_rank():
    B = SubspaceBasis.powerlog(0.5, 2, 512)
    G = B.gram()
    assert np.all(np.linalg.eigvalsh(G) >= -1e-12)
    assert B.rank() == 3
    assert B.labels == ((0.5 + 0j, 0), (0.5 + 0j, 1), (0.5 + 0j, 2))
    with pytest.raises(ValueError):
        SubspaceBasis(())


def test_lambda_sequence():
    lam = LambdaSequence.chain(1)
    np.testing.assert_array_equal(lam.prefix(4), [4, 7, 10, 13])
    with pytest.raises(ValueError):
        LambdaSequence.arithmetic(1.0, 0.0)
    bad = LambdaSequence(lambda: iter([1.0, 1.5, 2.0]), 1.0)
    with pytest.raises(ValueError):
        bad.prefix(3)


def test_b_r_lambda1_a045_decreasing():
    b = b_r_series(LambdaSequence.chain(1), 0.45, R)
    assert np.all(np.diff(b) < 0)
    v = classify_density(LambdaSequence.chain(1), 0.45, R)
    assert (v.behaviour, v.verdict) == ("bounded", "not dense")


def test_b_r_lambda1_a03_increasing():
    b = b_r_series(LambdaSequence.chain(1), 0.3, R)
    assert np.all(np.diff(b) > 0)
    v = classify_density(LambdaSequence.chain(1), 0.3, R)
    assert v.behaviour == "unbounded"
    assert v.slope == pytest.approx(1 / 3 - 0.3, abs=2e-3)


def test_b_r_harmonic_against_direct_sum():
    seq = LambdaSequence.arithmetic(1.0, 1.0)
    b = b_r_series(seq, 1.0, [1e3 + 0.5, 1e6 + 0.5])
    for r, val in zip([1e3 + 0.5, 1e6 + 0.5], b):
        n = np.arange(1, int(r) + 1)
        assert val == pytest.approx(np.sum(1.0 / n) - math.log(r), abs=1e-12)
    assert abs(b[-1] - np.euler_gamma) <= 1e-5
    assert classify_density(seq, 1.0, R).behaviour == "bounded"


def test_b_r_boundary_case_inconclusive():
    assert classify_density(LambdaSequence.chain(1), 0.5, R).verdict == "inconclusive"


def test_b_r_dense_verdict():
    # density 1 exponents with a = 0.6 < 1 grow without bound
    v = classify_density(LambdaSequence.arithmetic(1.0, 1.0), 0.6, R)
    assert (v.behaviour, v.verdict) == ("unbounded", "dense")


def test_b_r_requires_positive_a():
    with pytest.raises(ValueError):
        b_r_series(LambdaSequence.chain(1), 0.0, R)


def test_q_lambda_examples():
    assert np.all(q_lambda_divide([3.0, 0, 0], 0.5).coeffs == 0)
    np.testing.assert_allclose(q_lambda_divide([0, 0, 1.0], 0.5).coeffs, [0.5, 1, 0])
    with pytest.raises(ValueError):
        q_lambda_divide([1.0], 1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=60),
       st.complex_numbers(max_magnitude=0.99))
def test_q_lambda_reconstruction_property(coeffs, lam):
    a = np.array(coeffs, dtype=complex)
    q = q_lambda_divide(a, lam).coeffs
    rec = np.concatenate([[0.0], q[:-1]]) - lam * q
    rec[0] += eval_coeffs(a, lam)
    assert np.max(np.abs(rec - a)) <= 1e-13 * (1 + np.max(np.abs(a))) * a.size


def test_q_lambda_reconstruction_large_order():
    rng = np.random.default_rng(8)
    a = rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
    lam = 0.5 + 0.3j
    q = q_lambda_divide(a, lam).coeffs
    rec = np.concatenate([[0.0], q[:-1]]) - lam * q
    rec[0] += a[0] + lam * q[0]
    assert np.max(np.abs(rec - a)) / np.max(np.abs(a)) <= 1e-14


@pytest.mark.parametrize("k", [0, 3, 10])
@pytest.mark.parametrize("n", [1, 4, 16, 256])
def test_pn_on_monomials(k, n):
    assert abs(pn_density_check(CoeffFun.monomial(k, k + 1), n) - n**-0.5) <= 1e-15


def test_pn_on_polynomial_decreases_and_zero():
    h = np.random.default_rng(9).standard_normal(8)
    seq = [pn_density_check(h, n) for n in (1, 4, 16, 64, 256)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert pn_density_check(np.zeros(5), 3) == 0.0
    with pytest.raises(ValueError):
        pn_density_check([1.0], 0)


def test_chain_members_start_at_ell():
    m = chain_members(4, 3, 16)
    np.testing.assert_array_equal(m[0].coeffs, power_series(4, 16).coeffs)
    np.testing.assert_array_equal(m[2].coeffs, power_series(10, 16).coeffs)


def test_probe_one_minus_z_against_V4_stagnates():
    r = chain_membership_probe(1, 4, 10**5, 40)
    assert r.passed
    assert r.computed["trend"] == "stagnating" and r.computed["distance"] > 1e-6


@pytest.mark.parametrize("k", [4, 7])
def test_probe_members_of_V4(k):
    r = chain_membership_probe(k, 4, 10**5, 40)
    assert r.passed and r.computed["distance"] <= 1e-10


def test_probe_congruence():
    with pytest.raises(ValueError):
        chain_membership_probe(2, 4, 100, 8)
