import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import svdvals
from scipy.sparse.linalg import aslinearoperator

from cesaro.h2core import CoeffFun, eval_coeffs, power_series
from cesaro.ops import (
    AffineSelfMap,
    AliasingError,
    ConvergenceError,
    SingularSystemError,
    TriangularMatrix,
    adjoint_pairing_defect,
    apply_C,
    apply_C_star,
    apply_composition,
    apply_generator,
    cesaro_matrix,
    cesaro_operator,
    commutator_check,
    comp_matrix,
    diag_identity_TTstar,
    eigen_residual,
    matrix_function_triangular,
    op_norm_estimate,
    smin_resolvent,
    translate_F,
    universal_translate_diag,
    weighted_comp,
)


def _random(N, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(N) + 1j * rng.standard_normal(N)


def test_apply_C_examples():
    np.testing.assert_allclose(apply_C([1, 0, 0, 0]).coeffs, [1, 1 / 2, 1 / 3, 1 / 4])
    np.testing.assert_allclose(apply_C([2, 4, 6]).coeffs, [2, 3, 4])
    np.testing.assert_array_equal(apply_C(np.zeros(5)).coeffs, np.zeros(5))


def test_apply_C_is_exact_on_truncations():
    f = _random(200, 0)
    np.testing.assert_allclose(apply_C(f[:50]).coeffs, apply_C(f).coeffs[:50], rtol=0, atol=0)


def test_apply_C_star_examples():
    np.testing.assert_allclose(apply_C_star([0, 0, 1, 0]).coeffs, [1 / 3, 1 / 3, 1 / 3, 0])
    np.testing.assert_allclose(apply_C_star([1, 0, 0]).coeffs, [1, 0, 0])


def test_C_star_is_matrix_transpose():
    N = 40
    f = _random(N, 1)
    np.testing.assert_allclose(apply_C_star(f).coeffs, cesaro_matrix(N).entries.T @ f, atol=1e-14)
    np.testing.assert_allclose(apply_C(f).coeffs, cesaro_matrix(N) @ f, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2**31))
def test_adjoint_pairing_property(N, seed):
    a, b = _random(N, seed), _random(N, seed + 1)
    assert adjoint_pairing_defect(a, b) <= 1e-12 * np.linalg.norm(a) * np.linalg.norm(b)


def test_affine_self_map_validation():
    with pytest.raises(ValueError):
        AffineSelfMap(0.8, 0.5)
    with pytest.raises(ValueError):
        AffineSelfMap.flow(-1.0)
    m = AffineSelfMap.flow(0.7)
    assert m.a + m.b == pytest.approx(1.0, abs=1e-15)


def test_comp_matrix_identity_map():
    np.testing.assert_array_equal(comp_matrix(AffineSelfMap(1, 0), 8).entries, np.eye(8))


def test_apply_composition_examples():
    t = 0.4
    m = AffineSelfMap.flow(t)
    np.testing.assert_array_equal(apply_composition([1, 0, 0], m).coeffs, [1, 0, 0])
    np.testing.assert_allclose(apply_composition([0, 1, 0], m).coeffs,
                               [1 - math.exp(-t), math.exp(-t), 0], atol=1e-15)


def test_apply_composition_matches_matrix_and_sampling():
    f = _random(30, 2)
    m = AffineSelfMap(0.3 - 0.2j, 0.5)
    out = apply_composition(f, m)
    np.testing.assert_allclose(out.coeffs, comp_matrix(m, 30) @ f, atol=1e-12)
    z = 0.6 * np.exp(1j * np.linspace(0, 2 * np.pi, 11))
    np.testing.assert_allclose(eval_coeffs(out, z), eval_coeffs(f, m(z)), atol=1e-12)


@pytest.mark.parametrize("s, t", [(0.3, 0.7), (1.0, 1.0)])
def test_semigroup(s, t):
    N = 256
    Ms, Mt = comp_matrix(AffineSelfMap.flow(s), N), comp_matrix(AffineSelfMap.flow(t), N)
    Mst = comp_matrix(AffineSelfMap.flow(s + t), N)
    assert np.max(np.abs(Ms @ Mt - Mst.entries)) <= 1e-12


def test_generator_against_flow_difference():
    f = CoeffFun(power_series(3, 12).coeffs + _random(12, 3) * 0.1)
    h = 1e-6
    fd = (apply_composition(f, AffineSelfMap.flow(h)).coeffs - f.coeffs) / h
    assert np.max(np.abs(fd - apply_generator(f).coeffs)) < 1e-4


def test_triangular_matrix_validation_and_adjoint():
    with pytest.raises(ValueError):
        TriangularMatrix("lower", [[1, 2], [0, 1]])
    L = cesaro_matrix(5)
    assert L.H.orientation == "upper"
    np.testing.assert_array_equal(L.H.entries, L.entries.T)


def test_weighted_comp_identity_map():
    f = _random(16, 4)
    out = weighted_comp(f, lambda z: z, 64)
    np.testing.assert_allclose(out.coeffs, f, atol=1e-12)


def test_weighted_comp_on_constant():
    m = AffineSelfMap(0.5, 0.5)
    out = weighted_comp([1.0], m, 64, order=8)
    # (1 - (z+1)/2)/(1 - z) = 1/2
    np.testing.assert_allclose(out.coeffs, [0.5] + [0] * 7, atol=1e-13)


def test_weighted_comp_flow_on_eigenfunction_matches_sampling():
    m = AffineSelfMap.flow(0.5)
    q = power_series(0.3 / 0.7, 64)
    out = weighted_comp(q, m, 512, order=64)
    z = 0.5 * np.exp(2j * np.pi * np.arange(9) / 9)
    direct = (1 - m(z)) / (1 - z) * (1 - m(z)) ** (0.3 / 0.7)
    np.testing.assert_allclose(eval_coeffs(out, z), direct, atol=1e-10)


def test_weighted_comp_rational_map():
    phi = lambda z: 1.0 / (2.0 - z)
    out = weighted_comp([1.0], phi, 256, order=32)
    z = np.array([0.3, -0.4j])
    np.testing.assert_allclose(eval_coeffs(out, z), (1 - phi(z)) / (1 - z), atol=1e-12)


def test_weighted_comp_aliasing():
    with pytest.raises(AliasingError):
        weighted_comp(np.eye(13)[12], lambda z: z, 16, order=8)
    with pytest.raises(ValueError):
        weighted_comp([1.0], lambda z: z, 16, order=9)


def test_op_norm_identity():
    assert op_norm_estimate(aslinearoperator(np.eye(10))) == pytest.approx(1.0, abs=1e-12)


def test_op_norm_of_C_matches_dense_svd_and_bounds():
    vals = []
    for N in (64, 128, 256):
        est = op_norm_estimate(cesaro_operator(N))
        assert est == pytest.approx(svdvals(cesaro_matrix(N).entries.real)[0], rel=1e-5)
        vals.append(est)
    assert vals == sorted(vals) and vals[-1] <= 2 + 1e-12
    assert op_norm_estimate(cesaro_operator(256, 1.0, -1.0), tol=1e-8) <= 1 + 1e-12


def test_op_norm_deterministic_and_nonconvergence():
    op = cesaro_operator(128)
    assert op_norm_estimate(op) == op_norm_estimate(op)
    with pytest.raises(ConvergenceError):
        op_norm_estimate(op, iters=3, tol=1e-15)


@pytest.mark.parametrize("lam", [2.5, 4.0, 1 + 0.5j, 0.3 - 0.2j])
def test_smin_resolvent_matches_dense_svd(lam):
    N = 256
    dense = svdvals(cesaro_matrix(N).entries - lam * np.eye(N))[-1]
    assert smin_resolvent(lam, N) == pytest.approx(dense, rel=1e-8)


def test_smin_resolvent_singular():
    with pytest.raises(SingularSystemError):
        smin_resolvent(1.0, 16)
    with pytest.raises(SingularSystemError):
        smin_resolvent(0.25, 16)


def test_tt_star_examples():
    r = diag_identity_TTstar(4)
    assert r.passed and r.computed["offdiag_max"] <= 1e-15
    assert diag_identity_TTstar(1).passed
    assert diag_identity_TTstar(512).passed


def test_commutator_examples():
    assert commutator_check(0.5, 128).passed
    assert commutator_check(0.9, 128).passed
    assert commutator_check(0.0, 32).computed == 0.0


def test_universal_translate_examples():
    alpha, beta = 0.5, 0.2
    F = translate_F(alpha, beta)
    assert F(1.0) == pytest.approx(1 - beta)
    assert F(0.25) == pytest.approx(0.125 - beta)
    assert translate_F(0.3, 0.0)(0.5) == pytest.approx(0.7)
    assert universal_translate_diag(alpha, beta, 64).passed


def test_parlett_examples():
    T = cesaro_matrix(16).H
    same = matrix_function_triangular(T, lambda z: z)
    np.testing.assert_allclose(same.entries, T.entries, atol=1e-12)
    one = matrix_function_triangular(T, lambda z: np.ones_like(z))
    np.testing.assert_allclose(np.diag(one.entries), np.ones(16))
    F = translate_F(0.5, 0.1)
    FT = matrix_function_triangular(T, F)
    np.testing.assert_allclose(np.diag(FT.entries), F(1.0 / np.arange(1, 17)), atol=1e-12)


def test_parlett_matches_dense_function_for_polynomial():
    T = TriangularMatrix("upper", np.triu(np.random.default_rng(5).standard_normal((8, 8))))
    out = matrix_function_triangular(T, lambda z: z**3 - 2 * z)
    A = T.entries
    np.testing.assert_allclose(out.entries, A @ A @ A - 2 * A, atol=1e-10)


def test_parlett_refuses_close_diagonal():
    with pytest.raises(ValueError):
        matrix_function_triangular(TriangularMatrix("upper", np.eye(3)), np.exp)


def test_eigen_identities():
    res, tol = eigen_residual(0.5, 64)
    assert res <= 1e-14 and tol == pytest.approx(1e-14)
    res, tol = eigen_residual(0.3 + 0.2j, 10**5)
    assert res <= tol
