"""The Cesaro operator, its adjoint, affine composition operators and
matrix diagnostics on finite sections.

Conventions: coefficient vectors are columns; ``C`` is lower triangular with
entry (m, n) = 1/(m+1) for n <= m, and ``C*`` is its conjugate transpose.  A
composition operator f -> f(a z + b) is upper triangular in the monomial basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular
from scipy.sparse.linalg import LinearOperator

from .h2core import CoeffFun, as_coeffs, eval_coeffs, inner_product
from .report import CheckReport

__all__ = [
    "AffineSelfMap",
    "MobiusSelfMap",
    "TriangularMatrix",
    "ConvergenceError",
    "SingularSystemError",
    "apply_C",
    "apply_C_star",
    "cstar_tail_bound",
    "eigen_residual",
    "cesaro_matrix",
    "cesaro_operator",
    "comp_matrix",
    "apply_composition",
    "apply_generator",
    "weighted_comp",
    "op_norm_estimate",
    "smin_resolvent",
    "diag_identity_TTstar",
    "commutator_check",
    "universal_translate_diag",
    "matrix_function_triangular",
    "POWER_SEED",
]

POWER_SEED = 0x5EED


class ConvergenceError(RuntimeError):
    """An iterative method did not reach its tolerance."""


class SingularSystemError(ArithmeticError):
    """A triangular system is exactly singular."""


class AliasingError(RuntimeError):
    """Recovered boundary coefficients failed the decay sanity check."""


@dataclass(frozen=True)
class AffineSelfMap:
    """z -> a z + b, with |a| + |b| <= 1 so the closed disk maps into itself."""

    a: complex
    b: complex
    flow_time: float | None = None

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if abs(a) + abs(b) > 1 + 1e-12:
            raise ValueError(f"|a| + |b| = {abs(a) + abs(b)} exceeds 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def flow(cls, t: float) -> "AffineSelfMap":
        """phi_t(z) = e^{-t} z + 1 - e^{-t}."""
        if t < 0:
            raise ValueError("flow time must be non-negative")
        a = math.exp(-t)
        return cls(a, -math.expm1(-t), flow_time=float(t))

    @classmethod
    def deddens(cls, alpha: float) -> "AffineSelfMap":
        """(1 - alpha) z + alpha, the parameterization of the displayed Deddens matrix."""
        return cls(1.0 - alpha, alpha)

    def __call__(self, z):
        return self.a * np.asarray(z) + self.b


@dataclass(frozen=True)
class MobiusSelfMap:
    """z -> (a z + b)/(c z + d); the caller vouches that it maps the disk into itself."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)


@dataclass(frozen=True, eq=False)
class TriangularMatrix:
    orientation: str
    entries: np.ndarray

    def __post_init__(self):
        if self.orientation not in ("lower", "upper"):
            raise ValueError("orientation must be 'lower' or 'upper'")
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("entries must be square")
        mask = np.triu(np.ones(e.shape, bool), 1) if self.orientation == "lower" else np.tril(
            np.ones(e.shape, bool), -1
        )
        if np.any(e[mask] != 0):
            raise ValueError(f"entries outside the {self.orientation} triangle must vanish")
        object.__setattr__(self, "entries", e)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    @property
    def H(self) -> "TriangularMatrix":
        other = "upper" if self.orientation == "lower" else "lower"
        return TriangularMatrix(other, self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, TriangularMatrix):
            return self.entries @ other.entries
        return self.entries @ np.asarray(other)


def apply_C(a) -> CoeffFun:
    """Running means (a_0, (a_0+a_1)/2, ...); exact on truncations."""
    c = as_coeffs(a)
    return CoeffFun(np.cumsum(c) / np.arange(1, c.size + 1))


def apply_C_star(a) -> CoeffFun:
    """Suffix sums sum_{k>=n} a_k/(k+1) over the stored range.

    Missing the k >= N tail, so the error in every output entry is the same
    constant sum_{k>=N} a_k/(k+1).
    """
    c = as_coeffs(a)
    w = c / np.arange(1, c.size + 1)
    return CoeffFun(np.cumsum(w[::-1])[::-1])


def cstar_tail_bound(f, decay_exponent: float, window: int = 16) -> float:
    """Bound on ||C*_N f_N - (C* f)_N|| when |a_k| <= A k^(-s) beyond the stored range.

    Every output entry misses the same sum_{k>=N} a_k/(k+1), bounded by
    A (N^(-s-1) + N^(-s)/s); the vector norm multiplies this by sqrt(N).  A is
    estimated from the last ``window`` stored coefficients; an exactly zero
    trailing window means the input is a polynomial and the bound is 0.
    """
    s = float(decay_exponent)
    if s <= 0:
        raise ValueError("decay exponent must be positive")
    c = as_coeffs(f)
    N = c.size
    lo = max(1, N - window)
    n = np.arange(lo, N, dtype=float)
    tail = np.abs(c[lo:])
    if n.size == 0 or not np.any(tail):
        return 0.0
    A = float(np.max(tail * n**s))
    return math.sqrt(N) * A * (N ** (-s - 1.0) + N ** (-s) / s)


def eigen_residual(w: complex, N: int) -> tuple[float, float]:
    """(||C* q_w - (1-w) q_w|| / ||q_w||, tolerance) at order N, q_w = (1-z)^(w/(1-w)).

    The tolerance is twice :func:`cstar_tail_bound` relative to ||q_w|| plus
    a rounding allowance of 1e-14; it is exactly that allowance for polynomial q_w.
    """
    from .h2core import power_series

    w = complex(w)
    nu = w / (1.0 - w)
    q = power_series(nu, N)
    r = apply_C_star(q).coeffs - (1.0 - w) * q.coeffs
    qn = float(np.linalg.norm(q.coeffs))
    res = float(np.linalg.norm(r)) / qn
    return res, 2.0 * cstar_tail_bound(q, 1.0 + nu.real) / qn + 1e-14


def cesaro_matrix(N: int) -> TriangularMatrix:
    n = np.arange(N)
    C = np.tril(np.ones((N, N))) / (n + 1.0)[:, None]
    return TriangularMatrix("lower", C)


def cesaro_operator(N: int, shift: complex = 0.0, scale: complex = 1.0) -> LinearOperator:
    """``scale * C_N + shift * I`` as a matrix-free operator (O(N) per product)."""

    real = complex(shift).imag == 0 and complex(scale).imag == 0
    dtype = float if real else complex
    if real:
        shift, scale = float(np.real(shift)), float(np.real(scale))
    n1 = np.arange(1, N + 1, dtype=float)

    # real-arithmetic copies of apply_C / apply_C_star keep real inputs real
    def mv(x):
        x = np.asarray(x).ravel()
        return scale * (np.cumsum(x) / n1) + shift * x

    def rmv(x):
        x = np.asarray(x).ravel()
        return np.conj(scale) * np.cumsum((x / n1)[::-1])[::-1] + np.conj(shift) * x

    return LinearOperator((N, N), matvec=mv, rmatvec=rmv, dtype=dtype)


def comp_matrix(m: AffineSelfMap, N: int) -> TriangularMatrix:
    """Matrix of f -> f(a z + b): entry (n, k) = binom(k, n) a^n b^(k-n).

    Column k holds the coefficients of (a z + b)^k, built from column k-1 by one
    multiplication with a z + b.
    """
    M = np.zeros((N, N), dtype=complex)
    M[0, 0] = 1.0
    for k in range(1, N):
        prev = M[:k, k - 1]
        M[:k, k] = m.b * prev
        M[1 : k + 1, k] += m.a * prev
    return TriangularMatrix("upper", M)


def apply_composition(f, m: AffineSelfMap) -> CoeffFun:
    """Coefficients of f(a z + b) (output n depends on inputs k >= n)."""
    c = as_coeffs(f)
    # Horner in coefficient space: acc <- acc * (a z + b) + c_k
    acc = np.zeros(c.size, dtype=complex)
    for ck in c[::-1]:
        shifted = np.empty_like(acc)
        shifted[0] = 0.0
        shifted[1:] = acc[:-1]
        acc = m.a * shifted + m.b * acc
        acc[0] += ck
    return CoeffFun(acc)


def apply_generator(f) -> CoeffFun:
    """(A f)(z) = (1 - z) f'(z), the generator of the flow semigroup (exact)."""
    c = as_coeffs(f)
    n = np.arange(c.size)
    d = np.zeros(c.size, dtype=complex)
    d[:-1] = (n[1:] * c[1:])
    out = d.copy()
    out[1:] -= d[:-1]
    return CoeffFun(out)


def weighted_comp(f, phi, M: int, order: int | None = None, alias_tol: float = 1e-10) -> CoeffFun:
    """Coefficients of (1 - phi(z))/(1 - z) * f(phi(z)) by boundary sampling.

    Samples sit at the half-offset points exp(2 pi i (j + 1/2)/M), which avoid the
    removable singularity of the weight at z = 1.  The coefficients are read from
    an FFT; the negative-frequency half must be negligible, otherwise the grid is
    too coarse for the function and :class:`AliasingError` is raised.
    """
    c = as_coeffs(f)
    if order is None:
        order = c.size
    if order > M // 2:
        raise ValueError("order must not exceed M/2")
    theta = 2 * np.pi * (np.arange(M) + 0.5) / M
    z = np.exp(1j * theta)
    w = phi(z)
    vals = (1 - w) / (1 - z) * eval_coeffs(c, w)
    coef = np.fft.fft(vals) / M * np.exp(-1j * np.pi * np.arange(M) / M)
    # index k >= M/2 holds frequency k - M
    scale = max(float(np.max(np.abs(coef))), 1e-300)
    leak = float(np.max(np.abs(coef[M // 2 :])))
    if leak > alias_tol * scale:
        raise AliasingError(f"negative-frequency content {leak:.3e} exceeds tolerance")
    return CoeffFun(coef[:order])


def op_norm_estimate(op: LinearOperator, iters: int = 20000, tol: float = 1e-12,
                     seed: int = POWER_SEED) -> float:
    """sqrt of the largest Rayleigh quotient of op^H op from power iteration.

    The start vector comes from a fixed seed so the estimate is deterministic.
    Raises :class:`ConvergenceError` when successive estimates still differ by
    more than ``tol`` (relative) after ``iters`` steps.
    """
    N = op.shape[1]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(N)
    if np.dtype(op.dtype).kind == "c":
        x = x + 1j * rng.standard_normal(N)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = op.rmatvec(op.matvec(x))
        new = float(np.real(np.vdot(x, y)))
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return 0.0
        x = y / nrm
        if abs(new - est) <= tol * abs(new):
            return math.sqrt(new)
        est = new
    raise ConvergenceError(f"power iteration not converged after {iters} steps (estimate {math.sqrt(est)})")


def smin_resolvent(lam: complex, N: int, iters: int = 500, tol: float = 1e-12,
                   seed: int = POWER_SEED) -> float:
    """Smallest singular value of C_N - lam I by inverse iteration.

    Each step solves with the lower triangular C_N - lam I and its conjugate
    transpose (two O(N^2) substitutions).
    """
    lam = complex(lam)
    diag = 1.0 / np.arange(1, N + 1)
    if np.any(diag - lam == 0):
        raise SingularSystemError(f"lambda = {lam} is an eigenvalue of C_{N}")
    A = cesaro_matrix(N).entries - lam * np.eye(N)
    AH = A.conj().T
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = solve_triangular(A, x, lower=True)
        y = solve_triangular(AH, y, lower=False)
        rq = float(np.real(np.vdot(x, y)))  # ~ 1/smin^2
        x = y / np.linalg.norm(y)
        if abs(rq - est) <= tol * abs(rq):
            return 1.0 / math.sqrt(rq)
        est = rq
    raise ConvergenceError(f"inverse iteration not converged at lambda={lam}")


def diag_identity_TTstar(N: int) -> CheckReport:
    """(I - C_N)(I - C_N)^* must be diag(0, 1/2, 2/3, ...) exactly."""
    T = np.eye(N) - cesaro_matrix(N).entries.real
    P = T @ T.T
    n = np.arange(N)
    off = P - np.diag(np.diag(P))
    off_max = float(np.max(np.abs(off))) if N > 1 else 0.0
    diag_dev = float(np.max(np.abs(np.diag(P) - n / (n + 1.0))))
    return CheckReport(
        name="tt_star_diagonal",
        anchor="TT* diagonal display",
        computed={"offdiag_max": off_max, "diag_max_dev": diag_dev},
        reference={"offdiag_max": 0.0, "diag_max_dev": 0.0},
        tolerance=1e-13,
        passed=max(off_max, diag_dev) <= 1e-13,
        tag="PAPER",
        params={"N": N},
    )


def commutator_check(alpha: float, N: int, tol: float = 1e-12) -> CheckReport:
    """Max entry of [C_{(1-alpha)z+alpha}, C*] on the leading N/2 block."""
    M = comp_matrix(AffineSelfMap.deddens(alpha), N).entries
    Cs = cesaro_matrix(N).entries.T
    K = M @ Cs - Cs @ M
    h = max(N // 2, 1)
    val = float(np.max(np.abs(K[:h, :h])))
    return CheckReport(
        name=f"commutator_alpha_{alpha:g}",
        anchor="Deddens commutation of the composition matrix with C*",
        computed=val,
        reference=0.0,
        tolerance=tol,
        passed=val <= tol,
        tag="PAPER",
        params={"alpha": alpha, "N": N},
    )


def translate_F(alpha: float, beta: complex) -> Callable:
    """F(z) = (1 - alpha)^(1/z - 1) - beta."""

    def F(z):
        z = np.asarray(z, dtype=complex)
        return (1.0 - alpha) ** (1.0 / z - 1.0) - beta

    return F


def universal_translate_diag(alpha: float, beta: complex, n_max: int,
                             tol: float = 1e-12) -> CheckReport:
    """Diagonal n-1 of comp_matrix((1-alpha), alpha) - beta I against F(1/n)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    M = comp_matrix(AffineSelfMap.deddens(alpha), n_max).entries
    diag = np.diag(M) - beta
    n = np.arange(1, n_max + 1)
    F = translate_F(alpha, beta)(1.0 / n)
    dev = float(np.max(np.abs(diag - F)))
    return CheckReport(
        name="universal_translate_diagonal",
        anchor="F(1/n) = (1 - alpha)^(n-1) - beta",
        computed=dev,
        reference=0.0,
        tolerance=tol,
        passed=dev <= tol,
        tag="PAPER",
        params={"alpha": alpha, "beta": beta, "n_max": n_max},
    )


def matrix_function_triangular(T: TriangularMatrix, F: Callable, min_gap: float = 1e-8) -> TriangularMatrix:
    """F(T) for triangular T with distinct diagonal, by the Parlett recurrence.

    Intended for small desk checks.  Refuses matrices whose closest pair of
    diagonal entries is nearer than ``min_gap``.
    """
    if T.orientation == "lower":
        return matrix_function_triangular(T.H, lambda z: np.conj(F(np.conj(z))), min_gap).H
    A = T.entries
    n = A.shape[0]
    d = np.diag(A)
    if n > 1:
        gaps = np.abs(d[:, None] - d[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < min_gap:
            raise ValueError(f"diagonal separation {gaps.min():.2e} below {min_gap:g}")
    R = np.zeros_like(A)
    R[np.diag_indices(n)] = np.asarray(F(d), dtype=complex) * np.ones(n)
    for p in range(1, n):
        for i in range(n - p):
            j = i + p
            s = A[i, j] * (R[j, j] - R[i, i])
            if p > 1:
                k = slice(i + 1, j)
                s += A[i, k] @ R[k, j] - R[i, k] @ A[k, j]
            R[i, j] = s / (A[j, j] - A[i, i])
    return TriangularMatrix("upper", R)


def adjoint_pairing_defect(a, b) -> float:
    """|<C a, b> - <a, C* b>| for equal-order truncations."""
    return abs(inner_product(apply_C(a), b) - inner_product(a, apply_C_star(b)))
