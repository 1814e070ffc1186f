"""Coefficient-sequence algebra for the Hardy space H^2 of the unit disk.

A function in H^2 is represented by its first ``N`` Taylor coefficients at the
origin (a :class:`CoeffFun`).  Every operation that can change the length of a
sequence takes the output order explicitly, so truncation is never implicit.
The H^2 norm of a sequence is its l^2 norm.

The special series ``(1 - z)**mu * log(1 - z)**j`` are built from the binomial
recurrence and truncated products; ``log`` is always the principal branch,
which is unambiguous because ``1 - z`` has positive real part on the disk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy.signal import fftconvolve

__all__ = [
    "CoeffFun",
    "PowerLogParams",
    "FFT_CROSSOVER",
    "as_coeffs",
    "truncated_product",
    "inner_product",
    "norm",
    "power_series",
    "log_series",
    "power_log_series",
    "eval_coeffs",
    "cauchy_kernel",
    "tail_bound",
]

# Orders at or above this use FFT convolution for truncated products.
FFT_CROSSOVER = 512


@dataclass(frozen=True, eq=False)
class CoeffFun:
    """Truncated Taylor coefficient sequence a_0, ..., a_{N-1}."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("a CoeffFun needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size

    def __len__(self):
        return self.order

    def __getitem__(self, idx):
        return self.coeffs[idx]

    def __repr__(self):
        head = np.array2string(self.coeffs[:6], precision=6)
        return f"CoeffFun(order={self.order}, head={head})"

    @classmethod
    def zeros(cls, order: int) -> "CoeffFun":
        return cls(np.zeros(order, dtype=complex))

    @classmethod
    def monomial(cls, k: int, order: int) -> "CoeffFun":
        c = np.zeros(order, dtype=complex)
        c[k] = 1.0
        return cls(c)

    def resize(self, order: int) -> "CoeffFun":
        """Truncate or zero-pad to ``order`` coefficients."""
        out = np.zeros(order, dtype=complex)
        m = min(order, self.order)
        out[:m] = self.coeffs[:m]
        return CoeffFun(out)

    def _binary(self, other, op):
        if isinstance(other, CoeffFun):
            if other.order != self.order:
                raise ValueError(
                    f"order mismatch ({self.order} vs {other.order}); resize explicitly"
                )
            return CoeffFun(op(self.coeffs, other.coeffs))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return CoeffFun(-self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, Number):
            return CoeffFun(self.coeffs * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Number):
            return CoeffFun(self.coeffs / scalar)
        return NotImplemented

    def norm(self) -> float:
        return norm(self)

    def __call__(self, z):
        return eval_coeffs(self, z)


@dataclass(frozen=True)
class PowerLogParams:
    """Exponent ``mu`` (Re mu > -1/2) and log power ``j`` of (1-z)^mu log^j(1-z)."""

    mu: complex
    j: int = 0

    def __post_init__(self):
        mu = complex(self.mu)
        if not mu.real > -0.5:
            raise ValueError(f"Re(mu) must exceed -1/2 for H^2 membership, got {mu}")
        if int(self.j) != self.j or self.j < 0:
            raise ValueError("j must be a non-negative integer")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "j", int(self.j))


def as_coeffs(f) -> np.ndarray:
    if isinstance(f, CoeffFun):
        return f.coeffs
    return np.asarray(f, dtype=complex).ravel()


def truncated_product(f, g, order: int | None = None) -> CoeffFun:
    """First ``order`` coefficients of f*g (defaults to the shorter input's order).

    Direct convolution below :data:`FFT_CROSSOVER`, FFT convolution above it.
    """
    a, b = as_coeffs(f), as_coeffs(g)
    if order is None:
        order = min(a.size, b.size)
    a, b = a[:order], b[:order]
    if max(a.size, b.size) < FFT_CROSSOVER:
        full = np.convolve(a, b)
    else:
        full = fftconvolve(a, b)
    out = np.zeros(order, dtype=complex)
    m = min(order, full.size)
    out[:m] = full[:m]
    return CoeffFun(out)


def inner_product(f, g) -> complex:
    """H^2 inner product <f, g> = sum a_n conj(b_n) over the common index range."""
    a, b = as_coeffs(f), as_coeffs(g)
    m = min(a.size, b.size)
    return complex(np.vdot(b[:m], a[:m]))


def norm(f) -> float:
    return float(np.linalg.norm(as_coeffs(f)))


def power_series(mu, N: int) -> CoeffFun:
    """First N Taylor coefficients of (1 - z)**mu.

    Uses c_0 = 1, c_{n+1} = c_n (n - mu)/(n + 1), except for a non-negative
    integer ``mu`` where the signed binomials are exact.  Any complex ``mu`` is
    accepted; whether the result lies in H^2 is the caller's business.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    mu = complex(mu)
    if mu.imag == 0 and mu.real >= 0 and mu.real == int(mu.real):
        # non-negative integer: exact signed binomials, so the polynomial is exact
        m = int(mu.real)
        c = np.zeros(N, dtype=complex)
        k = min(m, N - 1)
        c[: k + 1] = [(-1) ** j * math.comb(m, j) for j in range(k + 1)]
        return CoeffFun(c)
    n = np.arange(N - 1, dtype=float)
    ratios = (n - mu) / (n + 1.0)
    c = np.empty(N, dtype=complex)
    c[0] = 1.0
    # cumprod is a sequential product; a zero ratio (integer mu) zeroes the rest
    c[1:] = np.cumprod(ratios)
    return CoeffFun(c)


def log_series(N: int) -> CoeffFun:
    """Coefficients of log(1 - z) = -sum_{n>=1} z^n / n."""
    c = np.zeros(N, dtype=complex)
    if N > 1:
        c[1:] = -1.0 / np.arange(1, N)
    return CoeffFun(c)


def power_log_series(p: PowerLogParams, N: int) -> CoeffFun:
    """First N coefficients of (1 - z)**mu * log(1 - z)**j."""
    if N < 1:
        raise ValueError("N must be at least 1")
    out = power_series(p.mu, N)
    if p.j:
        lg = log_series(N)
        for _ in range(p.j):
            out = truncated_product(out, lg, N)
    return out


def eval_coeffs(f, z):
    """Horner evaluation of the truncated polynomial at ``z`` (scalar or array)."""
    c = as_coeffs(f)
    z = np.asarray(z, dtype=complex)
    acc = np.full(z.shape, c[-1], dtype=complex)
    for a in c[-2::-1]:
        acc = acc * z + a
    if acc.ndim == 0:
        return complex(acc)
    return acc


def cauchy_kernel(lam, N: int) -> CoeffFun:
    """Coefficients conj(lam)**n of k_lam(z) = 1/(1 - conj(lam) z)."""
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("the Cauchy kernel needs |lambda| < 1")
    return CoeffFun(np.conj(lam) ** np.arange(N))


def tail_bound(f, decay_exponent: float, window: int = 16) -> float:
    """Upper estimate of the l^2 norm of the coefficients beyond the truncation.

    The true coefficients are assumed to satisfy |a_n| <= A n^(-s) with
    s = ``decay_exponent``.  A is estimated as the largest |a_n| n^s over the last
    ``window`` stored coefficients, and the tail over n >= N is bounded by
    integral comparison: sum_{n>=N} n^(-2s) <= N^(-2s) + N^(1-2s)/(2s-1).
    A sequence whose trailing window is identically zero is treated as exact.
    """
    s = float(decay_exponent)
    if s <= 0.5:
        raise ValueError("decay exponent must exceed 1/2 for a square-summable tail")
    c = as_coeffs(f)
    N = c.size
    lo = max(1, N - window)
    n = np.arange(lo, N, dtype=float)
    tail = np.abs(c[lo:])
    if n.size == 0 or not np.any(tail):
        return 0.0
    A = float(np.max(tail * n**s))
    return A * float(np.sqrt(N ** (-2.0 * s) + N ** (1.0 - 2.0 * s) / (2.0 * s - 1.0)))
