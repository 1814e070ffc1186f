"""The Kriete-Trutt transform (Kf)(w) = <f, q_conj(w)>, q_w = (1 - z)^{w/(1-w)}.

K carries H^2 onto H^2(mu) and turns I - C into multiplication by the
independent variable.  Norms on H^2(mu) are computed by pulling back through
K, never by integrating against mu (its density on the circles gamma_n is not
available).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .h2core import CoeffFun, as_coeffs, power_series
from .ops import ConvergenceError, apply_C
from .quadrature import QuadScheme, integrate_interval
from .special import gamma

__all__ = [
    "KTPoint",
    "MuCircle",
    "kt_transform",
    "kt_of_polynomial_image_under_C",
    "intertwine_residual",
    "h2mu_norm",
    "U_alpha",
    "U_alpha_reference",
    "U_alpha_norm_proxy",
    "sstar_identity",
    "kt_basis_g",
    "mu_circle",
    "richardson_tail_sum",
]


@dataclass(frozen=True)
class KTPoint:
    """A point w of the disk together with nu = w/(1 - w)."""

    w: complex

    def __post_init__(self):
        w = complex(self.w)
        if abs(w) >= 1:
            raise ValueError("a KT point needs |w| < 1")
        object.__setattr__(self, "w", w)
        # Re(w/(1-w)) > -1/2 holds on the whole disk; guard against rounding near the circle
        assert self.nu.real > -0.5 - 1e-12

    @property
    def nu(self) -> complex:
        return self.w / (1.0 - self.w)


def _as_point(w) -> KTPoint:
    return w if isinstance(w, KTPoint) else KTPoint(w)


@dataclass(frozen=True)
class MuCircle:
    """gamma_n: center n/(n+1), radius 1/(n+1), carrying mass 2^(-n-1)."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("circle index must be non-negative")

    @property
    def center(self) -> float:
        return self.n / (self.n + 1.0)

    @property
    def radius(self) -> float:
        return 1.0 / (self.n + 1.0)

    @property
    def mass(self) -> float:
        return 2.0 ** (-self.n - 1)


def mu_circle(n: int) -> MuCircle:
    return MuCircle(n)


def kt_transform(f, w, polynomial: bool = False, window: int = 8, tol: float = 1e-14) -> complex:
    """sum_n a_n c_n(nu), where c_n(nu) are the Taylor coefficients of (1 - z)^nu.

    With ``polynomial=True`` the stored coefficients are the whole function
    and the finite sum is exact.  Otherwise they are a truncation, and the sum
    is accepted only when the last ``window`` terms are negligible (below
    ``tol`` times the largest partial sum) or the sequence ends in exact
    zeros; if not, the truncation matters at this w and
    :class:`ConvergenceError` is raised.
    """
    p = _as_point(w)
    a = as_coeffs(f)
    c = power_series(p.nu, a.size).coeffs
    terms = a * c
    total = complex(np.sum(terms))
    tail = terms[-window:]
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return 0.0j
    exact = nz[-1] < a.size - window
    scale = max(float(np.max(np.abs(np.cumsum(terms)))), 1e-300)
    if not (polynomial or exact) and float(np.max(np.abs(tail))) > tol * scale:
        raise ConvergenceError(
            f"KT pairing has not stagnated at w={p.w:.4g} (last terms {np.max(np.abs(tail)):.2e})")
    return total


def richardson_tail_sum(nu: complex, start: int, N0: int = 256, levels: int = 6) -> complex:
    """sum_{n >= start} c_n(nu)/(n+1) by Richardson extrapolation of partial sums.

    Partial sums up to N = N0 2^j converge with error expanding in powers
    N^-(nu+1+k), k = 0, 1, ...; each Richardson column removes one power
    (complex exponents are handled exactly).
    """
    Nmax = N0 * 2 ** (levels - 1)
    c = power_series(nu, Nmax).coeffs
    terms = c / np.arange(1, Nmax + 1)
    terms[:start] = 0.0
    cs = np.cumsum(terms)
    T = [cs[N0 * 2**j - 1] for j in range(levels)]
    for k in range(levels - 1):
        fac = 2.0 ** (nu + 1.0 + k)
        T = [(fac * T[j + 1] - T[j]) / (fac - 1.0) for j in range(len(T) - 1)]
    return complex(T[0])


def kt_of_polynomial_image_under_C(f, w, **kw) -> complex:
    """(K C f)(w) for a polynomial f.

    (Cf)_n equals S/(n+1) beyond the degree of f, with S the coefficient sum;
    that tail is summed against c_n(nu) by :func:`richardson_tail_sum`.
    """
    p = _as_point(w)
    a = as_coeffs(f)
    d = a.size
    head = apply_C(a).coeffs
    S = complex(np.sum(a))
    c = power_series(p.nu, d).coeffs
    val = complex(np.dot(head, c))
    if S != 0:
        val += S * richardson_tail_sum(p.nu, d, **kw)
    return val


def intertwine_residual(f, w_grid) -> float:
    """max over w of |K(Cf)(w) - (1 - w) Kf(w)| for a polynomial f (coefficients given in full)."""
    worst = 0.0
    for w in w_grid:
        p = _as_point(w)
        lhs = kt_of_polynomial_image_under_C(f, p)
        rhs = (1.0 - p.w) * kt_transform(f, p, polynomial=True)
        worst = max(worst, abs(lhs - rhs))
    return worst


def h2mu_norm(p, N: int) -> float:
    """||p||_{H^2(mu)} = ||p(I - C) 1||_{H^2} from the first N coefficients.

    Horner in I - C applied to the constant 1; C is exact on truncations, so
    the value is a lower bound that increases with N.
    """
    coeffs = np.asarray(p, dtype=complex).ravel()
    one = np.zeros(N, dtype=complex)
    one[0] = 1.0
    acc = coeffs[-1] * one
    for ck in coeffs[-2::-1]:
        acc = acc - apply_C(acc).coeffs + ck * one
    return float(np.linalg.norm(acc))


def U_alpha(alpha: float, w, order: int = 40) -> complex:
    """U_alpha(w) = 2^nu / Gamma(nu + 1) int_0^alpha e^{-t} t^nu dt, nu = w/(1-w).

    With t = alpha s the integral is alpha^{nu+1} int_0^1 e^{-alpha s} s^nu ds,
    computed with panels graded toward s = 0; the innermost panel carries the
    Gauss-Jacobi weight s^{Re nu} when Re nu < 0.
    """
    nu = _as_point(w).nu
    integrand = lambda s: np.exp(-alpha * s) * s**nu
    I = integrate_interval(integrand, 0.0, 1.0,
                           QuadScheme(order=order, singular_exponent=nu, depth=60))
    return complex(2.0**nu * alpha ** (nu + 1.0) * I / gamma(nu + 1.0))


def U_alpha_reference(alpha: float, w) -> complex:
    """Same quantity from the lower incomplete gamma series (independent path)."""
    from .special import lower_gamma_series

    nu = _as_point(w).nu
    return complex(2.0**nu * lower_gamma_series(nu + 1.0, alpha) / gamma(nu + 1.0))


def U_alpha_norm_proxy(alpha: float, r: float, M: int = 256) -> float:
    """Mean of |U_alpha(r e^{i theta})|^2 over M equispaced angles (the H^2 integral mean at radius r)."""
    theta = 2 * np.pi * (np.arange(M) + 0.5) / M
    vals = np.array([U_alpha(alpha, r * np.exp(1j * t)) for t in theta])
    return float(np.mean(np.abs(vals) ** 2))


def sstar_identity(f, z_grid, polynomial: bool = True) -> float:
    """max over z of |K(S*f - f)(z) + Kf(1/(2 - z))|, S* the backward shift.

    Set ``polynomial=False`` when f is a truncated series (the transforms then
    apply their stagnation test).
    """
    a = as_coeffs(f)
    back = np.zeros(a.size, dtype=complex)
    back[:-1] = a[1:]
    diff = CoeffFun(back - a)
    worst = 0.0
    for z in z_grid:
        z = complex(z)
        lhs = kt_transform(diff, z, polynomial)
        worst = max(worst, abs(lhs + kt_transform(a, 1.0 / (2.0 - z), polynomial)))
    return worst


def kt_basis_g(n: int, z):
    """prod_{j<n} (z - j/(j+1)) / (1 - z)^n (nodes 0, 1/2, 2/3, ...)."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 1.0):
        raise ValueError("g_n is singular at z = 1")
    out = np.ones(z.shape, dtype=complex)
    for j in range(n):
        out = out * (z - j / (j + 1.0)) / (1.0 - z)
    return out[()] if out.ndim == 0 else out
