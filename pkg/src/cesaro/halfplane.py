"""The right-half-plane model: Laplace transform, Cayley unitaries between the
disk and the half plane, the weight w, and closed-form test pairs that follow
a function through every stage of the map H^2 -> L^2(R, w dy).

Stage layout of a :class:`ChainTestPair` (lambda, k):

    stage 1   y^k e^{lambda y}                         in L^2(R, w(y) dy)
    W^{-1}    y^k e^{lambda y} e^{-(e^y - 1)}          in L^2(R)
    stage 2   (log x)^k x^{lambda-1/2} e^{-(x-1)}      in L^2(0, inf)
    stage 3   normalized Laplace transform of stage 2 in H^2(C+)
    stage 4   (1-z)^{lambda-1/2} sum_j b_j log^j(1-z)  in H^2(D)

The disk/half-plane unitaries are implemented as a mutually inverse pair:

    (U g)(s)     = g((s-1)/(s+1)) / (sqrt(pi) (1+s))
    (U^-1 G)(z)  = 2 sqrt(pi)/(1-z) * G((1+z)/(1-z))

Both are isometries for the norms ||g||^2 = (1/2pi) int |g|^2 dtheta and
||G||^2 = int |G(iy)|^2 dy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .h2core import CoeffFun, PowerLogParams, eval_coeffs, power_log_series
from .ops import AffineSelfMap, apply_composition, apply_generator
from .quadrature import QuadScheme, gauss_legendre, integrate_half_line
from .special import gamma, gamma_derivatives

__all__ = [
    "HalfPlaneFun",
    "ChainTestPair",
    "weight_w",
    "laplace_quad",
    "unitary_U",
    "unitary_U_inv",
    "chain_test_pair",
    "chain_residuals",
    "hp_basis",
    "b_multiplier",
    "boundary_inner",
    "boundary_norm",
    "sigma_translate",
    "conjugated_shift_defect",
    "generator_defect",
    "resolvent_defect",
]

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def weight_w(y):
    """w(y) = exp(-2 (e^y - 1)); tends to e^2 as y -> -inf and underflows to 0 for large y."""
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        out = np.exp(-2.0 * np.expm1(y))
    return out[()] if out.ndim == 0 else out


def sqrt_weight(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        return np.exp(-np.expm1(y))


@dataclass(frozen=True)
class HalfPlaneFun:
    """A function on Re s > 0 given by a vectorized evaluator."""

    evaluator: Callable
    label: str = ""

    def __call__(self, s):
        return self.evaluator(np.asarray(s, dtype=complex))


def laplace_quad(f: Callable, s: complex, scheme: QuadScheme = QuadScheme()) -> complex:
    """(1/sqrt(2 pi)) int_0^inf f(x) e^{-s x} dx by panel quadrature.

    Set ``scheme.singular_exponent`` to sigma when f(x) ~ x^sigma at 0 and
    ``scheme.breakpoints`` to the jump locations of a piecewise f.
    """
    s = complex(s)
    if s.real <= 0:
        raise ValueError("the Laplace transform is evaluated for Re s > 0 only")
    return integrate_half_line(lambda x: f(x) * np.exp(-s * x), scheme) / _SQRT_2PI


def unitary_U(g, s, allow_boundary: bool = False):
    """(U g)(s) = g((s-1)/(s+1)) / (sqrt(pi) (1 + s)), g a CoeffFun or a callable on the disk.

    ``allow_boundary`` admits Re s = 0 (mapped point on the circle), which is
    meaningful for polynomial g and needed for boundary-line norms.
    """
    s = np.asarray(s, dtype=complex)
    z = (s - 1.0) / (s + 1.0)
    r = np.abs(z)
    if np.any(r > 1.0 + 1e-12) or (not allow_boundary and np.any(r >= 1.0)):
        raise ValueError("mapped point lies on or outside the unit circle (need Re s > 0)")
    gz = eval_coeffs(g, z) if isinstance(g, CoeffFun) else g(z)
    out = gz / (_SQRT_PI * (1.0 + s))
    return out[()] if np.ndim(out) == 0 else out


def unitary_U_inv(G, z):
    """(U^-1 G)(z) = 2 sqrt(pi)/(1-z) * G((1+z)/(1-z))."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 1.0) or np.any(z == -1.0):
        raise ValueError("z = +-1 is excluded")
    s = (1.0 + z) / (1.0 - z)
    out = 2.0 * _SQRT_PI / (1.0 - z) * G(s)
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ChainTestPair:
    """Closed forms of the test function y^k e^{lambda y} at every stage."""

    lam: complex
    k: int
    gamma_derivs: np.ndarray = field(repr=False)
    log_poly: np.ndarray = field(repr=False)

    @property
    def disk_exponent(self) -> complex:
        return self.lam - 0.5

    def stage1(self, y):
        y = np.asarray(y, dtype=float)
        return y**self.k * np.exp(self.lam * y)

    def stage1_unweighted(self, y):
        """W^{-1} applied to stage 1 (multiplication by sqrt(w))."""
        return self.stage1(y) * sqrt_weight(y)

    def stage2(self, x):
        x = np.asarray(x, dtype=float)
        return np.log(x) ** self.k * x ** (self.lam - 0.5) * np.exp(-(x - 1.0))

    def stage3(self, s):
        # (e / sqrt(2 pi)) d^k/dlam^k [ (s+1)^{-lam-1/2} Gamma(lam + 1/2) ]
        s = np.asarray(s, dtype=complex)
        L = np.log(s + 1.0)
        acc = np.zeros(s.shape, dtype=complex)
        for i in range(self.k + 1):
            acc = acc + math.comb(self.k, i) * (-L) ** i * self.gamma_derivs[self.k - i]
        return math.e / _SQRT_2PI * (s + 1.0) ** (-self.lam - 0.5) * acc

    def stage4(self, z):
        z = np.asarray(z, dtype=complex)
        ell = np.log(1.0 - z)
        poly = np.zeros(z.shape, dtype=complex)
        for j in range(self.k, -1, -1):
            poly = poly * ell + self.log_poly[j]
        return (1.0 - z) ** self.disk_exponent * poly

    def stage4_coeffs(self, N: int) -> CoeffFun:
        """Taylor coefficients of stage 4 through the power-log series."""
        out = CoeffFun.zeros(N)
        for j, b in enumerate(self.log_poly):
            out = out + complex(b) * power_log_series(PowerLogParams(self.disk_exponent, j), N)
        return out


def chain_test_pair(lam: complex, k: int) -> ChainTestPair:
    lam = complex(lam)
    if lam.real <= 0:
        raise ValueError("Re(lambda) must be positive")
    if k < 0:
        raise ValueError("k must be non-negative")
    gd = gamma_derivatives(lam + 0.5, k)
    # stage 4 = sqrt(2) e 2^{-lam-1/2} (1-z)^{lam-1/2} sum_j b_j log^j(1-z), using
    # -log(s+1) = log(1-z) - log 2 on the image of the disk
    ln2 = math.log(2.0)
    pref = math.sqrt(2.0) * math.e * 2.0 ** (-lam - 0.5)
    b = np.zeros(k + 1, dtype=complex)
    for i in range(k + 1):
        a_i = math.comb(k, i) * gd[k - i]
        for j in range(i + 1):
            b[j] += a_i * math.comb(i, j) * (-ln2) ** (i - j)
    return ChainTestPair(lam, k, gd, pref * b)


def chain_residuals(pair: ChainTestPair, n_points: int = 20,
                    scheme: QuadScheme | None = None) -> dict:
    """Stage-to-stage residuals (max absolute error over ``n_points`` samples).

    t_map: T applied to W^{-1}(stage 1) against stage 2 (pure algebra).
    laplace: quadrature of stage 2 against the closed-form stage 3.
    cayley: U^{-1}(stage 3) against stage 4.
    """
    j = np.arange(n_points)
    x = 0.05 + 6.0 * (j + 0.5) / n_points
    t_map = pair.stage1_unweighted(np.log(x)) / np.sqrt(x)
    r_t = float(np.max(np.abs(t_map - pair.stage2(x))))

    s_pts = 0.25 + 3.0 * (j + 0.5) / n_points + 1j * np.linspace(-2.0, 2.0, n_points)
    if scheme is None:
        scheme = QuadScheme(singular_exponent=pair.lam - 0.5)
    lap = np.array([laplace_quad(pair.stage2, s, scheme) for s in s_pts])
    r_l = float(np.max(np.abs(lap - pair.stage3(s_pts))))

    z_pts = 0.8 * np.sqrt((j + 0.5) / n_points) * np.exp(2j * np.pi * 0.618034 * j)
    r_c = float(np.max(np.abs(unitary_U_inv(pair.stage3, z_pts) - pair.stage4(z_pts))))
    return {"t_map": r_t, "laplace": r_l, "cayley": r_c}


def hp_basis(n: int, s):
    """(1/sqrt(2 pi)) (s - 1/2)^n / (s + 1/2)^(n+1): orthonormal in H^2(C+)."""
    s = np.asarray(s, dtype=complex)
    out = (s - 0.5) ** n / (s + 0.5) ** (n + 1) / _SQRT_2PI
    return out[()] if out.ndim == 0 else out


def b_multiplier(s):
    """b(s) = (s - 1/2)/(s + 1/2), unimodular on the imaginary axis."""
    s = np.asarray(s, dtype=complex)
    out = (s - 0.5) / (s + 0.5)
    return out[()] if out.ndim == 0 else out


def _axis_nodes(Y: float, order: int):
    # symmetric dyadic panels [0,1], [1,2], [2,4], ..., [Y/2, Y] on each side
    x, w = gauss_legendre(order)
    edges = [0.0, 1.0]
    while edges[-1] < Y:
        edges.append(min(2.0 * edges[-1], Y))
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        nodes.append(a + h * (x + 1.0))
        weights.append(h * w)
    y = np.concatenate(nodes)
    wt = np.concatenate(weights)
    return np.concatenate([-y[::-1], y]), np.concatenate([wt[::-1], wt])


def boundary_inner(F: Callable, G: Callable, Y: float = 2.0**24, order: int = 40):
    """<F, G> = int_{-Y}^{Y} F(iy) conj(G(iy)) dy on Re s = 0.

    Returns (value, info) where info records Y and the panel order; the
    truncation error is the caller's to judge (about 1/(pi Y) for integrands
    decaying like 1/y^2).
    """
    y, w = _axis_nodes(Y, order)
    s = 1j * y
    val = complex(np.sum(w * F(s) * np.conj(G(s))))
    return val, {"Y": Y, "order": order, "nodes": int(y.size)}


def boundary_norm(F: Callable, Y: float = 2.0**24, order: int = 40):
    val, info = boundary_inner(F, F, Y, order)
    return math.sqrt(max(val.real, 0.0)), info


def sigma_translate(y, h, t: float):
    """(sigma_t h)(y) = exp(-(1 - e^{-t}) e^y) h(y - t) for samples h on a uniform grid y.

    Off-grid shifts use linear interpolation; points whose source y - t falls
    left of the grid are returned as NaN.
    """
    y = np.asarray(y, dtype=float)
    h = np.asarray(h, dtype=complex)
    src = y - t
    shifted = np.interp(src, y, h.real) + 1j * np.interp(src, y, h.imag)
    shifted = np.where(src < y[0] - 1e-12 * max(1.0, abs(y[0])), np.nan, shifted)
    return np.exp(-(-np.expm1(-t)) * np.exp(y)) * shifted


def conjugated_shift_defect(f: Callable, t_steps: int, y_min: float = -10.0,
                            y_max: float = 3.0, M: int = 1301) -> float:
    """max |(W sigma_t W^{-1} f)(y) - f(y - t)| / max |f| with t = t_steps grid steps."""
    y = np.linspace(y_min, y_max, M)
    dy = y[1] - y[0]
    t = t_steps * dy
    fv = f(y)
    lhs = sigma_translate(y, sqrt_weight(y) * fv, t) / sqrt_weight(y)
    rhs = np.full(M, np.nan, dtype=complex)
    rhs[t_steps:] = fv[: M - t_steps]
    ok = ~np.isnan(lhs)
    scale = max(float(np.max(np.abs(fv))), 1e-300)
    return float(np.max(np.abs(lhs[ok] - rhs[ok]))) / scale


def generator_defect(f: CoeffFun, h: float = 1e-5) -> float:
    """max coefficient gap between (C_{phi_h} f - f)/h and (1 - z) f'."""
    diff = (apply_composition(f, AffineSelfMap.flow(h)) - f) / h
    gen = apply_generator(f)
    return float(np.max(np.abs(diff.coeffs - gen.coeffs)))


def resolvent_defect(s: complex) -> float:
    """|int_0^inf e^{-t} e^{t/2} e^{-st} dt - 1/(s + 1/2)| by quadrature."""
    s = complex(s)
    val = integrate_half_line(lambda t: np.exp(-(0.5 + s) * t))
    return abs(val - 1.0 / (s + 0.5))
