"""Panel quadrature for integrals with algebraic endpoint behaviour.

Panels are dyadic: toward a singular left endpoint they shrink geometrically,
toward infinity they grow geometrically.  The innermost panel at the endpoint
uses a Gauss-Jacobi rule carrying the weight x^{Re sigma} when that exponent is
negative; every other panel uses Gauss-Legendre.  Panel sums are accumulated in a fixed order, so results do
not depend on evaluation scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = ["QuadScheme", "QuadratureError", "integrate_interval", "integrate_half_line",
           "gauss_legendre", "gauss_jacobi_left"]


class QuadratureError(RuntimeError):
    """The panel sum did not settle within the allowed number of panels."""


@dataclass(frozen=True)
class QuadScheme:
    """Quadrature parameters.

    order: nodes per panel.  singular_exponent: complex sigma when the integrand
    behaves like x^sigma at the left endpoint; panels are graded toward the
    endpoint, and the innermost one carries the Jacobi weight x^{Re sigma}
    when Re sigma < 0.
    depth: number of dyadic levels toward the endpoint.  breakpoints: interior
    points where the integrand is not smooth.  first_panel: width of the first
    panel on a half line.  tol / max_panels control the outward march.
    """

    order: int = 30
    singular_exponent: complex | None = None
    depth: int = 60
    breakpoints: tuple = ()
    first_panel: float = 1.0
    tol: float = 1e-16
    max_panels: int = 400


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    x, w = roots_legendre(n)
    return x, w


@lru_cache(maxsize=64)
def gauss_jacobi_left(n: int, beta: float):
    """Nodes/weights on [-1, 1] for the weight (1 + x)^beta."""
    x, w = roots_jacobi(n, 0.0, beta)
    return x, w


def _legendre_panel(f, a, b, n):
    x, w = gauss_legendre(n)
    h = 0.5 * (b - a)
    t = a + h * (x + 1.0)
    return h * np.sum(w * f(t))


def _jacobi_panel(f, b, sigma, n):
    # int_0^b f(t) dt with f(t) = t^sigma g(t): weight t^Re(sigma), remainder f/t^Re(sigma);
    # a bounded integrand (Re sigma >= 0) gets the plain Legendre rule
    beta = min(float(np.real(sigma)), 0.0)
    x, w = gauss_jacobi_left(n, beta)
    t = 0.5 * b * (x + 1.0)
    return (0.5 * b) ** (beta + 1.0) * np.sum(w * f(t) / t**beta)


def _graded_pieces(a, b, depth):
    # [a, b] split as a + (b-a) * [2^-k-1, 2^-k]
    L = b - a
    edges = [a + L * 2.0 ** (-k) for k in range(depth, -1, -1)]
    return edges


def integrate_interval(f, a: float, b: float, scheme: QuadScheme = QuadScheme()):
    """int_a^b f(t) dt, graded toward ``a`` when a singular exponent is given."""
    if b <= a:
        return 0.0 * f(np.array([a + 0.0]))[0] if b == a else -integrate_interval(f, b, a, scheme)
    cuts = sorted({a, b, *[p for p in scheme.breakpoints if a < p < b]})
    total = 0.0 + 0.0j
    for i, (lo, hi) in enumerate(zip(cuts[:-1], cuts[1:])):
        if i == 0 and scheme.singular_exponent is not None:
            edges = _graded_pieces(lo, hi, scheme.depth)
            g = lambda t, lo=lo: f(t + lo)
            total += _jacobi_panel(g, edges[0] - lo, scheme.singular_exponent, scheme.order)
            for p, q in zip(edges[:-1], edges[1:]):
                total += _legendre_panel(f, p, q, scheme.order)
        else:
            total += _legendre_panel(f, lo, hi, scheme.order)
    return complex(total)


def integrate_half_line(f, scheme: QuadScheme = QuadScheme()):
    """int_0^inf f(t) dt on [0, first_panel] followed by doubling panels.

    Marching stops once three consecutive panels each contribute less than
    ``tol`` times the running total; otherwise :class:`QuadratureError`.
    """
    x0 = scheme.first_panel
    total = integrate_interval(f, 0.0, x0, scheme)
    inner = QuadScheme(order=scheme.order, breakpoints=scheme.breakpoints)
    lo, quiet = x0, 0
    for _ in range(scheme.max_panels):
        hi = 2.0 * lo
        part = integrate_interval(f, lo, hi, inner)
        total += part
        lo = hi
        if abs(part) <= scheme.tol * max(abs(total), 1e-300):
            quiet += 1
            if quiet >= 3:
                return complex(total)
        else:
            quiet = 0
        if not np.isfinite(lo):
            break
    raise QuadratureError(f"half-line panel sum not settled (last panel {abs(part):.3e})")
