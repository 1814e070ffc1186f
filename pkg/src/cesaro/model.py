"""Inner functions, model spaces (uH^2)^perp and the Cesaro invariance tests.

Projections are done on a half-offset boundary grid theta_j = 2 pi (j + 1/2)/M.
In grid space the map v -> v - u * Pi_+(conj(u) v) is an exact orthogonal
projection of C^M (multiplication by unimodular samples is unitary and
Pi_+ keeps the Fourier bins 0..M/2-1), so idempotence and self-adjointness
hold to rounding; what the grid cannot resolve shows up as aliasing, which is
reported separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space, subspace_angles
from scipy.stats import qmc

from .h2core import CoeffFun, as_coeffs, cauchy_kernel, eval_coeffs, truncated_product
from .ops import AffineSelfMap, AliasingError, apply_C
from .quadrature import QuadScheme, integrate_interval
from .report import CheckReport

__all__ = [
    "InnerFunctionSpec",
    "BoundaryGrid",
    "ModelProjector",
    "RankCollapseError",
    "inner_eval",
    "inner_eval_boundary",
    "inner_coeffs",
    "model_projection",
    "invariance_residual",
    "random_model_element",
    "model_kernel",
    "halfplane_inequality_check",
    "g_alpha",
    "g_alpha_membership",
    "krylov_angles",
    "boundary_spectrum",
    "flow_duality_residual",
    "sobol_disk_points",
]


class RankCollapseError(np.linalg.LinAlgError):
    """A basis lost numerical rank during orthonormalization."""


@dataclass(frozen=True)
class InnerFunctionSpec:
    """Finite inner function: Blaschke zeros (point, multiplicity) and point masses (xi, weight).

    ``accumulation`` optionally declares boundary points where omitted zeros
    accumulate; it only affects :func:`boundary_spectrum`.
    """

    blaschke_zeros: tuple = ()
    atoms: tuple = ()
    accumulation: tuple = ()

    def __post_init__(self):
        zeros = tuple((complex(a), int(m)) for a, m in self.blaschke_zeros)
        atoms = tuple((complex(x), float(w)) for x, w in self.atoms)
        for a, m in zeros:
            if abs(a) >= 1 or m < 1:
                raise ValueError(f"invalid Blaschke zero {a} with multiplicity {m}")
        for x, w in atoms:
            if abs(abs(x) - 1.0) > 1e-12 or w <= 0:
                raise ValueError(f"atoms need |xi| = 1 and positive weight, got {x}, {w}")
        object.__setattr__(self, "blaschke_zeros", zeros)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "accumulation", tuple(complex(x) for x in self.accumulation))

    @classmethod
    def u_alpha(cls, alpha: float) -> "InnerFunctionSpec":
        """exp(alpha (z+1)/(z-1)): one atom of mass alpha at 1."""
        return cls(atoms=((1.0, alpha),))

    @classmethod
    def blaschke(cls, *zeros) -> "InnerFunctionSpec":
        return cls(blaschke_zeros=tuple((a, 1) for a in zeros))

    @property
    def is_constant(self) -> bool:
        return not self.blaschke_zeros and not self.atoms


def inner_eval(spec: InnerFunctionSpec, z):
    """u(z) = prod_a (|a|/a (a - z)/(1 - conj(a) z))^m * exp(-sum w (xi + z)/(xi - z))."""
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape, dtype=complex)
    for a, m in spec.blaschke_zeros:
        if a == 0:
            fac = z
        else:
            fac = abs(a) / a * (a - z) / (1.0 - np.conj(a) * z)
        out = out * fac**m
    if spec.atoms:
        expo = np.zeros(z.shape, dtype=complex)
        for xi, w in spec.atoms:
            d = xi - z
            if np.any(np.abs(d) < 1e-14):
                raise ValueError(f"evaluation at the atom {xi}")
            expo -= w * (xi + z) / d
        out = out * np.exp(expo)
    return out[()] if out.ndim == 0 else out


def inner_eval_boundary(spec: InnerFunctionSpec, theta) -> np.ndarray:
    """u(e^{i theta}) using the boundary form exp(-i w cot(psi/2)) of each atom factor.

    Evaluating (xi + z)/(xi - z) directly loses unimodularity near an atom,
    where the quotient is large and its real part is pure rounding.
    """
    theta = np.asarray(theta, dtype=float)
    z = np.exp(1j * theta)
    out = inner_eval(InnerFunctionSpec(blaschke_zeros=spec.blaschke_zeros), z)
    for xi, w in spec.atoms:
        psi = np.angle(z / xi)
        if np.any(np.abs(psi) < 1e-14):
            raise ValueError(f"evaluation at the atom {xi}")
        out = out * np.exp(-1j * w / np.tan(0.5 * psi))
    return out


def _atom_coeffs(xi: complex, w: float, N: int) -> np.ndarray:
    # exp(-w (xi+z)/(xi-z)) = exp(E(z)), E_0 = -w, E_n = -2 w xi^{-n}; n u_n = sum_k k E_k u_{n-k}
    n = np.arange(N)
    E = -2.0 * w * np.conj(xi) ** n
    E[0] = -w
    kE = n * E
    u = np.zeros(N, dtype=complex)
    u[0] = math.exp(-w)
    for m in range(1, N):
        u[m] = np.dot(kE[1 : m + 1], u[m - 1 :: -1]) / m
    return u


def _blaschke_factor_coeffs(a: complex, N: int) -> np.ndarray:
    c = np.zeros(N, dtype=complex)
    if a == 0:
        if N > 1:
            c[1] = 1.0
        return c
    # |a|/a (a - z) sum (conj(a) z)^n
    geo = np.conj(a) ** np.arange(N)
    c = a * geo
    c[1:] -= geo[:-1]
    return abs(a) / a * c


def inner_coeffs(spec: InnerFunctionSpec, N: int) -> CoeffFun:
    """First N Taylor coefficients of u (exact series arithmetic, truncated products)."""
    out = np.zeros(N, dtype=complex)
    out[0] = 1.0
    for a, m in spec.blaschke_zeros:
        fac = _blaschke_factor_coeffs(a, N)
        for _ in range(m):
            out = truncated_product(out, fac, N).coeffs
    for xi, w in spec.atoms:
        out = truncated_product(out, _atom_coeffs(xi, w, N), N).coeffs
    return CoeffFun(out)


@dataclass(frozen=True)
class BoundaryGrid:
    """M half-offset samples theta_j = 2 pi (j + 1/2)/M on the circle (M a power of two)."""

    M: int

    def __post_init__(self):
        if self.M < 4 or self.M & (self.M - 1):
            raise ValueError("grid size must be a power of two >= 4")

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.M) + 0.5) / self.M

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    def _phase(self):
        return np.exp(-1j * np.pi * np.arange(self.M) / self.M)

    def synthesize(self, f) -> np.ndarray:
        """Boundary samples of a coefficient sequence of order <= M."""
        c = as_coeffs(f)
        if c.size > self.M:
            raise ValueError("coefficient order exceeds the grid size")
        buf = np.zeros(self.M, dtype=complex)
        buf[: c.size] = c
        return np.fft.ifft(buf / self._phase()) * self.M

    def analyze(self, v) -> np.ndarray:
        """All M Fourier coefficients of samples v; bin k >= M/2 is frequency k - M."""
        return np.fft.fft(v) / self.M * self._phase()

    def riesz(self, v) -> np.ndarray:
        """Grid Riesz projection: keep frequencies 0..M/2-1."""
        c = self.analyze(v)
        c[self.M // 2 :] = 0.0
        return self.synthesize(c[: self.M // 2])


class ModelProjector:
    """P = I - u Pi_+ conj(u) on boundary samples for a fixed (spec, grid)."""

    def __init__(self, spec: InnerFunctionSpec, grid: BoundaryGrid, unimodular_tol: float = 1e-10):
        self.spec = spec
        self.grid = grid
        self.u = inner_eval_boundary(spec, grid.theta)
        dev = float(np.max(np.abs(np.abs(self.u) - 1.0)))
        if dev > unimodular_tol:
            raise ValueError(f"boundary samples of u are not unimodular (deviation {dev:.2e})")

    def project_values(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return v - self.u * self.grid.riesz(np.conj(self.u) * v)

    def __call__(self, f, order: int | None = None, guard: bool = True) -> CoeffFun:
        c = as_coeffs(f)
        M = self.grid.M
        if guard and c.size > M // 4:
            raise AliasingError(f"order {c.size} exceeds the aliasing guard M/4 = {M // 4}")
        if order is None:
            order = M // 2
        coef = self.grid.analyze(self.project_values(self.grid.synthesize(c)))
        return CoeffFun(coef[:order])

    def diagnostics(self, f) -> dict:
        """Idempotence defect and negative-frequency content of Pf, relative to ||f||."""
        v = self.grid.synthesize(as_coeffs(f))
        p = self.project_values(v)
        pp = self.project_values(p)
        scale = max(float(np.linalg.norm(v)), 1e-300)
        neg = self.grid.analyze(p)[self.grid.M // 2 :]
        return {
            "idempotence": float(np.linalg.norm(pp - p)) / scale,
            "negative_frequency": float(np.linalg.norm(neg)) * math.sqrt(self.grid.M) / scale,
        }


def model_projection(f, spec: InnerFunctionSpec, grid: BoundaryGrid) -> CoeffFun:
    """Coefficients (order M/2) of the projection of f onto (uH^2)^perp."""
    return ModelProjector(spec, grid)(f)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial)])


def _kernel_C_at(spec: InnerFunctionSpec, lam: complex, xi: complex) -> complex:
    # int_0^1 k^u_lam(t xi)/(1 - t xi) dt; for xi = 1 the divergent constant k_lam(1)/(1-t)
    # is removed (the caller's weights make those constants cancel)
    lb = np.conj(lam)
    ul = np.conj(complex(inner_eval(spec, lam)))
    at_one = abs(xi - 1.0) < 1e-12

    def integrand(t):
        z = t * xi
        with np.errstate(under="ignore", over="ignore"):
            uz = np.where(t < 1.0, inner_eval(spec, np.minimum(t, 1.0 - 1e-13) * xi), 0.0)
        kern = (1.0 - ul * uz) / (1.0 - lb * z)
        if at_one:
            return -lb / ((1.0 - lb * t) * (1.0 - lb)) - ul * uz / ((1.0 - lb * t) * (1.0 - t))
        return kern / (1.0 - z)

    cuts = tuple(1.0 - 2.0 ** (-k) for k in range(1, 41))
    return integrate_interval(integrand, 0.0, 1.0, QuadScheme(order=40, breakpoints=cuts))


def random_model_element(spec: InnerFunctionSpec, N: int, rng: np.random.Generator,
                         kernels: int = 12, order: int = 3) -> np.ndarray:
    """First N coefficients of a random combination of model-space kernels.

    Kernel points are uniform in |lambda| < 0.9.  At every atom xi of u the
    weights are restricted so that both the analytic part A = sum c_i k_lam_i
    and the part multiplying u vanish to ``order`` at xi, and Cf(xi) = 0.  The
    result is a generic element of a dense subspace of (uH^2)^perp whose
    boundary samples, and those of Cf, do not carry the slowly decaying
    oscillation of u near its atoms.  The constraints depend on u only.
    """
    lam = 0.9 * np.sqrt(rng.random(kernels)) * np.exp(2j * np.pi * rng.random(kernels))
    u = inner_coeffs(spec, N).coeffs
    K = np.column_stack([model_kernel(spec, l, N, u) for l in lam])
    lb = np.conj(lam)
    ul = np.conj(inner_eval(spec, lam))
    rows = []
    for xi, _ in spec.atoms:
        for j in range(order):
            d = math.factorial(j) * lb**j / (1.0 - lb * xi) ** (j + 1)
            rows.append(d)
            rows.append(ul * d)
        rows.append(np.array([_kernel_C_at(spec, l, xi) for l in lam]))
    if rows:
        B = null_space(np.array(rows))
        if B.shape[1] == 0:
            raise RankCollapseError("not enough kernels for the smoothness constraints")
    else:
        B = np.eye(kernels)
    c = B @ (rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1]))
    f = K @ c
    return f / np.linalg.norm(f)


def invariance_residual(spec: InnerFunctionSpec, trials: int, N: int, grid: BoundaryGrid,
                        seed: int = 0, sampler: str = "smooth", kernels: int = 12,
                        order: int = 3) -> dict:
    """Statistics of r = ||(I - P) C P f|| / ||P f|| over seeded random f of order N.

    P f is computed on the grid to order M/2, C acts exactly on that
    truncation, and (I - P) is applied on the same grid.

    sampler="smooth" draws f with :func:`random_model_element`; sampler="white"
    uses independent complex Gaussian coefficients.  For an atom, white f
    gives P f whose coefficients decay only like n^(-3/4), and the grid then
    cannot resolve the residual below roughly M^(-1/4).
    """
    P = ModelProjector(spec, grid)
    if N > grid.M // 4:
        raise AliasingError("N must not exceed M/4")
    res = []
    for t in range(trials):
        rng = _trial_rng(seed, t)
        if sampler == "smooth":
            f = random_model_element(spec, N, rng, kernels, order)
        elif sampler == "white":
            f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        else:
            raise ValueError(f"unknown sampler {sampler!r}")
        pf = P(f)
        npf = pf.norm()
        if npf == 0:
            res.append(0.0)
            continue
        cpf = apply_C(pf)
        out = cpf - P(cpf, guard=False)
        res.append(out.norm() / npf)
    r = np.array(res)
    return {"median": float(np.median(r)), "max": float(np.max(r)), "residuals": r,
            "N": N, "M": grid.M, "trials": trials, "seed": seed, "sampler": sampler}


def sobol_disk_points(n: int, radius: float = 0.999) -> np.ndarray:
    """First n points of an unscrambled 2-d Sobol sequence mapped area-uniformly into |z| < radius."""
    s = qmc.Sobol(d=2, scramble=False)
    m = max(1, math.ceil(math.log2(max(n, 1))))
    pts = s.random_base2(m)[:n]
    return radius * np.sqrt(pts[:, 0]) * np.exp(2j * np.pi * pts[:, 1])


def halfplane_inequality_check(t: float, z_grid) -> CheckReport:
    """max Re[(phi_t(z)+1)/(phi_t(z)-1) - (z+1)/(z-1)] over the grid (should be <= 0)."""
    z = np.asarray(z_grid, dtype=complex)
    phi = AffineSelfMap.flow(t)(z)
    val = np.real((phi + 1) / (phi - 1) - (z + 1) / (z - 1))
    mx = float(np.max(val))
    return CheckReport(
        name=f"halfplane_inequality_t{t:g}", anchor="Cayley inequality along the flow",
        computed=mx, reference=0.0, tolerance=1e-12, passed=mx <= 1e-12, tag="PAPER",
        params={"t": t, "points": int(z.size)},
    )


def g_alpha(alpha: float, N: int) -> CoeffFun:
    """Coefficients of (1 - u_alpha)/(1 + z): series exponentiation, then synthetic division."""
    c = -inner_coeffs(InnerFunctionSpec.u_alpha(alpha), N).coeffs
    c[0] += 1.0
    g = np.empty(N, dtype=complex)
    acc = 0.0
    for n in range(N):
        acc = c[n] - acc
        g[n] = acc
    return CoeffFun(g)


def g_alpha_membership(alpha: float, N: int, n_max: int = 32, K: int = 4) -> dict:
    """<g_alpha, u_alpha z^n> for n = 0..n_max from N coefficients.

    ``raw`` is the plain truncated pairing; its error is about half of the
    missing tail of ||u||^2 (order N^-1/2).  ``accelerated`` rewrites the
    pairing exactly as <g + u p_K, u z^n> - (p_K)_n, with p_K the degree K-1
    Taylor polynomial of 1/(1+z) about z = 1.  This uses only that
    multiplication by u is an isometry; g + u p_K = (1 - u ((1-z)/2)^K)/(1+z)
    has coefficients decaying like n^(-3/4-K), so the truncated pairing
    converges fast.
    """
    u = inner_coeffs(InnerFunctionSpec.u_alpha(alpha), N).coeffs
    g = g_alpha(alpha, N).coeffs
    # p_K(z) = 1/2 sum_{j<K} ((1-z)/2)^j
    half = np.array([0.5, -0.5], dtype=complex)
    p = np.zeros(K + 1, dtype=complex)
    term = np.array([0.5], dtype=complex)
    for _ in range(K):
        p[: term.size] += term
        term = np.convolve(term, half)
    up = truncated_product(u, p, N).coeffs
    h = g + up
    raw, acc = [], []
    for n in range(n_max + 1):
        shifted = np.zeros(N, dtype=complex)
        shifted[n:] = u[: N - n]
        raw.append(complex(np.vdot(shifted, g)))
        pn = p[n] if n < p.size else 0.0
        acc.append(complex(np.vdot(shifted, h)) - pn)
    return {"raw": np.array(raw), "accelerated": np.array(acc), "N": N, "K": K}


KERNEL_RANK_TOL = 1e-10


def _numerical_range(A: np.ndarray, rank_tol: float, what: str) -> np.ndarray:
    """Orthonormal basis of the numerical range of A (singular values >= rank_tol * s_max)."""
    U, sv, _ = np.linalg.svd(A, full_matrices=False)
    if sv.size == 0 or sv[0] == 0:
        raise RankCollapseError(f"{what} basis is empty")
    r = int(np.sum(sv >= rank_tol * sv[0]))
    return U[:, :r]


def krylov_basis(g, m: int, rank_tol: float = 1e-13) -> np.ndarray:
    """Orthonormal basis of span{g, Cg, ..., C^{m-1} g} by Arnoldi with reorthogonalization."""
    v = as_coeffs(g).copy()
    N = v.size
    Q = np.zeros((N, m), dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise RankCollapseError("Krylov start vector is zero")
    Q[:, 0] = v / nv
    for j in range(1, m):
        w = apply_C(Q[:, j - 1]).coeffs.copy()
        base = np.linalg.norm(w)
        for _ in range(2):
            w -= Q[:, :j] @ (Q[:, :j].conj().T @ w)
        nw = np.linalg.norm(w)
        if nw <= rank_tol * base:
            raise RankCollapseError(f"Krylov basis lost rank at step {j}")
        Q[:, j] = w / nw
    return Q


def model_kernel(spec: InnerFunctionSpec, lam: complex, N: int, u: np.ndarray | None = None) -> np.ndarray:
    """Coefficients of k^u_lam(z) = (1 - conj(u(lam)) u(z))/(1 - conj(lam) z)."""
    if u is None:
        u = inner_coeffs(spec, N).coeffs
    k = cauchy_kernel(lam, N).coeffs
    ul = complex(inner_eval(spec, lam))
    return k - np.conj(ul) * truncated_product(u, k, N).coeffs


def krylov_angles(g, m: int, spec: InnerFunctionSpec, sample_points,
                  rank_tol: float = KERNEL_RANK_TOL, cache=None) -> np.ndarray:
    """Principal angles (ascending) from the model-kernel span to the Krylov span.

    Reproducing kernels at many points are numerically dependent (their Gram
    matrix is Cauchy-like), so the kernel span is taken as the numerical range
    at relative threshold ``rank_tol``; its dimension is the length of the
    returned array.

    One angle per kernel direction: when the Krylov span has fewer dimensions
    than the kernel span, the unmatched directions are reported as pi/2.  The
    largest angle is then the gap max_{x in kernels} dist(x, Krylov), which can
    only shrink as m grows.

    ``cache`` (an :class:`~cesaro.cache.ArrayCache`) may store the kernel
    matrix and the Krylov block.
    """
    c = as_coeffs(g)
    N = c.size
    pts = np.asarray(sample_points, dtype=complex)
    if np.any(np.abs(pts) >= 1):
        raise ValueError("sample points must lie in the open disk")
    if np.unique(pts).size != pts.size:
        raise ValueError("sample points must be distinct")
    def kernels():
        u = inner_coeffs(spec, N).coeffs
        return np.column_stack([model_kernel(spec, lam, N, u) for lam in pts])

    if cache is None:
        K, QV = kernels(), krylov_basis(c, m)
    else:
        K = cache.fetch("model_kernels", {"spec": repr(spec), "N": N}, (pts,), kernels)
        QV = cache.fetch("krylov_block", {"m": m}, (c,), lambda: krylov_basis(c, m))
    QK = _numerical_range(K, rank_tol, "kernel")
    ang = np.sort(subspace_angles(QK, QV))
    if ang.size < QK.shape[1]:
        ang = np.concatenate([ang, np.full(QK.shape[1] - ang.size, np.pi / 2)])
    return ang


def boundary_spectrum(spec: InnerFunctionSpec) -> frozenset:
    """Atom locations plus declared accumulation points of zeros."""
    pts = [xi for xi, _ in spec.atoms] + list(spec.accumulation)
    return frozenset(complex(round(p.real, 15), round(p.imag, 15)) for p in pts)


def flow_duality_residual(alpha: float, t: float, h, grid: BoundaryGrid) -> dict:
    """||P_model(C_{phi_t} f)|| / ||f|| for f = u_alpha h evaluated on the grid.

    f(phi_t(z)) is computed pointwise from the closed form of u_alpha, so no
    coefficient truncation enters; the residual is limited by how well the
    grid resolves conj(u) * (f o phi_t) = (u o phi_t / u) (h o phi_t), whose
    coefficients decay like n^(-3/4) times the decay of h o phi_t at z = 1.
    """
    spec = InnerFunctionSpec.u_alpha(alpha)
    P = ModelProjector(spec, grid)
    z = grid.points
    phi = AffineSelfMap.flow(t)(z)
    hc = as_coeffs(h)
    f_vals = P.u * eval_coeffs(hc, z)
    g_vals = inner_eval(spec, phi) * eval_coeffs(hc, phi)
    r = P.project_values(g_vals)
    return {"residual": float(np.linalg.norm(r) / np.linalg.norm(f_vals)),
            "M": grid.M, "t": t, "alpha": alpha}
