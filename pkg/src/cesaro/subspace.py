"""Finite-dimensional C*-invariant spans, the b_r density classifier, the
difference quotient Q_lambda and the p_n density trick.

Spans are handled through their coefficient matrices.  Rank decisions use
singular values relative to the largest one with threshold
:data:`RANK_TOL`; dropped directions are always reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np
from scipy.linalg import qr

from .h2core import CoeffFun, PowerLogParams, as_coeffs, power_log_series, power_series
from .model import RankCollapseError
from .ops import apply_C_star, cstar_tail_bound
from .report import CheckReport

__all__ = [
    "RANK_TOL",
    "SubspaceBasis",
    "LambdaSequence",
    "PowerLogImage",
    "cstar_on_powerlog",
    "cstar_jordan_matrix",
    "cstar_image_defect",
    "invariance_residual_span",
    "b_r_series",
    "DensityVerdict",
    "classify_density",
    "q_lambda_divide",
    "pn_density_check",
    "chain_members",
    "chain_membership_probe",
]

RANK_TOL = 1e-10


def _column_matrix(members) -> np.ndarray:
    N = max(m.order for m in members)
    return np.column_stack([m.resize(N).coeffs for m in members])


@dataclass(frozen=True)
class SubspaceBasis:
    """Ordered spanning set with the (mu, j) label of each member."""

    members: tuple
    labels: tuple = ()

    def __post_init__(self):
        members = tuple(m if isinstance(m, CoeffFun) else CoeffFun(m) for m in self.members)
        if not members:
            raise ValueError("a basis needs at least one member")
        labels = tuple(self.labels) if self.labels else tuple(range(len(members)))
        if len(labels) != len(members):
            raise ValueError("one label per member")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def powerlog(cls, mu: complex, k: int, N: int) -> "SubspaceBasis":
        """{(1-z)^mu log^j(1-z): 0 <= j <= k} at order N."""
        params = [PowerLogParams(mu, j) for j in range(k + 1)]
        return cls(tuple(power_log_series(p, N) for p in params),
                   tuple((p.mu, p.j) for p in params))

    @property
    def matrix(self) -> np.ndarray:
        return _column_matrix(self.members)

    def gram(self) -> np.ndarray:
        A = self.matrix
        return A.conj().T @ A

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    def rank(self, tol: float = RANK_TOL) -> int:
        s = self.singular_values()
        return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


@dataclass(frozen=True)
class LambdaSequence:
    """Increasing positive exponents lambda_1 < lambda_2 < ... with gap >= delta.

    ``generator`` is a zero-argument callable returning a fresh iterator.
    """

    generator: Callable[[], Iterator[float]]
    delta: float
    name: str = ""

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("separation must be positive")

    @classmethod
    def arithmetic(cls, first: float, step: float, name: str = "") -> "LambdaSequence":
        def gen():
            n = 0
            while True:
                yield first + step * n
                n += 1

        return cls(gen, step, name or f"{first:g}+{step:g}n")

    @classmethod
    def chain(cls, k: int) -> "LambdaSequence":
        """Lambda_k = {k + 3n : n >= 1}."""
        return cls.arithmetic(k + 3.0, 3.0, f"Lambda_{k}")

    def prefix(self, count: int) -> np.ndarray:
        it = self.generator()
        vals = np.array([next(it) for _ in range(count)], dtype=float)
        self.check(vals)
        return vals

    def check(self, vals) -> None:
        vals = np.asarray(vals, dtype=float)
        if vals.size and vals[0] <= 0:
            raise ValueError("exponents must be positive")
        gaps = np.diff(vals)
        if gaps.size and gaps.min() < self.delta:
            raise ValueError(f"separation {gaps.min():g} below delta = {self.delta:g}")


# C* on (1-z)^mu log^j(1-z) -------------------------------------------------------

@dataclass(frozen=True)
class PowerLogImage:
    """C*[(1-z)^mu log^j] = sum_i coeffs[i] (1-z)^mu log^i, i = 0..j."""

    mu: complex
    j: int
    coeffs: np.ndarray

    def series(self, N: int) -> CoeffFun:
        out = np.zeros(N, dtype=complex)
        for i, c in enumerate(self.coeffs):
            out += c * power_log_series(PowerLogParams(self.mu, i), N).coeffs
        return CoeffFun(out)


def cstar_on_powerlog(p: PowerLogParams) -> PowerLogImage:
    """Closed-form image from j-fold mu-differentiation of C*(1-z)^mu = (1-z)^mu/(mu+1).

    coeff_i = binom(j, i) (-1)^(j-i) (j-i)! (mu+1)^(-(j-i)-1).
    """
    mu, j = p.mu, p.j
    c = np.array([math.comb(j, i) * (-1) ** (j - i) * math.factorial(j - i)
                  * (mu + 1.0) ** (-(j - i) - 1) for i in range(j + 1)], dtype=complex)
    return PowerLogImage(mu, j, c)


def cstar_jordan_matrix(mu: complex, k: int) -> np.ndarray:
    """R with C* B = B R for B = [(1-z)^mu log^j]_{j<=k}: upper triangular, diagonal 1/(mu+1)."""
    R = np.zeros((k + 1, k + 1), dtype=complex)
    for j in range(k + 1):
        R[: j + 1, j] = cstar_on_powerlog(PowerLogParams(mu, j)).coeffs
    return R


def cstar_image_defect(p: PowerLogParams, N: int, safety: float = 2.0) -> tuple[float, float]:
    """(defect, tolerance) comparing apply_C_star with the closed-form image at order N.

    The truncated C* misses sum_{k>=N} a_k/(k+1) in every output entry; the
    tolerance is ``safety`` times :func:`cstar_tail_bound` with the decay exponent
    1 + Re mu (the safety factor absorbs the log^j growth of the constant).
    """
    f = power_log_series(p, N)
    lhs = apply_C_star(f).coeffs
    rhs = cstar_on_powerlog(p).series(N).coeffs
    defect = float(np.linalg.norm(lhs - rhs))
    return defect, safety * cstar_tail_bound(f, 1.0 + p.mu.real)


def _range_basis(A: np.ndarray, tol: float):
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return U[:, :0], s, Vh[:0]
    r = int(np.sum(s > tol * s[0]))
    return U[:, :r], s, Vh[:r]


def invariance_residual_span(basis: SubspaceBasis, tol: float = RANK_TOL,
                             decay_exponent: float | None = None) -> dict:
    """Max relative least-squares residual of C* applied to each member, projected on the span.

    Members are normalized first.  Raises :class:`RankCollapseError` when the
    numerical rank (singular values relative to the largest, threshold ``tol``)
    is below the member count, since a collapsed span makes the residual
    meaningless.  Returns the residual, the rank and the representation
    matrix R with C* B ~ B R in the original (unnormalized) members.
    With ``decay_exponent`` given, "tolerance" is twice the largest relative
    C* truncation bound over the members plus 1e-14 (otherwise 1e-14, the
    polynomial case).
    """
    A = basis.matrix
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise RankCollapseError("basis contains a zero member")
    An = A / norms
    Q, s, _ = _range_basis(An, tol)
    if Q.shape[1] < A.shape[1]:
        raise RankCollapseError(
            f"basis rank {Q.shape[1]} < {A.shape[1]} members (singular values {s})")
    images = np.column_stack([apply_C_star(CoeffFun(A[:, i])).coeffs for i in range(A.shape[1])])
    proj = Q @ (Q.conj().T @ images)
    rel = np.linalg.norm(images - proj, axis=0) / np.maximum(np.linalg.norm(images, axis=0), 1e-300)
    R = np.linalg.lstsq(A, images, rcond=None)[0]
    tolerance = 1e-14
    if decay_exponent is not None:
        tolerance += 2.0 * max(cstar_tail_bound(m, decay_exponent) / np.linalg.norm(images[:, i])
                               for i, m in enumerate(basis.members))
    return {"residual": float(rel.max()), "tolerance": float(tolerance), "per_member": rel,
            "rank": Q.shape[1],
            "singular_values": s, "representation": R, "N": A.shape[0]}


# b_r density classifier -------------------------------------------------------------

def b_r_series(seq: LambdaSequence, a: float, r_values) -> np.ndarray:
    """b_r = sum_{lambda_n < r} 1/lambda_n - a log r, streaming the sequence once."""
    if not a > 0:
        raise ValueError("a must be positive")
    r_values = np.asarray(r_values, dtype=float)
    order = np.argsort(r_values)
    out = np.empty(r_values.size)
    it = seq.generator()
    total, prev = 0.0, None
    lam = next(it)
    for idx in order:
        r = r_values[idx]
        while lam < r:
            if prev is not None and lam - prev < seq.delta:
                raise ValueError(f"separation violated at {lam}")
            total += 1.0 / lam
            prev, lam = lam, next(it)
        out[idx] = total - a * math.log(r)
    return out


@dataclass(frozen=True)
class DensityVerdict:
    """b_r behaviour over the sampled range and the resulting density verdict."""

    a: float
    slope: float
    behaviour: str
    verdict: str
    r_values: tuple = field(default=())
    b_r: tuple = field(default=())


def classify_density(seq: LambdaSequence, a: float, r_values=None,
                     slope_tol: float = 1e-3) -> DensityVerdict:
    """Classify span{(1-z)^lambda_n} by the growth of b_r against log r.

    b_r is "unbounded" when its least-squares slope in log r exceeds
    ``slope_tol`` and "bounded" otherwise.  Verdicts: unbounded with a > 1/2
    gives "dense", bounded with a < 1/2 gives "not dense", anything else
    (including a = 1/2 exactly) is "inconclusive".
    """
    if r_values is None:
        r_values = np.logspace(4, 6, 21)
    r_values = np.asarray(r_values, dtype=float)
    b = b_r_series(seq, a, r_values)
    slope = float(np.polyfit(np.log(r_values), b, 1)[0])
    behaviour = "unbounded" if slope > slope_tol else "bounded"
    if behaviour == "unbounded" and a > 0.5:
        verdict = "dense"
    elif behaviour == "bounded" and a < 0.5:
        verdict = "not dense"
    else:
        verdict = "inconclusive"
    return DensityVerdict(a, slope, behaviour, verdict, tuple(r_values.tolist()), tuple(b.tolist()))


# difference quotient and p_n trick ------------------------------------------------------

def q_lambda_divide(f, lam: complex) -> CoeffFun:
    """Coefficients of (f(z) - f(lam))/(z - lam) for the stored polynomial.

    Backward synthetic division b_{N-2} = a_{N-1}, b_{n-1} = a_n + lam b_n;
    the result keeps order N (its top coefficient is 0) and satisfies
    (z - lam) Q f + f(lam) = f exactly on the stored coefficients.
    """
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("lambda must lie in the open disk")
    a = as_coeffs(f)
    N = a.size
    b = np.zeros(N, dtype=complex)
    acc = 0.0j
    for n in range(N - 1, 0, -1):
        acc = a[n] + lam * acc
        b[n - 1] = acc
    return CoeffFun(b)


def pn_density_check(h, n: int) -> float:
    """||p_n h - h|| with p_n = 1 - (z + ... + z^n)/n, from the full (untruncated) product."""
    if n < 1:
        raise ValueError("n must be at least 1")
    a = as_coeffs(h)
    s = np.zeros(n + 1)
    s[1:] = 1.0 / n
    return float(np.linalg.norm(np.convolve(a, s)))


# V_k chain probes ------------------------------------------------------------------------

def chain_members(ell: int, count: int, N: int) -> list:
    """(1-z)^(ell + 3n), n = 0..count-1, as order-N sequences.

    The first exponent is ell itself, so that (1-z)^ell lies in V_ell.
    """
    return [power_series(ell + 3 * n, N) for n in range(count)]


def _distance_to_span(target: np.ndarray, A: np.ndarray, tol: float):
    A = A / np.linalg.norm(A, axis=0)
    Q, R, _ = qr(A, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    r = int(np.sum(d > tol * d[0]))
    Q = Q[:, :r]
    t = target / np.linalg.norm(target)
    res = t - Q @ (Q.conj().T @ t)
    return float(np.linalg.norm(res)), A.shape[1] - r


def chain_membership_probe(k: int, ell: int, N: int, sample_size: int,
                           stagnation_ratio: float = 0.9, tol: float = RANK_TOL) -> CheckReport:
    """Relative distance from (1-z)^k to span of the first ``sample_size`` members of V_ell.

    Distances are computed for the prefixes of size sample_size/8, /4, /2 and
    sample_size with a column-pivoted QR (directions below ``tol`` dropped and
    counted).  A finite-span distance only bounds the true distance from
    above, so the report carries the whole sequence: "stagnating" when the last
    halving of the prefix improved the distance by less than the factor
    ``stagnation_ratio``, "decaying" otherwise.  The probe passes when the
    behaviour matches the expectation: for k < ell the distance stagnates at a
    positive level; for k >= ell (a member of the span) it is below 1e-10.
    """
    if (k - ell) % 3:
        raise ValueError("k and ell must agree mod 3")
    target = power_series(k, N).coeffs
    members = chain_members(ell, sample_size, N)
    A = _column_matrix(members)
    sizes = sorted({max(1, sample_size // d) for d in (8, 4, 2, 1)})
    dist, dropped = [], []
    for m in sizes:
        d, dr = _distance_to_span(target, A[:, :m], tol)
        dist.append(d)
        dropped.append(dr)
    ratio = dist[-1] / dist[-2] if len(dist) > 1 and dist[-2] > 0 else 0.0
    trend = "stagnating" if ratio > stagnation_ratio else "decaying"
    if k < ell:
        passed = trend == "stagnating" and dist[-1] > 1e-6
        expectation = "positive and stagnating"
    else:
        passed = dist[-1] <= 1e-10
        expectation = "zero (member of the span)"
    return CheckReport(
        name=f"chain_probe_k{k}_ell{ell}",
        anchor="V_1 contains V_4 contains V_7, strictly",
        computed={"distance": dist[-1], "sequence": dist, "trend": trend, "dropped": dropped},
        reference=expectation,
        tolerance={"stagnation_ratio": stagnation_ratio, "rank_tol": tol},
        passed=passed,
        tag="PAPER",
        params={"k": k, "ell": ell, "N": N, "sample_size": sample_size, "prefix_sizes": sizes},
        note="probe: finite spans give upper bounds on the distance only",
    )
