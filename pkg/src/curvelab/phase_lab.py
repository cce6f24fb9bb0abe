"""Phase-function algebra for two-term fractional monomial phases.

The central object is the phase

    Q(t, s) = nu1 t**alpha + nu2 t**beta - mu1 (h t - s)**alpha - mu2 (h t - s)**beta

arising from products of oscillatory kernels, together with the 4x4
matrix ``M`` that maps the coefficient vector
``(alpha nu1 t**(alpha-1), -alpha mu1 (ht-s)**(alpha-1), beta nu2 t**(beta-1),
-beta mu2 (ht-s)**(beta-1))`` to the derivatives ``(Q', Q'', Q''', Q'''')``.
Its determinant factors in closed form, which is what makes the
non-degeneracy of ``Q`` quantitative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import adaptive_gl, panels_for_phase

__all__ = [
    "DomainError",
    "PreconditionError",
    "PhaseContext",
    "IntervalSet",
    "falling",
    "phase_Q",
    "matrix_M",
    "coefficient_vector",
    "det_identity",
    "det_M",
    "spectral_norm",
    "matrix_lower_bound_holds",
    "exceptional_set",
    "sublevel_measure",
    "vdc_bound",
]


class DomainError(ValueError):
    """Evaluation point outside the region where the phase is defined."""


class PreconditionError(ValueError):
    """Caller-certified hypothesis violated."""


@dataclass(frozen=True)
class PhaseContext:
    """Every parameter entering the kernel phases.

    ``alpha, beta, nu, mu, h, s, r`` describe the asymmetric two-term
    phase; ``m, d, lambda1, lambda2, rho, eta, xi`` describe the
    symmetric-case kernel phase.  Unused fields keep their defaults.
    """

    alpha: float = 0.5
    beta: float = 1.5
    nu: tuple = (1.0, 1.0)
    mu: tuple = (1.0, 1.0)
    h: float = 1.0
    s: float = 0.0
    r: float = 1.0
    m: int = 2
    d: int = 2
    lambda1: float = 0.0
    lambda2: float = 0.0
    rho: float = 1.0
    eta: float = 0.0
    xi: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("exponents must be positive")
        if not (0 < self.h <= 1):
            raise ValueError(f"h must lie in (0, 1], got {self.h}")
        object.__setattr__(self, "nu", tuple(float(v) for v in self.nu))
        object.__setattr__(self, "mu", tuple(float(v) for v in self.mu))

    def with_(self, **changes) -> "PhaseContext":
        return replace(self, **changes)

    def in_annulus(self) -> bool:
        total = abs(self.nu[0]) + abs(self.nu[1])
        return self.r <= total <= 2 * self.r


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint closed intervals."""

    intervals: tuple = field(default_factory=tuple)

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, bool)
        for a, b in self.intervals:
            out |= (t >= a) & (t <= b)
        return out


def falling(a: float, j: int) -> float:
    """Falling factorial ``a (a-1) ... (a-j+1)``; 1 for ``j = 0``."""
    out = 1.0
    for i in range(j):
        out *= a - i
    return out


def _check_domain(t, ctx: PhaseContext):
    u = ctx.h * np.asarray(t, dtype=float) - ctx.s
    if np.any(np.asarray(t) <= 0) or np.any(u <= 0):
        raise DomainError("phase requires t > 0 and h t - s > 0")
    return u


def phase_Q(t, ctx: PhaseContext, order: int = 0):
    """``d^order/dt^order Q(t, s)`` from closed-form monomial derivatives."""
    if not 0 <= order <= 4:
        raise ValueError("order must be between 0 and 4")
    u = _check_domain(t, ctx)
    t = np.asarray(t, dtype=float)
    al, be, j, h = ctx.alpha, ctx.beta, order, ctx.h
    (n1, n2), (m1, m2) = ctx.nu, ctx.mu
    out = (
        n1 * falling(al, j) * t ** (al - j)
        + n2 * falling(be, j) * t ** (be - j)
        - h**j * (m1 * falling(al, j) * u ** (al - j) + m2 * falling(be, j) * u ** (be - j))
    )
    return float(out) if out.ndim == 0 else out


def _ab(ctx: PhaseContext):
    a = [falling(ctx.alpha - 1, j) for j in range(4)]
    b = [falling(ctx.beta - 1, j) for j in range(4)]
    return a, b


def matrix_M(t: float, ctx: PhaseContext) -> np.ndarray:
    u = float(_check_domain(t, ctx))
    a, b = _ab(ctx)
    h = ctx.h
    M = np.empty((4, 4))
    for j in range(4):
        M[j] = (a[j] * t**-j, a[j] * h ** (j + 1) * u**-j, b[j] * t**-j, b[j] * h ** (j + 1) * u**-j)
    return M


def coefficient_vector(t: float, ctx: PhaseContext) -> np.ndarray:
    u = float(_check_domain(t, ctx))
    al, be = ctx.alpha, ctx.beta
    (n1, n2), (m1, m2) = ctx.nu, ctx.mu
    return np.array([
        al * n1 * t ** (al - 1),
        -al * m1 * u ** (al - 1),
        be * n2 * t ** (be - 1),
        -be * m2 * u ** (be - 1),
    ])


def det_identity(a, b, x: float, y: float):
    """Closed form of the Vandermonde-like 4x4 determinant.

    The matrix has rows ``(a_j x^j, a_j y^j, b_j x^j, b_j y^j)``.  Returns
    ``(value, c, d)`` with ``value = (c (x^2 + y^2) + d x y) (x - y)^2 x y``.
    """
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    c = -(a0 * b1 - a1 * b0) * (a2 * b3 - a3 * b2)
    d = c + (a0 * b3 - a3 * b0) * (a1 * b2 - a2 * b1)
    value = (c * (x * x + y * y) + d * x * y) * (x - y) ** 2 * x * y
    return value, c, d


def det_M(t: float, ctx: PhaseContext) -> float:
    """``det M`` via the factorization ``t^-5 (ht-s)^-5 s^2 h^3 S(t)``."""
    u = float(_check_domain(t, ctx))
    a, b = _ab(ctx)
    _, c, d = det_identity(a, b, u, ctx.h * t)
    h, s = ctx.h, ctx.s
    S = h * h * (2 * c + d) * t * t - h * (2 * c + d) * s * t + c * s * s
    return t**-5 * u**-5 * s * s * h**3 * S


def spectral_norm(A, rtol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on ``A^H A``.

    The Gram matrix is repeatedly squared (with rescaling) before the
    vector iteration, which makes convergence fast even when the top two
    singular values are close.  Real and complex matrices are accepted.
    """
    A = np.asarray(A)
    A = A.astype(complex if np.iscomplexobj(A) else float)
    n = A.shape[1]
    if not np.any(A):
        return 0.0
    G = A.conj().T @ A
    # Squaring the normalized Gram matrix separates the top eigenvalue cheaply.
    P = G / np.max(np.abs(G))
    for _ in range(60):
        Q = P @ P
        Q /= np.max(np.abs(Q))
        done = np.max(np.abs(Q - P)) <= 1e-15
        P = Q
        if done:
            break
    v = P @ np.linspace(1.0, 2.0, n)
    if not np.any(v):
        v = P @ np.cos(np.arange(n) * 0.7548776662466927 + 0.3)
    v /= np.linalg.norm(v)
    lam = float(np.real(np.vdot(v, G @ v)))
    for _ in range(max_iter):
        w = G @ v
        v = w / np.linalg.norm(w)
        new = float(np.real(np.vdot(v, G @ v)))
        if abs(new - lam) <= rtol * new:
            break
        lam = new
    return math.sqrt(max(float(np.real(np.vdot(v, G @ v))), 0.0))


def matrix_lower_bound_holds(A, x):
    """Check ``|A x| >= |det A| ||A||^(1-n) |x|``; returns ``(holds, slack)``."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    n = A.shape[0]
    lhs = float(np.linalg.norm(A @ x))
    det = abs(float(np.linalg.det(A)))
    if det == 0.0:
        return True, lhs
    norm = spectral_norm(A)
    rhs = det * norm ** (1 - n) * float(np.linalg.norm(x))
    slack = lhs - rhs
    scale = max(lhs, rhs, float(np.linalg.norm(x)))
    return slack >= -1e-12 * scale, slack


def _bisect(g, lo, hi, tol=1e-12):
    glo = g(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def exceptional_set(ctx: PhaseContext, tau: float, eps1: float, scan: int = 10_000) -> IntervalSet:
    """``{t in [1/2, 2] : |alpha nu1 t^(alpha-1) + beta nu2 t^(beta-1)| <= tau r^(1-eps1)}``."""
    al, be = ctx.alpha, ctx.beta
    n1, n2 = ctx.nu
    thr = tau * ctx.r ** (1 - eps1)

    def F(t):
        return al * n1 * t ** (al - 1) + be * n2 * t ** (be - 1)

    grid = np.linspace(0.5, 2.0, scan + 1)
    vals = F(grid)
    cuts = [0.5, 2.0]
    for level in (thr, -thr):
        g = vals - level
        idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
        for i in idx:
            cuts.append(_bisect(lambda t: F(t) - level, grid[i], grid[i + 1]))
        cuts.extend(grid[:-1][g[:-1] == 0])
    cuts = np.unique(cuts)
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if abs(F(0.5 * (a + b))) <= thr:
            if pieces and abs(pieces[-1][1] - a) <= 1e-12:
                pieces[-1] = (pieces[-1][0], b)
            else:
                pieces.append((float(a), float(b)))
    return IntervalSet(tuple(pieces))


def sublevel_measure(f, interval, rho: float, samples: int = 100_000) -> float:
    """Measure of ``{x in interval : |f(x)| <= rho}`` by midpoint sampling."""
    if rho <= 0:
        raise PreconditionError("rho must be positive")
    if samples < 1000:
        raise PreconditionError("at least 1000 samples required")
    a, b = interval
    step = (b - a) / samples
    x = a + step * (np.arange(samples) + 0.5)
    return float(np.count_nonzero(np.abs(f(x)) <= rho) * step)


def vdc_bound(phase, sigma1: float, sigma2: float, lam: float, interval, dphase=None,
              tol: float = 1e-13):
    """Oscillatory integral ``int_a^b exp(i lam phase)`` and its first-derivative bound.

    ``bound = (2 / sigma1 + (b - a) sigma2 / sigma1**2) / lam``.  The caller
    certifies ``|phase'| >= sigma1`` and ``|phase''| <= sigma2`` on the
    interval.  ``dphase`` (if given) sizes the quadrature panels.
    """
    if not sigma1 > 0:
        raise PreconditionError("sigma1 must be positive")
    a, b = interval
    if dphase is not None:
        grid = np.linspace(a, b, 257)
        peak = float(np.max(np.abs(dphase(grid)))) * abs(lam)
    else:
        peak = abs(lam) * (sigma1 + sigma2 * (b - a))
    panels = panels_for_phase(a, b, peak, per_wavelength=2.0)
    value, _ = adaptive_gl(lambda t: np.exp(1j * lam * phase(t)), a, b, tol=tol, panels=panels)
    bound = (2.0 / sigma1 + (b - a) * sigma2 / sigma1**2) / lam
    return complex(value), float(bound)
