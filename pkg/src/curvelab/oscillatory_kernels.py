"""Oscillatory kernels and their empirical decay.

Three families are evaluated here:

* ``Phi^lam_a(t) = a^-1 Phi^lam(t / a)`` with
  ``Phi^lam(t) = exp(i lam1 t^alpha + i lam2 t^beta) psi(t) / t`` for a smooth
  bump ``psi`` supported in ``[1, 2]``;
* the product kernel
  ``int exp(i Q(t, s)) psi(t)/t * conj(psi(h t - s))/(h t - s) dt``, i.e. the
  convolution ``Phi^nu_h * conj(Phi^mu_1(-.))`` evaluated at ``s``;
* the rescaled TT* kernel ``rho K(rho s)`` of the symmetric case, whose phase is
  ``lam1 rho t - lam2 rho (t - s) + eta (t^(1/m) - (t - s)^(1/m))``.

All integrals use composite Gauss-Legendre panels sized from the largest
phase derivative (eight panels of eight points per local wavelength) with
an error estimate from the rule with half as many panels.  Evaluations are vectorized over ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phase_lab import DomainError, PhaseContext
from .quadrature import panel_nodes
from .signal_core import BUMP

__all__ = [
    "KernelSample",
    "DecayProfile",
    "one_sided_bump",
    "phi_lambda",
    "kernel_product",
    "kernel_product_values",
    "product_trivial_bound",
    "kernel_K",
    "kernel_K_values",
    "ttstar_max",
    "fit_loglog",
    "annulus_directions",
    "product_max",
    "decay_profile",
]

GL_ORDER = 8
PANELS_PER_WAVELENGTH = 8
MIN_PANELS_PER_UNIT = 64
RELIABLE_TOL = 1e-8
_CHUNK = 8


@dataclass(frozen=True)
class KernelSample:
    s: float
    value: complex
    params: PhaseContext
    quadrature_error_estimate: float

    @property
    def reliable(self) -> bool:
        return self.quadrature_error_estimate <= RELIABLE_TOL * max(1.0, abs(self.value))


@dataclass
class DecayProfile:
    """Max-abs kernel values along a sweep with a least-squares log-log fit.

    ``value ~ constant * x^slope``; ``residual`` is the RMS fit residual
    in natural-log units.  For ``ell`` sweeps ``x = 2^ell``, so the slope is
    the exponent of ``2^ell``.
    """

    variable: str
    points: np.ndarray
    values: np.ndarray
    slope: float
    constant: float
    residual: float
    flagged: bool = False
    details: dict = field(default_factory=dict)


def one_sided_bump(t):
    """Smooth bump supported in ``[1, 2]``."""
    return BUMP.one_sided(t)


def phi_lambda(t, lam, alpha: float, beta: float, a: float = 1.0):
    """``a^-1 Phi^lam(t / a)``; zero for ``t <= 0``."""
    if not a > 0:
        raise DomainError("dilation parameter must be positive")
    t = np.asarray(t, dtype=float) / a
    tp = np.where(t > 0, t, 1.0)
    amp = one_sided_bump(t) / tp
    out = np.where(t > 0, amp * np.exp(1j * (lam[0] * tp**alpha + lam[1] * tp**beta)), 0.0) / a
    return complex(out) if out.ndim == 0 else out


def _panels(length: float, max_dphase: float) -> int:
    waves = length * max_dphase / (2.0 * math.pi)
    return max(int(math.ceil(MIN_PANELS_PER_UNIT * length)), int(math.ceil(PANELS_PER_WAVELENGTH * waves)), 1)


def _integrate_rows(integrand, s, a: float, b: float, panels: int):
    """Integrate ``integrand(t, s) -> (len(s), len(t))`` over ``[a, b]``.

    The error estimate compares against the rule with half as many panels.
    """
    out = []
    for p in (max(panels // 2, 1), panels):
        t, w = panel_nodes(a, b, p, GL_ORDER)
        out.append(np.concatenate([integrand(t, s[i:i + _CHUNK]) @ w for i in range(0, len(s), _CHUNK)]))
    return out[1], np.abs(out[1] - out[0])


# --------------------------------------------------------------------------
# Product kernel
# --------------------------------------------------------------------------


def _product_dphase_bound(ctx: PhaseContext) -> float:
    al, be = ctx.alpha, ctx.beta
    (n1, n2), (m1, m2) = ctx.nu, ctx.mu
    # t and h t - s range over [1, 2]
    top = lambda e: max(1.0, 2.0 ** (e - 1))  # noqa: E731
    return (al * top(al) * (abs(n1) + ctx.h * abs(m1)) + be * top(be) * (abs(n2) + ctx.h * abs(m2)))


def kernel_product_values(ctx: PhaseContext, s_values):
    """Product kernel at each ``s``; returns ``(values, error_estimates)``."""
    s = np.atleast_1d(np.asarray(s_values, dtype=float))
    al, be, h = ctx.alpha, ctx.beta, ctx.h
    (n1, n2), (m1, m2) = ctx.nu, ctx.mu

    def integrand(t, s):
        u = h * t[None, :] - s[:, None]
        up = np.where(u > 0, u, 1.0)
        amp = (one_sided_bump(t) / t)[None, :] * np.where(u > 0, one_sided_bump(up) / up, 0.0)
        phase = (n1 * t**al + n2 * t**be)[None, :] - m1 * up**al - m2 * up**be
        return amp * np.exp(1j * phase)

    panels = _panels(1.0, _product_dphase_bound(ctx))
    vals, errs = _integrate_rows(integrand, s, 1.0, 2.0, panels)
    # outside the support the integrand is identically zero
    outside = (s < h - 2.0) | (s > 2.0 * h - 1.0)
    vals[outside] = 0.0
    errs[outside] = 0.0
    return vals, errs


def kernel_product(ctx: PhaseContext) -> KernelSample:
    """Product kernel at ``ctx.s``."""
    vals, errs = kernel_product_values(ctx, [ctx.s])
    return KernelSample(ctx.s, complex(vals[0]), ctx, float(errs[0]))


def product_trivial_bound(ctx: PhaseContext, s_values):
    """``int |psi(t)/t| |psi(ht - s)/(ht - s)| dt`` (the phase-free majorant)."""
    zero = ctx.with_(nu=(0.0, 0.0), mu=(0.0, 0.0))
    vals, _ = kernel_product_values(zero, s_values)
    return vals.real


# --------------------------------------------------------------------------
# TT* kernel of the symmetric case
# --------------------------------------------------------------------------


def _psi_tilde0(t, m):
    tp = np.where(t > 0, t, 1.0)
    return np.where(t > 0, BUMP(tp ** (1.0 / m)), 0.0)


def kernel_K_values(ctx: PhaseContext, k0: int, ell: int, m: int, s_values, deltas=None):
    """Rescaled TT* kernel ``rho K(rho s)`` for each ``s``.

    The linear part of the phase only enters through
    ``delta = (lam1 - lam2) rho`` (the remaining ``lam2 rho s`` is a
    unimodular constant).  Passing ``deltas`` evaluates a whole family at
    once and returns arrays of shape ``(len(s), len(deltas))``; otherwise
    ``ctx.lambda1`` and ``ctx.lambda2`` are used.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if ell < 0:
        raise ValueError("ell must be non-negative")
    s = np.atleast_1d(np.asarray(s_values, dtype=float))
    rho = 2.0 ** (m * (ell - k0))
    eta = -ctx.xi * 2.0 ** (ell - k0)
    single = deltas is None
    if single:
        deltas = np.array([(ctx.lambda1 - ctx.lambda2) * rho])
        const = np.exp(1j * ctx.lambda2 * rho * s)
    else:
        deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
        const = np.ones_like(s)
    lo, hi = 2.0 ** -m, 2.0**m
    inv = 1.0 / m

    def base(t, s):
        u = t[None, :] - s[:, None]
        up = np.where(u > 0, u, 1.0)
        amp = (_psi_tilde0(t, m) / t)[None, :] * np.where(u > 0, _psi_tilde0(up, m) / up, 0.0)
        return amp * np.exp(1j * eta * (t[None, :] ** inv - up**inv))

    # |d/dt| of the eta-part is at most |eta| (1/m) lo^(1/m - 1) on the support
    dmax = abs(eta) * inv * lo ** (inv - 1.0) * 2.0 + float(np.max(np.abs(deltas)))
    panels = _panels(hi - lo, dmax)
    out = []
    for p in (panels // 2, panels):
        t, w = panel_nodes(lo, hi, max(p, 1), GL_ORDER)
        lin = np.exp(1j * t[:, None] * deltas[None, :]) * w[:, None]
        out.append(np.concatenate([base(t, s[i:i + _CHUNK]) @ lin for i in range(0, len(s), _CHUNK)]))
    vals, errs = out[1] * const[:, None], np.abs(out[1] - out[0])
    outside = np.abs(s) >= hi - lo
    vals[outside] = 0.0
    errs[outside] = 0.0
    if single:
        return vals[:, 0], errs[:, 0]
    return vals, errs


def kernel_K(ctx: PhaseContext, k0: int, ell: int, m: int, s: float) -> KernelSample:
    vals, errs = kernel_K_values(ctx, k0, ell, m, [s])
    return KernelSample(float(s), complex(vals[0]), ctx.with_(s=float(s), m=m), float(errs[0]))


def ttstar_max(ell: int, m: int, xi_factor: float = 1.0, k0: int = 0, n_s: int = 96,
               kappas=None):
    """``max |rho K(rho s)|`` over ``|s| >= 2^(-ell/2)`` and a family of linear terms.

    ``xi = xi_factor 2^k0`` fixes ``|eta| = xi_factor 2^ell``.  The linear
    coefficient ``delta = kappa |eta|`` runs over ``kappas`` (default: a grid
    covering every value at which the phase can be stationary), since the
    operator estimate must hold uniformly in the stopping-time values.
    Returns ``(max_value, max_error, argmax_s)``.
    """
    ctx = PhaseContext(xi=xi_factor * 2.0**k0)
    eta = abs(xi_factor) * 2.0**ell
    if kappas is None:
        # stationary points need |delta| up to about |eta| |s| max|g'|; log spacing
        # resolves the small-|s| end where the admissible range is narrow
        span = (1.0 / m) * 2.0 ** (m - 1.0) * 1.05
        g = span * np.geomspace(2.0 ** (-ell / 2.0 - 3.0), 1.0, 24)
        kappas = np.concatenate([-g[::-1], [0.0], g])
    kappas = np.asarray(kappas, dtype=float)
    smin = 2.0 ** (-ell / 2.0)
    smax = 2.0**m - 2.0**-m
    mags = np.geomspace(smin, smax, n_s // 2, endpoint=False)
    s = np.concatenate([-mags[::-1], mags])
    vals, errs = kernel_K_values(ctx, k0, ell, m, s, deltas=kappas * eta)
    mag = np.abs(vals)
    i, j = np.unravel_index(np.argmax(mag), mag.shape)
    return float(mag[i, j]), float(errs.max()), float(s[i])


# --------------------------------------------------------------------------
# Profiles
# --------------------------------------------------------------------------


def fit_loglog(x, y):
    """Least-squares line through ``(log x, log y)``.

    Returns ``(slope, constant, rms_residual)`` with ``y ~ constant x^slope``;
    the residual is the RMS deviation in natural-log units.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.maximum(np.asarray(y, dtype=float), 1e-300))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - A @ coef
    return float(coef[0]), float(np.exp(coef[1])), float(np.sqrt(np.mean(res**2)))


def annulus_directions(n: int = 8, offset: float = 0.3):
    """``n`` unit-angle directions rescaled to l1 norm 3/2 (the middle of the annulus)."""
    th = offset + 2.0 * np.pi * np.arange(n) / n
    c, s = np.cos(th), np.sin(th)
    scale = 1.5 / (np.abs(c) + np.abs(s))
    return [(float(a), float(b)) for a, b in zip(c * scale, s * scale)]


def product_max(r: float, alpha=1.5, beta=0.5, pairs=None, h=1.0, n_s=64, s_floor_exp=0.1):
    """``max |kernel_product|`` over ``|s| >= r^-s_floor_exp`` and direction pairs.

    ``pairs`` lists ``(nu_dir, mu_dir)`` with ``nu = r nu_dir`` and
    ``mu = r mu_dir``; the default is every pair drawn from
    :func:`annulus_directions`, a discrete stand-in for the supremum over
    the annulus.  Returns ``(max_value, max_error)``.
    """
    if pairs is None:
        dirs = annulus_directions()
        pairs = [(a, b) for a in dirs for b in dirs]
    lo = r ** (-s_floor_exp)
    hi = min(4.0, max(2.0 - h, abs(2.0 * h - 1.0)))
    mags = np.linspace(lo, hi, n_s // 2)
    s = np.concatenate([-mags[::-1], mags])
    best, worst_err = 0.0, 0.0
    for nu_dir, mu_dir in pairs:
        ctx = PhaseContext(alpha=alpha, beta=beta, nu=(nu_dir[0] * r, nu_dir[1] * r),
                           mu=(mu_dir[0] * r, mu_dir[1] * r), h=h, r=r)
        vals, errs = kernel_product_values(ctx, s)
        best = max(best, float(np.max(np.abs(vals))))
        worst_err = max(worst_err, float(np.max(errs)))
    return best, worst_err


def decay_profile(kind: str, params: dict | None = None, sweep=None) -> DecayProfile:
    """Sweep a kernel family and fit the decay of its max-abs value.

    kind ``"product_r"``: sweep ``r``; params ``alpha, beta, pairs, h, n_s,
    s_floor_exp`` (see :func:`product_max`).

    kind ``"ttstar_ell"``: sweep ``ell``; params ``m, xi_factor, k0, n_s,
    kappas`` (see :func:`ttstar_max`).  The fit uses ``x = 2^ell`` so the
    slope is the exponent of ``2^ell``.
    """
    params = dict(params or {})
    if sweep is None or len(sweep) < 4:
        raise ValueError("sweep needs at least 4 points")
    sweep = [float(v) if kind == "product_r" else int(v) for v in sweep]
    if any(b <= a for a, b in zip(sweep, sweep[1:])):
        raise ValueError("sweep must be strictly increasing")
    values, errors = [], []
    if kind == "product_r":
        for r in sweep:
            v, e = product_max(
                r,
                params.get("alpha", 1.5),
                params.get("beta", 0.5),
                params.get("pairs"),
                params.get("h", 1.0),
                params.get("n_s", 64),
                params.get("s_floor_exp", 0.1),
            )
            values.append(v)
            errors.append(e)
        x = np.asarray(sweep)
        variable = "r"
    elif kind == "ttstar_ell":
        for ell in sweep:
            v, e, _ = ttstar_max(
                ell,
                params.get("m", 2),
                params.get("xi_factor", 1.0),
                params.get("k0", 0),
                params.get("n_s", 96),
                params.get("kappas"),
            )
            values.append(v)
            errors.append(e)
        x = 2.0 ** np.asarray(sweep, dtype=float)
        variable = "ell"
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    values = np.asarray(values)
    slope, const, resid = fit_loglog(x, values)
    flagged = any(e > RELIABLE_TOL * max(1.0, v) for e, v in zip(errors, values))
    return DecayProfile(variable, np.asarray(sweep, dtype=float), values, slope, const, resid, flagged,
                        {"max_quadrature_error": float(max(errors))})
