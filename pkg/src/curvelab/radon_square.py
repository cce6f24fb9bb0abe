"""Curve averages, mollified averages and the square function comparing them.

``A_k f = int f(x - t, y - t^m) chi_k(t) dt`` averages along the curve at
scale ``2^k`` and ``B_k f = f * phi_k`` averages over an anisotropic
``2^k x 2^(mk)`` ball.  Both are applied as exact Fourier multipliers on
the periodic grid (so band-limited inputs see no interpolation error):

* ``mu_k^(xi, eta) = int exp(-i(xi t + eta t^m)) chi_k(t) dt`` by composite
  Gauss-Legendre quadrature, separable in ``xi`` and ``eta``;
* ``phi_k^(xi, eta) = Phi(|(2^k xi, 2^(mk) eta)|)`` with ``Phi`` the Hankel
  transform of the radial bump.

The cutoff ``chi`` is the partition-of-unity cutoff of ``signal_core``
(1 on ``[-1, 1]``, 0 outside ``[-2, 2]``).  Its logistic transition
satisfies ``s(x) + s(1 - x) = 1``, so ``int chi = 3`` exactly.  The radial
bump ``exp(-1/(1 - rho^2))`` has mass ``pi (e^-1 - E1(1))``, which fixes
the normalization of ``phi`` in closed form.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exp1, j0

from .oscillatory_kernels import fit_loglog
from .quadrature import panel_nodes, panels_for_phase
from .rng import SplitMix64
from .signal_core import BUMP, SampledSignal2D, l2_norm

__all__ = [
    "CHI_MASS",
    "AveragingPair",
    "SignPattern",
    "chi",
    "phi",
    "curve_multiplier",
    "mollifier_multiplier",
    "avg_curve",
    "avg_curve_direct",
    "avg_mollify",
    "avg_mollify_sampled",
    "avg_mollify_direct",
    "square_function",
    "dyadic_radon_maximal",
    "check_pointwise_domination",
    "sigma_hat",
    "sigma_fourier_decay",
    "sigma_decay_exponent",
    "signed_operator",
    "khintchine_ratio",
]

CHI_MASS = 3.0
_RADIAL_MASS = math.pi * (math.exp(-1.0) - float(exp1(1.0)))
_PHI_SCALE = CHI_MASS / _RADIAL_MASS


def chi(t):
    """Smooth cutoff: 1 on ``[-1, 1]``, 0 outside ``[-2, 2]``, total mass 3."""
    return BUMP.cutoff(t)


def _radial(rho):
    rho = np.asarray(rho, dtype=float)
    out = np.zeros(rho.shape)
    inside = rho < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - rho[inside] ** 2))
    return out


def phi(x, y):
    """Radial bump on the unit disc with ``int int phi = int chi``."""
    return _PHI_SCALE * _radial(np.hypot(x, y))


@dataclass(frozen=True)
class AveragingPair:
    """Scale ``k`` and curve exponent ``m`` of the pair ``(A_k, B_k)``."""

    k: int
    m: int = 2

    def chi_k(self, t):
        return 2.0 ** (-self.k) * chi(np.ldexp(np.asarray(t, dtype=float), -self.k))

    def phi_k(self, x, y):
        k, m = self.k, self.m
        return 2.0 ** (-(m + 1) * k) * phi(np.ldexp(x, -k), np.ldexp(y, -m * k))

    @staticmethod
    def masses():
        """``(int chi, int int phi)`` computed by quadrature (both equal 3)."""
        t, w = panel_nodes(-2.0, 2.0, 64, 16)
        r, wr = panel_nodes(0.0, 1.0, 64, 16)
        return float(w @ chi(t)), float(2.0 * math.pi * _PHI_SCALE * (wr @ (_radial(r) * r)))


@dataclass(frozen=True)
class SignPattern:
    """Signs ``eps_k`` in ``{-1, +1}`` for scales ``ks``, drawn from ``seed``."""

    ks: tuple
    signs: tuple
    seed: int | None = None

    def __post_init__(self):
        if len(self.ks) != len(self.signs) or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +-1, one per scale")

    @classmethod
    def random(cls, ks, seed: int) -> "SignPattern":
        ks = tuple(int(k) for k in ks)
        s = SplitMix64(seed).signs(len(ks))
        return cls(ks, tuple(int(v) for v in s), seed)

    @classmethod
    def constant(cls, ks, sign: int = 1) -> "SignPattern":
        ks = tuple(int(k) for k in ks)
        return cls(ks, (sign,) * len(ks))

    def __getitem__(self, k):
        return self.signs[self.ks.index(k)]


# --------------------------------------------------------------------------
# Multipliers
# --------------------------------------------------------------------------


def curve_multiplier(xi, eta, k: int, m: int, chunk: int = 4096) -> np.ndarray:
    """``mu_k^`` on the tensor grid ``xi x eta`` (shape ``(len(xi), len(eta))``)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    T = 2.0 ** (k + 1)
    rate = float(np.max(np.abs(xi))) + float(np.max(np.abs(eta))) * m * T ** (m - 1)
    panels = max(panels_for_phase(-T, T, rate, per_wavelength=4.0), 64)
    t, w = panel_nodes(-T, T, panels, 16)
    wt = w * 2.0 ** (-k) * chi(np.ldexp(t, -k))
    keep = wt != 0
    t, wt = t[keep], wt[keep]
    tm = t**m
    out = np.zeros((len(xi), len(eta)), complex)
    for i in range(0, len(t), chunk):
        ex = np.exp(-1j * np.outer(xi, t[i:i + chunk])) * wt[i:i + chunk]
        ey = np.exp(-1j * np.outer(tm[i:i + chunk], eta))
        out += ex @ ey
    return out


def _radial_profile(omega, panels: int = 256):
    """``Phi(w) = 2 pi scale int_0^1 exp(-1/(1-r^2)) J0(w r) r dr``."""
    omega = np.asarray(omega, dtype=float)
    wmax = float(np.max(omega)) if omega.size else 0.0
    panels = max(panels, panels_for_phase(0.0, 1.0, wmax, per_wavelength=4.0))
    r, w = panel_nodes(0.0, 1.0, panels, 16)
    base = w * _radial(r) * r * 2.0 * math.pi * _PHI_SCALE
    flat = omega.ravel()
    out = np.empty(flat.shape)
    for i in range(0, len(flat), 2048):
        out[i:i + 2048] = j0(np.outer(flat[i:i + 2048], r)) @ base
    return out.reshape(omega.shape)


def mollifier_multiplier(xi, eta, k: int, m: int) -> np.ndarray:
    """``phi_k^`` on the tensor grid ``xi x eta``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    w = np.hypot(np.ldexp(xi, k)[:, None], np.ldexp(eta, m * k)[None, :])
    uniq, inv = np.unique(w, return_inverse=True)
    return _radial_profile(uniq)[inv].reshape(w.shape)


@functools.lru_cache(maxsize=128)
def _grid_multipliers(gx, gy, k: int, m: int):
    """``(mu_k^, phi_k^)`` on the FFT frequencies of a grid pair (cached, read-only)."""
    kx, ky = gx.frequencies(), gy.frequencies()
    mu = curve_multiplier(kx, ky, k, m)
    ph = mollifier_multiplier(kx, ky, k, m)
    mu.setflags(write=False)
    ph.setflags(write=False)
    return mu, ph


def _apply(f: SampledSignal2D, mult) -> SampledSignal2D:
    return f.with_values(np.fft.ifft2(np.fft.fft2(f.values) * mult))


def avg_curve(f: SampledSignal2D, k: int, m: int) -> SampledSignal2D:
    """``A_k f`` as an exact multiplier on the periodic grid."""
    return _apply(f, _grid_multipliers(f.grid_x, f.grid_y, k, m)[0])


def avg_curve_direct(f: SampledSignal2D, k: int, m: int, nodes: int = 4096) -> SampledSignal2D:
    """``A_k f`` by a midpoint sum over translates (independent check)."""
    from .signal_core import SpectralShifter

    T = 2.0 ** (k + 1)
    h = 2.0 * T / nodes
    t = -T + (np.arange(nodes) + 0.5) * h
    wt = h * 2.0 ** (-k) * chi(np.ldexp(t, -k))
    sh = SpectralShifter(f)
    acc = np.zeros(f.values.shape, complex)
    for tj, wj in zip(t, wt):
        if wj:
            acc += wj * sh.shift(tj, tj**m)
    return f.with_values(acc)


def avg_mollify(f: SampledSignal2D, k: int, m: int) -> SampledSignal2D:
    """``B_k f = f * phi_k`` as an exact multiplier on the periodic grid."""
    return _apply(f, _grid_multipliers(f.grid_x, f.grid_y, k, m)[1])


def _sampled_kernel(f: SampledSignal2D, k: int, m: int) -> np.ndarray:
    gx, gy = f.grid_x, f.grid_y
    ix = np.fft.fftfreq(gx.count, 1.0 / gx.count) * gx.spacing
    iy = np.fft.fftfreq(gy.count, 1.0 / gy.count) * gy.spacing
    return AveragingPair(k, m).phi_k(ix[:, None], iy[None, :]) * f.cell_area


def avg_mollify_sampled(f: SampledSignal2D, k: int, m: int) -> SampledSignal2D:
    """Circular FFT convolution with ``phi_k`` sampled on the grid (Riemann sum)."""
    K = _sampled_kernel(f, k, m)
    return _apply(f, np.fft.fft2(K))


def avg_mollify_direct(f: SampledSignal2D, k: int, m: int) -> SampledSignal2D:
    """Direct circular convolution sum with the sampled kernel (slow oracle)."""
    K = _sampled_kernel(f, k, m)
    nx, ny = f.values.shape
    out = np.zeros(f.values.shape, complex)
    for a, b in zip(*np.nonzero(K)):
        out += K[a, b] * np.roll(np.roll(f.values, a, axis=0), b, axis=1)
    return f.with_values(out)


# --------------------------------------------------------------------------
# Square function and domination
# --------------------------------------------------------------------------


def _differences(f: SampledSignal2D, m: int, ks):
    F = np.fft.fft2(f.values)
    out = []
    for k in ks:
        mu, ph = _grid_multipliers(f.grid_x, f.grid_y, k, m)
        out.append(np.fft.ifft2(F * (mu - ph)))
    return out


def square_function(f: SampledSignal2D, m: int, k_range) -> SampledSignal2D:
    """``S f = (sum_k |A_k f - B_k f|^2)^(1/2)``."""
    ks = list(k_range)
    if not ks:
        raise ValueError("k_range must be finite and nonempty")
    diffs = _differences(f, m, ks)
    return f.with_values(np.sqrt(sum(np.abs(d) ** 2 for d in diffs)))


def dyadic_radon_maximal(f: SampledSignal2D, m: int, k_range, dt: float | None = None) -> SampledSignal2D:
    """Radon maximal function restricted to the radii ``2^k``."""
    from .curve_operators import radon_maximal

    return radon_maximal(f, m, [2.0**k for k in k_range], dt=dt)


def check_pointwise_domination(f: SampledSignal2D, m: int, k_range, dt: float | None = None):
    """Check ``M_dyadic f <= sup_k B_k f + S f`` at every grid point.

    Returns ``(holds, worst_slack)`` where ``worst_slack = min(RHS - LHS)``.
    """
    vals = f.values
    if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals))) or np.min(vals.real) < -1e-12:
        raise ValueError("f must be nonnegative")
    ks = list(k_range)
    lhs = dyadic_radon_maximal(f, m, ks, dt).values.real
    Bk = [avg_mollify(f, k, m).values.real for k in ks]
    S = square_function(f, m, ks).values.real
    rhs = np.max(Bk, axis=0) + S
    slack = float(np.min(rhs - lhs))
    return slack >= -1e-12 * max(1.0, float(np.max(lhs))), slack


# --------------------------------------------------------------------------
# Fourier decay of d sigma_k
# --------------------------------------------------------------------------


def sigma_hat(xi, eta, k: int, m: int) -> np.ndarray:
    """``d sigma_k^(xi, eta) = mu_k^ - phi_k^`` at paired samples (sign ``eps_k = +1``)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    out = np.empty(xi.shape, complex)
    for i, (a, b) in enumerate(zip(xi, eta)):
        out[i] = curve_multiplier([a], [b], k, m)[0, 0] - mollifier_multiplier([a], [b], k, m)[0, 0]
    return out


def _scaled_norm(xi, eta, k, m, anisotropic):
    if anisotropic:
        return np.hypot(np.ldexp(xi, k), np.ldexp(eta, m * k))
    return 2.0**k * np.hypot(xi, eta)


def sigma_fourier_decay(k: int, m: int, freq_samples, anisotropic: bool = True) -> float:
    """Smallest ``C`` with ``|d sigma_k^| <= C min(w, w^(-1/m))`` on the samples.

    ``w`` is the scaled frequency size: ``|(2^k xi, 2^(mk) eta)|`` by default
    (the scaling under which ``d sigma_k^`` is a dilate of ``d sigma_0^``),
    or ``2^k |(xi, eta)|`` with ``anisotropic=False``.  The origin is skipped.
    """
    fs = np.asarray(freq_samples, dtype=float).reshape(-1, 2)
    w = _scaled_norm(fs[:, 0], fs[:, 1], k, m, anisotropic)
    keep = w > 0
    vals = np.abs(sigma_hat(fs[keep, 0], fs[keep, 1], k, m))
    bound = np.minimum(w[keep], w[keep] ** (-1.0 / m))
    return float(np.max(vals / bound))


def sigma_decay_exponent(m: int, radii, k: int = 0):
    """Log-log slope of ``max(|d sigma_k^(0, +-r)|)`` against ``r``.

    Along the ``eta`` axis the curve phase ``eta t^m`` has its degenerate
    stationary point at ``t = 0``, which sets the slowest decay.
    Returns ``(slope, constant, residual)``.
    """
    radii = np.asarray(radii, dtype=float)
    vals = np.array([
        np.max(np.abs(sigma_hat([0.0, 0.0], [r, -r], k, m))) for r in radii
    ])
    return fit_loglog(radii, vals)


# --------------------------------------------------------------------------
# Signed sums
# --------------------------------------------------------------------------


def signed_operator(f: SampledSignal2D, m: int, k_range, signs: SignPattern) -> SampledSignal2D:
    """``T f = sum_k eps_k (A_k f - B_k f)``; ``meta['norm_ratio'] = |Tf|_2 / |f|_2``."""
    ks = list(k_range)
    diffs = _differences(f, m, ks)
    vals = sum(signs[k] * d for k, d in zip(ks, diffs))
    out = f.with_values(vals)
    nf = l2_norm(f)
    out.meta["norm_ratio"] = l2_norm(out) / nf if nf > 0 else 0.0
    return out


def khintchine_ratio(f: SampledSignal2D, m: int, k_range, patterns: int = 64, seed: int = 0) -> np.ndarray:
    """Pointwise ``mean_eps |sum eps_k d_k| / S f`` over random sign patterns.

    Points where ``S f`` vanishes are reported as 1.
    """
    ks = list(k_range)
    diffs = np.array(_differences(f, m, ks))
    S = np.sqrt(np.sum(np.abs(diffs) ** 2, axis=0))
    acc = np.zeros(S.shape)
    for p in range(patterns):
        s = np.asarray(SignPattern.random(ks, seed * 1_000_003 + p).signs, dtype=float)
        acc += np.abs(np.tensordot(s, diffs, axes=(0, 0)))
    mean = acc / patterns
    scale = max(float(np.max(S)), 1e-300)
    return np.where(S > 1e-12 * scale, mean / np.where(S > 0, S, 1.0), 1.0)
