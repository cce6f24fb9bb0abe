"""Carleson-type operators along monomial curves ``(t, t^m)``.

The basic object is the truncated principal-value operator

    H_N f(x, y) = p.v. int_{eps < |t| < R} f(x - t, y - t^m) exp(i N t^d) dt / t,

with ``N`` frozen per line when it depends on one variable only
(``N(x)``: the ``A`` family, ``axis="x"``; ``N(y)``: the ``B`` family,
``axis="y"``).  The principal value uses staggered nodes
``+-(eps + (j - 1/2) dt)`` paired symmetrically, so odd cancellations are
exact in floating point.  Off-grid samples come from the trigonometric
interpolant of the data (exact for band-limited periodic input), which
makes the dilation and modulation identities hold to rounding error.

Operator norms of the dyadic pieces ``S_l`` are measured one line at a
time after a Fourier transform in the free variable: each line operator
is a sum of row-masked circulants whose symbols are one-dimensional
oscillatory integrals, evaluated with a stationary-point window so that
phases of size ``2^(l d)`` stay affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .oscillatory_kernels import DecayProfile, fit_loglog
from .phase_lab import DomainError, spectral_norm
from .quadrature import panel_nodes
from .signal_core import BUMP, Grid1D, SampledSignal2D

__all__ = [
    "ConfigError",
    "CurveOpConfig",
    "StoppingTime",
    "stopping_index",
    "pv_nodes",
    "hilbert_curve",
    "apply_partial_carleson",
    "maximal_truncated_carleson",
    "radon_maximal",
    "maximal_hilbert_curve",
    "one_var_maximal",
    "t_ell_piece",
    "s_ell_piece",
    "smooth_truncated_hilbert",
    "decompose_T",
    "single_annulus_split",
    "line_multipliers",
    "line_multipliers_direct",
    "LineOperator",
    "measure_Sell_decay",
    "modulate",
    "quadratic_modulate",
]


class ConfigError(ValueError):
    """Inconsistent operator configuration."""


@dataclass(frozen=True)
class CurveOpConfig:
    """Curve exponent ``m``, phase exponent ``d``, stopping-time axis and truncation.

    ``truncation = (eps, R)`` with ``0 <= eps < R``; ``eps = 0`` gives the
    full principal value.  ``dt`` fixes the node spacing (default: chosen
    from the band limit of the input).  ``interpolation`` is
    ``"spectral"`` (default) or ``"bilinear"``.
    """

    m: int = 2
    d: int = 1
    axis: str = "x"
    truncation: tuple = (0.0, 1.0)
    dt: float | None = None
    interpolation: str = "spectral"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1 or int(self.d) != self.d or self.d < 1:
            raise ConfigError("m and d must be positive integers")
        if self.axis not in ("x", "y"):
            raise ConfigError(f"axis must be 'x' or 'y', got {self.axis!r}")
        eps, R = self.truncation
        if not (0 <= eps < R):
            raise ConfigError(f"need 0 <= eps < R, got {self.truncation}")
        if self.interpolation not in ("spectral", "bilinear"):
            raise ConfigError(f"unknown interpolation {self.interpolation!r}")
        object.__setattr__(self, "truncation", (float(eps), float(R)))


def stopping_index(N_value: float, d: int):
    """The integer ``n`` with ``2^(-n d) <= |N| < 2^(-(n-1) d)``; ``None`` for ``N = 0``."""
    a = abs(float(N_value))
    if a == 0.0:
        return None
    n = math.ceil(-math.log2(a) / d)
    while math.ldexp(1.0, -n * d) > a:
        n += 1
    while a >= math.ldexp(1.0, -(n - 1) * d):
        n -= 1
    return n


@dataclass(eq=False)
class StoppingTime:
    """Samples of ``N`` along the dependent axis with the derived index ``n``.

    ``n`` holds ``stopping_index`` where ``N != 0``; ``active`` marks those
    entries (inactive lines carry no oscillation and ``n = 0``).
    """

    values: np.ndarray
    d: int
    n: np.ndarray = field(init=False)
    active: np.ndarray = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        idx = [stopping_index(v, self.d) for v in self.values]
        self.active = np.array([i is not None for i in idx])
        self.n = np.array([0 if i is None else i for i in idx], dtype=np.int64)

    def __len__(self):
        return len(self.values)

    @classmethod
    def constant(cls, value: float, count: int, d: int) -> "StoppingTime":
        return cls(np.full(count, float(value)), d)

    @classmethod
    def piecewise(cls, levels, count: int, d: int) -> "StoppingTime":
        """Equal contiguous blocks taking the given ``levels`` in order."""
        levels = np.asarray(levels, dtype=float)
        block = np.minimum(np.arange(count) * len(levels) // count, len(levels) - 1)
        return cls(levels[block], d)

    @classmethod
    def from_function(cls, func, grid: Grid1D, d: int) -> "StoppingTime":
        return cls(func(grid.points()), d)


# --------------------------------------------------------------------------
# Shifting machinery
# --------------------------------------------------------------------------


class _Shifter:
    def __init__(self, f: SampledSignal2D, interpolation: str = "spectral"):
        self.f = f
        self.mode = interpolation
        if interpolation == "spectral":
            self.spec = np.fft.fft2(f.values)
            self.kx = f.grid_x.frequencies()[:, None]
            self.ky = f.grid_y.frequencies()[None, :]

    def __call__(self, a: float, b: float) -> np.ndarray:
        """Samples of ``f(x - a, y - b)`` on the grid of ``f``."""
        if self.mode == "spectral":
            return np.fft.ifft2(self.spec * np.exp(-1j * (self.kx * a + self.ky * b)))
        return _bilinear_shift(self.f, a, b)


def _bilinear_shift(f: SampledSignal2D, a: float, b: float) -> np.ndarray:
    nx, ny = f.values.shape
    px = -a / f.grid_x.spacing
    py = -b / f.grid_y.spacing
    ix, fx = int(math.floor(px)), px - math.floor(px)
    iy, fy = int(math.floor(py)), py - math.floor(py)
    v = f.values
    v0 = np.roll(v, -ix, axis=0)
    v1 = np.roll(v, -ix - 1, axis=0)
    r0 = (1 - fx) * v0 + fx * v1
    w0 = np.roll(r0, -iy, axis=1)
    w1 = np.roll(r0, -iy - 1, axis=1)
    return (1 - fy) * w0 + fy * w1


def _line_phase_shape(axis: str):
    return (slice(None), None) if axis == "x" else (None, slice(None))


def _check_extent(f: SampledSignal2D, R: float, m: int):
    if R > 0.5 * f.grid_x.extent or R**m > 0.5 * f.grid_y.extent:
        raise DomainError(
            f"truncation R={R} exceeds half the grid extent "
            f"({0.5 * f.grid_x.extent}, {0.5 * f.grid_y.extent}) along the curve"
        )


def _auto_dt(f: SampledSignal2D, R: float, m: int, d: int, nmax: float, span: float) -> float:
    rate = f.grid_x.nyquist + f.grid_y.nyquist * m * R ** (m - 1) + nmax * d * R ** (d - 1)
    return min(span / 64.0, math.pi / (4.0 * rate))


def pv_nodes(eps: float, R: float, dt: float):
    """Positive staggered nodes on ``(eps, R)`` and their ``dt / t`` weights."""
    J = max(1, int(math.ceil((R - eps) / dt - 1e-9)))
    h = (R - eps) / J
    t = eps + (np.arange(J) + 0.5) * h
    return t, h / t


def _line_values(f: SampledSignal2D, axis: str, N) -> np.ndarray:
    count = f.grid_x.count if axis == "x" else f.grid_y.count
    if isinstance(N, StoppingTime):
        vals = N.values
    else:
        vals = np.full(count, float(N))
    if len(vals) != count:
        raise ConfigError(f"stopping time has {len(vals)} samples, {axis}-grid has {count}")
    return vals[_line_phase_shape(axis)]


def _pv_sum(shift, t, w, m, d, Nline, move_x=True, move_y=True):
    """``sum_j w_j [F(t_j) - F(-t_j)]`` with ``F(t) = f(x - t, y - t^m) e^{i N t^d}``.

    Negative nodes reuse ``|t|^m`` and ``|t|^d`` with explicit signs so the
    pair is bitwise symmetric whenever the integrand is even.
    """
    sm = 1.0 if m % 2 == 0 else -1.0
    sd = 1.0 if d % 2 == 0 else -1.0
    acc = 0.0
    for tj, wj in zip(t, w):
        tm = tj**m
        td = tj**d
        ax = tj if move_x else 0.0
        by = tm if move_y else 0.0
        plus = shift(ax, by) * np.exp(1j * Nline * td)
        minus = shift(-ax if move_x else 0.0, sm * by) * np.exp(1j * Nline * (sd * td))
        acc = acc + wj * (plus - minus)
    return acc


def _truncated(f: SampledSignal2D, cfg: CurveOpConfig, N, eps=None, R=None):
    eps = cfg.truncation[0] if eps is None else eps
    R = cfg.truncation[1] if R is None else R
    _check_extent(f, R, cfg.m)
    Nline = _line_values(f, cfg.axis, N)
    dt = cfg.dt or _auto_dt(f, R, cfg.m, cfg.d, float(np.max(np.abs(Nline))), R - eps)
    t, w = pv_nodes(eps, R, dt)
    vals = _pv_sum(_Shifter(f, cfg.interpolation), t, w, cfg.m, cfg.d, Nline)
    return f.with_values(vals, truncation=(eps, R), node_spacing=(R - eps) / len(t))


def hilbert_curve(f: SampledSignal2D, cfg: CurveOpConfig, N_value: float) -> SampledSignal2D:
    """``H_N f`` with a constant ``N``."""
    return _truncated(f, cfg, float(N_value))


def apply_partial_carleson(f: SampledSignal2D, cfg: CurveOpConfig, N: StoppingTime) -> SampledSignal2D:
    """``H_{N(z)} f`` with ``N`` frozen along lines of ``cfg.axis``."""
    if not isinstance(N, StoppingTime):
        raise ConfigError("N must be a StoppingTime")
    if N.d != cfg.d:
        raise ConfigError(f"stopping time built for d={N.d}, operator has d={cfg.d}")
    return _truncated(f, cfg, N)


# --------------------------------------------------------------------------
# Maximal operators
# --------------------------------------------------------------------------


def _axis_shift_factory(values: np.ndarray, grid: Grid1D, ax: int):
    spec = np.fft.fft(values, axis=ax)
    k = grid.frequencies()
    shape = [1, 1]
    shape[ax] = -1
    k = k.reshape(shape)

    def shift(u):
        return np.fft.ifft(spec * np.exp(-1j * k * u), axis=ax)

    return shift


def maximal_truncated_carleson(f, N_grid, eps_grid, axis: str = "y", du: float | None = None):
    """``max`` over sampled ``(N, eps)`` of ``|p.v. int_{|u| <= eps} F(. - u) e^{iNu} du/u|``.

    Acts along ``axis`` of a 2D signal (or on a 1D signal).  The result is
    a lower bound for the supremum over all ``N`` and ``eps``.  Node spacing
    ``du`` defaults to the smallest ``eps`` divided by 16; every ``eps`` is
    rounded to a whole number of nodes.
    """
    from .signal_core import SampledSignal1D

    one_d = isinstance(f, SampledSignal1D)
    if one_d:
        vals = f.values[None, :]
        grid, ax = f.grid, 1
    else:
        vals = f.values
        ax = 0 if axis == "x" else 1
        grid = f.grid_x if ax == 0 else f.grid_y
    N_grid = np.atleast_1d(np.asarray(N_grid, dtype=float))
    eps_grid = np.sort(np.atleast_1d(np.asarray(eps_grid, dtype=float)))
    if len(N_grid) == 0 or len(eps_grid) == 0:
        raise ValueError("N_grid and eps_grid must be nonempty")
    du = du or eps_grid[0] / 16.0
    stops = np.maximum(1, np.rint(eps_grid / du).astype(int))
    shift = _axis_shift_factory(vals, grid, ax)
    acc = np.zeros((len(N_grid),) + vals.shape, complex)
    best = np.zeros(vals.shape)
    Nb = N_grid.reshape((-1, 1, 1))
    for j in range(1, stops[-1] + 1):
        u = (j - 0.5) * du
        wj = du / u
        plus, minus = shift(u), shift(-u)
        acc += wj * (np.exp(1j * Nb * u) * plus[None] - np.exp(-1j * Nb * u) * minus[None])
        if j in stops:
            best = np.maximum(best, np.abs(acc).max(axis=0))
    out = best[0] if one_d else best
    return f.with_values(out, lower_bound=True, N_grid_size=len(N_grid), du=du)


def _curve_node_spacing(r_min: float, dt):
    return dt or r_min / 16.0


def radon_maximal(f: SampledSignal2D, m: int, r_grid, dt: float | None = None,
                  interpolation: str = "spectral") -> SampledSignal2D:
    """``max_r (2r)^-1 int_{-r}^{r} |f(x - t, y - t^m)| dt`` over ``r_grid``."""
    r_grid = np.sort(np.asarray(r_grid, dtype=float))
    _check_extent(f, r_grid[-1], m)
    dt = _curve_node_spacing(r_grid[0], dt)
    stops = np.maximum(1, np.rint(r_grid / dt).astype(int))
    shift = _Shifter(f, interpolation)
    sm = 1.0 if m % 2 == 0 else -1.0
    acc = np.zeros(f.values.shape)
    best = np.zeros(f.values.shape)
    for j in range(1, stops[-1] + 1):
        t = (j - 0.5) * dt
        tm = t**m
        acc += np.abs(shift(t, tm)) + np.abs(shift(-t, sm * tm))
        if j in stops:
            best = np.maximum(best, acc / (2.0 * j))
    return f.with_values(best)


def maximal_hilbert_curve(f: SampledSignal2D, m: int, trunc_grid, dt: float | None = None,
                          interpolation: str = "spectral") -> SampledSignal2D:
    """``max`` over ``(eps, R)`` in ``trunc_grid`` of ``|int_{eps<|t|<R} f(x-t, y-t^m) dt/t|``.

    All truncation radii must be whole multiples of ``dt`` (default: the
    smallest nonzero radius divided by 16).
    """
    pairs = [(float(a), float(b)) for a, b in trunc_grid]
    radii = sorted({v for p in pairs for v in p if v > 0})
    _check_extent(f, radii[-1], m)
    dt = dt or radii[0] / 16.0
    idx = {}
    for v in {v for p in pairs for v in p}:
        k = v / dt
        if abs(k - round(k)) > 1e-9 * max(1.0, k):
            raise ValueError(f"truncation radius {v} is not a multiple of dt={dt}")
        idx[v] = int(round(k))
    shift = _Shifter(f, interpolation)
    sm = 1.0 if m % 2 == 0 else -1.0
    partial = {0: np.zeros(f.values.shape, complex)}
    acc = np.zeros(f.values.shape, complex)
    for j in range(1, max(idx.values()) + 1):
        t = (j - 0.5) * dt
        tm = t**m
        acc = acc + (dt / t) * (shift(t, tm) - shift(-t, sm * tm))
        if j in idx.values():
            partial[j] = acc.copy()
    best = np.zeros(f.values.shape)
    for a, b in pairs:
        best = np.maximum(best, np.abs(partial[idx[b]] - partial[idx[a]]))
    return f.with_values(best)


def one_var_maximal(f: SampledSignal2D, which: int, radii=None) -> SampledSignal2D:
    """Discrete centered Hardy-Littlewood maximal function in one variable.

    ``which = 1`` averages along ``x``, ``which = 2`` along ``y``.  Averages
    run over ``2j + 1`` grid points for ``j`` in ``radii`` (default
    ``0, 1, 2, 4, ...`` up to a quarter of the grid); ``j = 0`` returns
    ``|f|`` itself.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    ax = which - 1
    a = np.abs(f.values)
    n = a.shape[ax]
    if radii is None:
        radii = [0] + [2**i for i in range(int(math.log2(max(n // 4, 1))) + 1)]
    best = np.zeros_like(a)
    for j in radii:
        acc = np.zeros_like(a)
        for s in range(-j, j + 1):
            acc += np.roll(a, s, axis=ax)
        best = np.maximum(best, acc / (2 * j + 1))
    return f.with_values(best)


# --------------------------------------------------------------------------
# Smooth dyadic pieces and the T = T1 + T2 decomposition
# --------------------------------------------------------------------------


def _smooth_sum(f: SampledSignal2D, m: int, d: int, Nline, weight_fn, t_lo: float, t_hi: float,
                interpolation: str, dt: float | None = None):
    """``int f(x - t, y - t^m) e^{iN t^d} weight(t) dt / t`` for an even weight on ``t_lo<=|t|<=t_hi``."""
    nmax = float(np.max(np.abs(Nline))) if np.size(Nline) else 0.0
    dt = dt or min((t_hi - t_lo) / 256.0, 0.5 * _auto_dt(f, t_hi, m, d, nmax, t_hi - t_lo))
    t, w = pv_nodes(t_lo, t_hi, dt)
    w = w * weight_fn(t)
    keep = w != 0
    return _pv_sum(_Shifter(f, interpolation), t[keep], w[keep], m, d, Nline)


def _t_k(f, m, d, Nline, k, interpolation="spectral", dt=None):
    lo, hi = 2.0 ** (k - 1), 2.0 ** (k + 1)
    return _smooth_sum(f, m, d, Nline, lambda t: BUMP.dilate(t, k), lo, hi, interpolation, dt)


def t_ell_piece(f: SampledSignal2D, cfg: CurveOpConfig, N, ell: int, relative: bool = False,
                dt: float | None = None) -> SampledSignal2D:
    """``T_l f``: the operator with the smooth dyadic cutoff ``psi_l(t)``.

    With ``relative=True`` returns ``S_l f = T_{n(z) + l} f`` line by line
    (zero on lines where ``N = 0``, which carry no oscillating part).
    """
    _check_extent(f, 2.0 ** (ell + 1) if not relative else 0.0, cfg.m)
    Nline = _line_values(f, cfg.axis, N)
    if not relative:
        return f.with_values(_t_k(f, cfg.m, cfg.d, Nline, ell, cfg.interpolation, dt))
    if not isinstance(N, StoppingTime):
        N = StoppingTime(np.ravel(Nline) * np.ones(f.grid_x.count if cfg.axis == "x" else f.grid_y.count), cfg.d)
    out = np.zeros(f.values.shape, complex)
    sel = _line_phase_shape(cfg.axis)
    for k in sorted(set((N.n[N.active] + ell).tolist())):
        _check_extent(f, 2.0 ** (k + 1), cfg.m)
        rows = (N.active & (N.n + ell == k))[sel]
        out = np.where(rows, _t_k(f, cfg.m, cfg.d, Nline, k, cfg.interpolation, dt), out)
    return f.with_values(out)


def s_ell_piece(f, cfg, N, ell, dt=None):
    return t_ell_piece(f, cfg, N, ell, relative=True, dt=dt)


def smooth_truncated_hilbert(f: SampledSignal2D, cfg: CurveOpConfig, N, k_lo: int, k_hi: int,
                             dt: float | None = None) -> SampledSignal2D:
    """Curve Hilbert transform with the smooth cutoff ``sum_{k_lo <= k <= k_hi} psi_k``."""
    Nline = _line_values(f, cfg.axis, N)
    _check_extent(f, 2.0 ** (k_hi + 1), cfg.m)

    def weight(t):
        return BUMP.cutoff(np.ldexp(t, -k_hi)) - BUMP.cutoff(np.ldexp(t, 1 - k_lo))

    vals = _smooth_sum(f, cfg.m, cfg.d, Nline, weight, 2.0 ** (k_lo - 1), 2.0 ** (k_hi + 1),
                       cfg.interpolation, dt)
    return f.with_values(vals)


def decompose_T(f: SampledSignal2D, cfg: CurveOpConfig, N: StoppingTime, k_lo: int, k_hi: int,
                dt: float | None = None):
    """Split ``sum_{k_lo<=k<=k_hi} T_k f`` into ``T1`` (``k <= n(z)``) and ``T2`` (``k > n(z)``).

    Lines with ``N = 0`` belong entirely to ``T1``.
    """
    Nline = _line_values(f, cfg.axis, N)
    _check_extent(f, 2.0 ** (k_hi + 1), cfg.m)
    sel = _line_phase_shape(cfg.axis)
    big = np.iinfo(np.int64).max
    nz = np.where(N.active, N.n, big)[sel]
    T1 = np.zeros(f.values.shape, complex)
    T2 = np.zeros(f.values.shape, complex)
    for k in range(k_lo, k_hi + 1):
        piece = _t_k(f, cfg.m, cfg.d, Nline, k, cfg.interpolation, dt)
        low = k <= nz
        T1 = T1 + np.where(low, piece, 0.0)
        T2 = T2 + np.where(low, 0.0, piece)
    return f.with_values(T1), f.with_values(T2)


# --------------------------------------------------------------------------
# Single annulus split
# --------------------------------------------------------------------------


def single_annulus_split(f_k: SampledSignal2D, k0: int, cfg: CurveOpConfig, N: StoppingTime,
                         dt: float | None = None):
    """Pointwise pieces of the small-``t`` part of a frequency-localized operator.

    For ``axis="y"`` (requires ``d = m``; ``f_k`` localized at ``|xi| ~ 2^k0``
    in ``x``) the cutoff is ``delta = 2^-k0`` and

        term_I  = int_{|t|<=delta} |f(x-t, y-t^m) - f(x, y-t^m)| dt/|t|,
        term_II = |p.v. int_{|t|<=delta} f(x, y-t^m) e^{iN(y) t^m} dt/t|.

    For ``axis="x"`` (requires ``d = 1``; ``f_k`` localized in ``y``) the roles
    of the variables swap and ``delta = 2^(-k0/m)``, so that ``delta^m``
    matches the ``y``-scale ``2^-k0``:

        term_I  = int_{|t|<=delta} |f(x-t, y-t^m) - f(x-t, y)| dt/|t|,
        term_II = |p.v. int_{|t|<=delta} f(x-t, y) e^{iN(x) t} dt/t|.

    ``T2_part`` is the operator truncated to ``delta < |t| < R``.
    Returns ``(term_I, term_II, T2_part)`` and records ``delta`` and the
    node spacing in the metadata of ``term_II``.
    """
    m, d = cfg.m, cfg.d
    if cfg.axis == "y" and d != m:
        raise ConfigError("axis 'y' split requires d = m")
    if cfg.axis == "x" and d != 1:
        raise ConfigError("axis 'x' split requires d = 1")
    delta = 2.0 ** (-k0) if cfg.axis == "y" else 2.0 ** (-k0 / m)
    R = cfg.truncation[1]
    if delta >= R:
        raise ConfigError("single-annulus cutoff must lie below the truncation R")
    _check_extent(f_k, R, m)
    Nline = _line_values(f_k, cfg.axis, N)
    dt = dt or min(delta / 32.0, _auto_dt(f_k, delta, m, d, float(np.max(np.abs(Nline))), delta))
    t, w = pv_nodes(0.0, delta, dt)
    shift = _Shifter(f_k, cfg.interpolation)
    sm = 1.0 if m % 2 == 0 else -1.0
    term1 = np.zeros(f_k.values.shape)
    for tj, wj in zip(t, w):
        tm = tj**m
        for s_t, s_m in ((tj, tm), (-tj, sm * tm)):
            full = shift(s_t, s_m)
            ref = shift(0.0, s_m) if cfg.axis == "y" else shift(s_t, 0.0)
            term1 += wj * np.abs(full - ref)
    if cfg.axis == "y":
        inner = _pv_sum(shift, t, w, m, d, Nline, move_x=False, move_y=True)
    else:
        inner = _pv_sum(shift, t, w, m, d, Nline, move_x=True, move_y=False)
    T2 = _truncated(f_k, cfg, N, eps=delta, R=R)
    meta = {"delta": delta, "node_spacing": delta / len(t), "nodes": len(t)}
    return f_k.with_values(term1), f_k.with_values(np.abs(inner), **meta), T2


# --------------------------------------------------------------------------
# Line operators for S_l norms
# --------------------------------------------------------------------------


def _g(axis_line: str, m: int):
    """``(g_line, g_line', g_line'', g_free, g_free', g_free'')`` as callables of ``t > 0``."""
    lin = (lambda t: t, lambda t: np.ones_like(t), lambda t: np.zeros_like(t))
    mon = (lambda t: t**m, lambda t: m * t ** (m - 1), lambda t: m * (m - 1) * t ** (m - 2))
    # B family: lines along y (free variable x couples to t);
    # A family: lines along x (free variable y couples to t^m).
    return (mon + lin) if axis_line == "y" else (lin + mon)


_WINDOW_C = 16.0
_WINDOW_C0 = 200.0
_TAPER = 96.0


def _windows(dP, lo, hi, bound, scan):
    """Intervals of ``[lo, hi]`` where ``|P'| <= bound`` found on a uniform scan."""
    tau = np.linspace(lo, hi, scan)
    inside = np.abs(dP(tau)) <= bound
    if not inside.any():
        return []
    edges = np.flatnonzero(np.diff(inside.astype(np.int8)))
    starts = [0] if inside[0] else []
    ends = []
    for e in edges:
        if inside[e + 1]:
            starts.append(e + 1)
        else:
            ends.append(e)
    if inside[-1]:
        ends.append(scan - 1)
    return [(tau[max(a - 1, 0)], tau[min(b + 1, scan - 1)]) for a, b in zip(starts, ends)]


def _half_multiplier(a, free, omegas, k, m, d, axis_line, sign_line=1.0, direct=False,
                     chunk=4096):
    """``int_0^inf exp(i(a t^d - free g_f(t) - sign omega g_l(t))) psi_k(t) dt/t`` for all omegas."""
    gl, gl1, gl2, gf, gf1, gf2 = _g(axis_line, m)
    lo, hi = 2.0 ** (k - 1), 2.0 ** (k + 1)
    omegas = np.asarray(omegas, dtype=float)
    Om = float(np.max(np.abs(omegas))) if omegas.size else 0.0

    def P(t):
        return a * t**d - free * gf(t)

    def dP(t):
        return a * d * t ** (d - 1) - free * gf1(t)

    probe = np.linspace(lo, hi, 2049)
    G1 = float(np.max(np.abs(gl1(probe))))
    P2 = float(np.max(np.abs(a * d * (d - 1) * probe ** (d - 2) - free * gf2(probe)))) + Om * float(
        np.max(np.abs(gl2(probe))))
    B0 = Om * G1
    Fcut = _WINDOW_C * math.sqrt(P2) + _WINDOW_C0
    segments = []
    if direct:
        segments = [(lo, hi, None)]
    else:
        minwidth = 2.0 * Fcut / max(P2, 1e-300)
        scan = int(min(max(4097, 16 * (hi - lo) / minwidth), 2_000_001))
        cores = _windows(dP, lo, hi, B0 + Fcut, scan)
        w = _TAPER / Fcut
        padded = []
        for c0, c1 in cores:
            a0, a1 = max(lo, c0 - w), min(hi, c1 + w)
            if padded and a0 <= padded[-1][1]:
                padded[-1] = (padded[-1][0], max(padded[-1][1], a1), padded[-1][2] + [(c0, c1)])
            else:
                padded.append((a0, a1, [(c0, c1)]))
        for a0, a1, cs in padded:
            full = a0 <= lo and a1 >= hi and all(c0 <= lo + w and c1 >= hi - w for c0, c1 in cs) and len(cs) == 1
            segments.append((a0, a1, None if full else (cs, w)))
    total = np.zeros(omegas.shape, complex)
    for a0, a1, taper in segments:
        grid = np.linspace(a0, a1, 1025)
        dmax = float(np.max(np.abs(dP(grid)))) + B0
        waves = (a1 - a0) * dmax / (2.0 * math.pi)
        panels = max(int(math.ceil(4 * waves)), int(math.ceil(64 * (a1 - a0) / lo)), 8)
        if taper is not None:
            panels = max(panels, int(math.ceil(12 * (a1 - a0) / (taper[1] / 12.0))))
        t, wts = panel_nodes(a0, a1, panels, 8)
        amp = wts * BUMP.dilate(t, k) / t
        if taper is not None:
            cs, w = taper
            chi = np.zeros_like(t)
            sig = w / 12.0
            for c0, c1 in cs:
                dist = np.maximum(np.maximum(c0 - t, t - c1), 0.0)
                chi = np.maximum(chi, np.where(dist == 0, 1.0, 0.5 * erfc((dist - 0.5 * w) / (sig * math.sqrt(2.0)))))
            amp = amp * chi
        v = amp * np.exp(1j * P(t))
        total += _phase_sum(omegas, sign_line * gl(t), v, chunk)
    return total


def _phase_sum(omegas, g, v, chunk):
    """``sum_n v_n exp(-i omega g_n)`` for every omega.

    On a uniform integer grid ``omega = j step`` the exponentials are
    cumulative powers of ``exp(-i step g_n)``, which avoids one complex
    exponential per (omega, node) pair.
    """
    out = np.zeros(omegas.shape, complex)
    nz = omegas[omegas != 0]
    step = float(np.min(np.abs(nz))) if nz.size else 0.0
    ints = np.rint(omegas / step).astype(np.int64) if step else np.zeros(omegas.shape, np.int64)
    if not step or np.max(np.abs(omegas - ints * step)) > 1e-9 * step * max(1, np.max(np.abs(ints))):
        for i in range(0, len(g), chunk):
            out += np.exp(-1j * np.outer(omegas, g[i:i + chunk])) @ v[i:i + chunk]
        return out
    J = int(np.max(np.abs(ints)))
    pos = np.zeros(J + 1, complex)
    neg = np.zeros(J + 1, complex)
    for i in range(0, len(g), chunk):
        base = np.exp(-1j * step * g[i:i + chunk])
        E = np.empty((J + 1, len(base)), complex)
        E[0] = 1.0
        if J:
            E[1:] = np.cumprod(np.broadcast_to(base, (J, len(base))), axis=0)
        pos += E @ v[i:i + chunk]
        neg += E.conj() @ v[i:i + chunk]
    return np.where(ints >= 0, pos[np.abs(ints)], neg[np.abs(ints)])


def line_multipliers(N_value: float, free: float, omegas, k: int, m: int, d: int, axis_line: str,
                     direct: bool = False):
    """Symbol of the line operator at frequencies ``omegas``.

    ``int exp(i(N t^d - free g_free(t) - omega g_line(t))) psi_k(t) dt / t`` over
    both signs of ``t``, where ``g_line(t) = t^m`` and ``g_free(t) = t`` for lines
    along ``y`` (the ``B`` family) and the other way round for lines along ``x``.
    Only a window around the stationary set of the phase is integrated
    (with a smooth taper), unless ``direct`` is set.
    """
    sm = (-1.0) ** m
    sd = (-1.0) ** d
    if axis_line == "y":
        fs, ls = -1.0, sm
    else:
        fs, ls = sm, -1.0
    pos = _half_multiplier(N_value, free, omegas, k, m, d, axis_line, 1.0, direct)
    neg = _half_multiplier(sd * N_value, fs * free, omegas, k, m, d, axis_line, ls, direct)
    return pos - neg


def line_multipliers_direct(N_value, free, omegas, k, m, d, axis_line):
    return line_multipliers(N_value, free, omegas, k, m, d, axis_line, direct=True)


@dataclass
class LineOperator:
    """Row-masked sum of circulants ``sum_c diag(mask_c) C_c`` on a periodic line."""

    masks: list
    symbols: list

    @property
    def size(self) -> int:
        return len(self.masks[0])

    def apply(self, v):
        F = np.fft.fft(v)
        return sum(mk * np.fft.ifft(sy * F) for mk, sy in zip(self.masks, self.symbols))

    def adjoint(self, v):
        return sum(np.fft.ifft(np.conj(sy) * np.fft.fft(mk * v)) for mk, sy in zip(self.masks, self.symbols))

    def dense(self, omegas, z) -> np.ndarray:
        """Explicit matrix from the DFT sum ``n^-1 sum_w e^{i w (z_i - z_k)} m_{c(i)}(w)``."""
        n = self.size
        E = np.exp(1j * np.outer(z, omegas))
        A = np.zeros((n, n), complex)
        for mk, sy in zip(self.masks, self.symbols):
            rows = np.flatnonzero(mk)
            A[rows] = (E[rows] * sy[None, :]) @ E.conj().T / n
        return A

    def matrix(self) -> np.ndarray:
        """Dense matrix assembled with FFTs (columns are images of unit vectors)."""
        E = np.fft.fft(np.eye(self.size), axis=0)
        return sum(mk[:, None] * np.fft.ifft(sy[:, None] * E, axis=0) for mk, sy in zip(self.masks, self.symbols))

    def norm(self) -> float:
        """Largest singular value by power iteration on the squared Gram matrix."""
        return spectral_norm(self.matrix())


def _line_setup(axis: str, m: int, n_points: int, k: int):
    """Periodic line grid long enough for the shifts ``g_line(t)``, ``|t| <= 2^(k+1)``."""
    shift = 2.0 ** ((k + 1) * m) if axis == "y" else 2.0 ** (k + 1)
    L = 4.0 * shift
    grid = Grid1D(-L / 2.0, L / n_points, n_points)
    return grid, shift


def _free_frequencies(N0: float, m: int, d: int, axis: str, k: int, taus=(0.6, 0.85, 1.2, 1.7)):
    """Free-variable frequencies placing a stationary point at ``t = tau 2^k``."""
    out = [0.0]
    for tau in taus:
        t = tau * 2.0**k
        pd = N0 * d * t ** (d - 1)
        g1 = 1.0 if axis == "y" else m * t ** (m - 1)
        out += [pd / g1, -pd / g1]
    return out


def measure_Sell_decay(cfg: CurveOpConfig, N_pattern: StoppingTime, ell_range, grid_size: int = 256,
                       free_freqs=None, oracle_size: int | None = None) -> DecayProfile:
    """Operator norms of ``S_l`` on lines of ``grid_size`` points, with a log-log fit.

    The stopping time is taken in dilation-normalized form: ``N_pattern``
    holds values with ``n(z) = 0`` and at level ``l`` the operator uses
    ``N = 2^(l d) N_pattern`` so that ``n(z) + l = 0`` throughout.
    Anisotropic dilations conjugate ``S_l`` for any stopping time with
    constant ``n`` to this form without changing its norm, so a single
    line grid serves every ``l``.  After a Fourier transform in the free
    variable with frequency ``phi`` the line operator is a row-masked sum
    of circulants; its norm is computed by power iteration, maximized
    over ``free_freqs`` (default: values placing stationary points across
    the support), and fitted against ``2^l``.

    With ``oracle_size`` the same computation is repeated on a coarse line
    and compared with the dense singular value decomposition; the largest
    relative discrepancy is stored in ``details['oracle_rel_err']``.
    """
    m, d, axis = cfg.m, cfg.d, cfg.axis
    ells = [int(v) for v in ell_range]
    N_pattern = N_pattern if isinstance(N_pattern, StoppingTime) else StoppingTime(N_pattern, d)
    if len(N_pattern) != grid_size:
        raise ConfigError("stopping-time pattern must have grid_size samples")
    if N_pattern.active.any() and np.any(N_pattern.n[N_pattern.active] != 0):
        raise ConfigError("pattern must have n(z) = 0 on active lines (1 <= |N| < 2^d)")
    flags = []
    if m == d or m == 1 or d == 1:
        flags.append("exploratory (m, d) outside the asymmetric regime")
    norms, oracle_err, per_ell = [], 0.0, {}
    levels = sorted(set(N_pattern.values[N_pattern.active].tolist()))
    grid, shift = _line_setup(axis, m, grid_size, 0)
    if shift > 0.5 * grid.extent:
        flags.append("line shorter than twice the curve shift")
    omegas = grid.frequencies()
    z = grid.points()
    for ell in ells:
        if not levels:
            norms.append(0.0)
            continue
        scale = 2.0 ** (ell * d)
        phis = free_freqs if free_freqs is not None else _free_frequencies(levels[0] * scale, m, d, axis, 0)
        best = 0.0
        best_phi = 0.0
        for phi in phis:
            symbols = [line_multipliers(lv * scale, phi, omegas, 0, m, d, axis) for lv in levels]
            masks = [(N_pattern.values == lv).astype(float) for lv in levels]
            op = LineOperator(masks, symbols)
            nrm = op.norm()
            if nrm > best:
                best, best_phi = nrm, phi
            if oracle_size:
                og, _ = _line_setup(axis, m, oracle_size, 0)
                oom = og.frequencies()
                pat = StoppingTime(N_pattern.values[:: grid_size // oracle_size][:oracle_size], d)
                osym = [line_multipliers(lv * scale, phi, oom, 0, m, d, axis) for lv in levels]
                omask = [(pat.values == lv).astype(float) for lv in levels]
                oop = LineOperator(omask, osym)
                est = oop.norm()
                svd = float(np.linalg.svd(oop.dense(oom, og.points()), compute_uv=False)[0])
                if svd > 0:
                    oracle_err = max(oracle_err, abs(est - svd) / svd)
        per_ell[ell] = {"norm": best, "free_frequency": best_phi}
        norms.append(best)
    norms = np.asarray(norms)
    if np.all(norms > 0) and len(ells) >= 2:
        slope, const, resid = fit_loglog(2.0 ** np.asarray(ells, dtype=float), norms)
    else:
        slope = const = resid = float("nan")
        flags.append("degenerate profile (zero norms)")
    details = {"per_ell": per_ell, "flags": flags, "grid": grid, "oracle_rel_err": oracle_err}
    return DecayProfile("ell", np.asarray(ells, dtype=float), norms, slope, const, resid,
                        any("exploratory" not in fl for fl in flags), details)


# --------------------------------------------------------------------------
# Symmetry helpers
# --------------------------------------------------------------------------


def modulate(f: SampledSignal2D, xi: float, zeta: float) -> SampledSignal2D:
    """``M_{xi,zeta} f = e^{i(x xi + y zeta)} f``."""
    x, y = f.mesh()
    return f.with_values(np.exp(1j * (xi * x + zeta * y)) * f.values)


def quadratic_modulate(f: SampledSignal2D, b: float) -> SampledSignal2D:
    """``Q_b f = e^{i b x^2} f``."""
    x, _ = f.mesh()
    return f.with_values(np.exp(1j * b * x * x) * f.values)
