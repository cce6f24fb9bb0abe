"""Numerical checks shared by the command-line driver and the acceptance suite.

Every ``check_*`` function runs one family of measurements and returns a
:class:`CheckResult`: a pass flag against the stated threshold, the
worst measured value, and report rows for CSV emission.  Randomness comes
from :class:`curvelab.rng.SplitMix64` streams derived from one seed, so
results are reproducible bit for bit.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import curve_operators as co
from . import oscillatory_kernels as ok
from . import phase_lab as pl
from . import radon_square as rs
from .report import ExperimentReport
from .rng import SplitMix64
from .signal_core import (
    BUMP,
    Grid1D,
    SampledSignal1D,
    SampledSignal2D,
    fourier_transform,
    l2_norm,
    lp_project,
    random_band_limited_1d,
    random_band_limited_2d,
)

__all__ = [
    "CheckResult",
    "cofactor_det",
    "lab_threads",
    "parallel_map",
    "check_det_identity",
    "check_matrix_lower_bound",
    "check_gradient_identity",
    "check_partition_plancherel",
    "check_vdc",
    "check_sublevel",
    "check_kernel_support",
    "check_product_decay",
    "check_ttstar_decay",
    "check_sell_decay",
    "check_symmetries",
    "check_even_vanishing",
    "check_odd_domination",
    "check_term_one_constant",
    "check_appendix",
    "check_signed_sums",
]


@dataclass
class CheckResult:
    """Outcome of one check: worst measured ``value`` against ``threshold``."""

    name: str
    passed: bool
    value: float
    threshold: float
    detail: dict = field(default_factory=dict)
    report: ExperimentReport = field(default_factory=ExperimentReport)
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: value={self.value:.6g} threshold={self.threshold:.6g} ({self.elapsed:.1f} s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def lab_threads() -> int:
    """Worker cap from ``LAB_THREADS`` (default 1); raises ``ValueError`` if malformed."""
    raw = os.environ.get("LAB_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("LAB_THREADS must be a positive integer")
    return n


def parallel_map(fn, items):
    """Ordered map over ``items`` using at most ``LAB_THREADS`` worker threads.

    Results come back in input order, so reports do not depend on the
    thread count.
    """
    items = list(items)
    workers = lab_threads()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------------------
# Phase-function lemmas
# --------------------------------------------------------------------------


def cofactor_det(M: np.ndarray) -> np.ndarray:
    """Determinants of a stack ``(..., n, n)`` by Laplace expansion along the first row."""
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(M, 0, axis=-2), j, axis=-1)
        total = total + (-1) ** j * M[..., 0, j] * cofactor_det(minor)
    return total


def _permanent(M: np.ndarray) -> np.ndarray:
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0]
    return sum(M[..., 0, j] * _permanent(np.delete(np.delete(M, 0, axis=-2), j, axis=-1)) for j in range(n))


def _lemma_matrix(a, b, x, y):
    p = np.arange(4)[None, :, None]
    a = a[:, :, None]
    b = b[:, :, None]
    xp = x[:, None, None] ** p
    yp = y[:, None, None] ** p
    return np.concatenate([a * xp, a * yp, b * xp, b * yp], axis=2)


@_timed
def check_det_identity(seed: int = 0, n: int = 10_000, tol: float = 1e-9) -> CheckResult:
    """Closed-form 4x4 determinant against Laplace expansion on random inputs in ``[-2, 2]``."""
    rng = SplitMix64(seed).spawn(1)
    a = rng.uniform(-2, 2, size=(n, 4))
    b = rng.uniform(-2, 2, size=(n, 4))
    x = rng.uniform(-2, 2, size=n)
    y = rng.uniform(-2, 2, size=n)
    closed, _, _ = pl.det_identity(a.T, b.T, x, y)
    M = _lemma_matrix(a, b, x, y)
    oracle = cofactor_det(M)
    # the permanent of |M| bounds every partial sum of the expansion
    rel = np.abs(closed - oracle) / np.maximum(_permanent(np.abs(M)), 1e-300)
    worst = float(np.max(rel))
    rep = ExperimentReport()
    rep.add("det_identity", {"samples": n}, worst, passed=worst <= tol)
    naive = np.abs(closed - oracle) / np.maximum(np.abs(oracle), 1e-300)
    return CheckResult("determinant identity", worst <= tol, worst, tol,
                       {"median_rel_err": float(np.median(rel)), "max_rel_err_vs_det": float(np.max(naive))}, rep)


@_timed
def check_matrix_lower_bound(seed: int = 0, n: int = 1000, tol: float = 1e-12) -> CheckResult:
    """``|Ax| >= |det A| |A|^(1-n) |x|`` on random 4x4 matrices; value = worst ``slack / scale``."""
    rng = SplitMix64(seed).spawn(2)
    worst = math.inf
    ok_all = True
    for _ in range(n):
        A = rng.normal(size=(4, 4))
        x = rng.normal(size=4)
        holds, slack = pl.matrix_lower_bound_holds(A, x)
        scale = max(float(np.linalg.norm(A @ x)), float(np.linalg.norm(x)))
        worst = min(worst, slack / scale)
        ok_all &= holds and slack >= -tol * scale
    rep = ExperimentReport()
    rep.add("matrix_lower_bound", {"samples": n}, worst, passed=ok_all)
    return CheckResult("matrix lower bound", ok_all, worst, -tol, {}, rep)


def _random_context(rng):
    while True:
        al, be = rng.uniform(0.2, 3.0, size=2)
        if abs(al - be) > 0.05:
            break
    h = rng.uniform(0.2, 1.0)
    t = rng.uniform(0.5, 2.0)
    s = rng.uniform(h * t - 2.0, h * t - 0.1)
    ctx = pl.PhaseContext(alpha=al, beta=be, nu=tuple(rng.uniform(-2, 2, size=2)),
                          mu=tuple(rng.uniform(-2, 2, size=2)), h=h, s=s)
    return ctx, t


@_timed
def check_gradient_identity(seed: int = 0, n: int = 1000, tol: float = 1e-9) -> CheckResult:
    """``M_{t,s}`` times the coefficient vector against closed-form derivatives of ``Q``.

    The relative error of each component is measured against the sum of
    the absolute values of its four terms, the natural rounding scale.
    """
    rng = SplitMix64(seed).spawn(3)
    worst = 0.0
    for _ in range(n):
        ctx, t = _random_context(rng)
        M = pl.matrix_M(t, ctx)
        c = pl.coefficient_vector(t, ctx)
        lhs = M @ c
        scale = np.abs(M) @ np.abs(c)
        rhs = np.array([pl.phase_Q(t, ctx, j) for j in range(1, 5)])
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    rep = ExperimentReport()
    rep.add("gradient_identity", {"samples": n}, worst, passed=worst <= tol)
    return CheckResult("gradient identity", worst <= tol, worst, tol, {}, rep)


@_timed
def check_partition_plancherel(seed: int = 0, n_points: int = 1000, n_signals: int = 100,
                               size: int = 4096, tol_pu: float = 1e-12, tol_pl: float = 1e-10) -> CheckResult:
    """Partition of unity of the dyadic bumps and the discrete Plancherel identity."""
    t = np.geomspace(1e-4, 1e4, n_points // 2)
    t = np.concatenate([-t[::-1], t])
    total = sum(BUMP.dilate(t, k) for k in range(-20, 21))
    pu = float(np.max(np.abs(total - 1.0)))
    rng = SplitMix64(seed).spawn(4)
    grid = Grid1D.centered(64.0, size)
    worst = 0.0
    for _ in range(n_signals):
        f = random_band_limited_1d(grid, rng, fraction=0.9)
        F = fourier_transform(f)
        lhs = l2_norm(F) ** 2 / (2.0 * math.pi)
        rhs = l2_norm(f) ** 2
        worst = max(worst, abs(lhs - rhs) / rhs)
    passed = pu <= tol_pu and worst <= tol_pl
    rep = ExperimentReport()
    rep.add("partition_of_unity", {"samples": len(t)}, pu, passed=pu <= tol_pu)
    rep.add("plancherel", {"samples": n_signals, "grid": size}, worst, passed=worst <= tol_pl)
    return CheckResult("partition of unity and Plancherel", passed, max(pu / tol_pu, worst / tol_pl), 1.0,
                       {"partition_err": pu, "plancherel_rel_err": worst}, rep)


@_timed
def check_vdc(seed: int = 0, n: int = 200) -> CheckResult:
    """First-derivative oscillatory bound on random cubic phases with certified bounds.

    ``phi(t) = a t + b t^2 + c t^3`` on ``[p, q]``; with ``B = max(|p|, |q|)``
    the choice ``|a| = 2|b|B + 3|c|B^2 + sigma`` certifies ``|phi'| >= sigma``
    and ``|phi''| <= 2|b| + 6|c|B``.  Value = worst ``|integral| / bound``.
    """
    rng = SplitMix64(seed).spawn(5)
    worst = 0.0
    for _ in range(n):
        p = rng.uniform(-1.0, 1.0)
        q = p + rng.uniform(0.5, 2.0)
        B = max(abs(p), abs(q))
        b, c = rng.uniform(-1.0, 1.0, size=2)
        sigma = rng.uniform(0.2, 2.0)
        a = (2 * abs(b) * B + 3 * abs(c) * B * B + sigma) * (1 if rng.uniform() < 0.5 else -1)
        lam = 10.0 ** rng.uniform(1.0, 3.0)
        s2 = 2 * abs(b) + 6 * abs(c) * B
        val, bound = pl.vdc_bound(lambda t: a * t + b * t * t + c * t**3, sigma, s2, lam, (p, q),
                                  dphase=lambda t: a + 2 * b * t + 3 * c * t * t)
        worst = max(worst, abs(val) / bound)
    rep = ExperimentReport()
    rep.add("vdc_bound", {"samples": n}, worst, passed=worst <= 1.0)
    return CheckResult("augmented van der Corput", worst <= 1.0, worst, 1.0, {}, rep)


@_timed
def check_sublevel(seed: int = 0, samples: int = 100_000) -> CheckResult:
    """Sublevel measures of ``x`` and ``x^2`` against their exact values."""
    e1 = abs(pl.sublevel_measure(lambda x: x, (0.0, 1.0), 0.25, samples) - 0.25)
    e2 = abs(pl.sublevel_measure(lambda x: x * x, (-1.0, 1.0), 0.25, samples) - 1.0)
    tol = 4.0 / samples
    rep = ExperimentReport()
    rep.add("sublevel_linear", {"samples": samples}, e1, passed=e1 <= 2.0 / samples)
    rep.add("sublevel_quadratic", {"samples": samples}, e2, passed=e2 <= tol)
    return CheckResult("sublevel measure", e1 <= 2.0 / samples and e2 <= tol, max(e1, e2), tol, {}, rep)


# --------------------------------------------------------------------------
# Oscillatory kernels
# --------------------------------------------------------------------------


@_timed
def check_kernel_support(seed: int = 0, contexts: int = 40, tol: float = 1e-12) -> CheckResult:
    """``|kernel_product(s)|`` for ``|s| >= 4.05`` over random annulus contexts."""
    rng = SplitMix64(seed).spawn(6)
    s = np.concatenate([-np.linspace(4.05, 8.0, 16), np.linspace(4.05, 8.0, 16)])
    worst = 0.0
    for _ in range(contexts):
        r = 2.0 ** rng.integers(0, 7)
        th = rng.uniform(0, 2 * np.pi, size=2)
        nu = tuple(1.5 * r * np.array([math.cos(th[0]), math.sin(th[0])]) /
                   (abs(math.cos(th[0])) + abs(math.sin(th[0]))))
        mu = tuple(1.5 * r * np.array([math.cos(th[1]), math.sin(th[1])]) /
                   (abs(math.cos(th[1])) + abs(math.sin(th[1]))))
        al, be = [(1.5, 0.5), (0.5, 1.5), (2.5, 0.7), (0.3, 1.2)][rng.integers(0, 4)]
        ctx = pl.PhaseContext(alpha=al, beta=be, nu=nu, mu=mu, h=rng.uniform(0.05, 1.0), r=r)
        vals, _ = ok.kernel_product_values(ctx, s)
        worst = max(worst, float(np.max(np.abs(vals))))
    rep = ExperimentReport()
    rep.add("kernel_support", {"contexts": contexts}, worst, passed=worst <= tol)
    return CheckResult("kernel support", worst <= tol, worst, tol, {}, rep)


def _profile_rows(rep, name, var, profile, params, passed):
    for x, v in zip(profile.points, profile.values):
        rep.add(name, {**params, var: float(x)}, float(v))
    rep.add(name + "_fit", dict(params), profile.constant, profile.slope, profile.residual, passed)


@_timed
def check_product_decay(r_exponents=range(4, 11), slope_max: float = -0.05, resid_max: float = 0.15,
                        **params) -> CheckResult:
    """Decay in ``r`` of the max product kernel (``alpha, beta = 3/2, 1/2``, ``h = 1``)."""
    sweep = [2.0**e for e in r_exponents]
    prof = ok.decay_profile("product_r", params, sweep)
    passed = prof.slope <= slope_max and prof.residual < resid_max and not prof.flagged
    rep = ExperimentReport()
    _profile_rows(rep, "product_decay", "r", prof, {"alpha": 1.5, "beta": 0.5}, passed)
    return CheckResult("product kernel decay in r", passed, prof.slope, slope_max,
                       {"slope": prof.slope, "residual": prof.residual, "flagged": prof.flagged,
                        "values": prof.values.tolist()}, rep)


@_timed
def check_ttstar_decay(ms=(2, 3), ells=range(2, 11), slope_max: float = -0.15, resid_max: float = 0.2,
                       **params) -> CheckResult:
    """Decay in ``l`` of the TT* kernel maximum, uniform over the linear phase term."""
    rep = ExperimentReport()
    passed = True
    detail = {}
    for m in ms:
        prof = ok.decay_profile("ttstar_ell", {"m": m, **params}, list(ells))
        good = prof.slope <= slope_max and prof.residual < resid_max and not prof.flagged
        passed &= good
        detail[m] = {"slope": prof.slope, "residual": prof.residual, "flagged": prof.flagged,
                     "values": prof.values.tolist()}
        _profile_rows(rep, "ttstar_decay", "ell", prof, {"m": m}, good)
    worst = max(d["slope"] for d in detail.values())
    return CheckResult("TT* kernel decay in l", passed, worst, slope_max, detail, rep)


# --------------------------------------------------------------------------
# Curve operators
# --------------------------------------------------------------------------

SELL_CONFIGS = ((2, 3, "y"), (2, 3, "x"), (3, 2, "y"), (3, 2, "x"))


def sell_pattern(seed: int, d: int, size: int, levels: int = 4) -> co.StoppingTime:
    """Piecewise-constant stopping time with ``1 <= |N| < 2^d`` (so ``n = 0``)."""
    rng = SplitMix64(seed).spawn(100 + d)
    vals = 2.0 ** (d * rng.uniform(0.0, 1.0, size=levels)) * rng.signs(levels)
    return co.StoppingTime.piecewise(vals, size, d)


@_timed
def check_sell_decay(seed: int = 0, configs=SELL_CONFIGS, ells=range(1, 7), grid_size: int = 256,
                     oracle_size: int = 64, slope_max: float = -0.05, oracle_tol: float = 1e-6) -> CheckResult:
    """Operator norms of ``S_l`` on periodic lines, with a dense-SVD oracle on a coarse line."""
    def run(conf):
        m, d, axis = conf
        cfg = co.CurveOpConfig(m=m, d=d, axis=axis)
        return co.measure_Sell_decay(cfg, sell_pattern(seed, d, grid_size), ells, grid_size,
                                     oracle_size=oracle_size)

    rep = ExperimentReport()
    passed = True
    detail = {}
    for (m, d, axis), prof in zip(configs, parallel_map(run, configs)):
        oerr = prof.details["oracle_rel_err"]
        good = prof.slope <= slope_max and oerr <= oracle_tol and not prof.flagged
        passed &= good
        detail[(m, d, axis)] = {"slope": prof.slope, "residual": prof.residual, "oracle_rel_err": oerr,
                                "norms": prof.values.tolist()}
        params = {"m": m, "d": d, "axis": axis}
        for x, v in zip(prof.points, prof.values):
            rep.add("sell_norm", {**params, "ell": int(x)}, float(v))
        rep.add("sell_fit", params, prof.constant, prof.slope, prof.residual, good)
        rep.add("sell_oracle", params, oerr, passed=oerr <= oracle_tol)
    worst = max(v["slope"] for v in detail.values())
    return CheckResult("S_l operator-norm decay", passed, worst, slope_max, detail, rep)


def _packet(c):
    def f(x, y):
        return sum(a * np.exp(-((x - cx) / wx) ** 2 / 2 - ((y - cy) / wy) ** 2 / 2 + 1j * (fx * x + fy * y))
                   for a, cx, cy, wx, wy, fx, fy in c)

    return f


def _random_packets(rng, count, cx, cy, wx, wy, fx, fy):
    out = []
    for _ in range(count):
        amp = rng.normal() + 1j * rng.normal()
        out.append((amp, rng.uniform(-cx, cx), rng.uniform(-cy, cy), wx, wy,
                    rng.uniform(-fx, fx), rng.uniform(-fy, fy)))
    return out


def dilation_error(rng, m: int, d: int, axis: str, lam: float = 2.0) -> float:
    """``max |D^-1 H_N D f - H_{lam^-d N} f| / max |f|`` for a random wave-packet sum.

    ``D f`` is sampled on a grid ``G``; ``f`` itself on the dilated grid, so
    both sides are the same array of points in different coordinates.
    """
    gx = Grid1D.centered(32.0, 64)
    gy = Grid1D.centered(64.0, 128)
    c = _random_packets(rng, 3, 4.0, 4.0 * lam**m, 3.0 * lam, 3.0 * lam**m, 0.2 / lam, 0.2 / lam**m)
    fn = _packet(c)
    Df = SampledSignal2D.from_function(lambda x, y: fn(lam * x, lam**m * y), gx, gy)
    F = SampledSignal2D.from_function(fn, gx.scaled(lam), gy.scaled(lam**m))
    gline = gx if axis == "x" else gy
    N = co.StoppingTime(rng.uniform(-2.0, 2.0, size=gline.count), d)
    R, eps, dt = 2.0, 0.125, 1.0 / 16
    lhs = co.apply_partial_carleson(Df, co.CurveOpConfig(m, d, axis, (eps, R), dt), N)
    Nr = co.StoppingTime(N.values * lam ** (-d), d)
    rhs = co.apply_partial_carleson(F, co.CurveOpConfig(m, d, axis, (lam * eps, lam * R), lam * dt), Nr)
    return float(np.max(np.abs(lhs.values - rhs.values)) / np.max(np.abs(Df.values)))


def modulation_error(rng, m: int, d: int) -> float:
    """Modulation identity for ``d = 1`` (``A``, ``N(x)``) or ``d = m`` (``B``, ``N(y)``)."""
    axis = "x" if d == 1 else "y"
    gx = Grid1D.centered(8.0, 32)
    gy = Grid1D.centered(16.0, 64)
    f = random_band_limited_2d(gx, gy, rng, fraction=0.4)
    cfg = co.CurveOpConfig(m, d, axis, (0.0, 1.5), 1.5 / 24)
    gline = gx if axis == "x" else gy
    N = co.StoppingTime(rng.uniform(-3.0, 3.0, size=gline.count), d)
    step = 2.0 * math.pi / gline.extent * int(rng.integers(1, 4))
    xi, zeta = (step, 0.0) if axis == "x" else (0.0, step)
    out = co.modulate(co.apply_partial_carleson(co.modulate(f, xi, zeta), cfg, N), -xi, -zeta)
    ref = co.apply_partial_carleson(f, cfg, co.StoppingTime(N.values - step, d))
    return float(np.max(np.abs(out.values - ref.values)) / np.max(np.abs(f.values)))


def twist_error(rng) -> float:
    """Quadratic-twist identity for ``(m, d) = (2, 1)`` on a random wave-packet sum."""
    gx = Grid1D.centered(16.0, 128)
    gy = Grid1D.centered(16.0, 128)
    fn = _packet(_random_packets(rng, 2, 1.0, 1.0, 1.5, 1.5, 0.5, 0.5))
    f = SampledSignal2D.from_function(fn, gx, gy)
    b = 2.0 * math.pi / gy.extent * int(rng.integers(1, 3))
    cfg = co.CurveOpConfig(2, 1, "x", (0.0, 1.5), 1.5 / 24)
    N = co.StoppingTime(rng.uniform(-3.0, 3.0, size=gx.count), 1)
    g = co.quadratic_modulate(co.modulate(f, 0.0, b), b)
    out = co.quadratic_modulate(co.modulate(co.apply_partial_carleson(g, cfg, N), 0.0, -b), -b)
    ref = co.apply_partial_carleson(f, cfg, co.StoppingTime(N.values - 2.0 * b * gx.points(), 1))
    return float(np.max(np.abs(out.values - ref.values)) / np.max(np.abs(f.values)))


@_timed
def check_symmetries(seed: int = 0, n: int = 20, tol: float = 1e-10, cases=None) -> CheckResult:
    """Dilation, modulation and quadratic-twist identities on ``n`` random inputs each."""
    rng = SplitMix64(seed).spawn(7)
    if cases is None:
        cases = [("dilation", 2, 1), ("dilation", 2, 3), ("dilation", 3, 2),
                 ("modulation", 2, 1), ("modulation", 3, 3), ("twist", 2, 1)]
    rep = ExperimentReport()
    worst = 0.0
    detail = {}
    for kind, m, d in cases:
        # spawn advances the parent stream, so children are drawn up front
        subs = [rng.spawn(i) for i in range(n)]

        def one(sub, kind=kind, m=m, d=d):
            if kind == "dilation":
                return dilation_error(sub, m, d, "x" if d == 1 else "y")
            if kind == "modulation":
                return modulation_error(sub, m, d)
            return twist_error(sub)

        e = max(parallel_map(one, subs))
        detail[(kind, m, d)] = e
        worst = max(worst, e)
        rep.add("symmetry", {"identity": kind, "m": m, "d": d, "samples": n}, e, passed=e <= tol)
    return CheckResult("symmetry identities", worst <= tol, worst, tol, detail, rep)


def _annulus_input(rng, m, k0, gx, gy):
    f = random_band_limited_2d(gx, gy, rng, fraction=0.5)
    return lp_project(f, k0, axis="x")


@_timed
def check_even_vanishing(seed: int = 0, ms=(2, 4), n: int = 20, k0: int = 1) -> CheckResult:
    """``term_II`` of the single-annulus split is exactly zero for even ``m``."""
    rng = SplitMix64(seed).spawn(8)
    gx = Grid1D.centered(8.0, 64)
    gy = Grid1D.centered(16.0, 64)
    rep = ExperimentReport()
    worst = 0.0
    for m in ms:
        mw = 0.0
        for _ in range(n):
            fk = _annulus_input(rng, m, k0, gx, gy)
            N = co.StoppingTime(rng.uniform(-4.0, 4.0, size=gy.count), m)
            _, II, _ = co.single_annulus_split(fk, k0, co.CurveOpConfig(m, m, "y", (0.0, 1.0)), N)
            mw = max(mw, float(np.max(np.abs(II.values))))
        worst = max(worst, mw)
        rep.add("even_vanishing", {"m": m, "samples": n}, mw, passed=mw == 0.0)
    return CheckResult("even-m vanishing", worst == 0.0, worst, 0.0, {}, rep)


@_timed
def check_odd_domination(seed: int = 0, ms=(3, 5), n: int = 10, k0: int = 1, slack: float = 1e-8,
                         levels: int = 4, refine: int = 4) -> CheckResult:
    """``term_II <= C* f + slack`` pointwise for odd ``m``.

    ``C*`` acts in the second variable with ``eps = delta^m`` (the image of
    the ``t``-cutoff under ``u = t^m``), node spacing ``delta^m / (refine J)``
    for ``J`` nodes in ``term_II``, and an ``N`` grid containing every value
    of the stopping time.
    """
    rng = SplitMix64(seed).spawn(9)
    gx = Grid1D.centered(8.0, 64)
    gy = Grid1D.centered(16.0, 64)
    rep = ExperimentReport()
    worst = -math.inf
    ratio = 0.0
    for m in ms:
        mw = -math.inf
        for _ in range(n):
            fk = _annulus_input(rng, m, k0, gx, gy)
            lv = rng.uniform(-4.0, 4.0, size=levels)
            N = co.StoppingTime.piecewise(lv, gy.count, m)
            _, II, _ = co.single_annulus_split(fk, k0, co.CurveOpConfig(m, m, "y", (0.0, 1.0)), N)
            delta, J = II.meta["delta"], II.meta["nodes"]
            Ng = np.unique(np.concatenate([lv, np.linspace(-8.0, 8.0, 9)]))
            C = co.maximal_truncated_carleson(fk, Ng, [delta**m], axis="y", du=delta**m / (refine * J))
            diff = II.values.real - C.values.real
            mw = max(mw, float(np.max(diff)))
            big = C.values.real > 1e-12
            if big.any():
                ratio = max(ratio, float(np.max(II.values.real[big] / C.values.real[big])))
        worst = max(worst, mw)
        rep.add("odd_domination", {"m": m, "samples": n}, mw, passed=mw <= slack)
    return CheckResult("odd-m Carleson domination", worst <= slack, worst, slack,
                       {"max_ratio": ratio}, rep)


@_timed
def check_term_one_constant(seed: int = 0, m: int = 2, n: int = 8, k0: int = 1) -> CheckResult:
    """Fitted ``C`` in ``term_I <= C M1 M2 f`` across random inputs; reports spread ``max/min``."""
    rng = SplitMix64(seed).spawn(10)
    gx = Grid1D.centered(8.0, 64)
    gy = Grid1D.centered(16.0, 64)
    cs = []
    for _ in range(n):
        fk = _annulus_input(rng, m, k0, gx, gy)
        N = co.StoppingTime(rng.uniform(-4.0, 4.0, size=gy.count), m)
        I, _, _ = co.single_annulus_split(fk, k0, co.CurveOpConfig(m, m, "y", (0.0, 1.0)), N)
        MM = co.one_var_maximal(co.one_var_maximal(fk, 2), 1).values.real
        cs.append(float(np.max(I.values.real / MM)))
    spread = max(cs) / min(cs)
    rep = ExperimentReport()
    rep.add("term_one_constant", {"m": m, "samples": n}, max(cs), passed=spread < 4.0)
    rep.add("term_one_spread", {"m": m, "samples": n}, spread, passed=spread < 4.0)
    return CheckResult("term I constant stability", spread < 4.0, spread, 4.0, {"constants": cs}, rep)


# --------------------------------------------------------------------------
# Square function
# --------------------------------------------------------------------------


@_timed
def check_appendix(seed: int = 0, n_domination: int = 100, tol: float = 1e-10, exp_tol: float = 0.1,
                   ks=range(-3, 4), dom_ks=range(-3, 2)) -> CheckResult:
    """Normalization, pointwise domination, ``d sigma_k^(0,0)`` and high-frequency decay."""
    rng = SplitMix64(seed).spawn(11)
    rep = ExperimentReport()
    gx = Grid1D.centered(8.0, 64)
    gy = Grid1D.centered(8.0, 64)
    one = SampledSignal2D(gx, gy, np.ones((64, 64)))
    norm_err = 0.0
    sig0 = 0.0
    for m in (2, 3):
        for k in ks:
            e = float(np.max(np.abs(rs.avg_curve(one, k, m).values - rs.avg_mollify(one, k, m).values)))
            norm_err = max(norm_err, e)
            sig0 = max(sig0, float(abs(rs.sigma_hat([0.0], [0.0], k, m)[0])))
    rep.add("normalization", {"m": "2,3", "k": f"{min(ks)}:{max(ks)}"}, norm_err, passed=norm_err <= tol)
    rep.add("sigma_origin", {"m": "2,3", "k": f"{min(ks)}:{max(ks)}"}, sig0, passed=sig0 <= tol)
    worst_slack = math.inf
    dom_ok = True
    for _ in range(n_domination):
        g = random_band_limited_2d(gx, gy, rng, fraction=0.25)
        f = g.with_values(np.abs(g.values) ** 2)
        holds, slack = rs.check_pointwise_domination(f, 2, dom_ks)
        dom_ok &= holds
        worst_slack = min(worst_slack, slack)
    rep.add("domination", {"m": 2, "samples": n_domination}, worst_slack, passed=dom_ok)
    exps = {}
    exp_ok = True
    for m in (2, 3):
        slope, _, resid = rs.sigma_decay_exponent(m, np.geomspace(1e2, 1e4, 9))
        exps[m] = slope
        good = abs(slope + 1.0 / m) <= exp_tol
        exp_ok &= good
        rep.add("sigma_decay", {"m": m}, slope, slope, resid, good)
    passed = norm_err <= tol and sig0 <= tol and dom_ok and exp_ok
    return CheckResult("square-function appendix suite", passed, max(norm_err, sig0), tol,
                       {"normalization_err": norm_err, "sigma_origin": sig0, "domination_slack": worst_slack,
                        "decay_exponents": exps}, rep)


@_timed
def check_signed_sums(seed: int = 0, patterns: int = 32, ks=range(-3, 2), m: int = 2) -> CheckResult:
    """Norm ratios of ``sum eps_k (A_k - B_k)`` over sign patterns and Khintchine consistency."""
    rng = SplitMix64(seed).spawn(12)
    gx = Grid1D.centered(8.0, 64)
    gy = Grid1D.centered(8.0, 64)
    f = random_band_limited_2d(gx, gy, rng, fraction=0.4)
    ratios = [rs.signed_operator(f, m, ks, rs.SignPattern.random(ks, seed * 7919 + p)).meta["norm_ratio"]
              for p in range(patterns)]
    spread = max(ratios) / min(ratios)
    kh = rs.khintchine_ratio(f, m, ks, 64, seed)
    kh_ok = bool(np.all((kh >= 0.5) & (kh <= 2.0)))
    rep = ExperimentReport()
    rep.add("sign_spread", {"m": m, "patterns": patterns}, spread, passed=spread < 4.0)
    rep.add("khintchine_min", {"m": m, "patterns": 64}, float(kh.min()), passed=kh_ok)
    rep.add("khintchine_max", {"m": m, "patterns": 64}, float(kh.max()), passed=kh_ok)
    return CheckResult("signed sums", spread < 4.0 and kh_ok, spread, 4.0,
                       {"ratios": ratios, "khintchine": (float(kh.min()), float(kh.max()))}, rep)
