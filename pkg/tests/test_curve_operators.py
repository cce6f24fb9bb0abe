import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from curvelab import curve_operators as co
from curvelab.phase_lab import DomainError
from curvelab.rng import SplitMix64
from curvelab.signal_core import Grid1D, SampledSignal1D, SampledSignal2D, random_band_limited_2d


def plane_wave(gx, gy, kx, ky):
    a = 2 * math.pi / gx.extent * kx
    b = 2 * math.pi / gy.extent * ky
    return SampledSignal2D.from_function(lambda x, y: np.exp(1j * (a * x + b * y)), gx, gy), a, b


def curve_symbol(a, b, N, m, d, eps, R):
    """int_{eps<|t|<R} exp(-i(a t + b t^m) + i N t^d) dt / t by adaptive quadrature."""

    def g(t):
        return np.exp(-1j * (a * t + b * t**m) + 1j * N * t**d) / t

    out = 0j
    for lo, hi in ((eps, R), (-R, -eps)):
        re = integrate.quad(lambda t: g(t).real, lo, hi, limit=500, epsabs=1e-13)[0]
        im = integrate.quad(lambda t: g(t).imag, lo, hi, limit=500, epsabs=1e-13)[0]
        out += complex(re, im)
    return out


# --------------------------------------------------------------------------
# Stopping times and configuration
# --------------------------------------------------------------------------


def test_stopping_index_examples():
    assert co.stopping_index(1.0, 2) == 0
    assert co.stopping_index(3.99, 2) == 0
    assert co.stopping_index(4.0, 2) == -1
    assert co.stopping_index(0.25, 2) == 1
    assert co.stopping_index(-0.3, 1) == 2
    assert co.stopping_index(0.0, 3) is None


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=1e-30, max_value=1e30), st.integers(min_value=1, max_value=5), st.booleans())
def test_stopping_index_brackets(v, d, neg):
    n = co.stopping_index(-v if neg else v, d)
    assert math.ldexp(1.0, -n * d) <= v < math.ldexp(1.0, -(n - 1) * d)


def test_stopping_time_fields():
    N = co.StoppingTime([0.0, 1.5, -5.0, 0.2], 2)
    assert N.active.tolist() == [False, True, True, True]
    assert N.n.tolist() == [0, 0, -1, 2]
    pw = co.StoppingTime.piecewise([1.0, 2.0], 8, 1)
    assert pw.values.tolist() == [1.0] * 4 + [2.0] * 4
    g = Grid1D.centered(1.0, 4)
    assert co.StoppingTime.from_function(lambda x: x, g, 1).values.tolist() == g.points().tolist()


def test_config_errors():
    with pytest.raises(co.ConfigError):
        co.CurveOpConfig(m=0)
    with pytest.raises(co.ConfigError):
        co.CurveOpConfig(axis="z")
    with pytest.raises(co.ConfigError):
        co.CurveOpConfig(truncation=(1.0, 0.5))
    with pytest.raises(co.ConfigError):
        co.CurveOpConfig(interpolation="cubic")


def test_pv_nodes():
    t, w = co.pv_nodes(0.25, 1.0, 0.1)
    assert np.all(np.diff(t) > 0) and t[0] > 0.25 and t[-1] < 1.0
    # midpoint rule on dt / t: error ~ h^2 / 24 * int 2 / t^3
    for h in (0.1, 0.01):
        t, w = co.pv_nodes(0.25, 1.0, h)
        assert abs(np.sum(w) - math.log(4.0)) < h * h / 24 * 15 * 1.05


# --------------------------------------------------------------------------
# Curve Hilbert transform against quadrature
# --------------------------------------------------------------------------


@pytest.mark.parametrize("m,d,N", [(2, 1, 1.7), (3, 2, -2.3), (2, 2, 0.0)])
def test_hilbert_curve_plane_wave(m, d, N):
    gx, gy = Grid1D.centered(4.0, 32), Grid1D.centered(4.0, 32)
    f, a, b = plane_wave(gx, gy, 3, -2)
    eps, R = 0.25, 1.0
    cfg = co.CurveOpConfig(m, d, "x", (eps, R), dt=1.0 / 4096)
    out = co.hilbert_curve(f, cfg, N)
    sym = curve_symbol(a, b, N, m, d, eps, R)
    assert np.max(np.abs(out.values - sym * f.values)) < 1e-6


def test_bilinear_interpolation_is_close_for_smooth_data():
    gx, gy = Grid1D.centered(4.0, 128), Grid1D.centered(4.0, 128)
    f, a, b = plane_wave(gx, gy, 1, 1)
    eps, R = 0.25, 1.0
    cfg = co.CurveOpConfig(2, 1, "x", (eps, R), dt=1.0 / 512, interpolation="bilinear")
    out = co.hilbert_curve(f, cfg, 1.0)
    sym = curve_symbol(a, b, 1.0, 2, 1, eps, R)
    assert np.max(np.abs(out.values - sym * f.values)) < 5e-3


def test_partial_carleson_constant_matches_hilbert_curve():
    gx, gy = Grid1D.centered(4.0, 32), Grid1D.centered(4.0, 32)
    f = random_band_limited_2d(gx, gy, SplitMix64(1), 0.4)
    cfg = co.CurveOpConfig(2, 3, "y", (0.1, 1.0), dt=1 / 64)
    a = co.apply_partial_carleson(f, cfg, co.StoppingTime.constant(1.3, 32, 3))
    b = co.hilbert_curve(f, cfg, 1.3)
    assert np.array_equal(a.values, b.values)
    with pytest.raises(co.ConfigError):
        co.apply_partial_carleson(f, cfg, co.StoppingTime.constant(1.3, 32, 2))
    with pytest.raises(co.ConfigError):
        co.apply_partial_carleson(f, cfg, co.StoppingTime.constant(1.3, 16, 3))
    with pytest.raises(co.ConfigError):
        co.apply_partial_carleson(f, cfg, 1.3)


def test_partial_carleson_linewise():
    gx, gy = Grid1D.centered(4.0, 32), Grid1D.centered(4.0, 32)
    f = random_band_limited_2d(gx, gy, SplitMix64(2), 0.4)
    cfg = co.CurveOpConfig(3, 1, "x", (0.0, 1.0), dt=1 / 64)
    N = co.StoppingTime(SplitMix64(3).uniform(-2, 2, size=32), 1)
    out = co.apply_partial_carleson(f, cfg, N)
    for i in (0, 7, 31):
        row = co.hilbert_curve(f, cfg, N.values[i]).values[i]
        assert np.max(np.abs(out.values[i] - row)) < 1e-13


def test_extent_check():
    gx, gy = Grid1D.centered(2.0, 16), Grid1D.centered(2.0, 16)
    f = random_band_limited_2d(gx, gy, SplitMix64(0))
    with pytest.raises(DomainError):
        co.hilbert_curve(f, co.CurveOpConfig(2, 1, "x", (0.0, 1.5)), 0.0)


# --------------------------------------------------------------------------
# Dyadic pieces
# --------------------------------------------------------------------------


def _small_signal(seed=4):
    gx, gy = Grid1D.centered(8.0, 32), Grid1D.centered(16.0, 32)
    return random_band_limited_2d(gx, gy, SplitMix64(seed), 0.3)


def test_decompose_telescopes_to_smooth_truncation():
    f = _small_signal()
    cfg = co.CurveOpConfig(2, 1, "x")
    N = co.StoppingTime(SplitMix64(5).uniform(-3, 3, size=32), 1)
    T1, T2 = co.decompose_T(f, cfg, N, -2, 1)
    pieces = sum(co.t_ell_piece(f, cfg, N, k).values for k in range(-2, 2))
    assert np.max(np.abs(T1.values + T2.values - pieces)) < 1e-13 * np.max(np.abs(pieces))
    # per-piece and single-cutoff quadratures use different nodes
    full = co.smooth_truncated_hilbert(f, cfg, N, -2, 1)
    assert np.max(np.abs(pieces - full.values)) < 1e-5 * np.max(np.abs(full.values))


def test_s_ell_equals_t_ell_when_n_is_zero():
    f = _small_signal()
    cfg = co.CurveOpConfig(2, 1, "x")
    N = co.StoppingTime.constant(1.5, 32, 1)
    assert np.allclose(co.s_ell_piece(f, cfg, N, 0).values, co.t_ell_piece(f, cfg, N, 0).values, atol=1e-14)
    silent = co.s_ell_piece(f, cfg, co.StoppingTime.constant(0.0, 32, 1), 0)
    assert np.all(silent.values == 0)


def test_annulus_split_config_errors():
    f = _small_signal()
    N = co.StoppingTime.constant(1.0, 32, 2)
    with pytest.raises(co.ConfigError):
        co.single_annulus_split(f, 1, co.CurveOpConfig(2, 1, "y", (0, 1.0)), N)
    with pytest.raises(co.ConfigError):
        co.single_annulus_split(f, 1, co.CurveOpConfig(2, 2, "x", (0, 1.0)), N)
    with pytest.raises(co.ConfigError):
        co.single_annulus_split(f, 0, co.CurveOpConfig(2, 2, "y", (0, 1.0)), N)


def test_even_m_term_two_vanishes_and_split_reassembles():
    f = _small_signal()
    cfg = co.CurveOpConfig(2, 2, "y", (0.0, 1.0))
    N = co.StoppingTime(SplitMix64(6).uniform(-3, 3, size=32), 2)
    I, II, T2 = co.single_annulus_split(f, 1, cfg, N)
    assert np.all(II.values == 0.0)
    assert II.meta["delta"] == 0.5
    assert np.all(I.values >= 0)
    ref = co.apply_partial_carleson(f, co.CurveOpConfig(2, 2, "y", (0.5, 1.0)), N)
    assert np.max(np.abs(T2.values - ref.values)) < 1e-12 * np.max(np.abs(ref.values))


# --------------------------------------------------------------------------
# Maximal operators
# --------------------------------------------------------------------------


def test_maximal_truncated_carleson_sine_integral():
    g = Grid1D.centered(16.0, 64)
    b = 2 * math.pi / g.extent * 3
    f = SampledSignal1D.from_function(lambda y: np.exp(1j * b * y), g)
    N, eps = 2.0, 0.75
    out = co.maximal_truncated_carleson(f, [N], [eps], du=eps / 4096)
    # int_{|u|<=eps} e^{i(N-b)u} du/u = 2 i Si((N - b) eps)
    exact = 2 * abs(special.sici((N - b) * eps)[0])
    assert np.max(np.abs(out.values - exact)) < 1e-7
    assert out.meta["lower_bound"]
    bigger = co.maximal_truncated_carleson(f, [0.0, N], [eps / 2, eps], du=eps / 4096)
    assert np.all(bigger.values >= out.values - 1e-12)


def test_radon_and_one_var_maximal():
    gx, gy = Grid1D.centered(4.0, 32), Grid1D.centered(4.0, 32)
    one = SampledSignal2D(gx, gy, np.ones((32, 32)))
    assert np.allclose(co.radon_maximal(one, 2, [0.5, 1.0]).values, 1.0, atol=1e-12)
    f = random_band_limited_2d(gx, gy, SplitMix64(8))
    assert np.array_equal(co.one_var_maximal(f, 1, [0]).values, np.abs(f.values))
    M = co.one_var_maximal(f, 2)
    assert np.all(M.values >= np.abs(f.values) - 1e-15)
    with pytest.raises(ValueError):
        co.one_var_maximal(f, 3)


def test_maximal_hilbert_curve_matches_single_truncation():
    gx, gy = Grid1D.centered(4.0, 32), Grid1D.centered(4.0, 32)
    f = random_band_limited_2d(gx, gy, SplitMix64(9), 0.4)
    M = co.maximal_hilbert_curve(f, 2, [(0.25, 1.0)], dt=1 / 64)
    ref = co.hilbert_curve(f, co.CurveOpConfig(2, 1, "x", (0.25, 1.0), dt=1 / 64), 0.0)
    assert np.max(np.abs(M.values - np.abs(ref.values))) < 1e-12
    with pytest.raises(ValueError):
        co.maximal_hilbert_curve(f, 2, [(0.3, 1.0)], dt=1 / 64)


def test_modulations():
    gx, gy = Grid1D.centered(4.0, 16), Grid1D.centered(4.0, 16)
    f = random_band_limited_2d(gx, gy, SplitMix64(10))
    g = co.modulate(co.modulate(f, 0.3, -0.7), -0.3, 0.7)
    assert np.max(np.abs(g.values - f.values)) < 1e-15
    q = co.quadratic_modulate(f, 0.4)
    assert np.allclose(np.abs(q.values), np.abs(f.values))


# --------------------------------------------------------------------------
# Line operators
# --------------------------------------------------------------------------


@pytest.mark.parametrize("axis,m,d", [("y", 2, 3), ("x", 3, 2)])
def test_line_multipliers_window_matches_direct(axis, m, d):
    grid, _ = co._line_setup(axis, m, 128, 0)
    om = grid.frequencies()
    for N, phi in [(2.0**8 * 1.3, 0.0), (-(2.0**9) * 1.7, 150.0)]:
        a = co.line_multipliers(N, phi, om, 0, m, d, axis)
        b = co.line_multipliers_direct(N, phi, om, 0, m, d, axis)
        assert np.max(np.abs(a - b)) < 1e-10


def test_line_multiplier_against_scipy():
    omega, N, phi = 3.0, 40.0, 5.0

    def g(t):
        return np.exp(1j * (N * t**3 - phi * t - omega * t**2)) * float(co.BUMP(t)) / t

    kw = dict(limit=400, epsabs=1e-13, points=[1.0])
    ref = 0j
    for lo, hi in ((0.5, 2.0), (-2.0, -0.5)):
        ref += complex(integrate.quad(lambda t: g(t).real, lo, hi, **kw)[0],
                       integrate.quad(lambda t: g(t).imag, lo, hi, **kw)[0])
    val = co.line_multipliers(N, phi, np.array([omega]), 0, 2, 3, "y")[0]
    assert abs(val - ref) < 1e-11


def test_line_operator_consistency():
    rng = np.random.default_rng(0)
    n = 32
    masks = [np.r_[np.ones(16), np.zeros(16)], np.r_[np.zeros(16), np.ones(16)]]
    symbols = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in masks]
    op = co.LineOperator(masks, symbols)
    A = op.matrix()
    grid = Grid1D.centered(8.0, n)
    assert np.max(np.abs(A - op.dense(grid.frequencies(), grid.points()))) < 1e-12
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(op.apply(v), A @ v)
    assert np.vdot(w, op.apply(v)) == pytest.approx(np.vdot(op.adjoint(w), v), rel=1e-12)
    assert op.norm() == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-12)


def test_measure_sell_small_grid():
    cfg = co.CurveOpConfig(2, 3, "y")
    pat = co.StoppingTime.piecewise([1.5, -3.0], 64, 3)
    prof = co.measure_Sell_decay(cfg, pat, range(1, 5), grid_size=64, oracle_size=32)
    assert len(prof.values) == 4 and np.all(prof.values > 0)
    assert prof.details["oracle_rel_err"] < 1e-6
    assert not prof.flagged
    with pytest.raises(co.ConfigError):
        co.measure_Sell_decay(cfg, co.StoppingTime.constant(0.5, 64, 3), range(1, 5), grid_size=64)
    with pytest.raises(co.ConfigError):
        co.measure_Sell_decay(cfg, pat, range(1, 5), grid_size=128)
