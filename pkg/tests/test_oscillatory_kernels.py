import numpy as np
import pytest
from scipy import integrate

from curvelab import oscillatory_kernels as ok
from curvelab.phase_lab import DomainError, PhaseContext
from curvelab.signal_core import BUMP


def _quad_complex(f, a, b, points=None):
    kw = dict(limit=800, epsabs=1e-13, epsrel=1e-12, points=points)
    re = integrate.quad(lambda t: f(t).real, a, b, **kw)[0]
    im = integrate.quad(lambda t: f(t).imag, a, b, **kw)[0]
    return complex(re, im)


def _bump12(t):
    """psi(1.5 t - 1) restricted to [1, 2]."""
    return float(BUMP(1.5 * t - 1.0)) if 1.0 <= t <= 2.0 else 0.0


def test_one_sided_bump_support():
    t = np.linspace(-1.0, 3.0, 4001)
    v = BUMP.one_sided(t)
    assert np.all(v[(t <= 1.0) | (t >= 2.0)] == 0.0)
    # exp(-1/x) underflows within ~0.01 of the edges
    assert np.all(v[(t >= 1.01) & (t <= 1.99)] > 0.0)


def test_product_kernel_against_scipy():
    ctx = PhaseContext(alpha=1.5, beta=0.5, nu=(3.0, -2.0), mu=(1.0, 2.5), h=0.8)
    s_vals = [-0.7, -0.2, 0.1, 0.45]
    vals, errs = ok.kernel_product_values(ctx, s_vals)

    def integrand(t, s):
        u = ctx.h * t - s
        if u <= 0:
            return 0j
        amp = _bump12(t) / t * _bump12(u) / u
        ph = 3.0 * t**1.5 - 2.0 * t**0.5 - (1.0 * u**1.5 + 2.5 * u**0.5)
        return amp * np.exp(1j * ph)

    for v, e, s in zip(vals, errs, s_vals):
        ref = _quad_complex(lambda t: integrand(t, s), 1.0, 2.0, points=[(1.0 + s) / ctx.h, (2.0 + s) / ctx.h])
        assert abs(v - ref) < 1e-10
        assert e < 1e-8


def test_product_kernel_vanishes_off_support_and_is_dominated():
    ctx = PhaseContext(alpha=1.5, beta=0.5, nu=(30.0, 10.0), mu=(-20.0, 5.0), h=1.0, r=20.0)
    s = np.linspace(-4.5, 4.5, 91)
    vals, _ = ok.kernel_product_values(ctx, s)
    assert np.all(vals[np.abs(s) >= 1.0 + 1e-12] == 0.0)
    triv = ok.product_trivial_bound(ctx, s)
    assert np.all(np.abs(vals) <= triv + 1e-12)


def test_phi_lambda_support_and_scaling():
    t = np.linspace(-1, 5, 601)
    v = ok.phi_lambda(t, (2.0, -1.0), 1.5, 0.5, a=2.0)
    assert np.all(v[(t <= 2.0) | (t >= 4.0)] == 0)
    assert ok.phi_lambda(3.0, (0.0, 0.0), 1.5, 0.5, a=2.0) == pytest.approx(BUMP.one_sided(1.5) / 1.5 / 2.0)
    with pytest.raises(DomainError):
        ok.phi_lambda(t, (1, 1), 1.5, 0.5, a=0.0)


def test_kernel_K_against_scipy():
    m, k0, ell = 2, 0, 3
    ctx = PhaseContext(xi=1.0, lambda1=0.3, lambda2=0.1)
    rho = 2.0 ** (m * (ell - k0))
    eta = -ctx.xi * 2.0 ** (ell - k0)
    s = 0.6

    def psi0(t):
        return BUMP(t ** 0.5) if t > 0 else 0.0

    def f(t):
        u = t - s
        if u <= 0:
            return 0j
        ph = 0.3 * rho * t - 0.1 * rho * u + eta * (t**0.5 - u**0.5)
        return psi0(t) / t * psi0(u) / u * np.exp(1j * ph)

    ref = _quad_complex(f, 0.25, 4.0, points=[1.0, 2.0, 0.25 + s])
    val = ok.kernel_K(ctx, k0, ell, m, s)
    assert abs(val.value - ref) < 1e-9
    assert val.reliable


def test_kernel_K_argument_checks():
    with pytest.raises(ValueError):
        ok.kernel_K_values(PhaseContext(), 0, 1, 1, [0.1])
    with pytest.raises(ValueError):
        ok.kernel_K_values(PhaseContext(), 0, -1, 2, [0.1])


def test_fit_loglog_exact_power_law():
    x = np.array([2.0, 4.0, 8.0, 16.0])
    slope, const, resid = ok.fit_loglog(x, 3.0 * x**-0.25)
    assert slope == pytest.approx(-0.25, abs=1e-13)
    assert const == pytest.approx(3.0, rel=1e-13)
    assert resid < 1e-13


def test_annulus_directions_lie_in_annulus():
    for a, b in ok.annulus_directions(12):
        assert abs(a) + abs(b) == pytest.approx(1.5)


def test_decay_profile_validation():
    with pytest.raises(ValueError):
        ok.decay_profile("product_r", {}, [1, 2, 3])
    with pytest.raises(ValueError):
        ok.decay_profile("product_r", {}, [4, 3, 2, 1])
    with pytest.raises(ValueError):
        ok.decay_profile("nope", {}, [1, 2, 3, 4])


def test_small_product_profile_is_reliable():
    prof = ok.decay_profile("product_r", {"pairs": [((1.0, 0.5), (0.5, 1.0))], "n_s": 16}, [16, 32, 64, 128])
    assert prof.variable == "r" and len(prof.values) == 4
    assert not prof.flagged
    assert np.all(prof.values > 0)


def test_product_kernel_examples():
    assert ok.kernel_product(PhaseContext(alpha=1.5, beta=0.5, s=5.0)).value == 0
    zero = ok.kernel_product(PhaseContext(alpha=1.5, beta=0.5, nu=(0, 0), mu=(0, 0), h=1.0, s=0.0))
    ref = integrate.quad(lambda t: (_bump12(t) / t) ** 2, 1.0, 2.0, epsabs=1e-14)[0]
    assert zero.value.imag == 0 and zero.value.real == pytest.approx(ref, rel=1e-11)


def test_product_kernel_conjugation_symmetry():
    ctx = PhaseContext(alpha=1.5, beta=0.5, nu=(4.0, -3.0), mu=(2.0, 5.0), h=1.0)
    swapped = ctx.with_(nu=ctx.mu, mu=ctx.nu)
    s = np.linspace(-0.9, 0.9, 19)
    a, _ = ok.kernel_product_values(ctx, s)
    b, _ = ok.kernel_product_values(swapped, -s)
    assert np.max(np.abs(a - np.conj(b))) < 1e-13


def test_canonical_pair_max_decreases_from_r16_to_r256():
    def peak(r):
        ctx = PhaseContext(alpha=1.5, beta=0.5, nu=(r, -r), mu=(r, r), h=1.0, r=r)
        v, _ = ok.kernel_product_values(ctx, np.linspace(-1.0, 1.0, 401))
        return np.max(np.abs(v))

    assert peak(256.0) < peak(16.0)
