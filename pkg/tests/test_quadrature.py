import cmath

import numpy as np
import pytest
from scipy import integrate

from curvelab.quadrature import adaptive_gl, composite_gl, gauss_legendre, panel_nodes, panels_for_phase


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8)
    for p in range(16):
        exact = (1 - (-1) ** (p + 1)) / (p + 1)
        assert w @ x**p == pytest.approx(exact, abs=1e-14)
    assert not x.flags.writeable


def test_panel_nodes_cover_interval():
    t, w = panel_nodes(-1.0, 3.0, 5, 4)
    assert len(t) == 20 and w.sum() == pytest.approx(4.0, abs=1e-14)
    assert t.min() > -1.0 and t.max() < 3.0


def test_composite_vector_valued():
    val = composite_gl(lambda t: np.stack([np.sin(t), np.cos(t)], axis=1), 0.0, np.pi, 8)
    assert np.allclose(val, [2.0, 0.0], atol=1e-14)


def test_adaptive_oscillatory_against_closed_form():
    lam = 400.0
    val, err = adaptive_gl(lambda t: np.exp(1j * lam * t * t), 0.0, 1.0, tol=1e-13,
                           panels=panels_for_phase(0.0, 1.0, 2 * lam))
    re = integrate.quad(lambda t: np.cos(lam * t * t), 0, 1, limit=2000, epsabs=1e-14)[0]
    im = integrate.quad(lambda t: np.sin(lam * t * t), 0, 1, limit=2000, epsabs=1e-14)[0]
    assert abs(val - complex(re, im)) < 1e-11
    assert err < 1e-11


def test_panels_for_phase_minimum_and_growth():
    assert panels_for_phase(0, 1, 0.0) >= 4
    assert panels_for_phase(0, 1, 1e4) > panels_for_phase(0, 1, 1e2)


def test_exp_integral():
    val, _ = adaptive_gl(np.exp, 0.0, 2.0)
    assert val == pytest.approx(cmath.exp(2).real - 1, rel=1e-14)
