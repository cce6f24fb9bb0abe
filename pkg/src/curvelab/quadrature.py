"""Composite Gauss-Legendre rules for smooth and oscillatory integrands.

Integrands are vectorized callables ``f(t) -> array``; they may return
extra trailing dimensions (``f(t)`` of shape ``(len(t), ...)``), which lets
one rule integrate a whole family of kernels at once.
"""

from __future__ import annotations

import functools
import math

import numpy as np

__all__ = ["gauss_legendre", "panel_nodes", "composite_gl", "adaptive_gl", "panels_for_phase"]


@functools.lru_cache(maxsize=32)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(a: float, b: float, panels: int, order: int = 16):
    """Nodes and weights of ``panels`` equal Gauss-Legendre panels on ``[a, b]``."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def composite_gl(f, a: float, b: float, panels: int, order: int = 16):
    t, w = panel_nodes(a, b, panels, order)
    vals = np.asarray(f(t))
    return np.tensordot(w, vals, axes=(0, 0))


def adaptive_gl(f, a: float, b: float, tol: float = 1e-12, panels: int = 1, order: int = 16,
                max_panels: int = 1 << 16):
    """Double the panel count until two successive estimates agree.

    Returns ``(value, error_estimate)``; the estimate is the difference of
    the last two refinements (which is pessimistic for the finer one).
    """
    prev = composite_gl(f, a, b, panels, order)
    while True:
        panels *= 2
        cur = composite_gl(f, a, b, panels, order)
        err = float(np.max(np.abs(cur - prev)))
        scale = max(1.0, float(np.max(np.abs(cur))))
        if err <= tol * scale or panels >= max_panels:
            return cur, err
        prev = cur


def panels_for_phase(a: float, b: float, max_phase_derivative: float, per_wavelength: float = 8.0,
                     minimum: int = 4) -> int:
    """Panel count keeping each panel below ``1/per_wavelength`` of a local wavelength."""
    wavelength = 2.0 * math.pi / max(max_phase_derivative, 1e-300)
    return max(minimum, int(math.ceil((b - a) * per_wavelength / wavelength)))
