"""Curve Hilbert transforms, the S_l pieces and the single-annulus split.

1. On a plane wave the truncated operator ``H_N`` is a multiplier; the
   grid result is compared with the symbol from adaptive quadrature.
2. ``||S_l||`` on a single line is the largest singular value of a small
   block operator; its decay in ``l`` is fitted.
3. For even ``m`` the second annulus term vanishes identically; for odd
   ``m`` it is dominated by the one-variable Carleson maximal function.

Run:  python3 demos/03_curve_operators.py
"""

import math

import numpy as np
from scipy import integrate

from curvelab import curve_operators as co
from curvelab import experiments as ex
from curvelab.signal_core import Grid1D, SampledSignal2D

gx = gy = Grid1D.centered(4.0, 32)
a, b = 2 * math.pi / gx.extent * 3, 2 * math.pi / gy.extent * -2
f = SampledSignal2D.from_function(lambda x, y: np.exp(1j * (a * x + b * y)), gx, gy)
m, d, N, eps, R = 2, 1, 1.7, 0.25, 1.0
out = co.hilbert_curve(f, co.CurveOpConfig(m, d, "x", (eps, R), dt=1 / 4096), N)


def g(t):
    return np.exp(-1j * (a * t + b * t**m) + 1j * N * t**d) / t


sym = sum(complex(integrate.quad(lambda t: g(t).real, lo, hi, limit=400)[0],
                  integrate.quad(lambda t: g(t).imag, lo, hi, limit=400)[0])
          for lo, hi in ((eps, R), (-R, -eps)))
print("H_N on a plane wave")
print(f"  symbol by quad {sym:.8f}")
print(f"  grid / input   {out.values[5, 7] / f.values[5, 7]:.8f}")

print("\n||S_l|| for (m, d, axis) = (2, 3, y), four-level stopping time")
res = ex.check_sell_decay(0, configs=((2, 3, "y"),), ells=range(1, 6), grid_size=128, oracle_size=64)
for row in res.report.rows:
    if row["experiment"] == "sell_norm":
        print(f"  l={row['params']['ell']}: {row['value']:.4e}")
print(f"  {res.line()}")

print("\nannulus split")
print(" ", ex.check_even_vanishing(0, ms=(2,), n=3).line())
print(" ", ex.check_odd_domination(0, ms=(3,), n=3).line())
