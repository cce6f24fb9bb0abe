"""Curve averages against mollified averages.

``A_k`` averages along ``(t, t^m)`` at scale ``2^k`` and ``B_k`` averages
over an anisotropic ball of the same mass.  Their difference has a Fourier
transform that vanishes at the origin and decays like ``|eta|^(-1/m)``
along the degenerate direction; the square function of the differences
plus ``sup_k B_k`` dominates the dyadic maximal function pointwise.

Run:  python3 demos/04_square_function.py
"""

import numpy as np

from curvelab import radon_square as rs
from curvelab.rng import SplitMix64
from curvelab.signal_core import Grid1D, random_band_limited_2d

print("masses of chi and phi:", rs.AveragingPair.masses())
print("d sigma_0 at the origin:", abs(rs.sigma_hat([0.0], [0.0], 0, 2)[0]))

for m in (2, 3):
    slope, _, resid = rs.sigma_decay_exponent(m, np.geomspace(1e2, 1e4, 9))
    print(f"m={m}: decay exponent {slope:+.5f} (expected {-1 / m:+.5f}), residual {resid:.1e}")

g = Grid1D.centered(8.0, 64)
f = random_band_limited_2d(g, g, SplitMix64(3), 0.3, real=True)
f = f.with_values(np.abs(f.values))
holds, slack = rs.check_pointwise_domination(f, 2, range(-2, 2))
print(f"pointwise domination on a random nonnegative f: holds={holds}, min slack {slack:.3f}")

ks = range(-2, 2)
ratios = [rs.signed_operator(f, 2, ks, rs.SignPattern.random(ks, s)).meta["norm_ratio"] for s in range(8)]
print("||sum eps_k (A_k - B_k) f|| / ||f|| over 8 sign patterns:", np.round(ratios, 3))
