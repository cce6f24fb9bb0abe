"""Decay of the two oscillatory kernel families.

The product kernel ``int phi_nu(t) conj(phi_mu(ht - s)) dt`` is maximized
over direction pairs in the annulus and over ``|s| >= r^-0.1``; the TT*
kernel ``rho K(rho s)`` is maximized over ``|s| >= 2^(-l/2)`` and the
linear phase term.  On the small sweeps used here both maxima are still in
their pre-asymptotic range (the product maximum keeps growing until about
``r = 2^10``), which the printed local slopes make visible.

Run:  python3 demos/02_kernel_decay.py
"""

import numpy as np

from curvelab import oscillatory_kernels as ok

print("product kernel, canonical pair nu=(r,-r), mu=(r,r)")
for e in range(4, 10):
    v, err = ok.product_max(2.0**e, pairs=[((1.0, -1.0), (1.0, 1.0))])
    print(f"  r=2^{e:<2d} max={v:.4e}  quad err={err:.1e}")

print("\nproduct kernel, sup over 64 direction pairs")
prof = ok.decay_profile("product_r", {}, [2.0**e for e in range(4, 9)])
local = np.diff(np.log(prof.values)) / np.diff(np.log(prof.points))
for r, v in zip(prof.points, prof.values):
    print(f"  r={r:6.0f} max={v:.4e}")
print(f"  local slopes {np.round(local, 3)}; global fit {prof.slope:+.3f} (residual {prof.residual:.3f})")

print("\nTT* kernel maximum in l")
for m in (2, 3):
    prof = ok.decay_profile("ttstar_ell", {"m": m}, list(range(2, 8)))
    vals = " ".join(f"{v:.3f}" for v in prof.values)
    print(f"  m={m}: {vals}  slope {prof.slope:+.3f}")
