"""Phase-function lemmas on random draws.

The phase ``Q(t) = nu1 t^a + nu2 t^b - mu1 (ht-s)^a - mu2 (ht-s)^b`` has a
4x4 derivative matrix ``M(t)`` whose determinant factors in closed form.
This script checks the factorization, the lower bound
``|Ax| >= |det A| ||A||^-3 |x|`` and the augmented van der Corput bound on a
handful of random inputs, printing what it sees.

Run:  python3 demos/01_phase_lemmas.py
"""

import numpy as np

from curvelab import phase_lab as pl
from curvelab.rng import SplitMix64

rng = SplitMix64(1)

print("closed-form determinant vs LAPACK")
for _ in range(5):
    a, b = rng.uniform(-2, 2, 4), rng.uniform(-2, 2, 4)
    x, y = rng.uniform(-2, 2, 2)
    val, _, _ = pl.det_identity(a, b, x, y)
    M = np.array([[a[j] * x**j, a[j] * y**j, b[j] * x**j, b[j] * y**j] for j in range(4)])
    print(f"  closed form {val: .6e}   lapack {np.linalg.det(M): .6e}")

print("\nlower bound |Ax| >= |det A| ||A||^-3 |x|")
for _ in range(5):
    A = rng.normal(size=(4, 4))
    x = rng.normal(size=4)
    holds, slack = pl.matrix_lower_bound_holds(A, x)
    print(f"  holds={holds}  slack={slack:.4f}")

print("\ngradient identity  M(t) c(t) = (Q', Q'', Q''', Q'''')")
ctx = pl.PhaseContext(alpha=1.5, beta=0.5, nu=(0.8, -1.3), mu=(1.1, 0.6), h=0.7, s=-0.4)
for t in (0.9, 1.4, 2.0):
    lhs = pl.matrix_M(t, ctx) @ pl.coefficient_vector(t, ctx)
    rhs = np.array([pl.phase_Q(t, ctx, j) for j in range(1, 5)])
    print(f"  t={t}: max deviation {np.max(np.abs(lhs - rhs)):.2e}, det M = {pl.det_M(t, ctx):.4e}")

print("\nvan der Corput with |phi'| >= sigma1, |phi''| <= sigma2 on a quadratic")
for lam in (10.0, 100.0, 1000.0):
    val, bound = pl.vdc_bound(lambda t: 1.5 * t + 0.25 * t * t, 1.0, 0.5, lam, (0.0, 1.0),
                              dphase=lambda t: 1.5 + 0.5 * t)
    print(f"  lambda={lam:6.0f}: |I| = {abs(val):.3e} <= bound {bound:.3e}")
