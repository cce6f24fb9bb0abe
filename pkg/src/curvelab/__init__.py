"""Numerical laboratory for partial polynomial Carleson operators along monomial curves.

Modules
-------
signal_core          sampled signals, dyadic bumps, FFT transforms
phase_lab            phase-function identities and oscillatory bounds
oscillatory_kernels  product and TT* kernels, decay profiles
curve_operators      curve Hilbert / partial Carleson operators and their pieces
radon_square         averaging pairs, square function, Fourier decay
experiments          shared numerical checks
report, cli          CSV / SVG output and the ``lab`` driver
"""

__version__ = "0.1.0"
