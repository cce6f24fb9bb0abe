"""Uniform-grid signals, Fourier transforms and Littlewood-Paley projections.

Conventions
-----------
The continuous Fourier transform is ``F(xi) = int f(x) exp(-i xi x) dx`` with
inverse ``f(x) = (2 pi)^-1 int F(xi) exp(i x xi) dxi``, so that
``||f||_2 = (2 pi)^-1/2 ||F||_2``.  The discrete versions below multiply
the DFT by the grid spacing (forward) and by ``dual spacing / 2 pi``
(inverse); the discrete Plancherel identity then holds exactly.

Two-dimensional signals store ``values[i, j] = f(x_i, y_j)``; axis 0 is
``x`` and axis 1 is ``y``.  Off-grid evaluation (translations along
curves) uses the trigonometric interpolant of the samples, which is exact
for band-limited periodic data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SizeError",
    "Grid1D",
    "SampledSignal1D",
    "SampledSignal2D",
    "DyadicBump",
    "BUMP",
    "bump_value",
    "fourier_transform",
    "inverse_transform",
    "lp_project",
    "lp_square_function",
    "l2_norm",
    "translate",
    "SpectralShifter",
    "random_band_limited_1d",
    "random_band_limited_2d",
    "wavepacket_2d",
    "max_occupied_frequency",
]


class SizeError(ValueError):
    """Grid size unsuitable for fast transforms."""


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``origin + k * spacing`` for ``k = 0 .. count-1``."""

    origin: float
    spacing: float
    count: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not _is_pow2(int(self.count)):
            raise SizeError(f"count must be a power of two >= 2, got {self.count}")

    @classmethod
    def centered(cls, half_extent: float, count: int) -> "Grid1D":
        """Grid covering ``[-half_extent, half_extent)``."""
        return cls(-half_extent, 2.0 * half_extent / count, count)

    @property
    def extent(self) -> float:
        return self.spacing * self.count

    @property
    def nyquist(self) -> float:
        return math.pi / self.spacing

    def points(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.count)

    def frequencies(self) -> np.ndarray:
        """Angular frequencies in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.count, d=self.spacing)

    def dual(self) -> "Grid1D":
        """Centered frequency grid on which :func:`fourier_transform` samples."""
        return Grid1D(-math.pi / self.spacing, 2.0 * math.pi / self.extent, self.count)

    def scaled(self, factor: float) -> "Grid1D":
        return Grid1D(self.origin * factor, self.spacing * factor, self.count)


@dataclass(eq=False)
class SampledSignal1D:
    grid: Grid1D
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.count,):
            raise ValueError(
                f"values has shape {self.values.shape}, grid expects ({self.grid.count},)"
            )

    @classmethod
    def from_function(cls, func, grid: Grid1D) -> "SampledSignal1D":
        return cls(grid, func(grid.points()))

    def with_values(self, values, **meta) -> "SampledSignal1D":
        return SampledSignal1D(self.grid, values, {**self.meta, **meta})


@dataclass(eq=False)
class SampledSignal2D:
    grid_x: Grid1D
    grid_y: Grid1D
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        shape = (self.grid_x.count, self.grid_y.count)
        if self.values.shape != shape:
            raise ValueError(f"values has shape {self.values.shape}, grids expect {shape}")

    @classmethod
    def from_function(cls, func, grid_x: Grid1D, grid_y: Grid1D) -> "SampledSignal2D":
        x, y = np.meshgrid(grid_x.points(), grid_y.points(), indexing="ij")
        return cls(grid_x, grid_y, func(x, y))

    def with_values(self, values, **meta) -> "SampledSignal2D":
        return SampledSignal2D(self.grid_x, self.grid_y, values, {**self.meta, **meta})

    def mesh(self):
        return np.meshgrid(self.grid_x.points(), self.grid_y.points(), indexing="ij")

    def grid(self, axis: str) -> Grid1D:
        return self.grid_x if _axis_index(axis) == 0 else self.grid_y

    @property
    def cell_area(self) -> float:
        return self.grid_x.spacing * self.grid_y.spacing


def _axis_index(axis) -> int:
    if axis in ("x", 0):
        return 0
    if axis in ("y", 1):
        return 1
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


# --------------------------------------------------------------------------
# Dyadic bump
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicBump:
    """Smooth dyadic partition of unity.

    ``step`` rises from 0 on ``x <= 0`` to 1 on ``x >= 1``; ``cutoff(t)``
    equals ``step(2 - |t|)`` (1 on ``|t| <= 1``, 0 on ``|t| >= 2``) and
    ``psi(t) = cutoff(t) - cutoff(2 t)``.  The dilates
    ``psi_k(t) = psi(2**-k t)`` telescope to 1 on ``t != 0``.
    """

    transition_sharpness: float = 1.0

    def step(self, x):
        x = np.asarray(x, dtype=float)
        a = self.transition_sharpness
        out = np.where(x >= 1.0, 1.0, 0.0)
        inner = (x > 0.0) & (x < 1.0)
        if np.any(inner):
            xi = x[inner]
            with np.errstate(over="ignore"):
                out[inner] = 1.0 / (1.0 + np.exp(a / xi - a / (1.0 - xi)))
        return out

    def cutoff(self, t):
        return self.step(2.0 - np.abs(np.asarray(t, dtype=float)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.cutoff(t) - self.cutoff(2.0 * t)

    def dilate(self, t, k):
        """``psi_k(t) = psi(2**-k t)``."""
        return self(np.ldexp(np.asarray(t, dtype=float), -int(k)))

    def one_sided(self, t):
        """Smooth bump supported exactly on ``[1, 2]`` (zero for ``t <= 0``).

        Obtained from ``psi`` by the affine change ``t -> 1.5 t - 1`` mapping
        ``[1, 2]`` onto ``[1/2, 2]``; the mirror image of that band
        (``0 < t < 1/3``) is cut off explicitly.
        """
        t = np.asarray(t, dtype=float)
        return np.where(t >= 1.0, self(1.5 * t - 1.0), 0.0)


BUMP = DyadicBump()


def bump_value(t, k: int = 0):
    """``psi_k(t)`` for the default bump; scalar in, scalar out."""
    out = BUMP.dilate(t, k)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# Transforms
# --------------------------------------------------------------------------


def _alternating(n: int) -> np.ndarray:
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def fourier_transform(f: SampledSignal1D) -> SampledSignal1D:
    """Samples of ``int f(x) exp(-i xi x) dx`` on ``f.grid.dual()``."""
    g = f.grid
    if not _is_pow2(g.count):
        raise SizeError(f"count must be a power of two, got {g.count}")
    dual = g.dual()
    xi = dual.points()
    spec = g.spacing * np.exp(-1j * xi * g.origin) * np.fft.fft(f.values * _alternating(g.count))
    return SampledSignal1D(dual, spec, {"space_grid": g})


def inverse_transform(spectrum: SampledSignal1D, grid: Grid1D | None = None) -> SampledSignal1D:
    """Inverse of :func:`fourier_transform`."""
    g = grid if grid is not None else spectrum.meta.get("space_grid")
    if g is None:
        raise ValueError("spatial grid unknown; pass grid=")
    xi = spectrum.grid.points()
    vals = _alternating(g.count) * np.fft.ifft(spectrum.values * np.exp(1j * xi * g.origin)) / g.spacing
    return SampledSignal1D(g, vals)


def l2_norm(signal) -> float:
    """Discrete L2 norm (Riemann sum with the grid cell measure)."""
    if isinstance(signal, SampledSignal2D):
        return float(np.sqrt(np.sum(np.abs(signal.values) ** 2) * signal.cell_area))
    return float(np.sqrt(np.sum(np.abs(signal.values) ** 2) * signal.grid.spacing))


def lp_project(f, k: int, axis="x", bump: DyadicBump = BUMP):
    """Littlewood-Paley projection: spectrum along ``axis`` times ``psi_k``.

    The result carries ``meta['warnings']`` when the band
    ``2**(k-1) <= |xi| <= 2**(k+1)`` is not representable on the grid.
    """
    if isinstance(f, SampledSignal2D):
        ax = _axis_index(axis)
        grid = f.grid(axis)
    else:
        ax = 0
        grid = f.grid
    xi = grid.frequencies()
    mult = bump.dilate(xi, k)
    shape = [1, 1][: f.values.ndim]
    shape[ax] = grid.count
    out = np.fft.ifft(np.fft.fft(f.values, axis=ax) * mult.reshape(shape), axis=ax)
    warnings = list(f.meta.get("warnings", []))
    lo, hi = 2.0 ** (k - 1), 2.0 ** (k + 1)
    if lo >= grid.nyquist:
        warnings.append(f"band k={k} lies beyond Nyquist {grid.nyquist:.6g}")
    elif hi > grid.nyquist:
        warnings.append(f"band k={k} truncated by Nyquist {grid.nyquist:.6g}")
    elif hi > 0.8 * grid.nyquist:
        warnings.append(f"band k={k} above 0.8 Nyquist; aliasing-prone")
    return f.with_values(out, warnings=warnings, lp_band=k)


def lp_square_function(f, ks, axis="x"):
    """``(sum_k |P_k f|^2)^(1/2)`` over the bands in ``ks``."""
    acc = np.zeros(f.values.shape)
    for k in ks:
        acc += np.abs(lp_project(f, k, axis).values) ** 2
    return f.with_values(np.sqrt(acc))


def translate(f, cells: int, axis="x"):
    """Periodic translation by a whole number of grid cells."""
    ax = _axis_index(axis) if isinstance(f, SampledSignal2D) else 0
    return f.with_values(np.roll(f.values, int(cells), axis=ax))


def max_occupied_frequency(f, axis="x", rel_tol=1e-13) -> float:
    """Largest ``|xi|`` whose spectral amplitude exceeds ``rel_tol`` of the peak."""
    if isinstance(f, SampledSignal2D):
        ax = _axis_index(axis)
        grid = f.grid(axis)
        spec = np.abs(np.fft.fft(f.values, axis=ax))
        spec = spec.max(axis=1 - ax)
    else:
        grid = f.grid
        spec = np.abs(np.fft.fft(f.values))
    peak = spec.max()
    if peak == 0:
        return 0.0
    xi = np.abs(grid.frequencies())
    return float(xi[spec > rel_tol * peak].max())


class SpectralShifter:
    """Evaluate translates ``f(x - a, y - b)`` of a 2D signal on its own grid.

    Uses the trigonometric interpolant, so translations commute exactly
    with on-grid modulations of band-limited data.
    """

    def __init__(self, f: SampledSignal2D):
        self.signal = f
        self.spectrum = np.fft.fft2(f.values)
        self.kx = f.grid_x.frequencies()
        self.ky = f.grid_y.frequencies()

    def shift(self, a: float, b: float) -> np.ndarray:
        phase_x = np.exp(-1j * self.kx * a)
        phase_y = np.exp(-1j * self.ky * b)
        return np.fft.ifft2(self.spectrum * phase_x[:, None] * phase_y[None, :])

    def shift_many(self, a, b) -> np.ndarray:
        """Stack of translates, shape ``(len(a), nx, ny)``."""
        a = np.atleast_1d(a)
        b = np.atleast_1d(b)
        phase = np.exp(-1j * self.kx[None, :, None] * a[:, None, None]) * np.exp(
            -1j * self.ky[None, None, :] * b[:, None, None]
        )
        return np.fft.ifft2(self.spectrum[None] * phase, axes=(1, 2))


# --------------------------------------------------------------------------
# Test-signal generators
# --------------------------------------------------------------------------


def _band_bins(grid: Grid1D, fraction: float) -> np.ndarray:
    xi = grid.frequencies()
    return np.nonzero(np.abs(xi) <= fraction * grid.nyquist)[0]


def random_band_limited_1d(grid: Grid1D, rng, fraction=0.5, real=False, modes=None) -> SampledSignal1D:
    """Random trigonometric polynomial with spectrum inside ``fraction * Nyquist``."""
    bins = _band_bins(grid, fraction)
    if modes is not None:
        bins = bins[rng.integers(0, len(bins), size=modes)]
    spec = np.zeros(grid.count, complex)
    spec[bins] = rng.normal(size=len(bins)) + 1j * rng.normal(size=len(bins))
    vals = np.fft.ifft(spec) * grid.count / np.sqrt(max(len(bins), 1))
    if real:
        vals = vals.real
    return SampledSignal1D(grid, vals)


def random_band_limited_2d(gx: Grid1D, gy: Grid1D, rng, fraction=0.5, real=False) -> SampledSignal2D:
    """Random 2D trigonometric polynomial band-limited in both variables."""
    bx = _band_bins(gx, fraction)
    by = _band_bins(gy, fraction)
    spec = np.zeros((gx.count, gy.count), complex)
    sub = rng.normal(size=(len(bx), len(by))) + 1j * rng.normal(size=(len(bx), len(by)))
    spec[np.ix_(bx, by)] = sub
    vals = np.fft.ifft2(spec) * gx.count * gy.count / np.sqrt(sub.size)
    if real:
        vals = vals.real
    return SampledSignal2D(gx, gy, vals)


def wavepacket_2d(gx: Grid1D, gy: Grid1D, rng, packets=3, width=1.0, max_freq=None,
                  spread=None) -> SampledSignal2D:
    """Sum of modulated Gaussians, numerically band-limited and localized.

    Centers lie within ``spread`` of the origin (default a quarter of the
    smaller extent) so that the packets decay to round-off well before the
    periodic boundary.
    """
    if max_freq is None:
        max_freq = 0.2 * min(gx.nyquist, gy.nyquist)
    if spread is None:
        spread = 0.15 * min(gx.extent, gy.extent)
    x, y = np.meshgrid(gx.points(), gy.points(), indexing="ij")
    vals = np.zeros_like(x, dtype=complex)
    for _ in range(packets):
        cx, cy = rng.uniform(-spread, spread, size=2)
        fx, fy = rng.uniform(-max_freq, max_freq, size=2)
        amp = rng.normal() + 1j * rng.normal()
        vals += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * width**2) + 1j * (fx * x + fy * y))
    return SampledSignal2D(gx, gy, vals)
