"""Fourier-side bump and annulus profiles used by the data constructions.

Each profile is defined by a radial hat function with exact plateau and
support radii:

    low bump      : 1 on |xi| <= 1/4,           0 on |xi| >= 1/2
    band profile  : 1 on 1/2 <= |xi| <= 5/8,    0 outside 3/8 < |xi| < 3/4
    low bump (2D) : 1 on |xi| <= 4^-d,          0 on |xi| >= 2^-d
    band (2D)     : the band profile with radii shrunk by 1/sqrt(d)

Spatial realisations are synthesised by sampling the hat at the grid
frequencies (multiples of 1/L) and inverting the DFT with the physical
normalisation value(x) = (1/2*pi) * sum hat(m/L) e^{i m x / L} / L, so the
value at the origin does not depend on the axis resolution.  Every
downstream use is ratio-normalised (profile / profile(0)), which makes the
overall transform convention immaterial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .errors import IllposedError
from .grid import FFT_WORKERS, Field, UniformPeriodicGrid
from .sampling import PeriodicInterpolant
from .spectral import annulus_bump, plateau_bump

#: fine internal table used for plateau scans and scattered evaluation
_TABLE_POINTS = 1 << 14
_OVERSAMPLE = 8


def low_bump_hat(r) -> np.ndarray:
    return plateau_bump(r, 0.25, 0.5)


def band_hat(r) -> np.ndarray:
    return annulus_bump(r, support_lo=3.0 / 8.0, plateau_lo=0.5,
                        plateau_hi=5.0 / 8.0, support_hi=0.75)


def low_bump_hat_nd(r, d: int = 2) -> np.ndarray:
    return plateau_bump(r, 4.0 ** (-d), 2.0 ** (-d))


def band_hat_nd(r, d: int = 2) -> np.ndarray:
    c = 1.0 / np.sqrt(d)
    return annulus_bump(r, support_lo=3.0 / 8.0 * c, plateau_lo=0.5 * c,
                        plateau_hi=5.0 / 8.0 * c, support_hi=0.75 * c)


def synth_axis(hat: Callable, n: int, box_half_width: float,
               multiplier: Callable | None = None) -> np.ndarray:
    """Sample ``hat`` at the axis frequencies and invert, origin at n//2.

    ``multiplier`` optionally post-multiplies the sampled spectrum as a
    function of the signed frequency (used for derivative and
    antiderivative realisations).
    """
    period = 2.0 * box_half_width * np.pi
    freqs = sfft.rfftfreq(n, d=period / n) * 2.0 * np.pi
    spec = hat(freqs).astype(np.complex128)
    if multiplier is not None:
        spec = spec * multiplier(freqs)
    vals = sfft.irfft(spec, n=n, workers=FFT_WORKERS) * (n / period)
    return np.roll(vals, n // 2)


def _antiderivative_multiplier(freqs: np.ndarray) -> np.ndarray:
    safe = np.where(freqs == 0.0, 1.0, freqs)
    return -1j * np.where(freqs == 0.0, 0.0, 1.0 / safe)


def axis_spectrum(hat_values: np.ndarray, n: int, period: float) -> np.ndarray:
    """Convert hat samples on an axis frequency layout into DFT coefficients.

    The returned array feeds ``Field.from_spectrum`` (or a per-axis inverse
    transform): it carries the physical n/period amplitude factor and the
    alternating-sign phase that shifts the function's origin to index n//2.
    Works for both the half (rfft) and full (fft) layouts since n is even.
    """
    m = np.arange(hat_values.shape[0])
    signs = np.where(m % 2 == 0, 1.0, -1.0)
    return hat_values * (n / period) * signs


def modulation_cos(hat: Callable, xi: np.ndarray, lam: float) -> np.ndarray:
    """Hat of x -> profile(x) * cos(lam x)."""
    return 0.5 * (hat(xi - lam) + hat(xi + lam))


def modulation_sin(hat: Callable, xi: np.ndarray, lam: float) -> np.ndarray:
    """Hat of x -> profile(x) * sin(lam x)."""
    return -0.5j * (hat(xi - lam) - hat(xi + lam))


def plateau_scale(samples: np.ndarray, x_axis: np.ndarray, center_value: float) -> int:
    """Smallest integer N >= 0 with samples >= center/2 on [0, 2*pi*2^-N].

    The hat profiles are even with non-negative spectra, so the maximum sits
    at the origin and some such N always exists on a resolved table.
    """
    for n in range(0, 60):
        width = 2.0 * np.pi * 2.0 ** (-n)
        sel = (x_axis >= 0.0) & (x_axis <= width)
        if not np.any(sel):
            break
        if np.min(samples[sel]) >= 0.5 * center_value:
            return n
    raise IllposedError("no plateau scale found; profile table too coarse")


@dataclass
class AxisProfile:
    """One radial profile realised on a fine 1D table over the box."""

    hat: Callable
    box_half_width: float
    table: np.ndarray = field(repr=False)
    x_axis: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, hat: Callable, box_half_width: float,
              n: int = _TABLE_POINTS) -> "AxisProfile":
        return cls(hat, box_half_width, synth_axis(hat, n, box_half_width),
                   _axis_coords(n, box_half_width))

    @property
    def center(self) -> float:
        return float(self.table[self.table.size // 2])

    def sample_axis(self, n: int, multiplier: Callable | None = None) -> np.ndarray:
        """Profile values on an ``n``-point axis of the same box."""
        return synth_axis(self.hat, n, self.box_half_width, multiplier)

    def interpolant(self, multiplier: Callable | None = None) -> PeriodicInterpolant:
        n = self.table.size
        vals = self.table if multiplier is None else synth_axis(
            self.hat, n, self.box_half_width, multiplier)
        period = 2.0 * self.box_half_width * np.pi
        return PeriodicInterpolant(vals, -self.box_half_width * np.pi, period,
                                   oversample=_OVERSAMPLE)


def _axis_coords(n: int, box_half_width: float) -> np.ndarray:
    period = 2.0 * box_half_width * np.pi
    return -box_half_width * np.pi + (period / n) * np.arange(n)


def derivative_multiplier(freqs: np.ndarray) -> np.ndarray:
    return 1j * freqs


antiderivative_multiplier = _antiderivative_multiplier


@dataclass
class ProfileSet:
    """All profiles needed by the constructions, bound to one box width.

    ``phi``/``psi`` are the 1D construction profiles, ``phi1``/``psi1``
    their narrowed d-dimensional counterparts.  ``plateau_n0`` is the dyadic
    plateau scale of phi, ``plateau_m0`` the one of phi1 (both scanned, not
    assumed).  Fields on a caller grid are realised by :func:`build_profiles`.
    """

    d: int
    box_half_width: float
    phi: Field
    psi: Field
    phi1: Field
    psi1: Field
    normalizations: dict[str, float]
    plateau_n0: int
    plateau_m0: int
    axis_profiles: dict[str, AxisProfile] = field(repr=False)

    def axis(self, name: str) -> AxisProfile:
        return self.axis_profiles[name]


def _field_from_axis(profile: AxisProfile, grid: UniformPeriodicGrid) -> Field:
    if grid.dim == 1:
        return Field(grid, profile.sample_axis(grid.shape[0]))
    ax0 = profile.sample_axis(grid.shape[0])
    ax1 = profile.sample_axis(grid.shape[1])
    # radial hat restricted to one axis: tensor value profile(x0)*profile(x1)/center
    return Field(grid, np.outer(ax0, ax1) / profile.center)


def build_profiles(grid: UniformPeriodicGrid, d: int | None = None) -> ProfileSet:
    """Realise the four construction profiles on ``grid``'s box.

    ``d`` defaults to ``grid.dim``; the 2D profile radii depend on it.
    """
    if d is None:
        d = grid.dim
    if d != 2 and d != 1:
        raise IllposedError("profiles are provided for d = 1 or 2")
    L = grid.box_half_width
    ax = {
        "phi": AxisProfile.build(low_bump_hat, L),
        "psi": AxisProfile.build(band_hat, L),
        "phi1": AxisProfile.build(lambda r: low_bump_hat_nd(r, d=2), L),
        "psi1": AxisProfile.build(lambda r: band_hat_nd(r, d=2), L),
    }
    norms = {name: p.center for name, p in ax.items()}
    for name, v in norms.items():
        if not v > 0.0:
            raise IllposedError(f"profile {name} has non-positive centre value")
    n0 = plateau_scale(ax["phi"].table, ax["phi"].x_axis, norms["phi"])
    m0 = plateau_scale(ax["phi1"].table, ax["phi1"].x_axis, norms["phi1"])
    return ProfileSet(
        d=d,
        box_half_width=L,
        phi=_field_from_axis(ax["phi"], grid),
        psi=_field_from_axis(ax["psi"], grid),
        phi1=_field_from_axis(ax["phi1"], grid),
        psi1=_field_from_axis(ax["psi1"], grid),
        normalizations=norms,
        plateau_n0=n0,
        plateau_m0=m0,
        axis_profiles=ax,
    )
