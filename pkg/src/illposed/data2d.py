"""Divergence-free 2D initial data built from rotated stream-type shells.

The main datum is u0 = sum_{j=3}^{j_max} 2^{-j(s+1)} * perp_grad(f_j) with

    f_j(x) = (8/11) sin((11/8) 2^j x1) * bump(x1) * bump(x2),

where bump = phi1 / phi1(0) and perp_grad = (d/dx2, -d/dx1); divergence
vanishes identically.  The perturbation subtracts (1/n) perp_grad(Phi2) with

    Phi2(x) = psi1_antideriv(x2) * psi1(x1) / psi1(0)^2,

so d/dx2 Phi2 = psi1(x1) psi1(x2) / psi1(0)^2 equals 1 at the origin.  Phi2
and its rotated gradient live below the j = 0 band, hence all blocks j >= 0
of the perturbed and unperturbed data coincide.

The time-zero datum swaps each shell's x2 factor for the antiderivative
profile and carries the peak normalisation 2^{2s+3}(2^s - 1).

Axis-2 of the grid only has to contain the O(1)-wide profile spectra; the
transverse profile psi1 reaches |xi| ~ 0.54, so axis-2 needs at least 32
points on the default box for the perturbation identities to be exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data1d import OSCILLATION_RATE
from .errors import UnresolvedShell
from .euler_types import VectorField
from .grid import UniformPeriodicGrid
from .profiles import ProfileSet, antiderivative_multiplier, derivative_multiplier
from .sampling import PeriodicInterpolant

DEFAULT_J_MIN = 3


@dataclass(frozen=True)
class DataSpec2D:
    """Parameters of the 2D datum."""

    s: float
    j_max: int
    j_min: int = DEFAULT_J_MIN


def _require_resolution(spec: DataSpec2D, grid: UniformPeriodicGrid):
    need = (8.0 / 3.0) * 2.0**spec.j_max
    if need > grid.nyquist(0):
        raise UnresolvedShell(
            f"2D datum with j_max={spec.j_max} needs axis-0 Nyquist > {need:.0f}, "
            f"grid has {grid.nyquist(0):.0f}"
        )


class _BumpAxes:
    """phi1-family samples on both grid axes, already peak-normalised."""

    def __init__(self, profiles: ProfileSet, grid: UniformPeriodicGrid):
        ax = profiles.axis("phi1")
        c = profiles.normalizations["phi1"]
        self.b0 = ax.sample_axis(grid.shape[0]) / c
        self.b1 = ax.sample_axis(grid.shape[1]) / c
        self.db0 = ax.sample_axis(grid.shape[0], derivative_multiplier) / c
        self.db1 = ax.sample_axis(grid.shape[1], derivative_multiplier) / c


def _shell_components(spec, j, x0, bump0, dbump0, bump1_or_psi, dbump1_or_dpsi):
    """Components of 2^{-j(s+1)} perp_grad[ (8/11) sin(lam x1) bump(x1) g(x2) ].

    Returns (u1, u2) as outer-product-ready axis arrays:
    u1 = c sin(lam x1) bump(x1) (x) g'(x2),
    u2 = -c [lam cos(lam x1) bump(x1) + sin(lam x1) bump'(x1)] (x) g(x2).
    """
    lam = OSCILLATION_RATE * 2.0**j
    c = 2.0 ** (-j * (spec.s + 1.0)) / OSCILLATION_RATE
    sin0 = np.sin(lam * x0)
    cos0 = np.cos(lam * x0)
    f0 = c * sin0 * bump0
    g0 = -c * (lam * cos0 * bump0 + sin0 * dbump0)
    return np.outer(f0, dbump1_or_dpsi), np.outer(g0, bump1_or_psi)


def build_u0_2d(spec: DataSpec2D, profiles: ProfileSet,
                grid: UniformPeriodicGrid) -> VectorField:
    """Assemble the divergence-free 2D datum on ``grid``."""
    _require_resolution(spec, grid)
    a = _BumpAxes(profiles, grid)
    x0 = grid.axis(0)
    u1 = np.zeros(grid.shape)
    u2 = np.zeros(grid.shape)
    for j in range(spec.j_min, spec.j_max + 1):
        s1, s2 = _shell_components(spec, j, x0, a.b0, a.db0, a.b1, a.db1)
        u1 += s1
        u2 += s2
    return VectorField.make(grid, u1, u2, divergence_free=True)


def shell_velocity_2d(spec: DataSpec2D, j: int, profiles: ProfileSet,
                      grid: UniformPeriodicGrid) -> VectorField:
    """The single band-j velocity contribution (closed form)."""
    a = _BumpAxes(profiles, grid)
    s1, s2 = _shell_components(spec, j, grid.axis(0), a.b0, a.db0, a.b1, a.db1)
    return VectorField.make(grid, s1, s2, divergence_free=True)


def build_perturbation_field(profiles: ProfileSet, grid: UniformPeriodicGrid) -> VectorField:
    """perp_grad(Phi2): the divergence-free perturbation direction."""
    ax = profiles.axis("psi1")
    c = profiles.normalizations["psi1"]
    band0 = ax.sample_axis(grid.shape[0]) / c
    band1 = ax.sample_axis(grid.shape[1]) / c
    dband0 = ax.sample_axis(grid.shape[0], derivative_multiplier) / c
    anti1 = ax.sample_axis(grid.shape[1], antiderivative_multiplier) / c
    g1 = np.outer(band0, band1)          # d/dx2 Phi2
    g2 = -np.outer(dband0, anti1)        # -d/dx1 Phi2
    return VectorField.make(grid, g1, g2, divergence_free=True)


def build_perturbation_2d(spec: DataSpec2D, n: int, profiles: ProfileSet,
                          grid: UniformPeriodicGrid) -> VectorField:
    """u0 minus the 1/n rotated-gradient bump."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u0 = build_u0_2d(spec, profiles, grid)
    g = build_perturbation_field(profiles, grid)
    return u0 - g * (1.0 / n)


def slope_normalisation(s: float) -> float:
    """Peak factor 2^{2s+3}(2^s - 1) of the time-zero datum."""
    return 2.0 ** (2.0 * s + 3.0) * (2.0**s - 1.0)


def appendix_shell_2d(s: float, j: int, profiles: ProfileSet,
                      grid: UniformPeriodicGrid, normalised: bool = True) -> VectorField:
    """Band-j term of the time-zero datum (closed form)."""
    axp = profiles.axis("phi1")
    axs = profiles.axis("psi1")
    cp = profiles.normalizations["phi1"]
    cs = profiles.normalizations["psi1"]
    bump0 = axp.sample_axis(grid.shape[0]) / cp
    dbump0 = axp.sample_axis(grid.shape[0], derivative_multiplier) / cp
    band1 = axs.sample_axis(grid.shape[1]) / cs
    anti1 = axs.sample_axis(grid.shape[1], antiderivative_multiplier) / cs
    x0 = grid.axis(0)
    lam = OSCILLATION_RATE * 2.0**j
    amp = slope_normalisation(s) * 2.0 ** (-j * (s + 1.0))
    cos0 = np.cos(lam * x0)
    sin0 = np.sin(lam * x0)
    # stream factor G_j = cos(lam x1) bump(x1) * anti(x2); components (d2, -d1)
    u1 = amp * np.outer(cos0 * bump0, band1)
    u2 = amp * np.outer(lam * sin0 * bump0 - cos0 * dbump0, anti1)
    return VectorField.make(grid, u1, u2, divergence_free=True)


def build_appendix_u0(s: float, profiles: ProfileSet, grid: UniformPeriodicGrid,
                      j_max: int, j_min: int = DEFAULT_J_MIN) -> VectorField:
    """Divergence-free datum for the time-zero discontinuity run."""
    _require_resolution(DataSpec2D(s=s, j_max=j_max, j_min=j_min), grid)
    u1 = np.zeros(grid.shape)
    u2 = np.zeros(grid.shape)
    for j in range(j_min, j_max + 1):
        sh = appendix_shell_2d(s, j, profiles, grid)
        u1 += sh.samples(0)
        u2 += sh.samples(1)
    return VectorField.make(grid, u1, u2, divergence_free=True)


class ShellSum2D:
    """Closed-form pointwise evaluator of a 2D datum's velociy components.

    ``bump_weight`` adds the perturbation direction with that coefficient
    (use -1/n for the perturbed datum).  ``appendix`` switches to the
    time-zero datum with amplitude ``slope_normalisation(s)``.
    """

    def __init__(self, spec: DataSpec2D, profiles: ProfileSet,
                 bump_weight: float = 0.0, appendix: bool = False):
        self.spec = spec
        self.appendix = appendix
        cp = profiles.normalizations["phi1"]
        cs = profiles.normalizations["psi1"]
        axp = profiles.axis("phi1")
        axs = profiles.axis("psi1")
        self._bump = axp.interpolant()
        self._dbump = axp.interpolant(derivative_multiplier)
        self._cp = cp
        self.bump_weight = float(bump_weight)
        if bump_weight != 0.0 or appendix:
            self._band = axs.interpolant()
            self._dband = axs.interpolant(derivative_multiplier)
            self._anti = axs.interpolant(antiderivative_multiplier)
            self._cs = cs

    def value(self, y0: np.ndarray, y1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.appendix:
            return self._appendix_value(y0, y1)
        b0 = self._bump(y0) / self._cp
        b1 = self._bump(y1) / self._cp
        db0 = self._dbump(y0) / self._cp
        db1 = self._dbump(y1) / self._cp
        u1 = np.zeros(np.shape(y0))
        u2 = np.zeros(np.shape(y0))
        for j in range(self.spec.j_min, self.spec.j_max + 1):
            lam = OSCILLATION_RATE * 2.0**j
            c = 2.0 ** (-j * (self.spec.s + 1.0)) / OSCILLATION_RATE
            sin0 = np.sin(lam * y0)
            cos0 = np.cos(lam * y0)
            u1 += c * sin0 * b0 * db1
            u2 -= c * (lam * cos0 * b0 + sin0 * db0) * b1
        if self.bump_weight != 0.0:
            band0 = self._band(y0) / self._cs
            band1 = self._band(y1) / self._cs
            dband0 = self._dband(y0) / self._cs
            anti1 = self._anti(y1) / self._cs
            u1 += self.bump_weight * band0 * band1
            u2 -= self.bump_weight * dband0 * anti1
        return u1, u2

    def _appendix_value(self, y0, y1):
        b0 = self._bump(y0) / self._cp
        db0 = self._dbump(y0) / self._cp
        band1 = self._band(y1) / self._cs
        anti1 = self._anti(y1) / self._cs
        amp0 = slope_normalisation(self.spec.s)
        u1 = np.zeros(np.shape(y0))
        u2 = np.zeros(np.shape(y0))
        for j in range(self.spec.j_min, self.spec.j_max + 1):
            lam = OSCILLATION_RATE * 2.0**j
            amp = amp0 * 2.0 ** (-j * (self.spec.s + 1.0))
            cos0 = np.cos(lam * y0)
            sin0 = np.sin(lam * y0)
            u1 += amp * cos0 * b0 * band1
            u2 += amp * (lam * sin0 * b0 - cos0 * db0) * anti1
        return u1, u2
