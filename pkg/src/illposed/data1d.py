"""Explicit 1D initial data: a lacunary cosine sum with a bump envelope.

The datum is

    u0(x) = sum_{j=3}^{j_max} 2^{-j s} * envelope(x) * cos((11/8) 2^j x)

with envelope = gamma(s) * phi / phi(0) and gamma(s) = 2^{2s}(2^s - 1), so
that u0(0) = 1 up to the truncation tail.  Each summand occupies one dyadic
band exactly: its spectrum sits in (11/8) 2^j +- 1/2, inside the zone where
the band multiplier equals 1 and adjacent multipliers vanish.

The perturbations add (1/n) * psi / psi(0), whose spectrum lies entirely
below the j = 0 band, so every block above -1 of the perturbed datum equals
the corresponding block of u0 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnresolvedShell
from .grid import Field, UniformPeriodicGrid
from .profiles import (ProfileSet, axis_spectrum, band_hat,
                       derivative_multiplier, low_bump_hat, modulation_cos)

OSCILLATION_RATE = 11.0 / 8.0
DEFAULT_J_MIN = 3


def gamma_factor(s: float) -> float:
    """Normalisation 2^{2s}(2^s - 1) making the datum's peak value 1."""
    return 2.0 ** (2.0 * s) * (2.0**s - 1.0)


@dataclass(frozen=True)
class TimeSequence:
    """Oscillation frequency and evaluation time for one perturbation index."""

    n: int
    lambda_n: float
    t_n: float


def time_sequence(n: int) -> TimeSequence:
    """lambda_n = (11/8) 2^n and t_n = (8/11) pi n 2^-n, so lambda_n t_n = n pi."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = OSCILLATION_RATE * 2.0**n
    t = (1.0 / OSCILLATION_RATE) * np.pi * n * 2.0 ** (-n)
    return TimeSequence(n=n, lambda_n=lam, t_n=t)


@dataclass(frozen=True)
class DataSpec1D:
    """Parameters of the 1D datum."""

    s: float
    j_max: int
    j_min: int = DEFAULT_J_MIN

    @property
    def gamma(self) -> float:
        return gamma_factor(self.s)

    def tail_bound(self) -> float:
        """Peak-value deficit from truncating the sum at j_max."""
        return self.gamma * 2.0 ** (-(self.j_max + 1) * self.s) / (1.0 - 2.0 ** (-self.s))


def _require_resolution(spec: DataSpec1D, grid: UniformPeriodicGrid):
    need = (8.0 / 3.0) * 2.0**spec.j_max
    if need > grid.nyquist(0):
        raise UnresolvedShell(
            f"datum with j_max={spec.j_max} needs Nyquist > {need:.0f}, "
            f"grid has {grid.nyquist(0):.0f}"
        )


def _shell_hat(spec: DataSpec1D, j: int, xi: np.ndarray, phi_center: float) -> np.ndarray:
    lam = OSCILLATION_RATE * 2.0**j
    amp = 2.0 ** (-j * spec.s) * spec.gamma / phi_center
    return amp * modulation_cos(low_bump_hat, xi, lam)


def build_u0_1d(spec: DataSpec1D, profiles: ProfileSet, grid: UniformPeriodicGrid) -> Field:
    """Assemble the truncated lacunary sum on ``grid``.

    Synthesised directly from the modulated profile hats, so the spectrum
    carries exact zeros outside the shells and the block identities hold at
    inverse-transform roundoff.
    """
    _require_resolution(spec, grid)
    xi = grid.freq_axis(0)
    coef = np.zeros(xi.size, dtype=np.complex128)
    c = profiles.normalizations["phi"]
    for j in range(spec.j_min, spec.j_max + 1):
        coef += _shell_hat(spec, j, xi, c)
    return Field.from_spectrum(grid, axis_spectrum(coef, grid.shape[0], grid.period))


def shell_summand_1d(spec: DataSpec1D, j: int, profiles: ProfileSet,
                     grid: UniformPeriodicGrid) -> Field:
    """The single band-j term of the datum."""
    xi = grid.freq_axis(0)
    coef = _shell_hat(spec, j, xi, profiles.normalizations["phi"])
    return Field.from_spectrum(grid, axis_spectrum(coef, grid.shape[0], grid.period))


def build_bump_perturbation(profiles: ProfileSet, grid: UniformPeriodicGrid) -> Field:
    """The unit-peak low-frequency bump psi / psi(0)."""
    xi = grid.freq_axis(0)
    coef = band_hat(xi).astype(np.complex128) / profiles.normalizations["psi"]
    return Field.from_spectrum(grid, axis_spectrum(coef, grid.shape[0], grid.period))


def build_perturbation_1d(spec: DataSpec1D, n: int, profiles: ProfileSet,
                          grid: UniformPeriodicGrid) -> Field:
    """u0 plus the 1/n bump."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u0 = build_u0_1d(spec, profiles, grid)
    bump = build_bump_perturbation(profiles, grid)
    return u0 + bump / n


class ShellSum1D:
    """Closed-form pointwise evaluator of the datum and its derivative.

    Used for sub-grid quadrature lattices, where the grid sampling would be
    too coarse for the oscillatory integrands.
    """

    def __init__(self, spec: DataSpec1D, profiles: ProfileSet,
                 bump_weight: float = 0.0):
        self.spec = spec
        norm = profiles.normalizations["phi"]
        self._env = profiles.axis("phi").interpolant()
        self._denv = profiles.axis("phi").interpolant(derivative_multiplier)
        self._scale = spec.gamma / norm
        self.bump_weight = float(bump_weight)
        if bump_weight != 0.0:
            pn = profiles.normalizations["psi"]
            self._bump = profiles.axis("psi").interpolant()
            self._dbump = profiles.axis("psi").interpolant(derivative_multiplier)
            self._bump_norm = pn

    def value(self, x: np.ndarray) -> np.ndarray:
        env = self._scale * self._env(x)
        out = np.zeros(np.shape(x))
        for j in range(self.spec.j_min, self.spec.j_max + 1):
            out += 2.0 ** (-j * self.spec.s) * np.cos(OSCILLATION_RATE * 2.0**j * x)
        out *= env
        if self.bump_weight != 0.0:
            out += self.bump_weight * self._bump(x) / self._bump_norm
        return out

    def derivative(self, x: np.ndarray) -> np.ndarray:
        env = self._scale * self._env(x)
        denv = self._scale * self._denv(x)
        out = np.zeros(np.shape(x))
        for j in range(self.spec.j_min, self.spec.j_max + 1):
            lam = OSCILLATION_RATE * 2.0**j
            a = 2.0 ** (-j * self.spec.s)
            out += a * (denv * np.cos(lam * x) - env * lam * np.sin(lam * x))
        if self.bump_weight != 0.0:
            out += self.bump_weight * self._dbump(x) / self._bump_norm
        return out
