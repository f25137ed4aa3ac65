"""Vector fields on 2D grids and the divergence-free projector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllposedError
from .grid import Field, UniformPeriodicGrid
from .spectral import BesovIndex, besov_norm, lp_norm


@dataclass
class VectorField:
    """Two scalar components on a shared 2D grid."""

    components: tuple[Field, Field]
    divergence_free: bool = False

    @classmethod
    def make(cls, grid: UniformPeriodicGrid, u1, u2, divergence_free=False) -> "VectorField":
        return cls((Field(grid, u1), Field(grid, u2)), divergence_free)

    @property
    def grid(self) -> UniformPeriodicGrid:
        return self.components[0].grid

    def component(self, i: int) -> Field:
        return self.components[i]

    def samples(self, i: int) -> np.ndarray:
        return self.components[i].samples

    def spectral_divergence_max(self) -> float:
        """Max modulus of the spectral divergence, normalised per unit amplitude."""
        g = self.grid
        k0, k1 = g.freq_meshes()
        div = 1j * k0 * self.components[0].spectrum + 1j * k1 * self.components[1].spectrum
        scale = g.size  # spectra carry the unnormalised DFT factor
        return float(np.max(np.abs(div)) / scale)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(
            (self.components[0] + other.components[0],
             self.components[1] + other.components[1]),
            self.divergence_free and other.divergence_free,
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(
            (self.components[0] - other.components[0],
             self.components[1] - other.components[1]),
            self.divergence_free and other.divergence_free,
        )

    def __mul__(self, c: float) -> "VectorField":
        return VectorField((self.components[0] * c, self.components[1] * c),
                           self.divergence_free)

    __rmul__ = __mul__

    def lp_norm(self, p: float) -> float:
        """L^p norm of the pointwise Euclidean magnitude."""
        mag = np.hypot(self.samples(0), self.samples(1))
        return lp_norm(Field(self.grid, mag), p)

    def besov_norm(self, idx: BesovIndex, j_max: int) -> float:
        """Componentwise maximum of the scalar norms."""
        return max(besov_norm(c, idx, j_max) for c in self.components)


class LerayProjector:
    """Spectral projection onto divergence-free fields on one grid.

    The zero frequency is passed through unchanged; complementary part
    ``apply_q`` extracts the gradient component, so apply + apply_q = id
    exactly by construction.
    """

    def __init__(self, grid: UniformPeriodicGrid):
        if grid.dim != 2:
            raise IllposedError("the projector is provided on 2D grids")
        self.grid = grid
        k0, k1 = grid.freq_meshes()
        k2 = k0**2 + k1**2
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(k2 > 0.0, 1.0 / k2, 0.0)
        # q_ij = k_i k_j / |k|^2 ; p = id - q
        self._q00 = k0 * k0 * inv
        self._q01 = k0 * k1 * inv
        self._q11 = k1 * k1 * inv

    def apply(self, f: VectorField) -> VectorField:
        s0, s1 = f.components[0].spectrum, f.components[1].spectrum
        p0 = s0 - (self._q00 * s0 + self._q01 * s1)
        p1 = s1 - (self._q01 * s0 + self._q11 * s1)
        return VectorField(
            (Field.from_spectrum(self.grid, p0), Field.from_spectrum(self.grid, p1)),
            divergence_free=True,
        )

    def apply_q(self, f: VectorField) -> VectorField:
        s0, s1 = f.components[0].spectrum, f.components[1].spectrum
        return VectorField(
            (Field.from_spectrum(self.grid, self._q00 * s0 + self._q01 * s1),
             Field.from_spectrum(self.grid, self._q01 * s0 + self._q11 * s1)),
            divergence_free=False,
        )


def leray_project(f: VectorField) -> VectorField:
    """One-shot divergence-free projection of ``f``."""
    return LerayProjector(f.grid).apply(f)
