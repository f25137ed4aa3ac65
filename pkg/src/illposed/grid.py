"""Uniform periodic grids and real scalar fields with a cached spectral view.

The computational domain is the periodic box [-L*pi, L*pi]^dim with
L = box_half_width.  Axis coordinates are x_i = -L*pi + i*h with
h = 2*L*pi / n, so the DFT frequencies are integer multiples of 1/L.
All fields are real; spectra are stored in ``rfftn`` layout (real FFT
along the last axis).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import IllposedError

#: worker threads handed to scipy.fft; transforms stay deterministic.
FFT_WORKERS = 2

DEFAULT_BOX_HALF_WIDTH = 16.0


def _as_shape(dim: int, points_per_axis) -> tuple[int, ...]:
    if np.isscalar(points_per_axis):
        return (int(points_per_axis),) * dim
    shape = tuple(int(n) for n in points_per_axis)
    if len(shape) != dim:
        raise IllposedError(f"expected {dim} axis sizes, got {shape}")
    return shape


@dataclass(frozen=True)
class UniformPeriodicGrid:
    """Discretisation of the periodic box [-L*pi, L*pi]^dim.

    ``points_per_axis`` may be a single power of two (square grid) or, for
    dim == 2, a pair of powers of two.  Anisotropic point counts let the
    oscillation axis carry high frequencies while the transverse axis only
    needs to contain the O(1)-wide profile spectra.
    """

    dim: int
    shape: tuple[int, ...]
    box_half_width: float = DEFAULT_BOX_HALF_WIDTH

    def __init__(self, dim, points_per_axis, box_half_width=DEFAULT_BOX_HALF_WIDTH):
        if dim not in (1, 2):
            raise IllposedError("dim must be 1 or 2")
        shape = _as_shape(dim, points_per_axis)
        for n in shape:
            if n < 16 or (n & (n - 1)) != 0:
                raise IllposedError(f"points per axis must be a power of two >= 16, got {n}")
        if box_half_width <= 0:
            raise IllposedError("box_half_width must be positive")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "box_half_width", float(box_half_width))

    @property
    def points_per_axis(self) -> int:
        return self.shape[0]

    @property
    def period(self) -> float:
        return 2.0 * self.box_half_width * np.pi

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(self.period / n for n in self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis(self, i: int) -> np.ndarray:
        """Physical coordinates along axis ``i`` (origin at index n//2)."""
        n = self.shape[i]
        h = self.period / n
        return -self.box_half_width * np.pi + h * np.arange(n)

    @property
    def origin_index(self) -> tuple[int, ...]:
        return tuple(n // 2 for n in self.shape)

    def freq_axis(self, i: int) -> np.ndarray:
        """Angular frequencies along axis ``i`` in the FFT layout.

        The last axis uses the half-spectrum (rfft) layout, earlier axes the
        full fftfreq layout.  Frequencies are physical: multiples of 1/L.
        """
        n = self.shape[i]
        h = self.period / n
        if i == self.dim - 1:
            return sfft.rfftfreq(n, d=h) * 2.0 * np.pi
        return sfft.fftfreq(n, d=h) * 2.0 * np.pi

    def freq_meshes(self) -> tuple[np.ndarray, ...]:
        """Broadcastable frequency arrays, one per axis."""
        axes = []
        for i in range(self.dim):
            k = self.freq_axis(i)
            sh = [1] * self.dim
            sh[i] = k.size
            axes.append(k.reshape(sh))
        return tuple(axes)

    def freq_radius(self) -> np.ndarray:
        """|xi| on the spectral grid (rfftn layout)."""
        meshes = self.freq_meshes()
        out = meshes[0] ** 2
        for k in meshes[1:]:
            out = out + k**2
        return np.sqrt(out)

    def nyquist(self, i: int | None = None) -> float:
        """Largest representable |frequency| along axis ``i`` (max axis if None)."""
        if i is None:
            return max(self.nyquist(j) for j in range(self.dim))
        return self.shape[i] / (2.0 * self.box_half_width)

    def spectral_shape(self) -> tuple[int, ...]:
        sh = list(self.shape)
        sh[-1] = sh[-1] // 2 + 1
        return tuple(sh)

    def dealias_mask(self) -> np.ndarray:
        """Boolean 2/3-rule mask in the spectral layout (per-axis cut)."""
        mask = np.ones(self.spectral_shape(), dtype=bool)
        for i in range(self.dim):
            k = self.freq_axis(i)
            keep = np.abs(k) <= (2.0 / 3.0) * self.nyquist(i)
            sh = [1] * self.dim
            sh[i] = k.size
            mask = mask & keep.reshape(sh)
        return mask

    def __eq__(self, other):
        return (
            isinstance(other, UniformPeriodicGrid)
            and self.dim == other.dim
            and self.shape == other.shape
            and self.box_half_width == other.box_half_width
        )

    def __hash__(self):
        return hash((self.dim, self.shape, self.box_half_width))


class Field:
    """Real function sampled on a :class:`UniformPeriodicGrid`.

    The spectral view (`spectrum`) is the rfftn of the samples and is cached
    lazily; fields are treated as immutable once constructed.
    """

    __slots__ = ("grid", "samples", "_spectrum")

    def __init__(self, grid: UniformPeriodicGrid, samples: np.ndarray, spectrum=None):
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != grid.shape:
            raise IllposedError(f"samples shape {samples.shape} != grid shape {grid.shape}")
        self.grid = grid
        self.samples = samples
        self._spectrum = spectrum

    @classmethod
    def zeros(cls, grid: UniformPeriodicGrid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_spectrum(cls, grid: UniformPeriodicGrid, spectrum: np.ndarray) -> "Field":
        samples = sfft.irfftn(spectrum, s=grid.shape, workers=FFT_WORKERS)
        return cls(grid, samples, spectrum=np.asarray(spectrum, dtype=np.complex128))

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = sfft.rfftn(self.samples, workers=FFT_WORKERS)
        return self._spectrum

    def with_spectrum_multiplier(self, mult: np.ndarray) -> "Field":
        return Field.from_spectrum(self.grid, self.spectrum * mult)

    def value_at_origin(self) -> float:
        return float(self.samples[self.grid.origin_index])

    # small arithmetic surface used by the constructions and experiments
    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.samples - other.samples)

    def __mul__(self, c: float) -> "Field":
        return Field(self.grid, self.samples * float(c))

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "Field":
        return Field(self.grid, self.samples / float(c))

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.samples)

    def _check(self, other: "Field"):
        if self.grid != other.grid:
            raise IllposedError("fields live on different grids")


_MAGIC_NOTE = "int64 header entries, float64 box half-width, row-major float64 samples"


def write_field(f: Field, path) -> None:
    """Write the flat little-endian binary layout.

    Header: dim, points per axis (one int64 per axis), box_half_width; then
    the row-major float64 samples.
    """
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<q", g.dim))
        for n in g.shape:
            fh.write(struct.pack("<q", n))
        fh.write(struct.pack("<d", g.box_half_width))
        fh.write(f.samples.astype("<f8").tobytes(order="C"))


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        (dim,) = struct.unpack("<q", fh.read(8))
        if dim not in (1, 2):
            raise IllposedError(f"bad field file: dim={dim}")
        shape = tuple(struct.unpack("<q", fh.read(8))[0] for _ in range(dim))
        (half_width,) = struct.unpack("<d", fh.read(8))
        grid = UniformPeriodicGrid(dim, shape, half_width)
        data = np.frombuffer(fh.read(8 * grid.size), dtype="<f8").reshape(shape)
    return Field(grid, data.copy())


def field_to_csv(f: Field, path) -> None:
    """Index columns followed by the sample value, one grid point per row."""
    g = f.grid
    with open(path, "w") as fh:
        if g.dim == 1:
            fh.write("i,value\n")
            for i, v in enumerate(f.samples):
                fh.write(f"{i},{v!r}\n")
        else:
            fh.write("i,j,value\n")
            for i in range(g.shape[0]):
                row = f.samples[i]
                for j in range(g.shape[1]):
                    fh.write(f"{i},{j},{row[j]!r}\n")
