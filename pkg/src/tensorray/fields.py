"""Grid containers for tensor fields in space and frequency.

Both containers hold one complex array per canonical tensor component on a
uniform cube grid.  Spatial grids use midpoint nodes on [-L, L]^n; frequency
grids are the FFT duals with the continuous-transform normalization applied
by the spectral module.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .symtensor import sym_dim

__all__ = ["GridField", "SpectralField", "grid_axis"]


def grid_axis(half_extent: float, points: int) -> np.ndarray:
    h = 2 * half_extent / points
    return -half_extent + (np.arange(points) + 0.5) * h


@dataclass
class GridField:
    """Symmetric m-tensor field sampled on a uniform cube grid.

    values has shape (C, N, ..., N) with C = sym_dim(n, m) canonical
    components and n grid axes.
    """

    n: int
    m: int
    half_extent: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        C = sym_dim(self.n, self.m)
        if self.values.ndim != self.n + 1 or self.values.shape[0] != C:
            raise ValueError(
                f"expected values of shape ({C}, N,...); got {self.values.shape}"
            )
        ext = self.values.shape[1]
        if any(s != ext for s in self.values.shape[1:]):
            raise ValueError("grid must be cubical")

    @property
    def points(self) -> int:
        return self.values.shape[1]

    @property
    def spacing(self) -> float:
        return 2 * self.half_extent / self.points

    def axis(self) -> np.ndarray:
        return grid_axis(self.half_extent, self.points)

    @classmethod
    def from_phantom(cls, ph, half_extent: float, points: int) -> "GridField":
        ax = grid_axis(half_extent, points)
        mesh = np.meshgrid(*([ax] * ph.n), indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=-1)
        vals = ph.eval_components(pts).reshape((sym_dim(ph.n, ph.m),) + (points,) * ph.n)
        return cls(ph.n, ph.m, half_extent, vals)

    def sample_components(self, pts: np.ndarray) -> np.ndarray:
        """Multilinear interpolation of every component at points (..., n).

        Points outside the cube evaluate to 0 (fields are assumed decayed).
        """
        pts = np.asarray(pts, dtype=float)
        coords = (pts - (-self.half_extent + self.spacing / 2)) / self.spacing
        flat = coords.reshape(-1, self.n).T
        out = np.empty((self.values.shape[0],) + pts.shape[:-1], dtype=complex)
        for c in range(self.values.shape[0]):
            re = ndimage.map_coordinates(self.values[c].real, flat, order=1,
                                         mode="constant", cval=0.0)
            im = ndimage.map_coordinates(self.values[c].imag, flat, order=1,
                                         mode="constant", cval=0.0)
            out[c] = (re + 1j * im).reshape(pts.shape[:-1])
        return out

    def rel_l2_diff(self, other: "GridField") -> float:
        num = np.sqrt(np.sum(np.abs(self.values - other.values) ** 2))
        den = np.sqrt(np.sum(np.abs(other.values) ** 2))
        return float(num / den) if den else float(num)


@dataclass
class SpectralField:
    """Fourier coefficients of a GridField on the dual FFT frequency grid.

    values[c][v1,...,vn] approximates the continuous transform at
    y = (freq[v1], ..., freq[vn]) with freq = 2*pi*fftfreq(N, spacing).
    """

    n: int
    m: int
    half_extent: float  # of the originating spatial grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        C = sym_dim(self.n, self.m)
        if self.values.ndim != self.n + 1 or self.values.shape[0] != C:
            raise ValueError(
                f"expected values of shape ({C}, N,...); got {self.values.shape}"
            )

    @property
    def points(self) -> int:
        return self.values.shape[1]

    @property
    def spacing(self) -> float:
        return 2 * self.half_extent / self.points

    def freq_axis(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)

    def freq_mesh(self) -> np.ndarray:
        ax = self.freq_axis()
        mesh = np.meshgrid(*([ax] * self.n), indexing="ij")
        return np.stack(mesh, axis=-1)

    def freq_cell_volume(self) -> float:
        dy = self.freq_axis()
        step = abs(dy[1] - dy[0])
        return step**self.n

    def rel_l2_diff(self, other: "SpectralField") -> float:
        num = np.sqrt(np.sum(np.abs(self.values - other.values) ** 2))
        den = np.sqrt(np.sum(np.abs(other.values) ** 2))
        return float(num / den) if den else float(num)
