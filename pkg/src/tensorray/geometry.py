"""Discretization of line space and of R^n.

Direction quadrature on the unit sphere (antipodally symmetric product
rules), deterministic orthonormal frames of xi-perp, uniform grids on the
hyperplanes xi-perp, and truncated quadrature rules for line integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "LineRule",
    "PlaneGrid",
    "SphereAtlas",
    "build_atlas",
    "frame_of",
    "integrate_plane",
    "sphere_area",
    "sphere_monomial_moment",
]


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1}."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def sphere_monomial_moment(n: int, alpha) -> float:
    """Closed-form moment int_{S^{n-1}} xi^alpha dxi for a multi-exponent alpha."""
    alpha = tuple(alpha)
    if len(alpha) != n:
        raise ValueError("one exponent per axis required")
    if any(a % 2 for a in alpha):
        return 0.0
    num = 2 * math.prod(math.gamma((a + 1) / 2) for a in alpha)
    return num / math.gamma((n + sum(alpha)) / 2)


@dataclass(frozen=True)
class LineRule:
    """Quadrature rule for int_{-inf}^{inf} g(t) dt truncated to [-t_max, t_max].

    Uniform trapezoid nodes; for Gaussian-type integrands the error decays
    exponentially in 1/spacing, so modest node counts reach round-off.
    """

    t_max: float
    n_t: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, t_max: float = 12.0, n_t: int = 97) -> "LineRule":
        if t_max <= 0 or n_t < 3:
            raise ValueError("need t_max > 0 and n_t >= 3")
        nodes = np.linspace(-t_max, t_max, n_t)
        h = nodes[1] - nodes[0]
        weights = np.full(n_t, h)
        weights[0] = weights[-1] = h / 2
        nodes.setflags(write=False)
        weights.setflags(write=False)
        return cls(t_max=float(t_max), n_t=int(n_t), nodes=nodes, weights=weights)


@dataclass(frozen=True)
class PlaneGrid:
    """Uniform (n-1)-dimensional grid on a window [-L, L]^{n-1} in frame coordinates.

    Midpoint nodes u_k = -L + (k + 1/2) h with h = 2L/N; the node set is
    symmetric under u -> -u, which keeps parity checks exact on nodes.
    """

    half_extent: float
    points: int
    axis: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, half_extent: float, points: int) -> "PlaneGrid":
        if half_extent <= 0 or points < 2:
            raise ValueError("need half_extent > 0 and points >= 2")
        h = 2 * half_extent / points
        axis = -half_extent + (np.arange(points) + 0.5) * h
        axis.setflags(write=False)
        return cls(half_extent=float(half_extent), points=int(points), axis=axis)

    @property
    def spacing(self) -> float:
        return 2 * self.half_extent / self.points

    def nodes(self, dim: int) -> np.ndarray:
        """All frame-coordinate nodes as an array of shape (points^dim, dim)."""
        grids = np.meshgrid(*([self.axis] * dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def embed(self, frame: np.ndarray) -> np.ndarray:
        """Ambient coordinates of all nodes for a frame of shape (dim, n)."""
        return self.nodes(frame.shape[0]) @ frame

    def freq_axis(self) -> np.ndarray:
        """FFT frequency nodes 2*pi*fftfreq(N, h) along one axis (FFT order)."""
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)


def frame_of(xi: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of xi-perp, shape (n-1, n).

    The basis vectors are the images of e_1..e_{n-1} under the Householder
    reflection through v = xi + s e_n with s = sign(xi_n) (tie -> +1); the
    reflection exchanges the e_n axis with +-xi, so the images span xi-perp.
    """
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[0]
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise ValueError("frame_of expects a unit vector")
    s = 1.0 if xi[n - 1] >= 0.0 else -1.0
    v = xi.copy()
    v[n - 1] += s
    H = np.eye(n) - 2.0 * np.outer(v, v) / np.dot(v, v)
    return H[:, :-1].T.copy()


@dataclass(frozen=True)
class SphereAtlas:
    """Antipodally symmetric quadrature atlas on S^{n-1}.

    directions[k] is a unit vector, weights sum to |S^{n-1}|, frames[k] is an
    orthonormal basis of directions[k]-perp, and antipode[k] gives the index
    of the exactly negated direction.  Antipodal mates share the same frame so
    that their plane grids embed to identical point sets.
    """

    n: int
    directions: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    frames: np.ndarray = field(repr=False)
    antipode: np.ndarray = field(repr=False)
    degree: int
    params: dict = field(repr=False)

    def __len__(self) -> int:
        return self.directions.shape[0]

    def integrate(self, values: np.ndarray) -> complex:
        """Quadrature over the sphere of per-direction values."""
        return complex(np.sum(self.weights * np.asarray(values)))

    # Structured angle metadata for direction interpolation (product atlases).

    def angle_grid(self):
        """(polar_u_nodes, azimuth_count) for n=3; (angles,) for n=2."""
        return self.params.get("angle_grid")


def _atlas_2d(count: int) -> SphereAtlas:
    if count < 4 or count % 2:
        raise ValueError("n=2 atlas needs an even direction count >= 4")
    half = count // 2
    theta = 2 * np.pi * np.arange(half) / count
    pos = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    directions = np.concatenate([pos, -pos], axis=0)
    weights = np.full(count, 2 * np.pi / count)
    frames = np.stack([np.stack([-d[1:2], d[0:1]], axis=0).reshape(1, 2) for d in pos])
    frames = np.concatenate([frames, frames], axis=0)
    antipode = np.concatenate([np.arange(half) + half, np.arange(half)])
    return SphereAtlas(
        n=2,
        directions=directions,
        weights=weights,
        frames=frames,
        antipode=antipode,
        degree=count - 1,
        params={"family": "uniform2d", "count": count,
                "angle_grid": (np.concatenate([theta, theta + np.pi]),)},
    )


def _atlas_3d(n_polar: int, n_azimuth: int) -> SphereAtlas:
    if n_polar < 2 or n_polar % 2:
        raise ValueError("n=3 atlas needs an even polar count >= 2")
    if n_azimuth < 4 or n_azimuth % 2:
        raise ValueError("n=3 atlas needs an even azimuth count >= 4")
    u, wu = roots_legendre(n_polar)
    order = np.argsort(u)
    u, wu = u[order], wu[order]
    # enforce exact +-u symmetry of the Legendre nodes
    u = (u - u[::-1]) / 2
    wu = (wu + wu[::-1]) / 2
    pos_sel = u > 0
    u_pos, wu_pos = u[pos_sel], wu[pos_sel]

    phi = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
    cphi, sphi = np.cos(phi), np.sin(phi)

    dirs_pos = []
    w_pos = []
    for uk, wk in zip(u_pos, wu_pos):
        r = math.sqrt(1.0 - uk * uk)
        ring = np.stack([r * cphi, r * sphi, np.full(n_azimuth, uk)], axis=-1)
        dirs_pos.append(ring)
        w_pos.append(np.full(n_azimuth, wk * 2 * np.pi / n_azimuth))
    dirs_pos = np.concatenate(dirs_pos, axis=0)
    w_pos = np.concatenate(w_pos)

    directions = np.concatenate([dirs_pos, -dirs_pos], axis=0)
    weights = np.concatenate([w_pos, w_pos])
    half = dirs_pos.shape[0]
    antipode = np.concatenate([np.arange(half) + half, np.arange(half)])

    frames_pos = np.stack([frame_of(d / np.linalg.norm(d)) for d in dirs_pos])
    frames = np.concatenate([frames_pos, frames_pos], axis=0)

    norms = np.linalg.norm(directions, axis=1)
    directions = directions / norms[:, None]

    return SphereAtlas(
        n=3,
        directions=directions,
        weights=weights,
        frames=frames,
        antipode=antipode,
        degree=min(2 * n_polar - 1, n_azimuth - 1),
        params={"family": "gl_uniform", "n_polar": n_polar, "n_azimuth": n_azimuth,
                "angle_grid": (np.concatenate([u_pos, -u_pos]), n_azimuth)},
    )


def _atlas_4d(n_polar: int, n_inner: int) -> SphereAtlas:
    """Product rule on S^3: Gauss-Jacobi(1/2,1/2) in cos(theta1) x S^2 rule."""
    if n_polar < 2 or n_polar % 2:
        raise ValueError("n=4 atlas needs an even polar count >= 2")
    u, wu = roots_jacobi(n_polar, 0.5, 0.5)
    order = np.argsort(u)
    u, wu = u[order], wu[order]
    u = (u - u[::-1]) / 2
    wu = (wu + wu[::-1]) / 2
    inner = _atlas_3d(n_inner, 2 * n_inner)

    pos_sel = u > 0
    dirs_pos = []
    w_pos = []
    for uk, wk in zip(u[pos_sel], wu[pos_sel]):
        r = math.sqrt(1.0 - uk * uk)
        block = np.concatenate([r * inner.directions,
                                np.full((len(inner), 1), uk)], axis=1)
        dirs_pos.append(block)
        w_pos.append(wk * inner.weights)
    dirs_pos = np.concatenate(dirs_pos, axis=0)
    w_pos = np.concatenate(w_pos)

    directions = np.concatenate([dirs_pos, -dirs_pos], axis=0)
    norms = np.linalg.norm(dirs_pos, axis=1)
    dirs_unit = dirs_pos / norms[:, None]
    directions = np.concatenate([dirs_unit, -dirs_unit], axis=0)
    weights = np.concatenate([w_pos, w_pos])
    half = dirs_pos.shape[0]
    antipode = np.concatenate([np.arange(half) + half, np.arange(half)])
    frames_pos = np.stack([frame_of(d) for d in dirs_unit])
    frames = np.concatenate([frames_pos, frames_pos], axis=0)
    return SphereAtlas(
        n=4,
        directions=directions,
        weights=weights,
        frames=frames,
        antipode=antipode,
        degree=min(2 * n_polar - 1, inner.degree),
        params={"family": "jacobi_gl_uniform", "n_polar": n_polar, "n_inner": n_inner},
    )


def build_atlas(n: int, resolution) -> SphereAtlas:
    """Direction quadrature on S^{n-1} for n in {2, 3, 4}.

    resolution: n=2 -> direction count (even); n=3 -> polar ring count or a
    (n_polar, n_azimuth) pair; n=4 -> polar count or (n_polar, n_inner).
    """
    if n == 2:
        return _atlas_2d(int(resolution))
    if n == 3:
        if isinstance(resolution, (tuple, list)):
            n_polar, n_azimuth = map(int, resolution)
        else:
            n_polar, n_azimuth = int(resolution), 2 * int(resolution)
        return _atlas_3d(n_polar, n_azimuth)
    if n == 4:
        if isinstance(resolution, (tuple, list)):
            n_polar, n_inner = map(int, resolution)
        else:
            n_polar, n_inner = int(resolution), int(resolution)
        return _atlas_4d(n_polar, n_inner)
    raise ValueError(f"unsupported dimension n={n}; atlases exist for n in 2..4")


def integrate_plane(values: np.ndarray, grid: PlaneGrid, dim: int) -> complex:
    """Midpoint quadrature over the window: h^dim * sum(values)."""
    values = np.asarray(values)
    if not np.all(np.isfinite(values.view(float) if np.iscomplexobj(values) else values)):
        raise ValueError("non-finite values in plane quadrature")
    return complex(values.sum() * grid.spacing ** dim)


def atlas_to_csv(atlas: SphereAtlas) -> str:
    """Direction components and weight per row, for inspection."""
    lines = [",".join([f"xi{i+1}" for i in range(atlas.n)] + ["weight"])]
    for d, w in zip(atlas.directions, atlas.weights):
        lines.append(",".join(f"{c!r}" for c in d) + f",{w!r}")
    return "\n".join(lines) + "\n"
