"""Ray transform of symmetric tensor fields and sinogram machinery.

The transform integrates <f(x + t xi), xi^m> over lines through plane-grid
points x perpendicular to atlas directions xi.  The extension to non-unit
directions multiplies by |xi|^(m-1) after projecting the base point onto
xi-perp, and the same formula extends a sampled sinogram to a function of
(x, xi) with xi ranging over all nonzero vectors, by interpolation.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .geometry import LineRule, PlaneGrid, SphereAtlas
from .symtensor import _index_array, multiplicities, sym_dim

__all__ = [
    "Sinogram",
    "xi_monomials",
    "batch_line_integrals",
    "batch_extended_J",
    "ray_integral",
    "extended_J",
    "transform",
    "PsiExtension",
]

_CHUNK = 1 << 16


def xi_monomials(xis: np.ndarray, n: int, m: int) -> np.ndarray:
    """Multiplicity-weighted direction monomials, shape (C, B).

    Row I holds mult(I) * prod_k xi[I_k] so that a contraction <T, xi^m> is
    the plain dot product of canonical coefficients with these rows.
    """
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    if m == 0:
        return np.ones((1, xis.shape[0]))
    idx = _index_array(n, m)
    mono = np.prod(xis[:, idx], axis=2).T
    return multiplicities(n, m)[:, None] * mono


def batch_line_integrals(f, xs: np.ndarray, xis: np.ndarray, rule: LineRule,
                         chunk: int = _CHUNK) -> np.ndarray:
    """Quadrature of t -> <f(x + t xi), xi^m> for unit directions, batched.

    f must expose eval_components(points) / sample_components(points) and the
    attributes n, m.  xs, xis have shape (B, n); xis must be unit vectors.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    n, m = f.n, f.m
    evaluate = getattr(f, "eval_components", None) or f.sample_components
    B = xs.shape[0]
    weights = xi_monomials(xis, n, m)
    out = np.empty(B, dtype=complex)
    for lo in range(0, B, chunk):
        hi = min(lo + chunk, B)
        pts = xs[lo:hi, None, :] + rule.nodes[None, :, None] * xis[lo:hi, None, :]
        comp = evaluate(pts)  # (C, b, T)
        profile = np.einsum("cb,cbt->bt", weights[:, lo:hi], comp)
        out[lo:hi] = profile @ rule.weights
    if not np.all(np.isfinite(out.view(float))):
        raise ValueError("non-finite field samples in line quadrature")
    return out


def batch_extended_J(f, xs: np.ndarray, xis: np.ndarray, rule: LineRule) -> np.ndarray:
    """Line transform at non-unit directions: |xi|^(m-1) times the unit-speed
    integral over the line through the projection of x onto xi-perp."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    norms = np.linalg.norm(xis, axis=1)
    if np.any(norms == 0):
        raise ValueError("extended transform undefined at xi = 0")
    unit = xis / norms[:, None]
    xproj = xs - np.sum(xs * unit, axis=1)[:, None] * unit
    vals = batch_line_integrals(f, xproj, unit, rule)
    return norms ** (f.m - 1) * vals


def ray_integral(f, x: np.ndarray, xi: np.ndarray, rule: LineRule) -> complex:
    """Single line integral on the incidence manifold (|xi| = 1, x ⟂ xi).

    x is projected onto xi-perp when the incidence defect is within round-off
    tolerance; a genuinely non-unit xi is rejected (use extended_J).
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise ValueError("ray_integral needs a unit direction; see extended_J")
    x = x - np.dot(x, xi) * xi
    return complex(batch_line_integrals(f, x[None, :], xi[None, :], rule)[0])


def extended_J(f, x: np.ndarray, xi: np.ndarray, rule: LineRule) -> complex:
    return complex(batch_extended_J(f, np.asarray(x, dtype=float)[None, :],
                                    np.asarray(xi, dtype=float)[None, :], rule)[0])


@dataclass
class Sinogram:
    """Sampled values phi(x, xi_k) on the atlas: one plane grid per direction."""

    atlas: SphereAtlas
    grid: PlaneGrid
    m: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        K = len(self.atlas)
        shape = (K,) + (self.grid.points,) * (self.atlas.n - 1)
        if self.values.shape != shape:
            raise ValueError(f"expected values of shape {shape}, got {self.values.shape}")

    @property
    def n(self) -> int:
        return self.atlas.n

    @property
    def parity(self) -> str:
        return "even" if self.m % 2 == 0 else "odd"

    def scale_abs(self) -> float:
        return float(np.max(np.abs(self.values))) or 1.0

    def copy_with(self, values: np.ndarray) -> "Sinogram":
        return Sinogram(self.atlas, self.grid, self.m, values)


def transform(f, atlas: SphereAtlas, grid: PlaneGrid, rule: LineRule,
              workers: int = 1) -> Sinogram:
    """Full sinogram of f on the atlas: line integrals at every plane node."""
    K = len(atlas)
    n = atlas.n
    npts = grid.points ** (n - 1)
    values = np.empty((K, npts), dtype=complex)

    def run(k):
        xs = grid.embed(atlas.frames[k])
        xis = np.broadcast_to(atlas.directions[k], (npts, n))
        values[k] = batch_line_integrals(f, xs, xis, rule)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(K)))
    else:
        for k in range(K):
            run(k)
    shape = (K,) + (grid.points,) * (n - 1)
    return Sinogram(atlas, grid, f.m, values.reshape(shape))


class PsiExtension:
    """Interpolating extension of a sinogram off the incidence manifold.

    psi(x, xi) = |xi|^(m-1) phi(x - <x,xi> xi/|xi|^2, xi/|xi|), with phi
    interpolated bilinearly across atlas directions (structured product
    atlases) and by C^2 cubic B-splines on each direction's plane grid.
    Queries outside the spatial window or in the polar gap of the atlas
    return NaN markers, never extrapolations.
    """

    def __init__(self, sino: Sinogram, margin_cells: float = 2.0):
        self.sino = sino
        self.atlas = sino.atlas
        self.m = sino.m
        self.margin = margin_cells * sino.grid.spacing
        dim = self.atlas.n - 1
        self._spline = [
            ndimage.spline_filter(sino.values[k].real, order=3)
            + 1j * ndimage.spline_filter(sino.values[k].imag, order=3)
            for k in range(len(self.atlas))
        ]
        self._dim = dim
        if self.atlas.n == 3:
            u_all, n_az = self.atlas.params["angle_grid"]
            half = len(self.atlas) // 2
            rings = []
            for r, u in enumerate(u_all):
                base = r * n_az if r < len(u_all) // 2 else half + (r - len(u_all) // 2) * n_az
                offset = 0.0 if r < len(u_all) // 2 else math.pi
                rings.append((float(u), base, offset))
            rings.sort(key=lambda t: t[0])
            self._ring_u = np.array([t[0] for t in rings])
            self._ring_base = np.array([t[1] for t in rings], dtype=int)
            self._ring_offset = np.array([t[2] for t in rings])
            self._n_az = n_az
        elif self.atlas.n == 2:
            (angles,) = self.atlas.params["angle_grid"]
            order = np.argsort(angles)
            self._angles = angles[order]
            self._angle_rows = order.astype(int)
        else:
            raise ValueError("psi extension supports n in {2, 3}")

    # -- direction stencils ---------------------------------------------------

    def _direction_stencil(self, omega: np.ndarray):
        """Rows and weights of the direction interpolation, shape (Q, S)."""
        Q = omega.shape[0]
        if self.atlas.n == 2:
            theta = np.mod(np.arctan2(omega[:, 1], omega[:, 0]), 2 * math.pi)
            K = len(self.atlas)
            step = 2 * math.pi / K
            jf = theta / step
            j0 = np.floor(jf).astype(int) % K
            w = jf - np.floor(jf)
            rows = np.stack([self._angle_rows[j0], self._angle_rows[(j0 + 1) % K]], axis=1)
            weights = np.stack([1 - w, w], axis=1)
            return rows, weights, np.zeros(Q, dtype=bool)

        u = np.clip(omega[:, 2], -1.0, 1.0)
        phi = np.mod(np.arctan2(omega[:, 1], omega[:, 0]), 2 * math.pi)
        out_of_band = (u < self._ring_u[0]) | (u > self._ring_u[-1])
        i1 = np.clip(np.searchsorted(self._ring_u, u), 1, len(self._ring_u) - 1)
        i0 = i1 - 1
        du = self._ring_u[i1] - self._ring_u[i0]
        wu = np.where(du > 0, (u - self._ring_u[i0]) / np.where(du > 0, du, 1.0), 0.0)
        step = 2 * math.pi / self._n_az
        rows = np.empty((Q, 4), dtype=int)
        weights = np.empty((Q, 4))
        for side, (ring, wr) in enumerate([(i0, 1 - wu), (i1, wu)]):
            phi_loc = np.mod(phi - self._ring_offset[ring], 2 * math.pi)
            jf = phi_loc / step
            j0 = np.floor(jf).astype(int) % self._n_az
            wphi = jf - np.floor(jf)
            base = self._ring_base[ring]
            rows[:, 2 * side] = base + j0
            rows[:, 2 * side + 1] = base + (j0 + 1) % self._n_az
            weights[:, 2 * side] = wr * (1 - wphi)
            weights[:, 2 * side + 1] = wr * wphi
        return rows, weights, out_of_band

    # -- plane samples ----------------------------------------------------------

    def _plane_values(self, rows: np.ndarray, pts: np.ndarray) -> np.ndarray:
        """phi_k at the projections of the points onto each row's plane."""
        grid = self.sino.grid
        Q, S = rows.shape
        vals = np.empty((Q, S), dtype=complex)
        origin = grid.axis[0]
        limit = grid.half_extent - self.margin
        flat_rows = rows.ravel()
        rep_pts = np.repeat(pts, S, axis=0)
        order = np.argsort(flat_rows, kind="stable")
        flat_vals = np.empty(Q * S, dtype=complex)
        sorted_rows = flat_rows[order]
        boundaries = np.searchsorted(sorted_rows, np.arange(len(self.atlas) + 1))
        for k in range(len(self.atlas)):
            lo, hi = boundaries[k], boundaries[k + 1]
            if lo == hi:
                continue
            sel = order[lo:hi]
            p = rep_pts[sel]
            xi = self.atlas.directions[k]
            p = p - np.outer(p @ xi, xi)
            u = p @ self.atlas.frames[k].T  # (q, dim)
            inside = np.all(np.abs(u) <= limit, axis=1)
            coords = ((u - origin) / grid.spacing).T
            sp = self._spline[k]
            got = ndimage.map_coordinates(sp.real, coords, order=3, prefilter=False,
                                          mode="nearest")
            got = got + 1j * ndimage.map_coordinates(sp.imag, coords, order=3,
                                                     prefilter=False, mode="nearest")
            got = np.where(inside, got, np.nan + 1j * np.nan)
            flat_vals[sel] = got
        return flat_vals.reshape(Q, S)

    def in_window(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return np.isfinite(self.eval_batch_xxi(x, xi).real)

    def eval_batch_xxi(self, xs: np.ndarray, xis: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        xis = np.atleast_2d(np.asarray(xis, dtype=float))
        norms = np.linalg.norm(xis, axis=1)
        if np.any(norms == 0):
            raise ValueError("psi undefined at xi = 0")
        omega = xis / norms[:, None]
        xproj = xs - np.sum(xs * omega, axis=1)[:, None] * omega
        rows, weights, bad = self._direction_stencil(omega)
        vals = self._plane_values(rows, xproj)
        out = np.sum(weights * vals, axis=1)
        out = np.where(bad, np.nan + 1j * np.nan, out)
        return norms ** (self.m - 1) * out

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at stacked phase-space points of shape (Q, 2n)."""
        n = self.atlas.n
        points = np.atleast_2d(points)
        return self.eval_batch_xxi(points[:, :n], points[:, n:])

    @property
    def n(self) -> int:
        return self.atlas.n
