"""Analytic test fields: Gaussian x polynomial symmetric tensor phantoms.

The family p(x-c) exp(-|x-c|^2 / (2 sigma^2)) is closed under differentiation
and Fourier transform, so every phantom carries closed-form pointwise values,
a closed-form Fourier transform, and exact potential (symmetrized-gradient)
and solenoidal constructions.  Polynomials are stored per canonical tensor
component in the shifted variable u = x - c.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .symtensor import SymTensor, canonical_indices, sym_dim

__all__ = [
    "Poly",
    "Phantom",
    "PotentialSpec",
    "gaussian_phantom",
    "potential_field",
    "curl_phantom",
    "curl_curl_phantom",
    "phantom_to_json",
    "phantom_from_json",
]

MAX_DEGREE = 6


class Poly:
    """Multivariate polynomial as a dict {power tuple: complex coefficient}."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = {}
        if terms:
            for p, c in terms.items():
                if c != 0:
                    self.terms[tuple(p)] = self.terms.get(tuple(p), 0.0) + complex(c)

    @classmethod
    def constant(cls, n: int, c) -> "Poly":
        return cls(n, {(0,) * n: c})

    def degree(self) -> int:
        return max((sum(p) for p in self.terms), default=0)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, 0.0) + c
        return Poly(self.n, out)

    def scale(self, c) -> "Poly":
        return Poly(self.n, {p: v * c for p, v in self.terms.items()})

    def mul_var(self, d: int, power: int = 1) -> "Poly":
        """Multiply by u_d^power."""
        out = {}
        for p, c in self.terms.items():
            q = list(p)
            q[d] += power
            out[tuple(q)] = c
        return Poly(self.n, out)

    def diff(self, d: int) -> "Poly":
        out = {}
        for p, c in self.terms.items():
            if p[d] == 0:
                continue
            q = list(p)
            q[d] -= 1
            out[tuple(q)] = out.get(tuple(q), 0.0) + c * p[d]
        return Poly(self.n, out)

    def is_real(self) -> bool:
        return all(abs(c.imag) == 0.0 for c in self.terms.values())

    def eval(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (..., n)."""
        pts = np.asarray(pts)
        real_path = self.is_real() and not np.iscomplexobj(pts)
        dtype = float if real_path else complex
        out = np.zeros(pts.shape[:-1], dtype=dtype)
        for p, c in self.terms.items():
            coeff = c.real if real_path else c
            term = None
            for d, e in enumerate(p):
                if not e:
                    continue
                factor = pts[..., d] ** e
                term = factor if term is None else term * factor
            out += coeff if term is None else coeff * term
        return out

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())


def _gauss_diff(poly: Poly, d: int, quad: float) -> Poly:
    """d/du_d of poly(u) * exp(-quad |u|^2 / 2), returned as the new poly factor."""
    return poly.diff(d) + poly.mul_var(d).scale(-quad)


@dataclass(frozen=True)
class Phantom:
    """Symmetric m-tensor field with components p_I(x-c) exp(-|x-c|^2/(2 sigma^2))."""

    n: int
    m: int
    sigma: float
    center: np.ndarray
    components: tuple  # Poly per canonical index, lex order

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if len(self.components) != sym_dim(self.n, self.m):
            raise ValueError("one polynomial per canonical component required")
        for p in self.components:
            if p.degree() > MAX_DEGREE:
                raise ValueError(f"polynomial degree > {MAX_DEGREE} not supported")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    # -- pointwise evaluation ------------------------------------------------

    def eval_components(self, pts: np.ndarray) -> np.ndarray:
        """Canonical component values at points (..., n); result (C, ...)."""
        pts = np.asarray(pts, dtype=float)
        u = pts - self.center
        g = np.exp(-np.sum(u * u, axis=-1) / (2 * self.sigma**2))
        return np.stack([p.eval(u) * g for p in self.components])

    def eval(self, x: np.ndarray) -> SymTensor:
        vals = self.eval_components(np.asarray(x, dtype=float)[None, :])[:, 0]
        return SymTensor(self.n, self.m, vals)

    # -- Fourier transform ---------------------------------------------------

    def _fourier_polys(self) -> tuple:
        """Polynomial factors q_I(y) with f_I-hat(y) = q_I(y) sigma^n
        exp(-sigma^2 |y|^2 / 2) e^{-i<y,c>}.

        Convention: f-hat(y) = (2 pi)^{-n/2} int e^{-i<y,x>} f(x) dx.  Each
        factor u_d maps to i d/dy_d acting on the transformed Gaussian.
        """
        key = "_fourier_cache"
        cache = getattr(self, key, None)
        if cache is not None:
            return cache
        quad = self.sigma**2  # Gaussian in y has width 1/sigma: exponent sigma^2 |y|^2 / 2
        out = []
        for poly in self.components:
            q = Poly.constant(self.n, 0.0)
            for p, c in poly.terms.items():
                term = Poly.constant(self.n, c)
                for d, e in enumerate(p):
                    for _ in range(e):
                        term = _gauss_diff(term, d, quad).scale(1j)
                q = q + term
            out.append(q)
        out = tuple(out)
        object.__setattr__(self, key, out)
        return out

    def fourier_components(self, ys: np.ndarray) -> np.ndarray:
        """Canonical components of f-hat at frequency points (..., n); (C, ...)."""
        ys = np.asarray(ys, dtype=float)
        qs = self._fourier_polys()
        g = self.sigma**self.n * np.exp(-self.sigma**2 * np.sum(ys * ys, axis=-1) / 2)
        phase = np.exp(-1j * (ys @ self.center))
        return np.stack([q.eval(ys) * g * phase for q in qs])

    def fourier_value(self, y: np.ndarray) -> SymTensor:
        vals = self.fourier_components(np.asarray(y, dtype=float)[None, :])[:, 0]
        return SymTensor(self.n, self.m, vals)

    # -- helpers ---------------------------------------------------------------

    def component(self, idx) -> Poly:
        key = tuple(sorted(idx))
        pos = canonical_indices(self.n, self.m).index(key)
        return self.components[pos]

    def divergence(self) -> "Phantom":
        """sum_p d/dx^p f_{p i2..im}, a rank-(m-1) phantom (exact)."""
        if self.m == 0:
            raise ValueError("divergence needs m >= 1")
        inv_s2 = 1.0 / self.sigma**2
        comps = []
        for idx in canonical_indices(self.n, self.m - 1):
            q = Poly.constant(self.n, 0.0)
            for p in range(self.n):
                src = self.component(tuple(sorted((p,) + idx)))
                q = q + _gauss_diff(src, p, inv_s2)
            comps.append(q)
        return Phantom(self.n, self.m - 1, self.sigma, self.center, tuple(comps))

    def scale(self, c) -> "Phantom":
        return Phantom(self.n, self.m, self.sigma, self.center,
                       tuple(p.scale(c) for p in self.components))

    def __add__(self, other: "Phantom") -> "Phantom":
        if (other.n, other.m) != (self.n, self.m) or other.sigma != self.sigma or \
                not np.array_equal(other.center, self.center):
            raise ValueError("phantom addition requires matching n, m, sigma, center")
        comps = tuple(a + b for a, b in zip(self.components, other.components))
        return Phantom(self.n, self.m, self.sigma, self.center, comps)


@dataclass(frozen=True)
class PotentialSpec:
    """A rank-(m-1) potential whose symmetrized gradient is the phantom."""

    potential: Phantom

    def __post_init__(self):
        if self.potential.m < 0:
            raise ValueError("potential rank must be >= 0")


def gaussian_phantom(n: int, m: int, sigma: float = 1.0, center=None,
                     degree: int = 2, seed: int | None = 0,
                     coefficients=None) -> Phantom:
    """Random (seeded) Gaussian x polynomial phantom with bounded degree."""
    if center is None:
        center = np.zeros(n)
    comps = []
    if coefficients is not None:
        for terms in coefficients:
            comps.append(Poly(n, terms))
    else:
        rng = np.random.default_rng(seed)
        monomials = [p for p in _monomials_up_to(n, degree)]
        for _ in range(sym_dim(n, m)):
            coeffs = rng.uniform(-1.0, 1.0, size=len(monomials))
            comps.append(Poly(n, dict(zip(monomials, coeffs))))
    return Phantom(n, m, sigma, np.asarray(center, dtype=float), tuple(comps))


def _monomials_up_to(n: int, degree: int):
    import itertools

    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            yield tuple(combo.count(d) for d in range(n))


def potential_field(spec: PotentialSpec) -> Phantom:
    """Symmetrized gradient of the potential; lies in the transform kernel.

    f_{i1..im} = sym(d v / dx): the average over slots k of d_{i_k} v_{rest}.
    """
    v = spec.potential
    m = v.m + 1
    if m < 1:
        raise ValueError("potential_field needs output rank m >= 1")
    inv_s2 = 1.0 / v.sigma**2
    comps = []
    for idx in canonical_indices(v.n, m):
        q = Poly.constant(v.n, 0.0)
        for k in range(m):
            rest = idx[:k] + idx[k + 1:]
            src = v.component(rest) if v.m else v.components[0]
            q = q + _gauss_diff(src, idx[k], inv_s2)
        comps.append(q.scale(1.0 / m))
    return Phantom(v.n, m, v.sigma, v.center, tuple(comps))


def curl_phantom(potential: Phantom) -> Phantom:
    """Exactly divergence-free vector phantom: curl of a vector potential (n=3)."""
    if potential.n != 3 or potential.m != 1:
        raise ValueError("curl_phantom takes a rank-1 phantom over R^3")
    inv_s2 = 1.0 / potential.sigma**2
    a = [potential.component((d,)) for d in range(3)]

    def d(poly, axis):
        return _gauss_diff(poly, axis, inv_s2)

    comps = (
        d(a[2], 1) + d(a[1], 2).scale(-1),
        d(a[0], 2) + d(a[2], 0).scale(-1),
        d(a[1], 0) + d(a[0], 1).scale(-1),
    )
    return Phantom(3, 1, potential.sigma, potential.center, comps)


def curl_curl_phantom(potential: Phantom) -> Phantom:
    """Exactly divergence-free symmetric 2-tensor phantom over R^3.

    f_ij = eps_{ipq} eps_{jrs} d_p d_r T_{qs} for a symmetric potential T;
    the double curl structure kills the divergence identically.
    """
    if potential.n != 3 or potential.m != 2:
        raise ValueError("curl_curl_phantom takes a rank-2 phantom over R^3")
    inv_s2 = 1.0 / potential.sigma**2
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0

    def T(q, s):
        return potential.component((q, s))

    comps = []
    for i, j in canonical_indices(3, 2):
        out = Poly.constant(3, 0.0)
        for p in range(3):
            for q in range(3):
                if eps[i, p, q] == 0:
                    continue
                for r in range(3):
                    for s in range(3):
                        if eps[j, r, s] == 0:
                            continue
                        term = _gauss_diff(_gauss_diff(T(q, s), r, inv_s2), p, inv_s2)
                        out = out + term.scale(eps[i, p, q] * eps[j, r, s])
        comps.append(out)
    return Phantom(3, 2, potential.sigma, potential.center, tuple(comps))


# -- JSON serialization -------------------------------------------------------


def phantom_to_json(ph: Phantom) -> str:
    comps = []
    for idx, poly in zip(canonical_indices(ph.n, ph.m), ph.components):
        monomials = [
            {"powers": list(p), "coeff_re": c.real, "coeff_im": c.imag}
            for p, c in sorted(poly.terms.items())
        ]
        comps.append({"index": [i + 1 for i in idx], "monomials": monomials})
    doc = {
        "n": ph.n,
        "m": ph.m,
        "sigma": ph.sigma,
        "center": list(ph.center),
        "components": comps,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def phantom_from_json(text: str) -> Phantom:
    doc = json.loads(text)
    n, m = int(doc["n"]), int(doc["m"])
    comp_map = {}
    for entry in doc["components"]:
        idx = tuple(sorted(i - 1 for i in entry["index"]))
        terms = {
            tuple(mono["powers"]): complex(mono["coeff_re"], mono["coeff_im"])
            for mono in entry["monomials"]
        }
        comp_map[idx] = Poly(n, terms)
    comps = tuple(
        comp_map.get(idx, Poly.constant(n, 0.0)) for idx in canonical_indices(n, m)
    )
    return Phantom(n, m, float(doc["sigma"]), np.asarray(doc["center"], dtype=float), comps)
