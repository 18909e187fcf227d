"""Symmetric m-tensor algebra over R^n with canonical multi-index storage.

A rank-m symmetric tensor is stored as one complex coefficient per
non-decreasing index tuple (lexicographic order), together with the
multiplicity of that tuple (number of distinct permutations).  All
operations here are pure functions of their inputs.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import lru_cache

import numpy as np

__all__ = [
    "sym_dim",
    "canonical_indices",
    "multiplicity",
    "multiplicities",
    "SymTensor",
    "symmetrize",
    "contract_power",
    "vector_power",
    "epsilon_tensor",
    "tangential_project",
    "power_contract_pair",
]


def sym_dim(n: int, m: int) -> int:
    """Dimension of the space of symmetric rank-m tensors over R^n: C(n+m-1, m)."""
    if n < 1 or m < 0:
        raise ValueError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    return math.comb(n + m - 1, m)


@lru_cache(maxsize=None)
def canonical_indices(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """All non-decreasing index tuples of length m over axes 0..n-1, lex order."""
    return tuple(itertools.combinations_with_replacement(range(n), m))


@lru_cache(maxsize=None)
def _index_positions(n: int, m: int) -> dict:
    return {idx: k for k, idx in enumerate(canonical_indices(n, m))}


def multiplicity(idx: tuple[int, ...]) -> int:
    """Number of distinct permutations of the tuple: m! / prod(rep!)."""
    m = len(idx)
    denom = 1
    for rep in Counter(idx).values():
        denom *= math.factorial(rep)
    return math.factorial(m) // denom


@lru_cache(maxsize=None)
def multiplicities(n: int, m: int) -> np.ndarray:
    out = np.array([multiplicity(idx) for idx in canonical_indices(n, m)], dtype=float)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _index_array(n: int, m: int) -> np.ndarray:
    """Canonical indices as an int array of shape (sym_dim, m)."""
    arr = np.array(canonical_indices(n, m), dtype=np.intp).reshape(sym_dim(n, m), m)
    arr.setflags(write=False)
    return arr


class SymTensor:
    """A symmetric rank-m tensor over R^n with complex canonical coefficients."""

    __slots__ = ("n", "m", "values")

    def __init__(self, n: int, m: int, values=None):
        if n < 2 or m < 0:
            raise ValueError(f"need n >= 2 and m >= 0, got n={n}, m={m}")
        self.n = n
        self.m = m
        d = sym_dim(n, m)
        if values is None:
            self.values = np.zeros(d, dtype=complex)
        else:
            values = np.asarray(values, dtype=complex)
            if values.shape != (d,):
                raise ValueError(f"expected {d} canonical coefficients, got shape {values.shape}")
            self.values = values.copy()

    @classmethod
    def from_full(cls, full: np.ndarray) -> "SymTensor":
        """Build from a full (already symmetric) m-axis array; no averaging."""
        full = np.asarray(full, dtype=complex)
        m = full.ndim
        n = full.shape[0] if m else 2
        if m and any(s != n for s in full.shape):
            raise ValueError(f"all axes must have equal extent, got shape {full.shape}")
        if m == 0:
            t = cls(2, 0)
            t.values[0] = complex(full)
            return t
        vals = np.array([full[idx] for idx in canonical_indices(n, m)], dtype=complex)
        return cls(n, m, vals)

    def to_full(self) -> np.ndarray:
        """Expand to the full n^m array, replicating coefficients over permutations."""
        if self.m == 0:
            return np.asarray(self.values[0])
        full = np.zeros((self.n,) * self.m, dtype=complex)
        for k, idx in enumerate(canonical_indices(self.n, self.m)):
            for perm in set(itertools.permutations(idx)):
                full[perm] = self.values[k]
        return full

    def coeff(self, idx) -> complex:
        key = tuple(sorted(idx))
        return complex(self.values[_index_positions(self.n, self.m)[key]])

    def contract_power(self, v: np.ndarray) -> complex:
        return contract_power(self, v)

    def y_contract(self, y: np.ndarray) -> "SymTensor":
        """Contract one index slot with y, giving a rank-(m-1) symmetric tensor."""
        if self.m == 0:
            raise ValueError("cannot contract a rank-0 tensor")
        y = np.asarray(y, dtype=float)
        full = self.to_full()
        out = np.tensordot(full, y, axes=([0], [0]))
        if self.m == 1:
            t = SymTensor(self.n, 0)
            t.values[0] = out
            return t
        return SymTensor.from_full(out)

    def norm(self) -> float:
        """Frobenius norm of the full tensor (multiplicity-weighted canonical sum)."""
        w = multiplicities(self.n, self.m)
        return float(np.sqrt(np.sum(w * np.abs(self.values) ** 2)))

    def __add__(self, other):
        self._check_compat(other)
        return SymTensor(self.n, self.m, self.values + other.values)

    def __sub__(self, other):
        self._check_compat(other)
        return SymTensor(self.n, self.m, self.values - other.values)

    def __mul__(self, c):
        return SymTensor(self.n, self.m, self.values * c)

    __rmul__ = __mul__

    def _check_compat(self, other):
        if not isinstance(other, SymTensor) or other.n != self.n or other.m != self.m:
            raise ValueError("rank/dimension mismatch")

    def __repr__(self):
        return f"SymTensor(n={self.n}, m={self.m}, values={self.values!r})"


def symmetrize(full: np.ndarray) -> SymTensor:
    """Canonicalize a full rank-m array by averaging over index permutations."""
    full = np.asarray(full, dtype=complex)
    m = full.ndim
    if m == 0:
        return SymTensor.from_full(full)
    n = full.shape[0]
    if any(s != n for s in full.shape):
        raise ValueError(f"all axes must have equal extent, got shape {full.shape}")
    sym = np.zeros_like(full)
    for perm in itertools.permutations(range(m)):
        sym += np.transpose(full, perm)
    sym /= math.factorial(m)
    return SymTensor.from_full(sym)


def contract_power(T: SymTensor, v: np.ndarray) -> complex:
    """Full contraction <T, v^m> = T_{i1..im} v^{i1} ... v^{im}."""
    v = np.asarray(v)
    if v.shape != (T.n,):
        raise ValueError(f"dimension mismatch: tensor over R^{T.n}, vector shape {v.shape}")
    if T.m == 0:
        return complex(T.values[0])
    mono = np.prod(v[_index_array(T.n, T.m)], axis=1)
    return complex(np.sum(multiplicities(T.n, T.m) * T.values * mono))


def vector_power(v: np.ndarray, m: int) -> SymTensor:
    """The symmetric power v^m with coefficients prod_k v[i_k]."""
    v = np.asarray(v, dtype=complex)
    n = v.shape[0]
    t = SymTensor(n, m)
    if m == 0:
        t.values[0] = 1.0
        return t
    t.values = np.prod(v[_index_array(n, m)], axis=1)
    return t


def epsilon_tensor(y: np.ndarray) -> SymTensor:
    """Orthogonal projector onto y-perp as a symmetric 2-tensor:
    eps_ij = delta_ij - y_i y_j / |y|^2."""
    y = np.asarray(y, dtype=float)
    ny2 = float(np.dot(y, y))
    if ny2 == 0.0:
        raise ValueError("epsilon_tensor requires a nonzero vector")
    full = np.eye(y.shape[0]) - np.outer(y, y) / ny2
    return SymTensor.from_full(full)


def _epsilon_matrix(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    ny2 = float(np.dot(y, y))
    if ny2 == 0.0:
        raise ValueError("projector undefined at y = 0")
    return np.eye(y.shape[0]) - np.outer(y, y) / ny2


def tangential_project(T: SymTensor, y: np.ndarray) -> SymTensor:
    """Apply the projector onto y-perp to every index slot.

    The result satisfies y^p (out)_{p i2..im} = 0 and the map is idempotent.
    """
    if T.m == 0:
        return SymTensor(T.n, 0, T.values)
    eps = _epsilon_matrix(y)
    full = T.to_full()
    for axis in range(T.m):
        full = np.moveaxis(np.tensordot(eps, full, axes=([1], [axis])), 0, axis)
    return SymTensor.from_full(full)


@lru_cache(maxsize=None)
def _perfect_matchings(k: int) -> tuple:
    """All perfect matchings of {0..2k-1} as tuples of index pairs."""
    slots = tuple(range(2 * k))

    def rec(remaining):
        if not remaining:
            yield ()
            return
        a = remaining[0]
        for i in range(1, len(remaining)):
            b = remaining[i]
            rest = remaining[1:i] + remaining[i + 1:]
            for sub in rec(rest):
                yield ((a, b),) + sub

    return tuple(rec(slots))


def power_contract_pair(A: SymTensor, B: SymTensor, kernel: str, y=None) -> complex:
    """Sandwich K^m_{i1..im j1..jm} A^{i1..im} conj(B^{j1..jm}).

    K^m is the m-th symmetric power of the kernel (``delta`` or the
    projector ``epsilon`` at y), normalized as the average of the kernel
    product over all perfect matchings of the 2m slots.  With the delta
    kernel and A = B the value is real and >= 0.
    """
    A._check_compat(B)
    m, n = A.m, A.n
    if m == 0:
        return complex(A.values[0] * np.conj(B.values[0]))
    if kernel == "delta":
        K = np.eye(n)
    elif kernel == "epsilon":
        if y is None:
            raise ValueError("epsilon kernel requires the direction y")
        K = _epsilon_matrix(y)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    T = np.multiply.outer(A.to_full(), np.conj(B.to_full()))
    letters = "abcdefghijklmnop"
    total = 0.0 + 0.0j
    matchings = _perfect_matchings(m)
    for matching in matchings:
        subs = [letters[: 2 * m]]
        for a, b in matching:
            subs.append(letters[a] + letters[b])
        spec = ",".join(subs) + "->"
        total += np.einsum(spec, T, *([K] * m))
    return complex(total / len(matchings))
