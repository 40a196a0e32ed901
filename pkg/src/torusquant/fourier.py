"""Finite Fourier series (trigonometric polynomials) on the m-torus.

A :class:`FourierSeries` stores the coefficients ``c_n`` of
``sum_n c_n exp(i n.phi)`` for finitely many lattice modes ``n in Z^m``.
Instances are immutable; every arithmetic operation returns a new, pruned
series.
"""

from __future__ import annotations

import cmath
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_PRUNE = 1e-14

Mode = tuple[int, ...]


class DimensionError(ValueError):
    """Operands live on tori of different dimension."""


class AxisError(IndexError):
    """Axis index outside ``0 <= k < dim``."""


def _as_mode(mode: Iterable[int]) -> Mode:
    return tuple(int(v) for v in mode)


def add_modes(n: Sequence[int], s: Sequence[int]) -> Mode:
    return tuple(a + b for a, b in zip(n, s))


def neg_mode(n: Sequence[int]) -> Mode:
    return tuple(-a for a in n)


class FourierSeries:
    """Trigonometric polynomial with complex coefficients.

    Parameters
    ----------
    dim : int
        Torus dimension ``m``.
    coeffs : mapping
        ``mode -> coefficient``. Modes are length-``dim`` integer tuples.
    prune : float
        Coefficients with magnitude below this threshold are dropped.
    """

    __slots__ = ("_dim", "_coeffs", "_prune")

    def __init__(self, dim: int, coeffs: Mapping[Iterable[int], complex] | None = None,
                 prune: float = DEFAULT_PRUNE):
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        self._dim = int(dim)
        self._prune = float(prune)
        store: dict[Mode, complex] = {}
        for mode, value in (coeffs or {}).items():
            key = _as_mode(mode)
            if len(key) != self._dim:
                raise DimensionError(f"mode {key} has length {len(key)}, expected {self._dim}")
            store[key] = store.get(key, 0j) + complex(value)
        self._coeffs = {k: store[k] for k in sorted(store) if abs(store[k]) >= self._prune}

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, dim: int, prune: float = DEFAULT_PRUNE) -> FourierSeries:
        return cls(dim, {}, prune)

    @classmethod
    def constant(cls, dim: int, value: complex, prune: float = DEFAULT_PRUNE) -> FourierSeries:
        return cls(dim, {(0,) * dim: value}, prune)

    @classmethod
    def mode(cls, n: Sequence[int], value: complex = 1.0,
             prune: float = DEFAULT_PRUNE) -> FourierSeries:
        """The basis function ``value * exp(i n.phi)``."""
        return cls(len(n), {tuple(n): value}, prune)

    @classmethod
    def cos(cls, dim: int, axis: int, freq: int = 1) -> FourierSeries:
        n = [0] * dim
        n[axis] = freq
        return cls(dim, {tuple(n): 0.5, neg_mode(n): 0.5})

    @classmethod
    def sin(cls, dim: int, axis: int, freq: int = 1) -> FourierSeries:
        n = [0] * dim
        n[axis] = freq
        return cls(dim, {tuple(n): -0.5j, neg_mode(n): 0.5j})

    # accessors ------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def prune(self) -> float:
        return self._prune

    @property
    def coeffs(self) -> dict[Mode, complex]:
        """Copy of the coefficient table, keys in lexicographic order."""
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def support(self) -> list[Mode]:
        return list(self._coeffs)

    def __getitem__(self, mode: Iterable[int]) -> complex:
        return self._coeffs.get(_as_mode(mode), 0j)

    def __len__(self) -> int:
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def radius(self) -> int:
        """Largest ``max_k |n_k|`` over the support (0 for the zero series)."""
        return max((max((abs(v) for v in n), default=0) for n in self._coeffs), default=0)

    def _check(self, other: FourierSeries) -> None:
        if self._dim != other._dim:
            raise DimensionError(f"dimension mismatch: {self._dim} vs {other._dim}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: FourierSeries) -> FourierSeries:
        if not isinstance(other, FourierSeries):
            return self + FourierSeries.constant(self._dim, other, self._prune)
        self._check(other)
        out = dict(self._coeffs)
        for n, c in other._coeffs.items():
            out[n] = out.get(n, 0j) + c
        return FourierSeries(self._dim, out, min(self._prune, other._prune))

    __radd__ = __add__

    def __neg__(self) -> FourierSeries:
        return FourierSeries(self._dim, {n: -c for n, c in self._coeffs.items()}, self._prune)

    def __sub__(self, other: FourierSeries) -> FourierSeries:
        return self + (-other)

    def __rsub__(self, other) -> FourierSeries:
        return (-self) + other

    def scale(self, value: complex) -> FourierSeries:
        value = complex(value)
        return FourierSeries(self._dim, {n: value * c for n, c in self._coeffs.items()}, self._prune)

    def __mul__(self, other) -> FourierSeries:
        if isinstance(other, FourierSeries):
            return convolve_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> FourierSeries:
        return self.scale(other)

    def derivative(self, axis: int) -> FourierSeries:
        return angle_derivative(self, axis)

    def conj(self) -> FourierSeries:
        """Complex conjugate function: coefficient at ``n`` is ``conj(c_{-n})``."""
        return FourierSeries(self._dim, {neg_mode(n): c.conjugate() for n, c in self._coeffs.items()},
                             self._prune)

    def is_real(self, tol: float = 0.0) -> bool:
        return is_real(self, tol)

    def __call__(self, phi: Sequence[float]) -> complex:
        return evaluate(self, phi)

    def max_abs_diff(self, other: FourierSeries) -> float:
        self._check(other)
        keys = set(self._coeffs) | set(other._coeffs)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return self._dim == other._dim and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self._dim, tuple(self._coeffs.items())))

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"FourierSeries(dim={self._dim}, 0)"
        terms = " + ".join(f"({c:.6g})e^{{i{list(n)}}}" for n, c in self._coeffs.items())
        return f"FourierSeries(dim={self._dim}, {terms})"

    # serialization --------------------------------------------------------
    def to_records(self) -> list[dict]:
        return [{"mode": list(n), "re": c.real, "im": c.imag} for n, c in self._coeffs.items()]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], dim: int | None = None,
                     prune: float = DEFAULT_PRUNE) -> FourierSeries:
        records = list(records)
        if dim is None:
            if not records:
                raise ValueError("dimension required for an empty record list")
            dim = len(records[0]["mode"])
        coeffs: dict[Mode, complex] = {}
        for rec in records:
            key = _as_mode(rec["mode"])
            coeffs[key] = coeffs.get(key, 0j) + complex(rec.get("re", 0.0), rec.get("im", 0.0))
        return cls(dim, coeffs, prune)


def add(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    return f + g


def convolve_mul(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    """Product of two series; the coefficient at ``u`` is ``sum_{s+t=u} f_s g_t``."""
    f._check(g)
    out: dict[Mode, complex] = {}
    for s, fs in f.items():
        for t, gt in g.items():
            u = add_modes(s, t)
            out[u] = out.get(u, 0j) + fs * gt
    return FourierSeries(f.dim, out, min(f.prune, g.prune))


def angle_derivative(f: FourierSeries, axis: int) -> FourierSeries:
    """Partial derivative along angle ``axis`` (0-based): ``c_n -> i n_k c_n``."""
    if not 0 <= axis < f.dim:
        raise AxisError(f"axis {axis} out of range for dim {f.dim}")
    return FourierSeries(f.dim, {n: 1j * n[axis] * c for n, c in f.items()}, f.prune)


def is_real(f: FourierSeries, tol: float = 0.0) -> bool:
    """True iff ``|f_{-n} - conj(f_n)| <= tol`` for every mode in the support."""
    return all(abs(f[neg_mode(n)] - c.conjugate()) <= tol for n, c in f.items())


def evaluate(f: FourierSeries, phi: Sequence[float]) -> complex:
    phi = np.asarray(phi, dtype=float).reshape(-1)
    if phi.size != f.dim:
        raise DimensionError(f"expected {f.dim} angles, got {phi.size}")
    return sum((c * cmath.exp(1j * float(np.dot(n, phi))) for n, c in f.items()), 0j)
