"""Quantized affine observables as band operators on the Fourier basis.

A :class:`ShiftOperator` acts on basis labels ``n in Z^m`` by

    psi_n  ->  sum_s p_s(n) psi_{n+s},

where each ``p_s`` is a polynomial in ``n``. Representation parameters
(``lambda`` and the half-form twist ``epsilon``) are folded into the band
polynomials when an observable is quantized, so composition, adjoints and
commutators never need to know which representation produced an operator.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .fourier import DimensionError, FourierSeries, add_modes, neg_mode
from .poisson import AffineObservable, poisson_bracket_affine

Powers = tuple[int, ...]
Shift = tuple[int, ...]

_TWISTS = (0.0, 0.5)


class Poly:
    """Sparse polynomial in ``n_1..n_m`` with complex coefficients."""

    __slots__ = ("dim", "_c")

    def __init__(self, dim: int, coeffs: Mapping[Iterable[int], complex] | None = None):
        self.dim = dim
        store: dict[Powers, complex] = {}
        for powers, value in (coeffs or {}).items():
            key = tuple(int(p) for p in powers)
            if len(key) != dim:
                raise DimensionError(f"powers {key} do not match dim {dim}")
            store[key] = store.get(key, 0j) + complex(value)
        self._c = {k: store[k] for k in sorted(store) if store[k] != 0}

    @classmethod
    def constant(cls, dim: int, value: complex) -> Poly:
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, k: int) -> Poly:
        return cls(dim, {tuple(1 if j == k else 0 for j in range(dim)): 1.0})

    @classmethod
    def linear(cls, coeffs: Sequence[complex], constant: complex = 0.0) -> Poly:
        """``sum_k coeffs[k] n_k + constant``."""
        dim = len(coeffs)
        table = {(0,) * dim: constant}
        for k, c in enumerate(coeffs):
            table[tuple(1 if j == k else 0 for j in range(dim))] = c
        return cls(dim, table)

    @property
    def coeffs(self) -> dict[Powers, complex]:
        return dict(self._c)

    def items(self):
        return self._c.items()

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        return max((sum(p) for p in self._c), default=0)

    def max_abs_coeff(self, min_degree: int = 0) -> float:
        return max((abs(c) for p, c in self._c.items() if sum(p) >= min_degree), default=0.0)

    def __add__(self, other: Poly) -> Poly:
        out = dict(self._c)
        for p, c in other._c.items():
            out[p] = out.get(p, 0j) + c
        return Poly(self.dim, out)

    def __neg__(self) -> Poly:
        return Poly(self.dim, {p: -c for p, c in self._c.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def scale(self, value: complex) -> Poly:
        return Poly(self.dim, {p: value * c for p, c in self._c.items()})

    def __mul__(self, other: Poly) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(other)
        out: dict[Powers, complex] = {}
        for p1, c1 in self._c.items():
            for p2, c2 in other._c.items():
                p = tuple(a + b for a, b in zip(p1, p2))
                out[p] = out.get(p, 0j) + c1 * c2
        return Poly(self.dim, out)

    def conj(self) -> Poly:
        return Poly(self.dim, {p: c.conjugate() for p, c in self._c.items()})

    def shifted(self, t: Sequence[float]) -> Poly:
        """The polynomial ``n -> p(n + t)``, expanded binomially."""
        if not any(t):
            return self
        out: dict[Powers, complex] = {}
        for powers, c in self._c.items():
            partial = {(): c}
            for e, tk in zip(powers, t):
                nxt = {}
                for head, val in partial.items():
                    for j in range(e + 1):
                        w = math.comb(e, j) * (tk ** (e - j) if e - j else 1)
                        if w:
                            key = head + (j,)
                            nxt[key] = nxt.get(key, 0j) + val * w
                partial = nxt
            for key, val in partial.items():
                out[key] = out.get(key, 0j) + val
        return Poly(self.dim, out)

    def __call__(self, n: Sequence[float]) -> complex:
        total = 0j
        for powers, c in self._c.items():
            mono = 1.0
            for x, e in zip(n, powers):
                if e:
                    mono *= x ** e
            total += c * mono
        return total

    def to_records(self) -> list[dict]:
        return [{"powers": list(p), "re": c.real, "im": c.imag} for p, c in self._c.items()]

    @classmethod
    def from_records(cls, dim: int, records: Iterable[Mapping]) -> Poly:
        return cls(dim, {tuple(r["powers"]): complex(r["re"], r["im"]) for r in records})

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.dim == other.dim and self._c == other._c

    def __repr__(self) -> str:
        return f"Poly({self._c!r})"


class ShiftOperator:
    """Finite sum of shifts with polynomial coefficients."""

    __slots__ = ("dim", "_bands")

    def __init__(self, dim: int, bands: Mapping[Iterable[int], Poly] | None = None):
        self.dim = dim
        store: dict[Shift, Poly] = {}
        for shift, poly in (bands or {}).items():
            key = tuple(int(v) for v in shift)
            if len(key) != dim or poly.dim != dim:
                raise DimensionError(f"band {key} does not match dim {dim}")
            store[key] = store[key] + poly if key in store else poly
        self._bands = {k: store[k] for k in sorted(store) if not store[k].is_zero()}

    @classmethod
    def zero(cls, dim: int) -> ShiftOperator:
        return cls(dim)

    @classmethod
    def identity(cls, dim: int) -> ShiftOperator:
        return cls(dim, {(0,) * dim: Poly.constant(dim, 1.0)})

    @classmethod
    def multiplication(cls, series: FourierSeries) -> ShiftOperator:
        """Multiplication by a function of the angles: one constant band per mode."""
        return cls(series.dim, {n: Poly.constant(series.dim, c) for n, c in series.items()})

    @classmethod
    def phase(cls, shift: Sequence[int]) -> ShiftOperator:
        """Multiplication by ``exp(i shift.phi)``."""
        return cls.multiplication(FourierSeries.mode(shift))

    @property
    def bands(self) -> dict[Shift, Poly]:
        return dict(self._bands)

    def items(self):
        return self._bands.items()

    def band(self, shift: Sequence[int]) -> Poly:
        return self._bands.get(tuple(shift), Poly(self.dim))

    def shifts(self) -> list[Shift]:
        return list(self._bands)

    def max_shift(self) -> int:
        return max((max((abs(v) for v in s), default=0) for s in self._bands), default=0)

    def degree(self) -> int:
        return max((p.degree() for p in self._bands.values()), default=0)

    def max_abs_coeff(self, min_degree: int = 0) -> float:
        return max((p.max_abs_coeff(min_degree) for p in self._bands.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs_coeff() <= tol

    def _check(self, other: ShiftOperator) -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: ShiftOperator) -> ShiftOperator:
        self._check(other)
        out = dict(self._bands)
        for s, p in other._bands.items():
            out[s] = out[s] + p if s in out else p
        return ShiftOperator(self.dim, out)

    def __neg__(self) -> ShiftOperator:
        return ShiftOperator(self.dim, {s: -p for s, p in self._bands.items()})

    def __sub__(self, other: ShiftOperator) -> ShiftOperator:
        return self + (-other)

    def scale(self, value: complex) -> ShiftOperator:
        return ShiftOperator(self.dim, {s: p.scale(value) for s, p in self._bands.items()})

    def __matmul__(self, other: ShiftOperator) -> ShiftOperator:
        return compose(self, other)

    def apply_to_basis(self, n: Sequence[int]) -> dict[Shift, complex]:
        """Image of ``psi_n`` as ``label -> amplitude``."""
        return {add_modes(n, s): p(n) for s, p in self._bands.items()}

    def to_records(self) -> list[dict]:
        return [{"shift": list(s), "poly": p.to_records()} for s, p in self._bands.items()]

    @classmethod
    def from_records(cls, dim: int, records: Iterable[Mapping]) -> ShiftOperator:
        return cls(dim, {tuple(r["shift"]): Poly.from_records(dim, r["poly"]) for r in records})

    def __repr__(self) -> str:
        return f"ShiftOperator(dim={self.dim}, bands={self._bands!r})"


@dataclass(frozen=True)
class RepresentationParams:
    """Connection class ``lam`` and half-form twist ``eps`` (entries 0 or 1/2)."""

    lam: tuple[float, ...]
    eps: tuple[float, ...] | None = None

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        eps = tuple(float(x) for x in (self.eps if self.eps is not None else (0.0,) * len(lam)))
        if len(eps) != len(lam):
            raise DimensionError("lambda and epsilon lengths differ")
        if any(e not in _TWISTS for e in eps):
            raise ValueError(f"twist entries must be 0 or 1/2, got {eps}")
        if not all(math.isfinite(x) for x in lam):
            raise ValueError("lambda must be finite")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def trivial(cls, dim: int) -> RepresentationParams:
        return cls((0.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lam)

    def offset(self, k: int) -> float:
        """``eps_k - lam_k``: the action eigenvalue at label ``n`` is ``n_k + offset(k)``."""
        return self.eps[k] - self.lam[k]

    def shifted(self, d: Sequence[int]) -> RepresentationParams:
        return RepresentationParams(tuple(x + int(v) for x, v in zip(self.lam, d)), self.eps)


def normalize(rep: RepresentationParams) -> tuple[RepresentationParams, tuple[int, ...]]:
    """Class representative with ``lam`` in ``[0, 1)^m`` and the integer shift ``d``.

    ``rep.lam == normalized.lam + d``.
    """
    d = tuple(math.floor(x) for x in rep.lam)
    return RepresentationParams(tuple(x - k for x, k in zip(rep.lam, d)), rep.eps), d


def quantize_affine(f: AffineObservable, rep: RepresentationParams) -> ShiftOperator:
    """Operator of ``f = a^k I_k + b``.

    On ``exp(i (n+eps).phi)`` the operator
    ``-i a^k d_k - (i/2) d_k a^k - a^k lam_k + b`` gives band polynomials
    ``p_s(n) = sum_k a^k_s (n_k + eps_k + s_k/2 - lam_k) + b_s``.
    """
    m = f.dim
    if rep.dim != m:
        raise DimensionError(f"observable dim {m} vs representation dim {rep.dim}")
    modes = set(f.b.support())
    for series in f.a:
        modes.update(series.support())
    bands = {}
    for s in modes:
        lin = [f.a[k][s] for k in range(m)]
        const = f.b[s] + sum(f.a[k][s] * (rep.eps[k] + s[k] / 2 - rep.lam[k]) for k in range(m))
        bands[s] = Poly.linear(lin, const)
    return ShiftOperator(m, bands)


def compose(P: ShiftOperator, Q: ShiftOperator) -> ShiftOperator:
    """``P Q``: band ``u`` is ``sum_{s+t=u} p_s(n+t) q_t(n)``."""
    P._check(Q)
    out: dict[Shift, Poly] = {}
    for t, q in Q.items():
        for s, p in P.items():
            u = add_modes(s, t)
            term = p.shifted(t) * q
            out[u] = out[u] + term if u in out else term
    return ShiftOperator(P.dim, out)


def commutator(P: ShiftOperator, Q: ShiftOperator) -> ShiftOperator:
    return compose(P, Q) - compose(Q, P)


def adjoint(P: ShiftOperator) -> ShiftOperator:
    """Adjoint for the form ``<s|s'> = (2 pi)^-m int s conj(s')``.

    Band ``s`` of the adjoint is ``conj(p_{-s}(n + s))``.
    """
    return ShiftOperator(P.dim, {neg_mode(s): p.conj().shifted(neg_mode(s)) for s, p in P.items()})


def dirac_residual(f: AffineObservable, g: AffineObservable,
                   rep: RepresentationParams) -> ShiftOperator:
    """``[f^, g^] + i {f, g}^``, the zero operator when the Dirac condition holds."""
    lhs = commutator(quantize_affine(f, rep), quantize_affine(g, rep))
    return lhs + quantize_affine(poisson_bracket_affine(f, g), rep).scale(1j)


def action_operator(k: int, rep: RepresentationParams) -> ShiftOperator:
    """Diagonal operator with eigenvalue ``n_k + eps_k - lam_k``."""
    if not 0 <= k < rep.dim:
        raise IndexError(f"axis {k} out of range for dim {rep.dim}")
    coeffs = [1.0 if j == k else 0.0 for j in range(rep.dim)]
    return ShiftOperator(rep.dim, {(0,) * rep.dim: Poly.linear(coeffs, rep.offset(k))})


def gauge_intertwine_check(f: AffineObservable, rep: RepresentationParams,
                           d: Sequence[int]) -> ShiftOperator:
    """``M_d f^_lam M_{-d} - f^_{lam+d}``; zero when the integer gauge shift intertwines."""
    d = tuple(int(v) for v in d)
    conj = compose(ShiftOperator.phase(d), compose(quantize_affine(f, rep), ShiftOperator.phase(neg_mode(d))))
    return conj - quantize_affine(f, rep.shifted(d))


def twist_reduce(rep: RepresentationParams) -> RepresentationParams:
    """Untwisted parameters ``(lam - eps, 0)`` giving the same operators."""
    return RepresentationParams(tuple(l - e for l, e in zip(rep.lam, rep.eps)))


def spectral_offsets(rep: RepresentationParams) -> tuple[float, ...]:
    """Fractional part of ``eps_k - lam_k``; the action spectrum on axis ``k`` is ``Z + offset``."""
    return tuple((rep.offset(k)) % 1.0 for k in range(rep.dim))


def spectra_coincide(rep1: RepresentationParams, rep2: RepresentationParams,
                     tol: float = 1e-12) -> bool:
    """Whether all action operators of the two representations have the same spectrum."""
    if rep1.dim != rep2.dim:
        raise DimensionError("representation dimensions differ")
    for x, y in zip(spectral_offsets(rep1), spectral_offsets(rep2)):
        gap = abs(x - y)
        if min(gap, 1.0 - gap) > tol:
            return False
    return True
