"""Classical observables on the annulus ``V x T^m`` and their Poisson brackets.

Coordinates are actions ``I_k`` and angles ``phi^k`` with symplectic form
``dI_k ^ dphi^k``. The bracket convention used throughout the package is

    {f, g} = sum_k (df/dI_k * dg/dphi^k - df/dphi^k * dg/dI_k),

so that ``{I_k, u(phi)} = d_k u``. This is the only place the sign is fixed.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .fourier import DimensionError, FourierSeries, angle_derivative

DEFAULT_MAX_DEGREE = 4

Multidegree = tuple[int, ...]


class DegreeCapError(ValueError):
    """An action-degree exceeded the configured cap of a :class:`FourierTaylor`."""


def _unit(dim: int, k: int) -> Multidegree:
    return tuple(1 if j == k else 0 for j in range(dim))


class FourierTaylor:
    """Polynomial in the actions with Fourier-series coefficients.

    Represents ``sum_alpha c_alpha(phi) I^alpha``. The total action degree
    is capped (``max_degree``); producing a term above the cap raises
    :class:`DegreeCapError` instead of truncating.
    """

    __slots__ = ("_dim", "_terms", "_max_degree")

    def __init__(self, dim: int, terms: Mapping[Iterable[int], FourierSeries] | None = None,
                 max_degree: int = DEFAULT_MAX_DEGREE):
        self._dim = int(dim)
        self._max_degree = int(max_degree)
        store: dict[Multidegree, FourierSeries] = {}
        for alpha, series in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self._dim or any(a < 0 for a in alpha):
                raise ValueError(f"bad multidegree {alpha} for dim {self._dim}")
            if series.dim != self._dim:
                raise DimensionError(f"series dim {series.dim} != {self._dim}")
            store[alpha] = store[alpha] + series if alpha in store else series
        terms_out = {}
        for alpha in sorted(store):
            if store[alpha].is_zero():
                continue
            if sum(alpha) > self._max_degree:
                raise DegreeCapError(
                    f"action degree {sum(alpha)} exceeds cap {self._max_degree}")
            terms_out[alpha] = store[alpha]
        self._terms = terms_out

    @classmethod
    def from_series(cls, series: FourierSeries, max_degree: int = DEFAULT_MAX_DEGREE):
        return cls(series.dim, {(0,) * series.dim: series}, max_degree)

    @classmethod
    def constant(cls, dim: int, value: complex, max_degree: int = DEFAULT_MAX_DEGREE):
        return cls.from_series(FourierSeries.constant(dim, value), max_degree)

    @classmethod
    def action(cls, dim: int, k: int, max_degree: int = DEFAULT_MAX_DEGREE):
        """The coordinate function ``I_k``."""
        return cls(dim, {_unit(dim, k): FourierSeries.constant(dim, 1.0)}, max_degree)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def max_degree(self) -> int:
        return self._max_degree

    @property
    def terms(self) -> dict[Multidegree, FourierSeries]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __getitem__(self, alpha: Iterable[int]) -> FourierSeries:
        return self._terms.get(tuple(alpha), FourierSeries.zero(self._dim))

    def degree(self) -> int:
        return max((sum(a) for a in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def _like(self, terms, other: FourierTaylor | None = None) -> FourierTaylor:
        cap = self._max_degree if other is None else max(self._max_degree, other._max_degree)
        return FourierTaylor(self._dim, terms, cap)

    def _coerce(self, other) -> FourierTaylor:
        if isinstance(other, FourierTaylor):
            if other._dim != self._dim:
                raise DimensionError(f"dimension mismatch: {self._dim} vs {other._dim}")
            return other
        if isinstance(other, FourierSeries):
            return FourierTaylor.from_series(other, self._max_degree)
        return FourierTaylor.constant(self._dim, other, self._max_degree)

    def __add__(self, other) -> FourierTaylor:
        other = self._coerce(other)
        out = dict(self._terms)
        for alpha, c in other._terms.items():
            out[alpha] = out[alpha] + c if alpha in out else c
        return self._like(out, other)

    __radd__ = __add__

    def __neg__(self) -> FourierTaylor:
        return self._like({a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> FourierTaylor:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> FourierTaylor:
        return self._coerce(other) - self

    def scale(self, value: complex) -> FourierTaylor:
        return self._like({a: c.scale(value) for a, c in self._terms.items()})

    def __mul__(self, other) -> FourierTaylor:
        if not isinstance(other, (FourierTaylor, FourierSeries)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[Multidegree, FourierSeries] = {}
        cap = max(self._max_degree, other._max_degree)
        for a1, c1 in self._terms.items():
            for a2, c2 in other._terms.items():
                alpha = tuple(x + y for x, y in zip(a1, a2))
                prod = c1 * c2
                if sum(alpha) > cap and not prod.is_zero():
                    raise DegreeCapError(f"action degree {sum(alpha)} exceeds cap {cap}")
                out[alpha] = out[alpha] + prod if alpha in out else prod
        return FourierTaylor(self._dim, out, cap)

    def __rmul__(self, other) -> FourierTaylor:
        return self * other

    def d_angle(self, k: int) -> FourierTaylor:
        """Partial derivative along ``phi^k``."""
        return self._like({a: angle_derivative(c, k) for a, c in self._terms.items()})

    def d_action(self, k: int) -> FourierTaylor:
        """Partial derivative along ``I_k``."""
        if not 0 <= k < self._dim:
            raise IndexError(f"axis {k} out of range for dim {self._dim}")
        out = {}
        for alpha, c in self._terms.items():
            if alpha[k]:
                lowered = alpha[:k] + (alpha[k] - 1,) + alpha[k + 1:]
                out[lowered] = c.scale(alpha[k])
        return self._like(out)

    def max_abs_coeff(self) -> float:
        return max((max(abs(v) for _, v in c.items()) for c in self._terms.values()), default=0.0)

    def evaluate(self, actions: Sequence[float], angles: Sequence[float]) -> complex:
        total = 0j
        for alpha, c in self._terms.items():
            mono = 1.0
            for x, e in zip(actions, alpha):
                mono *= x ** e
            total += mono * c(angles)
        return total

    def is_affine(self) -> bool:
        return self.degree() <= 1

    def to_affine(self) -> AffineObservable:
        if not self.is_affine():
            raise ValueError("observable is not affine in the actions")
        m = self._dim
        return AffineObservable(tuple(self[_unit(m, k)] for k in range(m)), self[(0,) * m])

    def __repr__(self) -> str:
        return f"FourierTaylor(dim={self._dim}, terms={self._terms!r})"


@dataclass(frozen=True)
class AffineObservable:
    """``f = a^k(phi) I_k + b(phi)``, an element of the quantum algebra."""

    a: tuple[FourierSeries, ...]
    b: FourierSeries

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if len(self.a) != self.b.dim or any(s.dim != self.b.dim for s in self.a):
            raise DimensionError("affine observable needs m coefficient series of dimension m")

    @property
    def dim(self) -> int:
        return self.b.dim

    @classmethod
    def action(cls, dim: int, k: int) -> AffineObservable:
        zero = FourierSeries.zero(dim)
        a = [zero] * dim
        a[k] = FourierSeries.constant(dim, 1.0)
        return cls(tuple(a), zero)

    @classmethod
    def function(cls, b: FourierSeries) -> AffineObservable:
        """Observable depending on the angles only."""
        return cls(tuple(FourierSeries.zero(b.dim) for _ in range(b.dim)), b)

    def is_real(self, tol: float = 1e-12) -> bool:
        return all(s.is_real(tol) for s in self.a) and self.b.is_real(tol)

    def to_taylor(self, max_degree: int = DEFAULT_MAX_DEGREE) -> FourierTaylor:
        m = self.dim
        terms = {_unit(m, k): s for k, s in enumerate(self.a)}
        terms[(0,) * m] = self.b
        return FourierTaylor(m, terms, max_degree)

    def __add__(self, other: AffineObservable) -> AffineObservable:
        return AffineObservable(tuple(x + y for x, y in zip(self.a, other.a)), self.b + other.b)

    def __sub__(self, other: AffineObservable) -> AffineObservable:
        return AffineObservable(tuple(x - y for x, y in zip(self.a, other.a)), self.b - other.b)

    def scale(self, value: complex) -> AffineObservable:
        return AffineObservable(tuple(s.scale(value) for s in self.a), self.b.scale(value))

    def max_abs_diff(self, other: AffineObservable) -> float:
        diffs = [x.max_abs_diff(y) for x, y in zip(self.a, other.a)]
        return max([*diffs, self.b.max_abs_diff(other.b)])

    def to_record(self) -> dict:
        return {"a": [s.to_records() for s in self.a], "b": self.b.to_records()}

    @classmethod
    def from_record(cls, record: Mapping, dim: int) -> AffineObservable:
        a = tuple(FourierSeries.from_records(r, dim) for r in record["a"])
        return cls(a, FourierSeries.from_records(record["b"], dim))


@dataclass(frozen=True)
class VectorFieldOnAnnulus:
    """``sum_k angle[k] d/dphi^k + action[k] d/dI_k``."""

    angle: tuple[FourierTaylor, ...]
    action: tuple[FourierTaylor, ...]

    @property
    def dim(self) -> int:
        return len(self.angle)

    def apply(self, s: FourierTaylor) -> FourierTaylor:
        """Directional derivative of ``s`` along the field."""
        out = FourierTaylor(s.dim, {}, s.max_degree)
        for k in range(self.dim):
            if not self.angle[k].is_zero():
                out = out + self.angle[k] * s.d_angle(k)
            if not self.action[k].is_zero():
                out = out + self.action[k] * s.d_action(k)
        return out


def poisson_bracket_affine(f: AffineObservable, g: AffineObservable) -> AffineObservable:
    """Bracket on the affine class, closed form.

    With ``g = c^k I_k + d`` the result has ``I_r``-coefficient
    ``a^k d_k c^r - c^k d_k a^r`` and free term ``a^k d_k d - c^k d_k b``.
    """
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    m = f.dim
    a_out = []
    for r in range(m):
        acc = FourierSeries.zero(m)
        for k in range(m):
            acc = acc + f.a[k] * angle_derivative(g.a[r], k) - g.a[k] * angle_derivative(f.a[r], k)
        a_out.append(acc)
    b_out = FourierSeries.zero(m)
    for k in range(m):
        b_out = b_out + f.a[k] * angle_derivative(g.b, k) - g.a[k] * angle_derivative(f.b, k)
    return AffineObservable(tuple(a_out), b_out)


def poisson_bracket_general(f: FourierTaylor, g: FourierTaylor) -> FourierTaylor:
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    out = FourierTaylor(f.dim, {}, max(f.max_degree, g.max_degree))
    for k in range(f.dim):
        out = out + f.d_action(k) * g.d_angle(k) - f.d_angle(k) * g.d_action(k)
    return out


def hamiltonian_vector_field(f: FourierTaylor) -> VectorFieldOnAnnulus:
    """Angle components ``df/dI_k``, action components ``-df/dphi^k``."""
    m = f.dim
    return VectorFieldOnAnnulus(tuple(f.d_action(k) for k in range(m)),
                                tuple(-f.d_angle(k) for k in range(m)))
