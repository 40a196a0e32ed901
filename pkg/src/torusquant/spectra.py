"""Quantized Hamiltonians ``H(I)`` and their spectra on lattice windows."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .representation import Poly, RepresentationParams, ShiftOperator, action_operator, compose

DEFAULT_DEGENERACY_TOL = 1e-9


class AnalyticDomainError(ValueError):
    """An analytic wrapper was evaluated outside its domain."""

    def __init__(self, name: str, value: float, label: Sequence[int] | None = None):
        self.name, self.value, self.label = name, value, None if label is None else tuple(label)
        where = "" if label is None else f" at lattice point {list(label)}"
        super().__init__(f"{name} undefined for argument {value!r}{where}")


# Whitelisted scalar maps with their domains.
ANALYTIC_FUNCTIONS = {
    "exp": (math.exp, lambda x: True),
    "cos": (math.cos, lambda x: True),
    "sin": (math.sin, lambda x: True),
    "cosh": (math.cosh, lambda x: True),
    "sqrt": (math.sqrt, lambda x: x >= 0.0),
    "log": (math.log, lambda x: x > 0.0),
}


@dataclass(frozen=True)
class HamiltonianSpec:
    """``H(I) = sum_alpha c_alpha I^alpha``, optionally wrapped in an analytic map.

    ``terms`` maps action multidegrees to real coefficients. ``analytic`` names
    an entry of :data:`ANALYTIC_FUNCTIONS` applied to the polynomial value.
    """

    dim: int
    terms: Mapping[tuple[int, ...], float] = field(default_factory=dict)
    analytic: str | None = None

    def __post_init__(self):
        clean = {}
        for powers, c in dict(self.terms).items():
            powers = tuple(int(p) for p in powers)
            if len(powers) != self.dim or any(p < 0 for p in powers):
                raise ValueError(f"bad powers {powers} for dim {self.dim}")
            if isinstance(c, complex) or not math.isfinite(float(c)):
                raise ValueError("Hamiltonian coefficients must be finite reals")
            clean[powers] = clean.get(powers, 0.0) + float(c)
        object.__setattr__(self, "terms", {p: clean[p] for p in sorted(clean) if clean[p] != 0.0})
        if self.analytic is not None and self.analytic not in ANALYTIC_FUNCTIONS:
            raise ValueError(f"analytic map {self.analytic!r} not in {sorted(ANALYTIC_FUNCTIONS)}")

    @classmethod
    def from_records(cls, dim: int, records: Iterable[Mapping], analytic: str | None = None):
        terms: dict[tuple[int, ...], float] = {}
        for r in records:
            key = tuple(r["powers"])
            terms[key] = terms.get(key, 0.0) + float(r["coeff"])
        return cls(dim, terms, analytic)

    def is_polynomial(self) -> bool:
        return self.analytic is None

    def degree(self) -> int:
        return max((sum(p) for p in self.terms), default=0)

    def depends_on(self, axis: int) -> bool:
        return any(p[axis] for p in self.terms)

    def polynomial_value(self, actions: Sequence[float]) -> float:
        total = 0.0
        for powers, c in self.terms.items():
            mono = 1.0
            for x, e in zip(actions, powers):
                if e:
                    mono *= x ** e
            total += c * mono
        return total

    def __call__(self, actions: Sequence[float], label: Sequence[int] | None = None) -> float:
        value = self.polynomial_value(actions)
        if self.analytic is None:
            return value
        fn, domain = ANALYTIC_FUNCTIONS[self.analytic]
        if not domain(value):
            raise AnalyticDomainError(self.analytic, value, label)
        return fn(value)


class DiagonalOperator:
    """Lazily evaluated diagonal operator ``psi_n -> H(n + eps - lam) psi_n``."""

    def __init__(self, hamiltonian: HamiltonianSpec, rep: RepresentationParams):
        if hamiltonian.dim != rep.dim:
            raise ValueError("Hamiltonian and representation dimensions differ")
        self.hamiltonian = hamiltonian
        self.rep = rep

    @property
    def dim(self) -> int:
        return self.rep.dim

    def shifted_actions(self, n: Sequence[int]) -> tuple[float, ...]:
        return tuple(nk + self.rep.offset(k) for k, nk in enumerate(n))

    def eigenvalue(self, n: Sequence[int]) -> float:
        return self.hamiltonian(self.shifted_actions(n), n)


def quantize_hamiltonian(hamiltonian: HamiltonianSpec, rep: RepresentationParams) -> DiagonalOperator:
    return DiagonalOperator(hamiltonian, rep)


def hamiltonian_operator(hamiltonian: HamiltonianSpec, rep: RepresentationParams) -> ShiftOperator:
    """Enveloping-algebra element ``H(I^_1, ..., I^_m)`` built by composing action operators."""
    if not hamiltonian.is_polynomial():
        raise ValueError("only polynomial Hamiltonians have an enveloping-algebra form")
    m = rep.dim
    actions = [action_operator(k, rep) for k in range(m)]
    out = ShiftOperator.zero(m)
    for powers, c in hamiltonian.terms.items():
        term = ShiftOperator.identity(m)
        for k, e in enumerate(powers):
            for _ in range(e):
                term = compose(actions[k], term)
        out = out + term.scale(c)
    return out


def window_labels(dim: int, radius: int | Sequence[int]) -> list[tuple[int, ...]]:
    """Lattice points with ``|n_k| <= radius_k`` in lexicographic order."""
    radii = [radius] * dim if isinstance(radius, int) else list(radius)
    if any(r < 0 for r in radii):
        raise ValueError("window radius must be nonnegative")
    return list(itertools.product(*(range(-r, r + 1) for r in radii)))


def spectrum_window(D: DiagonalOperator, N: int) -> list[tuple[float, tuple[int, ...]]]:
    """All ``(eigenvalue, label)`` with ``max_k |n_k| <= N``, ascending, ties by label."""
    if N < 0:
        raise ValueError("window radius must be nonnegative")
    entries = [(D.eigenvalue(n), n) for n in window_labels(D.dim, N)]
    entries.sort(key=lambda e: (e[0], e[1]))
    return entries


def group_eigenvalues(values: Iterable[float], tol: float = DEFAULT_DEGENERACY_TOL) -> dict[float, int]:
    """Chain-group sorted values whose neighbours differ by at most ``tol``.

    Each group is keyed by its smallest member.
    """
    table: dict[float, int] = {}
    key = prev = None
    for v in sorted(values):
        if prev is None or v - prev > tol:
            key = v
            table[key] = 0
        table[key] += 1
        prev = v
    return table


def degeneracy_table(D: DiagonalOperator, N: int,
                     tol: float = DEFAULT_DEGENERACY_TOL) -> dict[float, int]:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return group_eigenvalues((v for v, _ in spectrum_window(D, N)), tol)


def diagonal_band(op: ShiftOperator) -> Poly:
    """The ``s = 0`` band; raises if the operator has off-diagonal bands."""
    off = [s for s in op.shifts() if any(s)]
    if off:
        raise ValueError(f"operator has off-diagonal bands {off}")
    return op.band((0,) * op.dim)
