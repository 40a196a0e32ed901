"""Prequantization on the full annulus.

Connections are represented only through their potential one-form
``theta = (I_k + lambda_k) dphi^k``; sections of the (trivial) prequantum
line bundle are :class:`FourierTaylor` functions of ``(I, phi)``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .fourier import DimensionError
from .poisson import (
    FourierTaylor,
    hamiltonian_vector_field,
    poisson_bracket_general,
)


@dataclass(frozen=True)
class ConnectionParams:
    """Real shift ``lambda`` selecting a flat connection class."""

    lam: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if not all(math.isfinite(x) for x in lam):
            raise ValueError("connection parameters must be finite")
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self) -> int:
        return len(self.lam)

    def representative(self) -> ConnectionParams:
        """Gauge-class representative with entries in ``[0, 1)``."""
        return ConnectionParams(tuple(x - math.floor(x) for x in self.lam))


def _coords(m: int) -> list[str]:
    return [f"I{k + 1}" for k in range(m)] + [f"phi{k + 1}" for k in range(m)]


class OneForm:
    """``sum_j theta_j dx_j`` over coordinates ``(I_1..I_m, phi^1..phi^m)``."""

    def __init__(self, dim: int, components: Sequence[FourierTaylor]):
        if len(components) != 2 * dim:
            raise ValueError("a one-form on the annulus needs 2m components")
        self.dim = dim
        self.components = tuple(components)

    def action_part(self, k: int) -> FourierTaylor:
        return self.components[k]

    def angle_part(self, k: int) -> FourierTaylor:
        return self.components[self.dim + k]

    def exterior_derivative(self) -> TwoForm:
        m = self.dim

        def partial(c: FourierTaylor, i: int) -> FourierTaylor:
            return c.d_action(i) if i < m else c.d_angle(i - m)

        table = {}
        for i in range(2 * m):
            for j in range(i + 1, 2 * m):
                table[(i, j)] = partial(self.components[j], i) - partial(self.components[i], j)
        return TwoForm(m, table)


class TwoForm:
    """Antisymmetric table ``(i, j) -> coefficient of dx_i ^ dx_j``, stored for ``i < j``."""

    def __init__(self, dim: int, table: dict[tuple[int, int], FourierTaylor]):
        self.dim = dim
        self.table: dict[tuple[int, int], FourierTaylor] = {}
        for (i, j), c in table.items():
            if i == j:
                if not c.is_zero():
                    raise ValueError("diagonal entries of a two-form must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            self.table[(i, j)] = self.table[(i, j)] + c if (i, j) in self.table else c

    def __getitem__(self, key: tuple[int, int]) -> FourierTaylor:
        i, j = key
        zero = FourierTaylor(self.dim)
        if i == j:
            return zero
        if i < j:
            return self.table.get((i, j), zero)
        return -self.table.get((j, i), zero)

    def __sub__(self, other: TwoForm) -> TwoForm:
        keys = set(self.table) | set(other.table)
        return TwoForm(self.dim, {k: self[k] - other[k] for k in keys})

    def max_abs_coeff(self) -> float:
        return max((c.max_abs_coeff() for c in self.table.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs_coeff() <= tol

    def nonzero_entries(self) -> dict[str, FourierTaylor]:
        names = _coords(self.dim)
        return {f"d{names[i]}^d{names[j]}": c for (i, j), c in self.table.items() if not c.is_zero()}


def symplectic_form(dim: int) -> TwoForm:
    """``Omega = dI_k ^ dphi^k``."""
    one = FourierTaylor.constant(dim, 1.0)
    return TwoForm(dim, {(k, dim + k): one for k in range(dim)})


def connection_potential(lam: ConnectionParams) -> OneForm:
    m = lam.dim
    zero = FourierTaylor(m)
    angle = [FourierTaylor.action(m, k) + lam.lam[k] for k in range(m)]
    return OneForm(m, [zero] * m + angle)


def curvature_residual(lam: ConnectionParams) -> TwoForm:
    """``d theta - Omega``; vanishes identically when the curvature equals ``i Omega``."""
    return connection_potential(lam).exterior_derivative() - symplectic_form(lam.dim)


def prequantum_multiplier(f: FourierTaylor, lam: ConnectionParams) -> FourierTaylor:
    """``f - (I_k + lambda_k) df/dI_k``."""
    out = f
    for k in range(f.dim):
        out = out - (FourierTaylor.action(f.dim, k, f.max_degree) + lam.lam[k]) * f.d_action(k)
    return out


def prequantum_apply(f: FourierTaylor, lam: ConnectionParams, s: FourierTaylor) -> FourierTaylor:
    """Kostant-Souriau operator of ``f`` applied to the section ``s``.

    Computes ``-i theta_f(s) + (f - (I_k + lambda_k) df/dI_k) s`` where
    ``theta_f`` is the Hamiltonian vector field of ``f``.
    """
    if not (f.dim == s.dim == lam.dim):
        raise DimensionError("observable, section and connection dimensions differ")
    return hamiltonian_vector_field(f).apply(s).scale(-1j) + prequantum_multiplier(f, lam) * s


def prequant_dirac_residual(f: FourierTaylor, g: FourierTaylor, lam: ConnectionParams,
                            s: FourierTaylor) -> FourierTaylor:
    """``([f^, g^] + i {f,g}^) s``; identically zero when the Dirac condition holds."""
    fg = prequantum_apply(f, lam, prequantum_apply(g, lam, s))
    gf = prequantum_apply(g, lam, prequantum_apply(f, lam, s))
    bracket = prequantum_apply(poisson_bracket_general(f, g), lam, s)
    return fg - gf + bracket.scale(1j)


def preserves_polarized_sections(f: FourierTaylor, lam: ConnectionParams,
                                 probe: FourierTaylor) -> bool:
    """Whether ``f^`` maps the action-independent section ``probe`` to an action-independent one."""
    if probe.degree() != 0:
        raise ValueError("probe section must not depend on the actions")
    return prequantum_apply(f, lam, probe).degree() == 0
