"""Parameter-dependent perturbations and their path-ordered (holonomy) evolution.

The perturbation ``Delta = Lambda^a_beta(xi, phi_a) dxi^beta/dt I_a`` is affine
in the actions, so at each instant it is quantized like any other element of
the quantum algebra. Its evolution along a curve in parameter space is
approximated on a finite box of Fourier labels by the exponential midpoint
rule, and is second order in the step size.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.sparse

from .fourier import FourierSeries
from .poisson import AffineObservable
from .representation import (
    Poly,
    RepresentationParams,
    ShiftOperator,
    commutator,
    quantize_affine,
)
from .spectra import HamiltonianSpec, hamiltonian_operator

LambdaTable = Sequence[Sequence[FourierSeries]]  # [a position][beta]


class PerturbationError(ValueError):
    """Perturbation data violates its invariants."""


class MarginError(ValueError):
    """An operator band reaches further than the truncation margin allows."""


class PathError(ValueError):
    """Malformed parameter path or time change."""


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation coefficients ``Lambda^a_beta``.

    ``a_indices`` are 0-based action axes the unperturbed Hamiltonian does not
    depend on. ``generator`` (optional) maps a parameter point to a table
    ``[a position][beta] -> FourierSeries``; paths may instead carry tables at
    their nodes.
    """

    dim: int
    a_indices: tuple[int, ...]
    params: int
    generator: Callable[[np.ndarray], LambdaTable] | None = None

    def __post_init__(self):
        a = tuple(int(k) for k in self.a_indices)
        if len(set(a)) != len(a) or any(not 0 <= k < self.dim for k in a):
            raise PerturbationError(f"invalid a-block {a} for dim {self.dim}")
        if self.params < 1:
            raise PerturbationError("at least one parameter is required")
        object.__setattr__(self, "a_indices", a)

    def validate(self, table: LambdaTable, tol: float = 1e-12) -> None:
        if len(table) != len(self.a_indices) or any(len(row) != self.params for row in table):
            raise PerturbationError(
                f"Lambda table must be {len(self.a_indices)} x {self.params}")
        others = [k for k in range(self.dim) if k not in self.a_indices]
        for row in table:
            for series in row:
                if series.dim != self.dim:
                    raise PerturbationError("Lambda series has the wrong dimension")
                if not series.is_real(tol):
                    raise PerturbationError("Lambda series must be real-valued")
                for mode in series.support():
                    if any(mode[k] for k in others):
                        raise PerturbationError(
                            f"Lambda depends on angle outside the a-block (mode {list(mode)})")

    def table_at(self, xi: Sequence[float]) -> LambdaTable:
        if self.generator is None:
            raise PerturbationError("no generator; Lambda must come from path nodes")
        table = self.generator(np.asarray(xi, dtype=float))
        self.validate(table)
        return table


def _combine(table: LambdaTable, v: Sequence[float], dim: int) -> list[FourierSeries]:
    out = []
    for row in table:
        acc = FourierSeries.zero(dim)
        for series, vb in zip(row, v):
            if vb:
                acc = acc + series.scale(vb)
        out.append(acc)
    return out


def perturbation_observable(spec: PerturbationSpec, table: LambdaTable,
                            v: Sequence[float]) -> AffineObservable:
    """Affine observable with ``a^a = sum_beta Lambda^a_beta v^beta`` and ``b = 0``."""
    zero = FourierSeries.zero(spec.dim)
    a = [zero] * spec.dim
    for axis, series in zip(spec.a_indices, _combine(table, v, spec.dim)):
        a[axis] = series
    return AffineObservable(tuple(a), zero)


def quantize_perturbation(spec: PerturbationSpec, xi: Sequence[float], v: Sequence[float],
                          rep: RepresentationParams,
                          table: LambdaTable | None = None) -> ShiftOperator:
    """Quantized perturbation at parameter point ``xi`` and velocity (or increment) ``v``."""
    if len(v) != spec.params:
        raise PerturbationError(f"expected {spec.params} velocity components")
    table = spec.table_at(xi) if table is None else table
    spec.validate(table)
    return quantize_affine(perturbation_observable(spec, table, v), rep)


def perturbation_operator_direct(spec: PerturbationSpec, table: LambdaTable,
                                 v: Sequence[float], rep: RepresentationParams) -> ShiftOperator:
    """Same operator assembled term by term from ``-(i L d_a + (i/2) d_a L + lam_a L) v``.

    With ``L = sum_beta Lambda^a_beta v^beta = sum_s L_s e^{i s.phi}`` and basis
    ``e^{i (n+eps).phi}``: ``-i L d_a`` contributes ``L_s (n_a + eps_a)``,
    ``-(i/2) d_a L`` contributes ``L_s s_a / 2`` and ``-lam_a L`` contributes
    ``-lam_a L_s`` to band ``s``.
    """
    m = spec.dim
    bands: dict[tuple[int, ...], Poly] = {}
    for axis, series in zip(spec.a_indices, _combine(table, v, m)):
        unit = [0.0] * m
        unit[axis] = 1.0
        for s, c in series.items():
            derivative = Poly.linear([c * u for u in unit], c * rep.eps[axis])
            divergence = Poly.constant(m, c * s[axis] / 2)
            flat = Poly.constant(m, -c * rep.lam[axis])
            term = derivative + divergence + flat
            bands[s] = bands[s] + term if s in bands else term
    return ShiftOperator(m, bands)


@dataclass
class ParameterPath:
    """Piecewise-linear curve ``t -> xi(t)`` through the given nodes.

    ``tables`` optionally holds one Lambda table per node; between nodes the
    coefficients are interpolated linearly.
    """

    times: np.ndarray
    points: np.ndarray
    closed: bool = False
    tables: list[LambdaTable] | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float).reshape(-1)
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] != self.times.size:
            raise PathError("one parameter point per node is required")
        if self.times.size == 0:
            raise PathError("path needs at least one node")
        if np.any(np.diff(self.times) <= 0):
            raise PathError("node times must be strictly increasing")
        if not np.all(np.isfinite(self.points)):
            raise PathError("non-finite parameter values")
        if self.closed and not np.allclose(self.points[0], self.points[-1], rtol=0, atol=1e-12):
            raise PathError("closed path must end where it starts")
        if self.tables is not None and len(self.tables) != self.times.size:
            raise PathError("one Lambda table per node is required")

    @property
    def n_segments(self) -> int:
        return self.times.size - 1

    @property
    def params(self) -> int:
        return self.points.shape[1]

    def position(self, t: float) -> np.ndarray:
        return np.array([np.interp(t, self.times, self.points[:, j]) for j in range(self.params)])

    def table_at(self, segment: int, u: float) -> LambdaTable:
        left, right = self.tables[segment], self.tables[segment + 1]
        return [[a.scale(1.0 - u) + b.scale(u) for a, b in zip(ra, rb)]
                for ra, rb in zip(left, right)]

    def reversed(self) -> ParameterPath:
        """Same curve traversed backwards over the same time span."""
        t0, t1 = self.times[0], self.times[-1]
        tables = None if self.tables is None else list(reversed(self.tables))
        return ParameterPath(t0 + t1 - self.times[::-1], self.points[::-1].copy(), self.closed, tables)

    def then(self, other: ParameterPath) -> ParameterPath:
        """Concatenation; ``other`` must start where ``self`` ends."""
        if not np.allclose(self.points[-1], other.points[0], rtol=0, atol=1e-12):
            raise PathError("paths do not join")
        shift = self.times[-1] - other.times[0]
        times = np.concatenate([self.times, other.times[1:] + shift])
        points = np.vstack([self.points, other.points[1:]])
        tables = None
        if self.tables is not None and other.tables is not None:
            tables = list(self.tables) + list(other.tables[1:])
        closed = bool(np.allclose(points[0], points[-1], rtol=0, atol=1e-12))
        return ParameterPath(times, points, closed, tables)

    @classmethod
    def from_function(cls, curve: Callable[[float], Sequence[float]], times: Sequence[float],
                      closed: bool = False,
                      table_fn: Callable[[np.ndarray], LambdaTable] | None = None) -> ParameterPath:
        pts = np.array([np.asarray(curve(t), dtype=float) for t in times])
        if closed:
            pts[-1] = pts[0]
        tables = None if table_fn is None else [table_fn(p) for p in pts]
        return cls(np.asarray(times, dtype=float), pts, closed, tables)


@dataclass(frozen=True)
class TruncationBox:
    """Labels with ``|n_k| <= radius[k]``; bands may shift by at most ``margin[k]``.

    Labels within ``margin`` of the boundary are outside the interior, where
    accuracy is asserted.
    """

    radius: tuple[int, ...]
    margin: tuple[int, ...]
    policy: str = field(default="drop-outflow")

    def __post_init__(self):
        radius = tuple(int(r) for r in self.radius)
        margin = tuple(int(x) for x in self.margin)
        if len(radius) != len(margin):
            raise ValueError("radius and margin lengths differ")
        if any(x < 0 for x in margin) or any(r < x for r, x in zip(radius, margin)):
            raise ValueError("need radius >= margin >= 0 on every axis")
        if self.policy != "drop-outflow":
            raise ValueError(f"unsupported boundary policy {self.policy!r}")
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "margin", margin)

    @classmethod
    def cube(cls, dim: int, radius: int, margin: int) -> TruncationBox:
        return cls((radius,) * dim, (margin,) * dim)

    @property
    def dim(self) -> int:
        return len(self.radius)

    def labels(self) -> np.ndarray:
        return np.array(list(itertools.product(*(range(-r, r + 1) for r in self.radius))),
                        dtype=int).reshape(-1, self.dim)

    @property
    def size(self) -> int:
        return math.prod(2 * r + 1 for r in self.radius)

    def flat_index(self, labels: np.ndarray) -> np.ndarray:
        idx = np.zeros(labels.shape[0], dtype=int)
        for k, r in enumerate(self.radius):
            idx = idx * (2 * r + 1) + (labels[:, k] + r)
        return idx

    def contains(self, labels: np.ndarray) -> np.ndarray:
        return np.all(np.abs(labels) <= np.asarray(self.radius), axis=1)

    def interior(self) -> np.ndarray:
        """Boolean mask over :meth:`labels` of modes at least ``margin`` from the boundary."""
        bound = np.asarray(self.radius) - np.asarray(self.margin)
        return np.all(np.abs(self.labels()) <= bound, axis=1)

    def to_record(self) -> dict:
        return {"radius": list(self.radius), "margin": list(self.margin), "policy": self.policy}


def _poly_on_grid(p: Poly, labels: np.ndarray) -> np.ndarray:
    out = np.zeros(labels.shape[0], dtype=complex)
    for powers, c in p.items():
        mono = np.ones(labels.shape[0])
        for k, e in enumerate(powers):
            if e:
                mono = mono * labels[:, k].astype(float) ** e
        out += c * mono
    return out


def materialize(P: ShiftOperator, box: TruncationBox, sparse: bool = False):
    """Matrix of ``P`` on the box: entry ``(n+s, n) = p_s(n)``; outflow is dropped."""
    if P.dim != box.dim:
        raise ValueError("operator and box dimensions differ")
    for s in P.shifts():
        if any(abs(v) > mk for v, mk in zip(s, box.margin)):
            raise MarginError(f"band shift {list(s)} exceeds margin {list(box.margin)}")
    labels = box.labels()
    cols = np.arange(labels.shape[0])
    rows_all, cols_all, vals_all = [], [], []
    for s, p in P.items():
        target = labels + np.asarray(s, dtype=int)
        keep = box.contains(target)
        rows_all.append(box.flat_index(target[keep]))
        cols_all.append(cols[keep])
        vals_all.append(_poly_on_grid(p, labels[keep]))
    n = box.size
    if rows_all:
        rows, cols_, vals = (np.concatenate(x) for x in (rows_all, cols_all, vals_all))
    else:
        rows = cols_ = np.zeros(0, dtype=int)
        vals = np.zeros(0, dtype=complex)
    mat = scipy.sparse.coo_matrix((vals, (rows, cols_)), shape=(n, n)).tocsr()
    return mat if sparse else mat.toarray()


def step_exponential(H: np.ndarray, herm_tol: float = 1e-12) -> np.ndarray:
    """``exp(-i H)``.

    Hermitian generators go through an eigendecomposition, which keeps the
    result unitary to rounding; anything else falls back to scaling and
    squaring (``scipy.linalg.expm``).
    """
    if not np.all(np.isfinite(H)):
        raise FloatingPointError("non-finite entries in step generator")
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    if np.max(np.abs(H - H.conj().T), initial=0.0) <= herm_tol * scale:
        w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
        return (V * np.exp(-1j * w)) @ V.conj().T
    return scipy.linalg.expm(-1j * H)


class _Assembler:
    """Caches materialized unit-coefficient operators so a step matrix is a linear combination."""

    def __init__(self, spec: PerturbationSpec, rep: RepresentationParams, box: TruncationBox):
        self.spec, self.rep, self.box = spec, rep, box
        self._cache: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}

    def _unit(self, axis: int, mode: tuple[int, ...]) -> np.ndarray:
        key = (axis, mode)
        if key not in self._cache:
            zero = FourierSeries.zero(self.spec.dim)
            a = [zero] * self.spec.dim
            a[axis] = FourierSeries.mode(mode)
            op = quantize_affine(AffineObservable(tuple(a), zero), self.rep)
            self._cache[key] = materialize(op, self.box)
        return self._cache[key]

    def matrix(self, table: LambdaTable, dxi: Sequence[float]) -> np.ndarray:
        self.spec.validate(table)
        out = np.zeros((self.box.size, self.box.size), dtype=complex)
        for axis, series in zip(self.spec.a_indices, _combine(table, dxi, self.spec.dim)):
            for mode, c in series.items():
                out += c * self._unit(axis, mode)
        return out


def _inverse_time(time_map: Callable[[float], float], target: float, lo: float, hi: float) -> float:
    if target <= lo:
        return lo
    if target >= hi:
        return hi
    return scipy.optimize.brentq(lambda s: time_map(s) - target, lo, hi, xtol=1e-15, rtol=1e-15)


def check_time_change(time_map: Callable[[float], float], t0: float, t1: float,
                      samples: int = 1001) -> None:
    grid = np.linspace(t0, t1, samples)
    vals = np.array([time_map(s) for s in grid])
    if abs(vals[0] - t0) > 1e-12 or abs(vals[-1] - t1) > 1e-12:
        raise PathError("time change must preserve the endpoints")
    if np.any(np.diff(vals) <= 0):
        raise PathError("time change must be strictly increasing")


def _segment_edges(path: ParameterPath, i: int, steps: int,
                   time_map: Callable[[float], float] | None) -> np.ndarray:
    """Sub-step boundaries of segment ``i`` in original path time."""
    t_lo, t_hi = path.times[i], path.times[i + 1]
    if time_map is None:
        return np.linspace(t_lo, t_hi, steps + 1)
    t0, t1 = path.times[0], path.times[-1]
    s_lo = _inverse_time(time_map, t_lo, t0, t1)
    s_hi = _inverse_time(time_map, t_hi, t0, t1)
    edges = np.array([time_map(s) for s in np.linspace(s_lo, s_hi, steps + 1)])
    edges[0], edges[-1] = t_lo, t_hi
    return edges


def evolve_U2(spec: PerturbationSpec, path: ParameterPath, rep: RepresentationParams,
              box: TruncationBox, steps: int,
              time_map: Callable[[float], float] | None = None) -> np.ndarray:
    """Path-ordered exponential of the quantized perturbation along ``path``.

    ``steps`` sub-steps are taken per path segment. Each sub-step contributes
    ``exp(-i Delta^(xi_mid, dxi))`` with ``xi_mid`` the midpoint of the
    sub-step chord and ``dxi`` its increment; later steps multiply from the
    left. ``time_map`` traverses the
    same curve with a different time law ``t = time_map(s)``.
    """
    if steps < 1:
        raise ValueError("need at least one step per segment")
    if path.params != spec.params:
        raise PathError(f"path has {path.params} parameters, perturbation expects {spec.params}")
    if time_map is not None:
        check_time_change(time_map, path.times[0], path.times[-1])
    assembler = _Assembler(spec, rep, box)
    U = np.eye(box.size, dtype=complex)
    for i in range(path.n_segments):
        t_lo, t_hi = path.times[i], path.times[i + 1]
        chord = path.points[i + 1] - path.points[i]
        u_edges = (_segment_edges(path, i, steps, time_map) - t_lo) / (t_hi - t_lo)
        for j in range(steps):
            u = 0.5 * (u_edges[j] + u_edges[j + 1])
            dxi = (u_edges[j + 1] - u_edges[j]) * chord
            if path.tables is not None:
                table = path.table_at(i, u)
            else:
                table = spec.table_at(path.points[i] + u * chord)
            U = step_exponential(assembler.matrix(table, dxi)) @ U
    return U


def evolve_U1(hamiltonian: HamiltonianSpec, rep: RepresentationParams, t: float,
              box: TruncationBox, a_indices: Sequence[int] = ()) -> np.ndarray:
    """Dynamic factor ``diag exp(-i H(n + eps - lam) t)`` on the box."""
    for k in a_indices:
        if hamiltonian.depends_on(k):
            raise PerturbationError(f"Hamiltonian depends on a-block action I_{k}")
    labels = box.labels()
    offsets = np.array([rep.offset(k) for k in range(rep.dim)])
    phases = np.array([hamiltonian(tuple(n + offsets), tuple(n)) for n in labels])
    return np.diag(np.exp(-1j * phases * t))


def commute_check(hamiltonian: HamiltonianSpec, spec: PerturbationSpec, xi: Sequence[float],
                  v: Sequence[float], rep: RepresentationParams,
                  table: LambdaTable | None = None) -> ShiftOperator:
    """``[H^, Delta^]`` in band form; zero when the two commute."""
    if not hamiltonian.is_polynomial():
        raise PerturbationError("commutation check needs a polynomial Hamiltonian")
    for k in spec.a_indices:
        if hamiltonian.depends_on(k):
            raise PerturbationError(f"Hamiltonian depends on a-block action I_{k}")
    delta = quantize_perturbation(spec, xi, v, rep, table)
    return commutator(hamiltonian_operator(hamiltonian, rep), delta)


def reparametrize_check(spec: PerturbationSpec, path: ParameterPath,
                        time_map: Callable[[float], float], rep: RepresentationParams,
                        box: TruncationBox, steps: int) -> float:
    """Spectral-norm distance between ``U2`` for the path and its time-changed traversal."""
    check_time_change(time_map, path.times[0], path.times[-1])
    U = evolve_U2(spec, path, rep, box, steps)
    V = evolve_U2(spec, path, rep, box, steps, time_map=time_map)
    return float(np.linalg.norm(U - V, 2))


def interior_unitarity_defect(U: np.ndarray, box: TruncationBox) -> float:
    """Largest deviation of an interior column norm from one."""
    mask = box.interior()
    if not mask.any():
        return 0.0
    norms = np.linalg.norm(U[:, mask], axis=0)
    return float(np.max(np.abs(norms - 1.0)))


def interior_deviation(U: np.ndarray, V: np.ndarray, box: TruncationBox) -> float:
    """Max entry difference of ``U`` and ``V`` restricted to interior columns."""
    mask = box.interior()
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(U[:, mask] - V[:, mask])))


def is_angle_independent(table: LambdaTable) -> bool:
    return all(not any(mode) for row in table for s in row for mode in s.support())


def abelian_line_integral(spec: PerturbationSpec, path: ParameterPath,
                          nodes_per_segment: int = 1) -> np.ndarray:
    """``oint Lambda^a_beta dsigma^beta`` per a-axis by the trapezoid rule.

    Needs angle-independent Lambda (only the zero mode is read). With node
    tables the integrand is linear on each segment and one trapezoid per
    segment is exact.
    """
    zero_mode = (0,) * spec.dim
    total = np.zeros(len(spec.a_indices))
    for i in range(path.n_segments):
        chord = path.points[i + 1] - path.points[i]
        us = np.linspace(0.0, 1.0, nodes_per_segment + 1)
        vals = []
        for u in us:
            if path.tables is not None:
                table = path.table_at(i, u)
            else:
                table = spec.table_at(path.points[i] + u * chord)
            if not is_angle_independent(table):
                raise PerturbationError("closed form needs angle-independent Lambda")
            vals.append([[s[zero_mode].real for s in row] for row in table])
        vals = np.array(vals)  # (nodes, l, p)
        integrand = vals @ chord  # (nodes, l)
        total += np.trapezoid(integrand, us, axis=0)
    return total


def abelian_closed_form(spec: PerturbationSpec, path: ParameterPath, rep: RepresentationParams,
                        box: TruncationBox, nodes_per_segment: int = 1) -> np.ndarray:
    """``diag exp(-i sum_a (n_a + eps_a - lam_a) oint Lambda^a dsigma)``."""
    flux = abelian_line_integral(spec, path, nodes_per_segment)
    labels = box.labels()
    phase = np.zeros(labels.shape[0])
    for pos, axis in enumerate(spec.a_indices):
        phase += (labels[:, axis] + rep.offset(axis)) * flux[pos]
    return np.diag(np.exp(-1j * phase))


def convergence_order(errors: Mapping[int, float]) -> float:
    """Observed order from errors at two step counts: ``log(e1/e2) / log(n2/n1)``."""
    (n1, e1), (n2, e2) = sorted(errors.items())[:2]
    return math.log(e1 / e2) / math.log(n2 / n1)
