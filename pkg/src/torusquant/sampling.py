"""Seeded random observables for property sweeps."""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import numpy as np

from .fourier import FourierSeries, neg_mode
from .poisson import AffineObservable, FourierTaylor
from .representation import RepresentationParams


def random_series(rng: np.random.Generator, dim: int, radius: int, n_modes: int = 3,
                  real: bool = True, axes: Sequence[int] | None = None) -> FourierSeries:
    """Series with ``n_modes`` random modes of sup-norm at most ``radius``.

    ``axes`` restricts the support to modes vanishing off those axes. Real
    series get conjugate-symmetric coefficients.
    """
    axes = range(dim) if axes is None else list(axes)
    coeffs: dict[tuple[int, ...], complex] = {}
    for _ in range(n_modes):
        n = [0] * dim
        for k in axes:
            n[k] = int(rng.integers(-radius, radius + 1))
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        key = tuple(n)
        coeffs[key] = coeffs.get(key, 0j) + z
        if real:
            coeffs[neg_mode(key)] = coeffs.get(neg_mode(key), 0j) + z.conjugate()
    return FourierSeries(dim, coeffs)


def random_affine(rng: np.random.Generator, dim: int, radius: int, n_modes: int = 3,
                  real: bool = True) -> AffineObservable:
    a = tuple(random_series(rng, dim, radius, n_modes, real) for _ in range(dim))
    return AffineObservable(a, random_series(rng, dim, radius, n_modes, real))


def random_taylor(rng: np.random.Generator, dim: int, degree: int, radius: int,
                  n_modes: int = 2, real: bool = False, max_degree: int | None = None) -> FourierTaylor:
    """Random polynomial in the actions of total degree at most ``degree``."""
    terms = {
        alpha: random_series(rng, dim, radius, n_modes, real)
        for alpha in itertools.product(range(degree + 1), repeat=dim)
        if sum(alpha) <= degree
    }
    if max_degree is None:
        return FourierTaylor(dim, terms)
    return FourierTaylor(dim, terms, max_degree)


def random_rep(rng: np.random.Generator, dim: int, twisted: bool = True,
               spread: float = 3.0) -> RepresentationParams:
    lam = tuple(float(x) for x in rng.uniform(-spread, spread, dim))
    eps = tuple(float(x) for x in rng.integers(0, 2, dim) * 0.5) if twisted else None
    return RepresentationParams(lam, eps)
