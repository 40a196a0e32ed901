import numpy as np
import pytest

from torusquant.fourier import DimensionError, FourierSeries
from torusquant.poisson import (
    AffineObservable,
    DegreeCapError,
    FourierTaylor,
    hamiltonian_vector_field,
    poisson_bracket_affine,
    poisson_bracket_general,
)
from torusquant.sampling import random_affine, random_taylor

E = FourierSeries.mode


def taylor_max_diff(f, g):
    return (f - g).max_abs_coeff()


# affine bracket --------------------------------------------------------------

def test_actions_commute():
    assert poisson_bracket_affine(AffineObservable.action(2, 0), AffineObservable.action(2, 1)) \
        .max_abs_diff(AffineObservable.function(FourierSeries.zero(2))) == 0.0


def test_action_with_phase():
    out = poisson_bracket_affine(AffineObservable.action(1, 0), AffineObservable.function(E((1,))))
    expected = AffineObservable.function(E((1,), 1j))
    assert out.max_abs_diff(expected) <= 1e-15


def test_cos_sin_actions():
    # a d c - c d a = cos cos + sin sin = 1
    f = AffineObservable((FourierSeries.cos(1, 0),), FourierSeries.zero(1))
    g = AffineObservable((FourierSeries.sin(1, 0),), FourierSeries.zero(1))
    assert poisson_bracket_affine(f, g).max_abs_diff(AffineObservable.action(1, 0)) <= 1e-15


def test_affine_dimension_mismatch():
    with pytest.raises(DimensionError):
        poisson_bracket_affine(AffineObservable.action(1, 0), AffineObservable.action(2, 0))


# general bracket -------------------------------------------------------------

def test_square_action_with_phase():
    I = FourierTaylor.action(1, 0)
    out = poisson_bracket_general(I * I, FourierTaylor.from_series(E((1,))))
    expected = FourierTaylor(1, {(1,): E((1,), 2j)})
    assert taylor_max_diff(out, expected) <= 1e-15


def test_self_bracket_vanishes():
    rng = np.random.default_rng(0)
    for _ in range(10):
        f = random_taylor(rng, 2, 2, 2)
        assert poisson_bracket_general(f, f).max_abs_coeff() <= 1e-12


def test_general_agrees_with_affine():
    rng = np.random.default_rng(1)
    for _ in range(50):
        m = int(rng.integers(1, 4))
        f, g = random_affine(rng, m, 2), random_affine(rng, m, 2)
        general = poisson_bracket_general(f.to_taylor(), g.to_taylor())
        assert general.is_affine()
        assert general.to_affine().max_abs_diff(poisson_bracket_affine(f, g)) <= 1e-12


def test_bracket_matches_finite_differences():
    # independent oracle: evaluate f, g pointwise and difference numerically
    rng = np.random.default_rng(2)
    f = random_taylor(rng, 2, 2, 2)
    g = random_taylor(rng, 2, 2, 2)
    bracket = poisson_bracket_general(f, g)
    h = 1e-5

    def grad(F, I, phi):
        dI, dphi = [], []
        for k in range(2):
            e = np.eye(2)[k] * h
            dI.append((F.evaluate(I + e, phi) - F.evaluate(I - e, phi)) / (2 * h))
            dphi.append((F.evaluate(I, phi + e) - F.evaluate(I, phi - e)) / (2 * h))
        return np.array(dI), np.array(dphi)

    for _ in range(5):
        I, phi = rng.uniform(-1, 1, 2), rng.uniform(-3, 3, 2)
        fI, fphi = grad(f, I, phi)
        gI, gphi = grad(g, I, phi)
        fd = np.sum(fI * gphi - fphi * gI)
        assert abs(bracket.evaluate(I, phi) - fd) < 1e-6


def test_general_dimension_mismatch():
    with pytest.raises(DimensionError):
        poisson_bracket_general(FourierTaylor.action(1, 0), FourierTaylor.action(2, 0))


# Hamiltonian vector field ------------------------------------------------------

def test_hvf_of_action():
    v = hamiltonian_vector_field(FourierTaylor.action(2, 0))
    assert taylor_max_diff(v.angle[0], FourierTaylor.constant(2, 1.0)) == 0.0
    assert all(c.is_zero() for c in (v.angle[1], v.action[0], v.action[1]))


def test_hvf_of_phase():
    v = hamiltonian_vector_field(FourierTaylor.from_series(E((1,))))
    assert v.angle[0].is_zero()
    assert taylor_max_diff(v.action[0], FourierTaylor.from_series(E((1,), -1j))) <= 1e-15


def test_hvf_of_affine_matches_closed_form():
    # theta_f = a d_phi - (I a' + b') d_I for f = a(phi) I + b(phi)
    a = FourierSeries(1, {(1,): 0.5, (-1,): 0.5, (2,): 0.1j, (-2,): -0.1j})
    b = FourierSeries.sin(1, 0)
    f = AffineObservable((a,), b).to_taylor()
    v = hamiltonian_vector_field(f)
    assert taylor_max_diff(v.angle[0], FourierTaylor.from_series(a)) == 0.0
    expected = -(FourierTaylor.action(1, 0) * a.derivative(0) + b.derivative(0))
    assert taylor_max_diff(v.action[0], expected) <= 1e-15


# algebraic properties ----------------------------------------------------------

def test_antisymmetry_and_bilinearity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        f, g, h = (random_taylor(rng, 2, 2, 2) for _ in range(3))
        assert (poisson_bracket_general(f, g) + poisson_bracket_general(g, f)).max_abs_coeff() <= 1e-12
        lhs = poisson_bracket_general(f.scale(0.7) + h.scale(-1.3j), g)
        rhs = poisson_bracket_general(f, g).scale(0.7) + poisson_bracket_general(h, g).scale(-1.3j)
        assert taylor_max_diff(lhs, rhs) <= 1e-12


def test_jacobi_identity():
    rng = np.random.default_rng(4)
    for _ in range(25):
        f, g, h = (random_taylor(rng, 2, 2, 2, max_degree=6) for _ in range(3))
        P = poisson_bracket_general
        jac = P(f, P(g, h)) + P(g, P(h, f)) + P(h, P(f, g))
        assert jac.max_abs_coeff() <= 1e-12


def test_leibniz_rule():
    rng = np.random.default_rng(5)
    for _ in range(20):
        f, g, h = (random_taylor(rng, 2, 1, 2) for _ in range(3))
        P = poisson_bracket_general
        assert taylor_max_diff(P(f, g * h), P(f, g) * h + g * P(f, h)) <= 1e-12


def test_affine_closure_preserves_reality():
    rng = np.random.default_rng(6)
    for _ in range(30):
        f, g = random_affine(rng, 3, 2), random_affine(rng, 3, 2)
        assert f.is_real() and g.is_real()
        assert poisson_bracket_affine(f, g).is_real(1e-12)


def test_degree_cap_is_an_error():
    I = FourierTaylor.action(1, 0)
    quartic = I * I * I * I
    assert quartic.degree() == 4
    with pytest.raises(DegreeCapError):
        quartic * I
    assert (FourierTaylor.action(1, 0, max_degree=6) * quartic).degree() == 5


def test_affine_records_round_trip():
    rng = np.random.default_rng(7)
    f = random_affine(rng, 2, 2)
    assert AffineObservable.from_record(f.to_record(), 2).max_abs_diff(f) == 0.0
