import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusquant.fourier import (
    AxisError,
    DimensionError,
    FourierSeries,
    add,
    angle_derivative,
    convolve_mul,
    evaluate,
    is_real,
)

E = FourierSeries.mode


def series_strategy(dim, radius=4, max_terms=5, real=False):
    mode = st.tuples(*[st.integers(-radius, radius)] * dim)
    coeff = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)

    def build(table):
        if real:
            sym = {}
            for n, c in table.items():
                sym[n] = sym.get(n, 0j) + c
                neg = tuple(-v for v in n)
                sym[neg] = sym.get(neg, 0j) + c.conjugate()
            table = sym
        return FourierSeries(dim, table)

    return st.dictionaries(mode, coeff, max_size=max_terms).map(build)


# add -----------------------------------------------------------------------

def test_add_identity():
    assert add(E((1,)), FourierSeries.zero(1)) == E((1,))


def test_add_cancellation():
    assert add(E((1,)), E((1,), -1.0)).is_zero()


def test_add_linearity():
    out = add(E((1,), 2.0), FourierSeries(1, {(1,): 3.0, (-1,): 1.0}))
    assert out.coeffs == {(-1,): 1.0, (1,): 5.0}


def test_add_dimension_mismatch():
    with pytest.raises(DimensionError):
        add(E((1,)), E((1, 0)))


# convolve_mul --------------------------------------------------------------

def test_mul_inverse_modes():
    assert convolve_mul(E((1,)), E((-1,))) == FourierSeries.constant(1, 1.0)


def test_mul_basis_rule():
    assert convolve_mul(E((1, 0)), E((0, 2))) == E((1, 2))


def test_mul_cos_squared():
    # (e^{i phi} + e^{-i phi})^2 / 4 = 1/2 + (e^{2i phi} + e^{-2i phi}) / 4
    c = FourierSeries.cos(1, 0)
    assert (c * c).coeffs == {(-2,): 0.25, (0,): 0.5, (2,): 0.25}


def test_mul_dimension_mismatch():
    with pytest.raises(DimensionError):
        convolve_mul(E((1,)), E((1, 1)))


# angle_derivative ----------------------------------------------------------

def test_derivative_single_mode():
    assert angle_derivative(E((2,)), 0) == E((2,), 2j)


def test_derivative_constant():
    assert angle_derivative(FourierSeries.constant(1, 3.0), 0).is_zero()


def test_derivative_axis():
    assert angle_derivative(E((3, -1)), 0) == E((3, -1), 3j)


def test_derivative_axis_out_of_range():
    with pytest.raises(AxisError):
        angle_derivative(E((1, 1)), 2)


# is_real -------------------------------------------------------------------

def test_is_real_cos():
    assert is_real(FourierSeries.cos(1, 0), 0.0)


def test_is_real_single_exponential():
    assert not is_real(E((1,)), 1e-12)


def test_is_real_within_tolerance():
    f = FourierSeries(1, {(1,): 0.5, (-1,): 0.5 + 1e-15})
    assert is_real(f, 1e-12)
    assert not is_real(f, 0.0)


# evaluate ------------------------------------------------------------------

def test_evaluate_cos_at_zero():
    assert evaluate(FourierSeries.cos(1, 0), [0.0]) == pytest.approx(1.0)


def test_evaluate_mode_quarter_turn():
    assert evaluate(E((1,)), [math.pi / 2]) == pytest.approx(1j)


def test_evaluate_three_terms_at_pi():
    f = FourierSeries(1, {(0,): 1, (1,): 1, (-1,): 1})
    assert evaluate(f, [math.pi]) == pytest.approx(-1.0)


def test_evaluate_wrong_length():
    with pytest.raises(DimensionError):
        evaluate(E((1, 1)), [0.0])


# pruning and serialization -------------------------------------------------

def test_prune_threshold_drops_small_coefficients():
    f = FourierSeries(1, {(0,): 1.0, (1,): 1e-15})
    assert f.support() == [(0,)]
    g = FourierSeries(1, {(0,): 1.0, (1,): 1e-15}, prune=1e-16)
    assert len(g) == 2


def test_records_round_trip_and_order():
    f = FourierSeries(2, {(1, -1): 1 + 2j, (-1, 0): 0.5, (0, 3): -1j})
    recs = f.to_records()
    assert [r["mode"] for r in recs] == [[-1, 0], [0, 3], [1, -1]]
    assert FourierSeries.from_records(recs) == f


def test_conj_matches_pointwise_conjugate():
    f = FourierSeries(2, {(1, -1): 1 + 2j, (0, 2): 0.3j})
    phi = [0.4, -1.1]
    assert evaluate(f.conj(), phi) == pytest.approx(evaluate(f, phi).conjugate())


# properties ----------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(series_strategy(2), series_strategy(2), series_strategy(2))
def test_ring_laws(f, g, h):
    assert (f * g).max_abs_diff(g * f) <= 1e-12
    assert ((f * g) * h).max_abs_diff(f * (g * h)) <= 1e-12
    assert (f * (g + h)).max_abs_diff(f * g + f * h) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(series_strategy(2), series_strategy(2), st.integers(0, 1))
def test_leibniz(f, g, k):
    lhs = angle_derivative(f * g, k)
    rhs = angle_derivative(f, k) * g + f * angle_derivative(g, k)
    assert lhs.max_abs_diff(rhs) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(series_strategy(2, real=True), series_strategy(2, real=True))
def test_real_closed_under_product(f, g):
    assert is_real(f * g, 1e-12)


@settings(max_examples=60, deadline=None)
@given(series_strategy(3), series_strategy(3),
       st.lists(st.floats(-math.pi, math.pi), min_size=3, max_size=3))
def test_evaluate_is_multiplicative(f, g, phi):
    assert abs(evaluate(f * g, phi) - evaluate(f, phi) * evaluate(g, phi)) <= 1e-12 * max(
        1.0, abs(evaluate(f, phi) * evaluate(g, phi)))


def test_derivative_matches_finite_difference():
    rng = np.random.default_rng(1)
    f = FourierSeries(2, {(1, 2): 0.3 - 0.1j, (-2, 1): 0.7, (0, -1): 0.2j})
    h = 1e-5
    for _ in range(5):
        phi = rng.uniform(-3, 3, 2)
        for k in range(2):
            dp = phi.copy()
            dp[k] += h
            dm = phi.copy()
            dm[k] -= h
            fd = (evaluate(f, dp) - evaluate(f, dm)) / (2 * h)
            assert abs(evaluate(angle_derivative(f, k), phi) - fd) < 1e-8


def test_evaluate_agrees_with_explicit_sum():
    f = FourierSeries(2, {(1, 2): 0.3, (-1, 0): 1j})
    phi = (0.2, 0.9)
    explicit = 0.3 * cmath.exp(1j * (0.2 + 1.8)) + 1j * cmath.exp(-0.2j)
    assert evaluate(f, phi) == pytest.approx(explicit)
