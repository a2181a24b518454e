from fractions import Fraction

import mpmath
import pytest

from app.core.errors import DomainError
from app.services.lattice_oracle import axis_prob, exact_prob
from app.schemas.schemas import ORIGIN
from app.services.series_oracle import (
    PowerSeries,
    f1_squared_series,
    green_series_origin,
    prob_series,
    series_inverse,
    series_inverse_sqrt,
    series_mul,
    series_pow,
    series_sqrt,
)


def test_green_series_first_coefficients():
    g = green_series_origin(4)
    assert g[0] == 1
    assert g[1] == Fraction(3, 8)
    for n in range(5):
        assert g[n] == exact_prob(ORIGIN, ORIGIN, 2 * n)


def test_f1_squared_starts_at_z():
    f = f1_squared_series(6)
    assert f[0] == 0
    assert f[1] == Fraction(1, 4)
    assert all(c > 0 for c in f.coeffs[1:])


@pytest.mark.parametrize("axis", ["Y", "X"])
@pytest.mark.parametrize("k", [0, 1, 3, 6])
def test_series_matches_lattice(axis, k):
    order = 24
    series = prob_series(axis, k, order)
    for n in range(order + 1):
        assert series[n] == axis_prob(axis, k, n)


@pytest.mark.slow
@pytest.mark.parametrize("axis", ["Y", "X"])
@pytest.mark.parametrize("k", range(11))
def test_series_matches_lattice_up_to_sixty_steps(axis, k):
    order = 60
    series = prob_series(axis, k, order)
    for n in range(order + 1):
        assert series[n] == axis_prob(axis, k, n)



def test_float_mode_close_to_exact():
    exact = prob_series("X", 2, 30)
    approx = prob_series("X", 2, 30, exact=False, prec=128)
    for e, a in zip(exact.coeffs, approx.coeffs):
        if e == 0:
            assert abs(a) <= mpmath.mpf(10) ** -30
        else:
            assert abs(a - mpmath.mpf(e.numerator) / e.denominator) <= mpmath.mpf(10) ** -30 * abs(a)


def test_sqrt_and_inverse_are_exact():
    a = PowerSeries.linear(1, -1, 20)
    s = series_sqrt(a)
    assert series_mul(s, s) == a
    y = series_inverse_sqrt(a)
    assert series_mul(series_mul(y, y), a) == PowerSeries.constant(1, 20)
    inverse = series_inverse(a)
    assert inverse == PowerSeries([1] * 21)


def test_pow_matches_repeated_products():
    f = f1_squared_series(15)
    expected = PowerSeries.constant(1, 15)
    for _ in range(5):
        expected = series_mul(expected, f)
    assert series_pow(f, 5) == expected


def test_arithmetic_and_evaluation():
    a = PowerSeries([1, 2, 3])
    b = PowerSeries([0, 1, 1])
    assert (a + b).coeffs == [1, 3, 4]
    assert (a - b).coeffs == [1, 1, 2]
    assert (a * 2).coeffs == [2, 4, 6]
    assert b.shift_down().coeffs == [1, 1]
    assert a.evaluate(Fraction(1, 2)) == Fraction(11, 4)


def test_invalid_operations():
    with pytest.raises(DomainError):
        PowerSeries([1, 2]).shift_down()
    with pytest.raises(DomainError):
        series_inverse_sqrt(PowerSeries([2, 1]))
    with pytest.raises(DomainError):
        series_mul(PowerSeries([1, 2]), PowerSeries([1, 2, 3]))
    with pytest.raises(DomainError):
        series_inverse(PowerSeries([0, 1]))
    with pytest.raises(DomainError):
        prob_series("Z", 1, 4)
    with pytest.raises(DomainError):
        green_series_origin(-1)
