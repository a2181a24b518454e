"""
Service oracle séries : coefficients des fonctions génératrices fermées

p^(2n)((0,2k), o) = [z^n] G(z) F1²(z)^k et p^(2n)((2k,0), o) = [z^n] G(z) F2²(z)^k.
Mode exact : coefficients rationnels. Mode float : mpmath à précision fixée.
"""
from fractions import Fraction
from math import isqrt, lcm
from typing import Optional, Sequence, Union
import logging

import mpmath
import numpy as np

from app.core.config import settings
from app.core.errors import DomainError

logger = logging.getLogger(__name__)

Number = Union[Fraction, int, "mpmath.mpf"]


def _rational_sqrt(q: Fraction) -> Fraction:
    num, den = q.numerator, q.denominator
    root_num, root_den = isqrt(num), isqrt(den)
    if root_num * root_num != num or root_den * root_den != den:
        raise DomainError(f"Terme constant {q} non carré d'un rationnel (mode exact)")
    return Fraction(root_num, root_den)


class PowerSeries:
    """
    Série tronquée Σ_{n<=N} c_n z^n, exacte (Fraction) ou flottante (mpmath).
    """

    __slots__ = ("coeffs", "exact", "prec")

    def __init__(self, coeffs: Sequence[Number], exact: bool = True, prec: Optional[int] = None):
        self.exact = exact
        self.prec = prec or settings.MANTISSA_BITS
        if exact:
            self.coeffs = [Fraction(c) for c in coeffs]
        else:
            with mpmath.workprec(self.prec):
                self.coeffs = [self._to_mpf(c) for c in coeffs]

    @staticmethod
    def _to_mpf(c):
        if isinstance(c, Fraction):
            return mpmath.mpf(c.numerator) / c.denominator
        return mpmath.mpf(c)

    # === constructeurs ===

    @classmethod
    def constant(cls, c: Number, order: int, exact: bool = True, prec: Optional[int] = None) -> "PowerSeries":
        return cls([c] + [0] * order, exact=exact, prec=prec)

    @classmethod
    def linear(cls, c0: Number, c1: Number, order: int, exact: bool = True, prec: Optional[int] = None) -> "PowerSeries":
        """c0 + c1·z tronquée à l'ordre N"""
        coeffs = [c0, c1] + [0] * (order - 1) if order >= 1 else [c0]
        return cls(coeffs, exact=exact, prec=prec)

    def _like(self, coeffs) -> "PowerSeries":
        out = PowerSeries.__new__(PowerSeries)
        out.coeffs, out.exact, out.prec = list(coeffs), self.exact, self.prec
        return out

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:4])
        return f"PowerSeries(N={self.order}, exact={self.exact}, [{head}, ...])"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def _check(self, other: "PowerSeries"):
        if other.order != self.order:
            raise DomainError(f"Ordres de troncature différents ({self.order} != {other.order})")
        if other.exact != self.exact:
            raise DomainError("Mélange de séries exactes et flottantes")

    def truncate(self, order: int) -> "PowerSeries":
        coeffs = self.coeffs[: order + 1]
        coeffs += [coeffs[0] * 0] * (order + 1 - len(coeffs))
        return self._like(coeffs)

    # === arithmétique ===

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            self._check(other)
            with mpmath.workprec(self.prec):
                return self._like([a + b for a, b in zip(self.coeffs, other.coeffs)])
        coeffs = list(self.coeffs)
        with mpmath.workprec(self.prec):
            coeffs[0] = coeffs[0] + other
        return self._like(coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        with mpmath.workprec(self.prec):
            return self._like([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PowerSeries":
        return series_pow(self, k)

    def shift_down(self) -> "PowerSeries":
        """Division par z ; l'ordre connu baisse de 1"""
        if self.coeffs[0] != 0:
            raise DomainError(f"Division par z d'une série de terme constant {self.coeffs[0]}")
        return self._like(self.coeffs[1:])

    def evaluate(self, z):
        with mpmath.workprec(self.prec):
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc


# ============================================
# OPÉRATIONS
# ============================================

def _convolve(a: list, b: list, order: int) -> list:
    return list(np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))[: order + 1])


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Produit de Cauchy tronqué à l'ordre N"""
    a._check(b)
    order = a.order
    if not a.exact:
        with mpmath.workprec(a.prec):
            return a._like(_convolve(a.coeffs, b.coeffs, order))
    # numérateurs entiers sur dénominateur commun
    den_a = lcm(*(c.denominator for c in a.coeffs))
    den_b = lcm(*(c.denominator for c in b.coeffs))
    ints_a = [c.numerator * (den_a // c.denominator) for c in a.coeffs]
    ints_b = [c.numerator * (den_b // c.denominator) for c in b.coeffs]
    den = den_a * den_b
    return a._like([Fraction(int(c), den) for c in _convolve(ints_a, ints_b, order)])


def series_pow(a: PowerSeries, k: int) -> PowerSeries:
    if k < 0:
        raise DomainError(f"Puissance négative: {k}")
    result = PowerSeries.constant(1, a.order, exact=a.exact, prec=a.prec)
    base = a
    while k:
        if k & 1:
            result = series_mul(result, base)
        k >>= 1
        if k:
            base = series_mul(base, base)
    return result


def _sqrt_constant(a: PowerSeries):
    c0 = a.coeffs[0]
    if c0 <= 0:
        raise DomainError(f"Racine carrée d'une série de terme constant non positif ({c0})")
    if a.exact:
        return _rational_sqrt(c0)
    with mpmath.workprec(a.prec):
        return mpmath.sqrt(c0)


def series_inverse_sqrt(a: PowerSeries) -> PowerSeries:
    """
    y = a^(-1/2) par Newton : y <- y + y(1 - a y²)/2, précision doublée à chaque pas.
    """
    root = _sqrt_constant(a)
    with mpmath.workprec(a.prec):
        half = Fraction(1, 2) if a.exact else mpmath.mpf(0.5)
        y = a._like([1 / root])
        known = 1
        while known < a.order + 1:
            known = min(2 * known, a.order + 1)
            a_t = a.truncate(known - 1)
            y = y.truncate(known - 1)
            error = 1 - series_mul(a_t, series_mul(y, y))
            y = y + series_mul(y, error) * half
    return y


def series_sqrt(a: PowerSeries) -> PowerSeries:
    """s avec s² = a mod z^(N+1), terme constant positif"""
    return series_mul(a, series_inverse_sqrt(a))


def series_inverse(a: PowerSeries) -> PowerSeries:
    c0 = a.coeffs[0]
    if c0 == 0:
        raise DomainError("Inverse d'une série de terme constant nul")
    with mpmath.workprec(a.prec):
        y = a._like([1 / c0])
        known = 1
        while known < a.order + 1:
            known = min(2 * known, a.order + 1)
            a_t = a.truncate(known - 1)
            y = y.truncate(known - 1)
            y = y + series_mul(y, 1 - series_mul(a_t, y))
    return y


# ============================================
# FONCTIONS GÉNÉRATRICES
# ============================================

def _sqrt_one_minus_z(order: int, exact: bool, prec: Optional[int]) -> PowerSeries:
    return series_sqrt(PowerSeries.linear(1, -1, order, exact=exact, prec=prec))


def green_series_origin(order: int, exact: bool = True, prec: Optional[int] = None) -> PowerSeries:
    """G(z) = √2 / √(1 - z + √(1-z)) = ((1 - z + s)/2)^(-1/2)"""
    if order < 0:
        raise DomainError(f"Ordre négatif: {order}")
    s = _sqrt_one_minus_z(order, exact, prec)
    one_minus_z = PowerSeries.linear(1, -1, order, exact=exact, prec=prec)
    half = Fraction(1, 2) if exact else mpmath.mpf(0.5)
    return series_inverse_sqrt((one_minus_z + s) * half)


def f1_squared_series(order: int, exact: bool = True, prec: Optional[int] = None) -> PowerSeries:
    """F1²(z) = (2 - z - 2√(1-z)) / z"""
    s = _sqrt_one_minus_z(order + 1, exact, prec)
    numerator = PowerSeries.linear(2, -1, order + 1, exact=exact, prec=prec) - s * 2
    return numerator.shift_down()


def f2_squared_series(order: int, exact: bool = True, prec: Optional[int] = None) -> PowerSeries:
    """
    F2²(z) = ((1+s)² + 2(1-z+s) - 2√(2(1-z+s)(1+s)²)) / z, s = √(1-z).
    Coefficients rationnels à chaque étape.
    """
    s = _sqrt_one_minus_z(order + 1, exact, prec)
    one_plus_s = s + 1
    inner = PowerSeries.linear(1, -1, order + 1, exact=exact, prec=prec) + s
    square = series_mul(one_plus_s, one_plus_s)
    cross = series_sqrt(series_mul(inner * 2, square))
    numerator = square + inner * 2 - cross * 2
    return numerator.shift_down()


def prob_series_y_axis(k: int, order: int, exact: bool = True, prec: Optional[int] = None) -> PowerSeries:
    if k < 0:
        raise DomainError(f"k doit être >= 0 (k={k})")
    green = green_series_origin(order, exact, prec)
    if k == 0:
        return green
    return series_mul(green, series_pow(f1_squared_series(order, exact, prec), k))


def prob_series_x_axis(k: int, order: int, exact: bool = True, prec: Optional[int] = None) -> PowerSeries:
    if k < 0:
        raise DomainError(f"k doit être >= 0 (k={k})")
    green = green_series_origin(order, exact, prec)
    if k == 0:
        return green
    return series_mul(green, series_pow(f2_squared_series(order, exact, prec), k))


def prob_series(axis: str, k: int, order: int, exact: bool = True, prec: Optional[int] = None) -> PowerSeries:
    logger.debug(f"🔍 Série axe {axis}, k={k}, N={order}, exact={exact}")
    if axis == "Y":
        return prob_series_y_axis(k, order, exact, prec)
    if axis == "X":
        return prob_series_x_axis(k, order, exact, prec)
    raise DomainError(f"Axe inconnu: {axis}")
