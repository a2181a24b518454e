import math

import numpy as np
import pytest
from scipy.special import gamma

from app.core.config import RegimeParams
from app.core.errors import DomainError
from app.schemas.schemas import Regime
from app.services import verify_harness
from app.services.asymptotic_estimators import (
    classify,
    dispatch,
    einstein_constants,
    estimate_regime,
    integral_x,
    integral_x_crossover,
    integral_y,
    jones_bound_log,
    local_estimate,
    local_limit,
    local_limit_pair,
    mid_constant_integral,
    tiny_estimate,
    x_bulk_estimate,
    x_crossover_estimate,
    x_mid_estimate,
    x_small_estimate,
    y_bulk_estimate,
    y_mid_estimate,
)


# ============================================
# INTÉGRALES SPÉCIALES
# ============================================

def test_integral_y_at_zero():
    assert integral_y(0.0) == pytest.approx(math.sqrt(2) * gamma(0.75), rel=1e-9)


def test_integral_y_large_t():
    t = 1e4
    assert integral_y(t) == pytest.approx(2 * math.sqrt(math.pi * t), rel=1e-3)


def test_integral_y_is_increasing():
    values = [integral_y(t) for t in (0.0, 0.5, 1.0, 2.0, 5.0)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("printed_phase", [False, True])
def test_integral_x_at_zero(printed_phase):
    assert integral_x(0.0, printed_phase=printed_phase) == pytest.approx(gamma(0.75) / 4, rel=1e-8)


def test_mid_constant_integral():
    assert mid_constant_integral() == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-8)


def test_crossover_integral_small_t_limit():
    assert integral_x_crossover(1e-6) == pytest.approx(math.sqrt(math.pi), rel=1e-4)


def test_special_integral_domains():
    with pytest.raises(DomainError):
        integral_y(-1.0)
    with pytest.raises(DomainError):
        integral_x(-0.1)
    with pytest.raises(DomainError):
        integral_x_crossover(0.0)


# ============================================
# THÉORÈMES LOCAUX
# ============================================

def test_local_limit_two_comb():
    m = 50
    expected = math.sqrt(2) / gamma(0.25) * m ** -0.75
    assert local_limit(2, 2 * m) == pytest.approx(expected, rel=1e-12)


def test_local_limit_odd_steps():
    assert local_limit(2, 101) == 0.0


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_local_pair_is_half_the_return(d):
    n = 64
    assert 2 * local_limit_pair(d, n, 2) == pytest.approx(local_limit(d, n), rel=1e-12)



def test_local_estimate_regime():
    result = local_estimate(2, 20)
    assert result.regime == Regime.LOCAL
    assert result.formula_id == "local_d2"
    assert result.log_value == pytest.approx(math.log(local_limit(2, 20)))


def test_local_limit_domain():
    with pytest.raises(DomainError):
        local_limit(0, 10)
    with pytest.raises(DomainError):
        local_limit_pair(2, 10, 0)


# ============================================
# AIGUILLAGE
# ============================================

@pytest.mark.parametrize(
    "axis, xi, n, regime",
    [
        ("Y", 0.5, 100, Regime.Y_BULK),
        ("Y", 0.04, 10 ** 6, Regime.Y_MID),
        ("Y", 0.01, 10 ** 4, Regime.Y_SMALL),
        ("Y", 1e-4, 10 ** 4, Regime.Y_TINY),
        ("Y", 0.0, 10 ** 4, Regime.Y_TINY),
        ("X", 0.5, 100, Regime.X_BULK),
        ("X", 0.01, 10 ** 4, Regime.X_MID),
        ("X", 1.2e-3, 10 ** 4, Regime.X_CROSSOVER),
        ("X", 1e-4, 10 ** 4, Regime.X_SMALL),
        ("X", 0.0, 100, Regime.X_TINY),
    ],
)
def test_classify(axis, xi, n, regime):
    assert classify(axis, xi, n) == regime


def test_classify_outside_any_formula():
    with pytest.raises(DomainError):
        classify("Y", 0.96, 100)
    with pytest.raises(DomainError):
        classify("Z", 0.5, 100)


def test_classify_follows_parameters():
    params = RegimeParams(a=0.1)
    assert classify("Y", 0.07, 100, params) == Regime.Y_SMALL
    assert classify("Y", 0.07, 100) == Regime.Y_BULK


def test_dispatch_tiny_on_x_axis():
    result = dispatch("X", 0, 100)
    assert result.regime == Regime.X_TINY
    assert result.formula_id == "tiny_local"
    assert result.value == pytest.approx(math.sqrt(2) / gamma(0.25) * 100 ** -0.75, rel=1e-12)
    assert result.adjacent == []


def test_dispatch_attaches_neighbour_at_boundary():
    result = dispatch("Y", 50, 1000)
    assert result.regime == Regime.Y_BULK
    assert result.adjacent
    assert all(other.regime != Regime.Y_BULK for other in result.adjacent)


def test_dispatch_far_from_boundaries():
    result = dispatch("Y", 300, 1000)
    assert result.regime == Regime.Y_BULK
    assert result.adjacent == []


def test_mid_and_bulk_share_closed_form():
    assert y_mid_estimate(40, 1000).log_value == pytest.approx(y_bulk_estimate(40, 1000).log_value)
    assert y_mid_estimate(40, 1000).formula_id == "y_mid_vertical_segment"


def test_tiny_estimate_matches_local_limit_at_origin():
    assert tiny_estimate("Y", 0, 400).value == pytest.approx(local_limit(2, 800), rel=1e-12)


def test_estimate_regime_rejects_local():
    with pytest.raises(DomainError):
        estimate_regime(Regime.LOCAL, 0, 10)


def test_bulk_formula_undefined_at_zero():
    with pytest.raises(DomainError):
        y_bulk_estimate(0, 100)


def test_x_mid_estimate_is_finite():
    result = x_mid_estimate(100, 10 ** 4)
    assert np.isfinite(result.log_value)
    assert result.regime == Regime.X_MID


def test_x_small_estimate_positive():
    result = x_small_estimate(1, 10 ** 4)
    assert result.regime == Regime.X_SMALL
    assert result.value > 0


# ============================================
# PRÉCISION CONTRE LES ORACLES
# ============================================

@pytest.mark.slow
def test_y_bulk_accuracy_improves_with_n():
    errors = []
    for n in (100, 200, 400):
        k = n // 2
        exact = verify_harness.exact_log("Y", k, n, oracle="contour").log_value
        errors.append(abs(math.expm1(y_bulk_estimate(k, n).log_value - exact)))
    assert errors[-1] < 0.1
    assert all(b < a for a, b in zip(errors, errors[1:]))


@pytest.mark.slow
def test_y_small_regime_on_jones_scale():
    n = 10 ** 4
    k = round(n ** 0.375)
    exact = verify_harness.exact_log("Y", k, n, oracle="contour").log_value
    estimate = dispatch("Y", k, n)
    assert estimate.regime == Regime.Y_SMALL
    assert abs(math.expm1(estimate.log_value - exact)) < 0.2


@pytest.mark.slow
def test_y_tiny_regime_accuracy():
    n = 10 ** 4
    exact = verify_harness.exact_log("Y", 1, n, oracle="contour").log_value
    estimate = dispatch("Y", 1, n)
    assert estimate.regime == Regime.Y_TINY
    assert abs(math.expm1(estimate.log_value - exact)) < 0.1


def _contour_error(axis: str, k: int, n: int, estimate_log: float) -> float:
    exact = verify_harness.exact_log(axis, k, n, oracle="contour").log_value
    return abs(math.expm1(estimate_log - exact))


@pytest.mark.slow
def test_x_bulk_accuracy_improves_with_n():
    errors = [_contour_error("X", n // 2, n, x_bulk_estimate(n // 2, n).log_value) for n in (100, 200, 400)]
    assert errors[-1] < 0.1
    assert all(b < a for a, b in zip(errors, errors[1:]))


@pytest.mark.slow
def test_x_tiny_and_small_formulas_at_one_step_out():
    n = 10 ** 4
    assert _contour_error("X", 1, n, tiny_estimate("X", 1, n).log_value) < 0.1
    assert _contour_error("X", 1, n, x_small_estimate(1, n).log_value) < 0.05
    # signe de phase imprimé : écart d'ordre 1
    assert _contour_error("X", 1, n, x_small_estimate(1, n, printed_phase=True).log_value) > 0.5


@pytest.mark.slow
def test_x_crossover_formula_on_its_scale():
    n = 10 ** 4
    k = round(2 * n ** 0.25)
    assert _contour_error("X", k, n, x_crossover_estimate(k, n).log_value) < 0.15


@pytest.mark.slow
@pytest.mark.parametrize("k", [20, 50, 100, 300])
def test_x_mid_accuracy(k):
    n = 10 ** 4
    assert _contour_error("X", k, n, x_mid_estimate(k, n).log_value) < 0.05


def test_jones_ratio_estimates_decrease():
    rows = verify_harness.jones_ratio([10 ** 3, 10 ** 4, 10 ** 5])
    ratios = [row.log_ratio for row in rows]
    assert all(row.source == "estimate" for row in rows)
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < -10


# ============================================
# CONSTANTES
# ============================================

def test_einstein_constants():
    constants = einstein_constants()
    assert str(constants.delta_s) == "3/2"
    assert str(constants.delta_f) == "2"
    assert str(constants.delta_w) == "8/3"
    assert constants.relation_holds


def test_jones_bound_log():
    n, xi = 1000, 0.1
    expected = -0.75 * math.log(n) - n * xi ** 1.6
    assert jones_bound_log(n, xi) == pytest.approx(expected, rel=1e-12)
