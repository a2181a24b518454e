import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.core.errors import DomainError
from app.services.saddle_core import (
    C_PHI_X,
    beta_sector_ok,
    log_rate,
    phi_x,
    phi_y,
    psi2_form_match,
    psi_bar_x,
    psi_tilde_x,
    psi_x,
    psi_y,
    real_imag_root_split,
    saddle,
    v_saddle,
    x_taylor_coeffs,
    y_taylor,
    z_saddle,
)

XI_GRID = np.linspace(0.01, 0.9, 200)


@pytest.mark.parametrize("axis", ["Y", "X"])
def test_saddle_residuals(axis):
    for xi in XI_GRID:
        data = saddle(axis, float(xi))
        assert data.residual < 1e-12
        assert 0 < data.z_o < 1
        assert data.psi2 > 0


def test_y_saddle_closed_form():
    data = saddle("Y", 0.5)
    assert data.z_o == pytest.approx(0.75)
    assert data.u_o == 0.5
    assert data.phi == pytest.approx(float(mpmath.re(psi_y(0.75, 0.5))), rel=1e-14)


def test_x_saddle_solves_cubic():
    for xi in (0.001, 0.1, 0.5, 0.9):
        data = saddle("X", xi)
        u = data.u_o
        assert 2 * u ** 3 - xi ** 2 * u - xi ** 2 == pytest.approx(0, abs=1e-14)
        assert data.v_o == pytest.approx(np.sqrt(u))
        assert data.phi == pytest.approx(phi_x(xi), rel=1e-14)
        assert z_saddle("X", xi) == pytest.approx(data.z_o)


def test_rate_functions_small_xi():
    xi = 1e-3
    assert phi_y(xi) / -xi ** 2 == pytest.approx(1, rel=0.01)
    assert phi_x(xi) / xi ** (4 / 3) == pytest.approx(-C_PHI_X, rel=0.01)
    assert phi_y(0) == 0 and phi_x(0) == 0
    assert log_rate("Y", 0.5, 100) == pytest.approx(100 * phi_y(0.5))


def test_rate_functions_negative_and_decreasing():
    values_y = [phi_y(x) for x in XI_GRID]
    values_x = [phi_x(x) for x in XI_GRID]
    assert all(v < 0 for v in values_y + values_x)
    assert all(b < a for a, b in zip(values_y, values_y[1:]))
    assert all(b < a for a, b in zip(values_x, values_x[1:]))


def test_psi2_forms_agree():
    for xi in (0.05, 0.3, 0.7):
        report = psi2_form_match(xi)
        assert set(report["matches"]) == {"form_z", "form_u"}
        assert saddle("X", xi).psi3 == pytest.approx(report["psi3_numerical"], rel=1e-10)


def test_psi_domain_errors():
    with pytest.raises(DomainError):
        psi_y(0, 0.5)
    with pytest.raises(DomainError):
        psi_x(1.5, 0.5)
    with pytest.raises(DomainError):
        saddle("Y", 1.0)
    with pytest.raises(DomainError):
        saddle("Z", 0.5)


def test_v_saddle():
    assert v_saddle(0) == 0
    assert v_saddle(0.2) ** 4 == pytest.approx(1 - z_saddle("X", 0.2))


@pytest.mark.parametrize("xi, t", [(0.03, 0.1), (0.01, 0.2), (0.05, -0.25)])
def test_y_taylor_matches_direct_evaluation(xi, t):
    value = y_taylor(xi, t)
    direct = complex(psi_y(1 - (xi - 1j * t) ** 2, xi))
    assert value.value == pytest.approx(direct, abs=1e-12)
    assert value.quadratic == pytest.approx(-1 / (1 - xi ** 2))
    assert abs(value.remainder) <= value.bound_constant * abs(t) ** 3


def test_y_taylor_domain():
    with pytest.raises(DomainError):
        y_taylor(0.2, 0.1)
    with pytest.raises(DomainError):
        y_taylor(0.01, 0.3)


@pytest.mark.parametrize("sheet", [1, 2])
def test_x_taylor_coefficients_match_numerical_taylor(sheet):
    xi = 0.1
    coeffs = x_taylor_coeffs(xi)
    with mpmath.workprec(200):
        numerical = mpmath.taylor(lambda v: psi_tilde_x(v, xi, sheet), 0, 12)
    expected = coeffs.d_n if sheet == 1 else coeffs.d_prime_n
    for n in range(1, 13):
        assert complex(numerical[n]) == pytest.approx(complex(expected[n]), rel=1e-6, abs=1e-9)


def test_x_taylor_reconstruction():
    xi = 0.1
    coeffs = x_taylor_coeffs(xi)
    t = 0.01
    direct = complex(psi_tilde_x(coeffs.v + cmath.exp(1j * coeffs.beta) * t, xi))
    assert psi_bar_x(coeffs, t) == pytest.approx(direct, abs=1e-12)
    assert coeffs.g_m[0] == pytest.approx(phi_x(xi), rel=1e-12)
    assert abs(coeffs.g_m[1]) < 1e-12


def test_x_taylor_small_xi_asymptotics():
    xi = 1e-4
    coeffs = x_taylor_coeffs(xi)
    assert coeffs.a2.real / (3 * 2 ** (2 / 3) * xi ** (2 / 3)) == pytest.approx(1, rel=0.05)
    assert coeffs.a3.real / (2 ** (11 / 6) * xi ** (1 / 3)) == pytest.approx(1, rel=0.05)
    assert coeffs.a4.real == pytest.approx(1, rel=0.05)


def test_beta_sector():
    assert beta_sector_ok(-np.pi / 4)
    assert beta_sector_ok(np.pi / 4)
    assert not beta_sector_ok(0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-1.0, 1.0))
def test_real_imag_root_split(xi, t):
    a, b = real_imag_root_split(xi, t)
    assert complex(a, b) ** 2 == pytest.approx(complex(xi, -t), abs=1e-12)
    assert a >= 0


def test_y_taylor_at_zero_xi():
    t = 0.2
    assert y_taylor(0.0, t).value == pytest.approx(-np.log(1 + t * t), abs=1e-14)
