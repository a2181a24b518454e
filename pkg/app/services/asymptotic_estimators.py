"""
Service d'estimation asymptotique : formules par régime, intégrales spéciales
et aiguillage selon (axe, ξ, n)

Tous les facteurs e^(nφ) restent en log ; `value` n'est matérialisée que si
elle est représentable.
"""
from fractions import Fraction
from typing import Callable, Optional
import logging

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gammaln

from app.core.config import RegimeParams
from app.core.errors import DomainError
from app.schemas.schemas import EinsteinConstants, EstimateResult, Regime
from app.services.green_eval import eval_g
from app.services.saddle_core import phi, x_taylor_coeffs, z_saddle

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 400

# coupures de queue : enveloppe < 1e-16 du pic
GAUSS_CUTOFF = float(np.sqrt(2 * np.log(1e16)))
QUARTIC_CUTOFF = 4.0
CROSSOVER_CUTOFF = 12.0

LOG_TINY_CONSTANT = 0.5 * np.log(2) - gammaln(0.25)  # log(√2/Γ(1/4))


def _quad(integrand: Callable[[float], float], lo: float, hi: float) -> float:
    value, _ = integrate.quad(integrand, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return value


# ============================================
# INTÉGRALES SPÉCIALES
# ============================================

def integral_y(t: float, upper: Optional[float] = None) -> float:
    """I(t) = ∫_ℝ e^(-θ²/2) √(√(t² + θ²/2) + t) dθ, I(0) = √2 Γ(3/4)"""
    if t < 0:
        raise DomainError(f"t={t} < 0")
    upper = upper or GAUSS_CUTOFF

    def integrand(theta):
        return np.exp(-theta * theta / 2) * np.sqrt(np.sqrt(t * t + theta * theta / 2) + t)

    return 2 * _quad(integrand, 0.0, upper)


def integral_x(delta: float, printed_phase: bool = False, upper: Optional[float] = None) -> float:
    """
    I(δ) = ∫_0^∞ e^(-2^(4/3)δθ³ - θ⁴) [cos A (2^(-1/3)δ² + θ² + 2^(4/3)δθ) - sin A (θ² - 2^(-1/3)δ²)] dθ,
    A = 3·2^(2/3)δ²θ² + 2^(4/3)δθ³ (rotation e^(2iβ) = -i pour β = -π/4).
    printed_phase=True : variante A' = 3·2^(2/3)δ²θ² - 2^(4/3)δθ³ avec + sin A'.
    """
    if delta < 0:
        raise DomainError(f"δ={delta} < 0")
    upper = upper or QUARTIC_CUTOFF
    c2, c3, c0 = 3 * 2 ** (2 / 3), 2 ** (4 / 3), 2 ** (-1 / 3)

    def integrand(theta):
        envelope = np.exp(-c3 * delta * theta ** 3 - theta ** 4)
        even = c0 * delta ** 2 + theta ** 2 + c3 * delta * theta
        odd = theta ** 2 - c0 * delta ** 2
        if printed_phase:
            phase = c2 * delta ** 2 * theta ** 2 - c3 * delta * theta ** 3
            return envelope * (np.cos(phase) * even + np.sin(phase) * odd)
        phase = c2 * delta ** 2 * theta ** 2 + c3 * delta * theta ** 3
        return envelope * (np.cos(phase) * even - np.sin(phase) * odd)

    return _quad(integrand, 0.0, upper)


def mid_constant_integral(upper: Optional[float] = None) -> float:
    """∫_0^∞ e^(-θ²/2) cos(π/6 - (√3/2)θ²) dθ ; vaut √π/2"""
    upper = upper or CROSSOVER_CUTOFF
    return _quad(lambda theta: np.exp(-theta ** 2 / 2) * np.cos(np.pi / 6 - np.sqrt(3) / 2 * theta ** 2), 0.0, upper)


def integral_x_crossover(t: float, kappa: Optional[float] = None, upper: Optional[float] = None) -> float:
    """
    Intégrale du régime de transition de l'axe x, avec changement de signe
    de l'intégrande en θ = κ/t. Tend vers √π quand t -> 0.
    """
    if t <= 0:
        raise DomainError(f"t={t} <= 0")
    kappa = RegimeParams().kappa if kappa is None else kappa
    upper = upper or CROSSOVER_CUTOFF
    root3 = np.sqrt(3)
    c3 = 2 ** (11 / 6) * t / (6 * root3)
    c4 = t * t / (9 * 2 ** (7 / 3))
    c1 = root3 * 2 ** (-1 / 6) * t
    c_cube = t ** 3 / (3 * np.sqrt(6))
    c_square = 2 ** (2 / 3) * t * t

    def integrand(theta):
        envelope = np.exp(-theta ** 2 / 2 - c3 * theta ** 3 - c4 * theta ** 4)
        phase = -root3 * theta ** 2 / 2 + root3 * c4 * theta ** 4
        first = 1 + c1 * theta - c_cube * theta ** 3
        second = 1 - c1 * theta - c_square * theta ** 2 - c_cube * theta ** 3
        return envelope * (root3 * np.cos(phase) * first - np.sin(phase) * second)

    breakpoint_ = kappa / t
    if breakpoint_ >= upper:
        return _quad(integrand, 0.0, upper)
    return _quad(integrand, 0.0, breakpoint_) - _quad(integrand, breakpoint_, upper)


# ============================================
# THÉORÈMES LOCAUX
# ============================================

def local_limit(d: int, n: int) -> float:
    """p^(n)(o,o) ≈ 2^(1/2^d + 1)/Γ(1/2^d) n^(1/2^d - 1) pour n pair, 0 pour n impair"""
    if d < 1:
        raise DomainError(f"Dimension invalide: {d}")
    if n <= 0:
        raise DomainError(f"n={n} doit être > 0")
    if n % 2:
        return 0.0
    e = 2.0 ** -d
    return float(np.exp((e + 1) * np.log(2) - gammaln(e) + (e - 1) * np.log(n)))


def local_limit_pair(d: int, n: int, deg_target: int) -> float:
    """Version générale : 2^(1/2^d - 1) deg(y)/Γ(1/2^d) n^(1/2^d - 1), n de la parité du couple"""
    if d < 1 or deg_target < 1:
        raise DomainError(f"Paramètres invalides: d={d}, deg={deg_target}")
    if n <= 0:
        raise DomainError(f"n={n} doit être > 0")
    e = 2.0 ** -d
    return float(deg_target * np.exp((e - 1) * np.log(2) - gammaln(e) + (e - 1) * np.log(n)))


# ============================================
# FORMULES PAR RÉGIME (en log)
# ============================================

def _xi(k: int, n: int) -> float:
    if n < 1 or k < 0:
        raise DomainError(f"Paramètres invalides: k={k}, n={n}")
    return k / n


def _green_at(z: float) -> float:
    return float(mpmath.re(eval_g(z)))


def _result(log_value: float, regime: Regime, formula_id: str, axis: str, k: int, n: int) -> EstimateResult:
    value = float(np.exp(log_value)) if log_value > -745 else 0.0
    return EstimateResult(
        log_value=float(log_value),
        value=value,
        regime=regime,
        formula_id=formula_id,
        axis=axis,
        k=k,
        n=n,
        xi=k / n,
    )


def _bulk_y_log(k: int, n: int) -> float:
    xi = _xi(k, n)
    if xi == 0:
        raise DomainError("Formule de col (axe y) indéfinie en ξ = 0")
    prefactor = 0.5 * np.log(2 * xi / ((1 - xi ** 2) * (1 + xi))) - 0.5 * np.log(np.pi)
    return prefactor + n * phi("Y", xi) - 0.5 * np.log(n)


def y_bulk_estimate(k: int, n: int) -> EstimateResult:
    """√(2ξ/((1-ξ²)(1+ξ))) e^(nφ)/√π n^(-1/2), ξ dans [a, 1-c]"""
    return _result(_bulk_y_log(k, n), Regime.Y_BULK, "y_bulk_saddle", "Y", k, n)


def y_mid_estimate(k: int, n: int) -> EstimateResult:
    """Même forme fermée que le régime massif, ξ dans [n^(-1/4), a]"""
    return _result(_bulk_y_log(k, n), Regime.Y_MID, "y_mid_vertical_segment", "Y", k, n)


def y_small_estimate(k: int, n: int) -> EstimateResult:
    """e^(nφ)/(π√2) I(√n ξ) n^(-3/4), ξ dans [0, n^(-1/4)]"""
    xi = _xi(k, n)
    log_value = n * phi("Y", xi) - np.log(np.pi * np.sqrt(2)) + np.log(integral_y(np.sqrt(n) * xi)) - 0.75 * np.log(n)
    return _result(log_value, Regime.Y_SMALL, "y_small_integral", "Y", k, n)


def tiny_estimate(axis: str, k: int, n: int) -> EstimateResult:
    """√2 e^(nφ)/Γ(1/4) n^(-3/4), limite ξ -> 0 commune aux deux axes"""
    xi = _xi(k, n)
    log_value = LOG_TINY_CONSTANT + n * phi(axis, xi) - 0.75 * np.log(n)
    regime = Regime.Y_TINY if axis == "Y" else Regime.X_TINY
    return _result(log_value, regime, "tiny_local", axis, k, n)


def x_bulk_estimate(k: int, n: int) -> EstimateResult:
    """√(2/π) e^(nφ) √(1-z_o) G(z_o)/√(1 + 2z_o - √(1-z_o)) n^(-1/2)"""
    xi = _xi(k, n)
    if xi == 0:
        raise DomainError("Formule de col (axe x) indéfinie en ξ = 0")
    z_o = z_saddle("X", xi)
    u = np.sqrt(1 - z_o)
    log_value = (
        0.5 * np.log(2 / np.pi)
        + n * phi("X", xi)
        + np.log(u)
        + np.log(_green_at(z_o))
        - 0.5 * np.log(1 + 2 * z_o - u)
        - 0.5 * np.log(n)
    )
    return _result(log_value, Regime.X_BULK, "x_bulk_saddle", "X", k, n)


def x_mid_estimate(k: int, n: int) -> EstimateResult:
    """4 e^(nφ) v³/(π√a₂) G(z_o)/z_o n^(-1/2) J, J = ∫ e^(-θ²/2) cos(π/6 - (√3/2)θ²) dθ"""
    xi = _xi(k, n)
    if xi == 0:
        raise DomainError("Formule à deux angles indéfinie en ξ = 0")
    coeffs = x_taylor_coeffs(xi)
    z_o = z_saddle("X", xi)
    log_value = (
        np.log(4)
        + n * phi("X", xi)
        + 3 * np.log(coeffs.v)
        - np.log(np.pi)
        - 0.5 * np.log(coeffs.a2.real)
        + np.log(_green_at(z_o))
        - np.log(z_o)
        - 0.5 * np.log(n)
        + np.log(mid_constant_integral())
    )
    return _result(log_value, Regime.X_MID, "x_mid_two_beta", "X", k, n)


def x_crossover_estimate(k: int, n: int, kappa: Optional[float] = None) -> EstimateResult:
    """2^(1/6) e^(nφ) G(z_o)/(π√3 z_o) I(n^(-1/2) ξ^(-2/3)) ξ^(2/3) n^(-1/2)"""
    xi = _xi(k, n)
    if xi == 0:
        raise DomainError("Formule de transition indéfinie en ξ = 0")
    z_o = z_saddle("X", xi)
    integral = integral_x_crossover(xi ** (-2 / 3) / np.sqrt(n), kappa)
    if integral <= 0:
        raise DomainError(f"Intégrale de transition non positive ({integral:.3e})")
    log_value = (
        np.log(2) / 6
        + n * phi("X", xi)
        + np.log(_green_at(z_o))
        - np.log(np.pi * np.sqrt(3) * z_o)
        + np.log(integral)
        + 2 / 3 * np.log(xi)
        - 0.5 * np.log(n)
    )
    return _result(log_value, Regime.X_CROSSOVER, "x_crossover_integral", "X", k, n)


def x_small_estimate(k: int, n: int, printed_phase: bool = False) -> EstimateResult:
    """(4 e^(nφ)/π) I(n^(1/4) ξ^(1/3)) n^(-3/4)"""
    xi = _xi(k, n)
    delta = n ** 0.25 * xi ** (1 / 3)
    integral = integral_x(delta, printed_phase=printed_phase)
    if integral <= 0:
        raise DomainError(f"Intégrale du petit régime non positive en δ={delta:.4f}")
    log_value = np.log(4) + n * phi("X", xi) - np.log(np.pi) + np.log(integral) - 0.75 * np.log(n)
    return _result(log_value, Regime.X_SMALL, "x_small_integral", "X", k, n)


# ============================================
# AIGUILLAGE
# ============================================

def classify(axis: str, xi: float, n: int, params: Optional[RegimeParams] = None) -> Regime:
    params = params or RegimeParams()
    if n < 1:
        raise DomainError(f"n={n} doit être >= 1")
    if xi < 0 or xi > 1 - params.c:
        raise DomainError(f"ξ={xi} hors de [0, 1-c={1 - params.c}] : aucune formule")
    if axis == "Y":
        if xi >= params.a:
            return Regime.Y_BULK
        if xi >= n ** -0.25:
            return Regime.Y_MID
        if xi > n ** (-0.5 - params.epsilon_tiny):
            return Regime.Y_SMALL
        return Regime.Y_TINY
    if axis == "X":
        if xi >= params.a:
            return Regime.X_BULK
        if xi >= n ** (-0.75 + params.epsilon):
            return Regime.X_MID
        if xi >= n ** -0.75:
            return Regime.X_CROSSOVER
        if xi > n ** (-0.75 - params.epsilon_tiny):
            return Regime.X_SMALL
        return Regime.X_TINY
    raise DomainError(f"Axe inconnu: {axis}")


def estimate_regime(regime: Regime, k: int, n: int, params: Optional[RegimeParams] = None) -> EstimateResult:
    """Évalue la formule d'un régime donné, indépendamment de l'aiguillage"""
    params = params or RegimeParams()
    formulas = {
        Regime.Y_BULK: lambda: y_bulk_estimate(k, n),
        Regime.Y_MID: lambda: y_mid_estimate(k, n),
        Regime.Y_SMALL: lambda: y_small_estimate(k, n),
        Regime.Y_TINY: lambda: tiny_estimate("Y", k, n),
        Regime.X_BULK: lambda: x_bulk_estimate(k, n),
        Regime.X_MID: lambda: x_mid_estimate(k, n),
        Regime.X_CROSSOVER: lambda: x_crossover_estimate(k, n, params.kappa),
        Regime.X_SMALL: lambda: x_small_estimate(k, n),
        Regime.X_TINY: lambda: tiny_estimate("X", k, n),
    }
    if regime not in formulas:
        raise DomainError(f"Régime sans formule d'aiguillage: {regime.value}")
    return formulas[regime]()


def dispatch(axis: str, k: int, n: int, params: Optional[RegimeParams] = None) -> EstimateResult:
    """
    Choisit la formule dont l'intervalle contient ξ = k/n. À moins de
    boundary_band (relatif) d'une frontière, l'estimation voisine est jointe.
    """
    params = params or RegimeParams()
    xi = _xi(k, n)
    regime = classify(axis, xi, n, params)
    result = estimate_regime(regime, k, n, params)

    if xi > 0 and params.boundary_band > 0:
        neighbours = set()
        for shifted in (xi * (1 - params.boundary_band), xi * (1 + params.boundary_band)):
            try:
                neighbours.add(classify(axis, shifted, n, params))
            except DomainError:
                continue
        neighbours.discard(regime)
        for other in sorted(neighbours, key=lambda r: r.value):
            try:
                result.adjacent.append(estimate_regime(other, k, n, params))
            except DomainError as e:
                logger.warning(f"⚠️ Estimation voisine {other.value} indisponible: {e.detail}")
        if result.adjacent:
            logger.warning(
                f"⚠️ ξ={xi:.6g} proche d'une frontière ({regime.value} / "
                f"{', '.join(r.regime.value for r in result.adjacent)}), n={n}"
            )
    return result


def estimate_y(k: int, n: int, params: Optional[RegimeParams] = None) -> EstimateResult:
    return dispatch("Y", k, n, params)


def estimate_x(k: int, n: int, params: Optional[RegimeParams] = None) -> EstimateResult:
    return dispatch("X", k, n, params)


def local_estimate(d: int, n: int) -> EstimateResult:
    """Théorème local sous forme d'EstimateResult (régime LOCAL), n pair"""
    value = local_limit(d, n)
    log_value = float(np.log(value)) if value > 0 else float("-inf")
    return EstimateResult(log_value=log_value, value=value, regime=Regime.LOCAL, formula_id=f"local_d{d}", n=n)


# ============================================
# CONSTANTES DE DIMENSION
# ============================================

def einstein_constants() -> EinsteinConstants:
    """δ_s = 3/2, δ_f = 2, δ_w = 8/3 et la relation δ_s·δ_w = 2δ_f"""
    delta_s, delta_f, delta_w = Fraction(3, 2), Fraction(2), Fraction(8, 3)
    return EinsteinConstants(
        delta_s=delta_s,
        delta_f=delta_f,
        delta_w=delta_w,
        relation_holds=delta_s * delta_w == 2 * delta_f,
    )


def jones_bound_log(n: int, xi: float, c: float = 1.0, c_prime: float = 1.0) -> float:
    """log de c·n^(-δ_s/2)·exp(-c' n ξ^(δ_w/(δ_w-1))), forme de borne gaussienne unique"""
    constants = einstein_constants()
    exponent = float(constants.delta_w / (constants.delta_w - 1))
    return float(np.log(c) - float(constants.delta_s) / 2 * np.log(n) - c_prime * n * xi ** exponent)
