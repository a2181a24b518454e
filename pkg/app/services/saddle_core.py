"""
Service point-col : fonctions auxiliaires Ψ_ξ des deux axes, points-col,
fonction de taux φ et coefficients de Taylor le long des contours
"""
from typing import Optional
import logging

import mpmath
import numpy as np

from app.core.config import settings
from app.core.errors import DomainError
from app.schemas.schemas import SaddleData, XTaylorCoeffs, YTaylorValue
from app.services.green_eval import principal_sqrt

logger = logging.getLogger(__name__)

# φ_X(ξ) ≈ -C_PHI_X·ξ^(4/3) quand ξ -> 0
C_PHI_X = 3 * 2 ** (-2 / 3)

X_TAYLOR_ORDER = 160
X_TAYLOR_TERMS = 16


def _working_prec() -> int:
    return max(mpmath.mp.prec, settings.MANTISSA_BITS)


def _check_xi(xi: float, upper: float = 1.0):
    if not 0 < xi < upper:
        raise DomainError(f"ξ={xi} hors de l'intervalle ]0, {upper}[")


def _mp_point(z):
    z = mpmath.mpc(z)
    if z == 0:
        raise DomainError("Ψ_ξ non définie en z = 0")
    if z.imag == 0 and z.real > 1:
        raise DomainError(f"z={z} sur la coupure ]1, ∞[")
    return z


# ============================================
# FONCTIONS AUXILIAIRES Ψ_ξ
# ============================================

def psi_y(z, xi: float):
    """Ψ_ξ(z) = 2ξ log(1 - √(1-z)) - (ξ+1) log z (axe y)"""
    with mpmath.workprec(_working_prec()):
        z = _mp_point(z)
        xi = mpmath.mpf(xi)
        u = principal_sqrt(1 - z)
        return 2 * xi * mpmath.log(1 - u) - (xi + 1) * mpmath.log(z)


def psi_x(z, xi: float):
    """Ψ_ξ(z) = 2ξ log(1 + √(1-z) - √2 √(1 - z + √(1-z))) - (ξ+1) log z (axe x)"""
    with mpmath.workprec(_working_prec()):
        z = _mp_point(z)
        xi = mpmath.mpf(xi)
        w = 1 - z
        u = principal_sqrt(w)
        inner = 1 + u - mpmath.sqrt(2) * principal_sqrt(w + u)
        return 2 * xi * mpmath.log(inner) - (xi + 1) * mpmath.log(z)


def _psi(axis: str):
    if axis == "Y":
        return psi_y
    if axis == "X":
        return psi_x
    raise DomainError(f"Axe inconnu: {axis}")


def psi_derivative(axis: str, z, xi: float, order: int = 1):
    """Dérivée d'ordre `order` de Ψ_ξ en z, par différentiation numérique mpmath"""
    psi = _psi(axis)
    with mpmath.workprec(_working_prec()):
        return mpmath.diff(lambda w: psi(w, xi), mpmath.mpf(z), order)


# ============================================
# FONCTIONS DE TAUX
# ============================================

def phi_y(xi: float) -> float:
    """φ(ξ) = log((1-ξ)^(ξ-1) (1+ξ)^(-ξ-1))"""
    if xi == 0:
        return 0.0
    _check_xi(xi)
    with mpmath.workprec(_working_prec()):
        xi = mpmath.mpf(xi)
        return float((xi - 1) * mpmath.log(1 - xi) - (xi + 1) * mpmath.log(1 + xi))


def _u_saddle_x(xi):
    """Racine positive de 2u³ - ξ²u - ξ² = 0 (forme de Cardan)"""
    s = 54 + 6 * mpmath.sqrt(81 - 6 * xi ** 2)
    return xi ** (mpmath.mpf(2) / 3) * mpmath.cbrt(s) / 6 + xi ** (mpmath.mpf(4) / 3) / mpmath.cbrt(s)


def phi_x(xi: float) -> float:
    if xi == 0:
        return 0.0
    _check_xi(xi)
    with mpmath.workprec(_working_prec()):
        u = _u_saddle_x(mpmath.mpf(xi))
        return float(mpmath.re(psi_x(1 - u * u, xi)))


def phi(axis: str, xi: float) -> float:
    if axis == "Y":
        return phi_y(xi)
    if axis == "X":
        return phi_x(xi)
    raise DomainError(f"Axe inconnu: {axis}")


def log_rate(axis: str, xi: float, n: int) -> float:
    """n·φ(ξ), exposant du facteur e^(nφ)"""
    return n * phi(axis, xi)


# ============================================
# POINTS-COL
# ============================================

def saddle_y(xi: float) -> SaddleData:
    _check_xi(xi)
    with mpmath.workprec(_working_prec()):
        x = mpmath.mpf(xi)
        z_o = 1 - x ** 2
        psi2 = 1 / (2 * x ** 2 * (1 - x ** 2))
        psi3 = (3 - 7 * x ** 2) / (4 * x ** 4 * (1 - x ** 2) ** 2)
        residual = abs(psi_derivative("Y", z_o, xi))
    return SaddleData(
        axis="Y",
        xi=xi,
        z_o=float(z_o),
        u_o=xi,
        phi=phi_y(xi),
        psi2=float(psi2),
        psi3=float(psi3),
        residual=float(residual),
    )


def _psi2_x_forms(u):
    """Les deux écritures de Ψ''(z_o) (axe x), en z_o puis en u_o"""
    z = 1 - u * u
    form_z = (1 + 2 * z - u) / (4 * z ** 2 * (1 - z))
    form_u = (2 * u + 3) / (4 * u ** 2 * (1 - u) * (1 + u) ** 2)
    return form_z, form_u


def _psi3_x_printed(u):
    return (-16 * u ** 2 - 24 * u + 19) / (16 * u ** 4 * (1 - u) ** 2 * (1 + u))


def saddle_x(xi: float) -> SaddleData:
    """
    Point-col de l'axe x : z_o = 1 - u_o², u_o racine de 2u³ - ξ²u - ξ².
    Ψ''' est obtenue par différentiation numérique (l'expression imprimée
    en u_o ne concorde pas ; voir psi2_form_match).
    """
    _check_xi(xi)
    with mpmath.workprec(_working_prec()):
        u = _u_saddle_x(mpmath.mpf(xi))
        z_o = 1 - u * u
        _, psi2 = _psi2_x_forms(u)
        psi3 = mpmath.re(psi_derivative("X", z_o, xi, 3))
        residual = abs(psi_derivative("X", z_o, xi))
        phi_value = mpmath.re(psi_x(z_o, xi))
    return SaddleData(
        axis="X",
        xi=xi,
        z_o=float(z_o),
        u_o=float(u),
        v_o=float(mpmath.sqrt(u)),
        phi=float(phi_value),
        psi2=float(psi2),
        psi3=float(psi3),
        residual=float(residual),
    )


def z_saddle(axis: str, xi: float) -> float:
    """z_o(ξ) seul, sans les dérivées"""
    _check_xi(xi)
    if axis == "Y":
        return 1 - xi ** 2
    with mpmath.workprec(_working_prec()):
        u = _u_saddle_x(mpmath.mpf(xi))
        return float(1 - u * u)


def v_saddle(xi: float) -> float:
    """v(ξ) = √u_o(ξ), point de départ des contours du plan v ; 0 en ξ = 0"""
    if xi == 0:
        return 0.0
    _check_xi(xi)
    with mpmath.workprec(_working_prec()):
        return float(mpmath.sqrt(_u_saddle_x(mpmath.mpf(xi))))


def saddle(axis: str, xi: float) -> SaddleData:
    if axis == "Y":
        return saddle_y(xi)
    if axis == "X":
        return saddle_x(xi)
    raise DomainError(f"Axe inconnu: {axis}")


def psi2_form_match(xi: float, rel_tol: float = 1e-8) -> dict:
    """
    Compare les écritures imprimées de Ψ''(z_o) et Ψ'''(z_o) (axe x)
    aux dérivées numériques, prises comme référence.
    """
    _check_xi(xi)
    with mpmath.workprec(_working_prec()):
        u = _u_saddle_x(mpmath.mpf(xi))
        z_o = 1 - u * u
        form_z, form_u = _psi2_x_forms(u)
        numerical2 = mpmath.re(psi_derivative("X", z_o, xi, 2))
        numerical3 = mpmath.re(psi_derivative("X", z_o, xi, 3))
        printed3 = _psi3_x_printed(u)

    def close(value, reference):
        return bool(abs(value - reference) <= rel_tol * abs(reference))

    report = {
        "psi2_numerical": float(numerical2),
        "psi2_form_z": float(form_z),
        "psi2_form_u": float(form_u),
        "matches": [name for name, value in (("form_z", form_z), ("form_u", form_u)) if close(value, numerical2)],
        "psi3_numerical": float(numerical3),
        "psi3_printed": float(printed3),
        "psi3_printed_matches": close(printed3, numerical3),
    }
    logger.debug(f"🔍 Formes de Ψ'' (ξ={xi}): {report['matches']}")
    return report


# ============================================
# DÉVELOPPEMENT DE TAYLOR, AXE Y
# ============================================

def _tail_constant(a: float, alpha: float) -> float:
    ratio = (2 - a) / (1 - a)
    if ratio * alpha >= 1:
        raise DomainError(f"Série du reste divergente: ((2-a)/(1-a))·α = {ratio * alpha:.4f} >= 1")
    total, n = 0.0, 0
    while True:
        term = ratio ** (n + 3) * alpha ** n / (n + 4)
        total += term
        if term < 1e-17 * total:
            return total
        n += 1


def y_taylor(
    xi: float,
    t: float,
    alpha: Optional[float] = None,
    a: Optional[float] = None,
) -> YTaylorValue:
    """
    Ψ̄_ξ(t) = Ψ_ξ(1 - (ξ - it)²) par la série
    φ + Σ_{n>=1} [(-i)^(n+1)/(1-ξ)^n + i^(n+1)/(1+ξ)^n] t^(n+1)/(n+1),
    avec |R(ξ,t)| <= C|t|³ hors du terme quadratique.
    """
    alpha = settings.REGIME_ALPHA if alpha is None else alpha
    a = settings.REGIME_A if a is None else a
    if not 0 <= xi <= a:
        raise DomainError(f"ξ={xi} hors de [0, a={a}]")
    if abs(t) > alpha:
        raise DomainError(f"|t|={abs(t)} > α={alpha}")
    tail = _tail_constant(a, alpha)

    with mpmath.workprec(_working_prec()):
        x, s = mpmath.mpf(xi), mpmath.mpf(t)
        i = mpmath.mpc(0, 1)
        total = mpmath.mpc(0)
        eps = mpmath.mpf(2) ** (-settings.MANTISSA_BITS)
        for n in range(1, 10_000):
            coeff = (-i) ** (n + 1) / (1 - x) ** n + i ** (n + 1) / (1 + x) ** n
            term = coeff * s ** (n + 1) / (n + 1)
            total += term
            if n > 2 and abs(term) <= eps * (abs(total) + eps):
                break
        phi_value = phi_y(xi) if xi > 0 else 0.0
        quadratic = -1 / (1 - x ** 2)
        value = phi_value + total
        remainder = total - quadratic * s ** 2

    return YTaylorValue(
        value=complex(value),
        quadratic=float(quadratic),
        remainder=complex(remainder),
        bound_constant=4 / 3 * a / (1 - a ** 2) ** 2 + alpha * tail,
    )


# ============================================
# DÉVELOPPEMENT DE TAYLOR, AXE X
# ============================================

def psi_tilde_x(v, xi: float, sheet: int = 1):
    """
    Ψ̃_{ξ,1}(v) = 2ξ log(1 + v² - √2 v √(1+v²)) - (ξ+1) log(1 - v⁴),
    Ψ̃_{ξ,2}(v) = Ψ̃_{ξ,1}(-iv).
    """
    with mpmath.workprec(_working_prec()):
        v = mpmath.mpc(v)
        if sheet == 2:
            v = -1j * v
        elif sheet != 1:
            raise DomainError(f"Feuillet inconnu: {sheet}")
        x = mpmath.mpf(xi)
        inner = 1 + v ** 2 - mpmath.sqrt(2) * v * mpmath.sqrt(1 + v ** 2)
        return 2 * x * mpmath.log(inner) - (x + 1) * mpmath.log(1 - v ** 4)


def _b_coeffs(count: int) -> list:
    half = mpmath.mpf(0.5)
    return [
        mpmath.fsum(mpmath.binomial(half, n - 2 * i) for i in range(n // 2 + 1))
        for n in range(count)
    ]


def _d_coeffs(xi, order: int, b: list) -> list:
    """d_{4n} = 1/n, d_{2n+1} = -2√2 ξ b_n/(2n+1), les autres nuls"""
    d = [mpmath.mpf(0)] * (order + 1)
    root8 = 2 * mpmath.sqrt(2)
    for h in range(1, order + 1):
        if h % 4 == 0:
            d[h] = mpmath.mpf(1) / (h // 4)
        elif h % 2 == 1:
            n = (h - 1) // 2
            d[h] = -root8 * xi * b[n] / h
    return d


def _required_order(v, terms: int, order: int) -> int:
    """Ordre de troncature tel que C(N, m)·v^(N-m) soit négligeable"""
    threshold = mpmath.mpf(10) ** -30
    while abs(mpmath.binomial(order, terms) * v ** (order - terms)) > threshold:
        order *= 2
        if order > 20_000:
            raise DomainError(f"Série des g_m trop lente (v={float(v):.4f}), réduire a")
    return order


def x_taylor_coeffs(
    xi: float,
    beta: float = -np.pi / 4,
    order: Optional[int] = None,
    terms: int = X_TAYLOR_TERMS,
) -> XTaylorCoeffs:
    """
    Coefficients d_n, d'_n de Ψ̃_{ξ,1}, Ψ̃_{ξ,2} et g_m = Σ_h C(h,m) d_h v^(h-m),
    de sorte que Ψ̄_{ξ,1}(t) = φ + Σ_{m>=2} e^(imβ) g_m t^m.
    """
    _check_xi(xi)
    order = order or X_TAYLOR_ORDER
    with mpmath.workprec(_working_prec()):
        x = mpmath.mpf(xi)
        v = mpmath.sqrt(_u_saddle_x(x))
        if v >= 1:
            raise DomainError(f"v(ξ)={float(v):.4f} >= 1 : série de Taylor divergente")
        order = _required_order(v, terms, order)
        b = _b_coeffs(order // 2 + 1)
        d = _d_coeffs(x, order, b)
        rotations = (1, -1j, -1, 1j)
        d_prime = [rotations[h % 4] * d[h] for h in range(order + 1)]

        def g(coeffs, m):
            return mpmath.fsum(mpmath.binomial(h, m) * coeffs[h] * v ** (h - m) for h in range(m, order + 1))

        g_m = [g(d, m) for m in range(terms + 1)]
        g_prime = [g(d_prime, m) for m in range(terms + 1)]

    logger.debug(f"🔍 Coefficients de Taylor axe x: ξ={xi}, v={float(v):.6f}, N={order}")
    return XTaylorCoeffs(
        xi=xi,
        beta=beta,
        v=float(v),
        b_n=[float(c) for c in b],
        d_n=[float(c) for c in d],
        d_prime_n=[complex(c) for c in d_prime],
        g_m=[float(mpmath.re(c)) for c in g_m],
        g_prime_m=[complex(c) for c in g_prime],
        a2=complex(g_m[2]),
        a3=complex(g_m[3]),
        a4=complex(g_m[4]),
        a2p=complex(g_prime[2]),
        a3p=complex(g_prime[3]),
        a4p=complex(g_prime[4]),
    )


def psi_bar_x(coeffs: XTaylorCoeffs, t: float, sheet: int = 1) -> complex:
    """Ψ̄_{ξ,j}(t) = Σ_m e^(imβ) g_m t^m reconstruite à partir des coefficients"""
    g = coeffs.g_m if sheet == 1 else coeffs.g_prime_m
    rotation = np.exp(1j * coeffs.beta) * t
    return complex(sum(g_m * rotation ** m for m, g_m in enumerate(g)))


# ============================================
# OUTILS DE CONTOUR
# ============================================

def real_imag_root_split(xi: float, t: float) -> tuple[float, float]:
    """a + ib = √(ξ - it) (détermination principale), b du signe de -t"""
    modulus = np.hypot(xi, t)
    a = np.sqrt(max((modulus + xi) / 2, 0.0))
    b = np.sqrt(max((modulus - xi) / 2, 0.0))
    if t > 0:
        b = -b
    elif t == 0:
        b = -b if xi < 0 else 0.0
    return float(a), float(b)


def beta_sector_ok(beta: float, tol: float = 1e-12) -> bool:
    """cos 2β, cos 3β et cos 4β tous <= 0"""
    return all(np.cos(m * beta) <= tol for m in (2, 3, 4))
