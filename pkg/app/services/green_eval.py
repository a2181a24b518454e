"""
Service d'évaluation complexe des fonctions de Green du peigne

Détermination : racine principale avec arg ∈ [-π, π), prolongée par continuité
depuis le demi-plan supérieur sur la coupure [1, ∞). Chaque fonction accepte un
scalaire (évalué en mpmath, précision MANTISSA_BITS) ou un tableau numpy complexe.
"""
from typing import Optional, Union
import logging

import mpmath
import numpy as np

from app.core.config import settings
from app.core.errors import DomainError
from app.schemas.schemas import SingularDecomposition

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, "mpmath.mpc", "mpmath.mpf", np.ndarray]


def _is_array(z) -> bool:
    return isinstance(z, np.ndarray)


def _coerce(z):
    if _is_array(z):
        return np.asarray(z, dtype=np.complex128)
    return mpmath.mpc(z)


def _sqrt2(like):
    return np.sqrt(2.0) if _is_array(like) else mpmath.sqrt(2)


def principal_sqrt(w: ComplexLike):
    """√|w|·exp(i·arg(w)/2), arg ∈ [-π, π) : h(-1) = -i"""
    if _is_array(w):
        w = np.asarray(w, dtype=np.complex128)
        root = np.sqrt(w)
        on_ray = (w.imag == 0) & (w.real < 0)
        root[on_ray] = -1j * np.sqrt(-w.real[on_ray])
        return root
    w = mpmath.mpc(w)
    if w.imag == 0 and w.real < 0:
        return mpmath.mpc(0, -mpmath.sqrt(-w.real))
    return mpmath.sqrt(w)


def _guard_cut(z, extend: bool):
    if extend:
        return
    if _is_array(z):
        hit = bool(np.any((z.imag == 0) & (z.real > 1)))
    else:
        hit = z.imag == 0 and z.real > 1
    if hit:
        raise DomainError("Évaluation sur la coupure ]1, ∞[ sans prolongement demandé")


def _guard_singular(z, points: tuple[int, ...]):
    """Points de branchement où G (ou G_d) diverge, coupure ou non"""
    if _is_array(z):
        hit = bool(np.any(np.isin(z, points)))
    else:
        hit = any(z == point for point in points)
    if hit:
        raise DomainError(f"Évaluation au point singulier z = {', '.join(map(str, points))} : G diverge")


# ============================================
# G, F1², F2² À PARTIR DU RADICAL u = √(1-z)
# ============================================

def g_from_u(u, w=None):
    """G = √2 / h(w + u) avec w = 1 - z (par défaut u²)"""
    w = u * u if w is None else w
    return _sqrt2(u) / principal_sqrt(w + u)


def f1sq_from_u(u, z):
    """F1² = (2 - z - 2u)/z = z/(1+u)²"""
    return z / ((1 + u) * (1 + u))


def f2sq_from_u(u, z, w=None):
    """F2² = (1 + u - √2 h(w+u))²/z = z/(1 + u + √2 h(w+u))²"""
    w = u * u if w is None else w
    den = 1 + u + _sqrt2(u) * principal_sqrt(w + u)
    return z / (den * den)


# ============================================
# ÉVALUATION DIRECTE
# ============================================

def _with_prec(fn):
    def wrapper(*args, prec: Optional[int] = None, **kwargs):
        with mpmath.workprec(prec or max(mpmath.mp.prec, settings.MANTISSA_BITS)):
            return fn(*args, **kwargs)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_with_prec
def eval_g(z: ComplexLike, extend: bool = False):
    """G(z) = √2/√(1 - z + √(1-z)), G(0) = 1"""
    z = _coerce(z)
    _guard_singular(z, (1,))
    _guard_cut(z, extend)
    w = 1 - z
    return g_from_u(principal_sqrt(w), w)


@_with_prec
def eval_f1sq(z: ComplexLike, extend: bool = False):
    z = _coerce(z)
    _guard_cut(z, extend)
    return f1sq_from_u(principal_sqrt(1 - z), z)


@_with_prec
def eval_f2sq(z: ComplexLike, extend: bool = False):
    z = _coerce(z)
    _guard_cut(z, extend)
    w = 1 - z
    return f2sq_from_u(principal_sqrt(w), z, w)


def _gd(d: int, z):
    g = 1 / principal_sqrt(1 - z * z)
    for level in range(2, d + 1):
        base = 1 + (level - 1) / g
        g = level / principal_sqrt(base * base - z * z)
    return g


@_with_prec
def eval_gd(d: int, z: ComplexLike, extend: bool = False):
    """G_d par la récurrence G_d = d / √((1 + (d-1)/G_{d-1})² - z²), G_1 = 1/√(1-z²)"""
    if d < 1:
        raise DomainError(f"Dimension invalide: {d}")
    z = _coerce(z)
    # coupures de G_d : |z| réel > 1 (fonction paire)
    _guard_cut(z, extend)
    _guard_cut(-z, extend)
    _guard_singular(z, (1, -1))
    return _gd(d, z)


@_with_prec
def eval_g3_closed(z: ComplexLike):
    """G_3(z) = 3 / √(3(1-z²) + 2√(1-z²) + 2√2 √(1 - z² + √(1-z²)))"""
    z = _coerce(z)
    w = 1 - z * z
    root = principal_sqrt(w)
    return 3 / principal_sqrt(3 * w + 2 * root + 2 * _sqrt2(z) * principal_sqrt(w + root))


def local_constant(d: int) -> float:
    """Limite de G_d(z)·(1-z)^(1/2^d) quand z -> 1⁻ : d·2^(1/2^d - 1)"""
    return d * 2.0 ** (1.0 / 2 ** d - 1)


# ============================================
# DÉCOMPOSITION SINGULIÈRE
# ============================================

@_with_prec
def singular_parts(order: int) -> SingularDecomposition:
    """
    G = (1-z)^(-1/4) H(z) + (1-z)^(1/4) K(z),
    H = √2 Σ C(-1/2, 2n)(1-z)^n, K = √2 Σ C(-1/2, 2n+1)(1-z)^n.
    """
    if order < 0:
        raise DomainError(f"Ordre négatif: {order}")
    root2 = mpmath.sqrt(2)
    half = mpmath.mpf(-0.5)
    h_coeffs = [root2 * mpmath.binomial(half, 2 * n) for n in range(order + 1)]
    k_coeffs = [root2 * mpmath.binomial(half, 2 * n + 1) for n in range(order + 1)]
    return SingularDecomposition(h_coeffs=h_coeffs, k_coeffs=k_coeffs, order=order)


@_with_prec
def eval_singular(decomposition: SingularDecomposition, z: ComplexLike):
    z = mpmath.mpc(z)
    w = 1 - z
    h_value = mpmath.polyval(decomposition.h_coeffs[::-1], w)
    k_value = mpmath.polyval(decomposition.k_coeffs[::-1], w)
    quarter = mpmath.power(w, mpmath.mpf(0.25))
    return h_value / quarter + quarter * k_value
