"""
Service de quadrature de Cauchy : troisième oracle exact et validation des contours

p^(2n) = (1/2πi) ∮ G(z) F(z)^(2k) / z^(n+1) dz. L'intégrande est accumulé en
log (log G + k log F² - (n+1) log z) et exponentié une seule fois par pièce.
"""
from typing import Optional
import logging

import numpy as np

from app.core.config import PrecisionParams, RegimeParams
from app.core.errors import DomainError, ToleranceError
from app.schemas.schemas import ContourKind, ContourPiece, ContourSpec, SplitResult
from app.services.green_eval import f1sq_from_u, f2sq_from_u, g_from_u, principal_sqrt
from app.services.saddle_core import v_saddle, z_saddle

logger = logging.getLogger(__name__)

PANEL_NODES = 24
GRADING_LEVELS = 30
EPS = np.finfo(float).eps
CANCELLATION_LIMIT = 1e-6


# ============================================
# INTÉGRANDE
# ============================================

def _log_integrand(axis: str, k: int, n: int, z: np.ndarray, u: np.ndarray, w: Optional[np.ndarray] = None) -> np.ndarray:
    """log G + k log F² - (n+1) log z, le radical u = √(1-z) étant fourni"""
    log_g = np.log(g_from_u(u, w))
    if axis == "Y":
        f_sq = f1sq_from_u(u, z)
    elif axis == "X":
        f_sq = f2sq_from_u(u, z, w)
    else:
        raise DomainError(f"Axe inconnu: {axis}")
    log_f = k * np.log(f_sq) if k else 0.0
    return log_g + log_f - (n + 1) * np.log(z)


def default_radius(axis: str, k: int, n: int, spread: float = 2.0) -> float:
    """z_o(ξ) plafonné à exp(-spread/n) ; exp(-spread/n) en ξ = 0"""
    if n == 0:
        return 0.5
    cap = float(np.exp(-spread / n))
    xi = k / n
    if xi == 0:
        return cap
    if xi >= 1:
        return 0.05
    return float(np.clip(z_saddle(axis, xi), 0.05, cap))


# ============================================
# CERCLE DE CAUCHY (RÈGLE DES TRAPÈZES)
# ============================================

def _circle_once(axis: str, k: int, n: int, radius: float, nodes: int) -> tuple[float, float]:
    """Une évaluation à M noeuds ; renvoie (log p, plancher d'arrondi relatif)"""
    j = np.arange(nodes)
    s = 2 * np.pi * j / nodes
    z = radius * np.exp(1j * s)
    w = 1 - z
    u = principal_sqrt(w)
    # z^(-n) avec une phase réduite exactement modulo 2π
    phase = 2 * np.pi * ((n * j) % nodes) / nodes
    log_terms = np.log(g_from_u(u, w)) - n * np.log(radius) - 1j * phase
    if k:
        f_sq = f1sq_from_u(u, z) if axis == "Y" else f2sq_from_u(u, z, w)
        log_terms = log_terms + k * np.log(f_sq)

    shift = float(log_terms.real.max())
    terms = np.exp(log_terms - shift)
    total = terms.sum() / nodes
    magnitude = np.abs(terms).sum() / nodes

    if total.real <= 0:
        raise ToleranceError(f"Somme de Cauchy non positive (r={radius}, M={nodes}) : annulation numérique")
    floor = 64 * EPS * magnitude / total.real
    if floor > CANCELLATION_LIMIT:
        raise ToleranceError(
            f"Annulation catastrophique sur le cercle r={radius} (plancher relatif {floor:.2e}), rayon mal choisi"
        )
    if abs(total.imag) > max(1e-8 * total.real, 64 * EPS * magnitude):
        raise ToleranceError(f"Partie imaginaire non négligeable: {total.imag:.3e} (partie réelle {total.real:.3e})")
    return float(np.log(total.real) + shift), floor


def cauchy_circle_log(
    axis: str,
    k: int,
    n: int,
    radius: Optional[float] = None,
    nodes: Optional[int] = None,
    precision: Optional[PrecisionParams] = None,
) -> float:
    """
    log p^(2n) sur l'axe demandé par la règle des trapèzes sur |z| = r.
    Le nombre de noeuds est doublé jusqu'à stabilisation relative < quad_tol.
    """
    precision = precision or PrecisionParams()
    if k < 0 or n < 0:
        raise DomainError(f"k et n doivent être >= 0 (k={k}, n={n})")
    if axis not in ("Y", "X"):
        raise DomainError(f"Axe inconnu: {axis}")
    if k > n:
        return float("-inf")
    radius = default_radius(axis, k, n) if radius is None else radius
    if not 0 < radius < 1:
        raise DomainError(f"Rayon {radius} hors de ]0, 1[ (disque d'analyticité)")
    if nodes is not None and nodes < 4 * n:
        raise DomainError(f"M={nodes} < 4n={4 * n}")
    count = nodes or max(4 * n, precision.node_factor * n, 64)

    previous, _ = _circle_once(axis, k, n, radius, count)
    while True:
        count *= 2
        if count > precision.max_nodes:
            raise ToleranceError(f"Pas de convergence avant {precision.max_nodes} noeuds (axe {axis}, k={k}, n={n})")
        current, floor = _circle_once(axis, k, n, radius, count)
        change = abs(np.expm1(current - previous))
        if change <= max(precision.quad_tol, floor):
            logger.debug(f"🔍 Cercle r={radius:.6f}, M={count}, variation {change:.2e}")
            return current
        previous = current


def cauchy_circle(
    axis: str,
    k: int,
    n: int,
    radius: Optional[float] = None,
    nodes: Optional[int] = None,
    precision: Optional[PrecisionParams] = None,
) -> float:
    return float(np.exp(cauchy_circle_log(axis, k, n, radius, nodes, precision)))


# ============================================
# CONSTRUCTION DES CONTOURS
# ============================================

def _gauss_legendre(edges: np.ndarray, per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    return ((lo + hi) / 2 + half * x).ravel(), (half * w).ravel()


def _graded_edges(start: float, stop: float, levels: int = GRADING_LEVELS) -> np.ndarray:
    """Bornes de panneaux géométriques (raison 1/2) resserrées vers `start`"""
    length = stop - start
    return np.concatenate(([start], start + length * 0.5 ** np.arange(levels, -1, -1)))


def _arc_piece(radius: float, s_lo: float, s_hi: float, n: int, per_panel: int, label: str) -> ContourPiece:
    span = s_hi - s_lo
    panels = int(np.ceil(max(n, 1) * span / (2 * np.pi))) + 4
    s, weights = _gauss_legendre(np.linspace(s_lo, s_hi, panels + 1), per_panel)
    z = radius * np.exp(1j * s)
    return ContourPiece(label=label, z=z, u=principal_sqrt(1 - z), weight=1j * z * weights)


def _conjugate_chain(upper: list[ContourPiece]) -> list[ContourPiece]:
    """Moitié inférieure : image conjuguée parcourue en sens inverse (G(z̄) = conj G(z))"""
    return [
        ContourPiece(
            label=piece.label,
            z=np.conj(piece.z[::-1]),
            u=np.conj(piece.u[::-1]),
            weight=-np.conj(piece.weight[::-1]),
        )
        for piece in reversed(upper)
    ]


def _v_segment(v0: float, beta: float, t_lo: float, t_hi: float, per_panel: int, sheet: int, graded: bool) -> ContourPiece:
    """z = 1 - (v0 + e^(iβ)t)⁴ ; u = v² sur le premier feuillet, -v² sur le second"""
    edges = _graded_edges(t_lo, t_hi) if graded else np.linspace(t_lo, t_hi, 9)
    t, weights = _gauss_legendre(edges, per_panel)
    rotation = np.exp(1j * beta)
    v = v0 + rotation * t
    u = v * v if sheet == 1 else -v * v
    return ContourPiece(label="A", z=1 - v ** 4, u=u, weight=-4 * v ** 3 * rotation * weights)


def _closing_arc(end: complex, epsilon_o: float, n: int, per_panel: int) -> tuple[ContourPiece, float]:
    radius = abs(end)
    if radius < 1 + epsilon_o:
        raise DomainError(f"|z(ξ,α)| = {radius:.6f} < 1 + ε_o = {1 + epsilon_o:.6f}, réduire ξ ou augmenter α")
    s_lo = max(float(np.angle(end)), 0.0)
    return _arc_piece(radius, s_lo, 2 * np.pi - s_lo, n, per_panel, "B"), radius


def build_contour(
    kind: ContourKind,
    xi: float,
    n: int,
    axis: str = "Y",
    alpha: Optional[float] = None,
    nodes: Optional[int] = None,
    params: Optional[RegimeParams] = None,
) -> ContourSpec:
    """
    Contour fermé autour de 0, découpé en pièces (A) (voisinage du point-col)
    et (B) (arc de cercle). `nodes` : noeuds de Gauss-Legendre par panneau.
    """
    kind = ContourKind(kind)
    params = params or RegimeParams()
    alpha = params.alpha if alpha is None else alpha
    per_panel = nodes or PANEL_NODES
    if not 0 <= xi < 1:
        raise DomainError(f"ξ={xi} hors de [0, 1[")
    t0 = None

    if kind == ContourKind.SADDLE_CIRCLE:
        radius = z_saddle(axis, xi) if xi > 0 else float(np.exp(-2 / max(n, 1)))
        pieces = [
            _arc_piece(radius, -alpha, alpha, n, per_panel, "A"),
            _arc_piece(radius, alpha, 2 * np.pi - alpha, n, per_panel, "B"),
        ]
        betas, end_modulus = [], radius

    elif kind == ContourKind.UPLANE_HYBRID:
        t, weights = _gauss_legendre(_graded_edges(0.0, alpha), per_panel)
        u = xi - 1j * t
        upper = [ContourPiece(label="A", z=1 - u * u, u=u, weight=2j * u * weights)]
        arc, end_modulus = _closing_arc(1 - (xi - 1j * alpha) ** 2, params.epsilon_o, n, per_panel)
        pieces = _conjugate_chain(upper) + upper + [arc]
        betas = [-np.pi / 2]

    elif kind == ContourKind.VPLANE_QUARTER:
        v0 = v_saddle(xi)
        beta = -np.pi / 4
        upper = [_v_segment(v0, beta, 0.0, alpha, per_panel, sheet=1, graded=True)]
        end = 1 - (v0 + np.exp(1j * beta) * alpha) ** 4
        arc, end_modulus = _closing_arc(end, params.epsilon_o, n, per_panel)
        pieces = _conjugate_chain(upper) + upper + [arc]
        betas = [beta]

    elif kind == ContourKind.VPLANE_TWO_BETA:
        if xi == 0:
            raise DomainError("Contour à deux angles défini pour ξ > 0 seulement")
        v0 = v_saddle(xi)
        t0 = 2 * v0 / (np.sqrt(3) - 1)
        first_stop = min(t0, alpha)
        upper = [_v_segment(v0, -np.pi / 3, 0.0, first_stop, per_panel, sheet=1, graded=True)]
        betas = [-np.pi / 3]
        if t0 < alpha:
            # en t0 les deux branches touchent la coupure au même z* > 1
            upper.append(_v_segment(v0, np.pi / 3, t0, alpha, per_panel, sheet=2, graded=False))
            betas.append(np.pi / 3)
            end = 1 - (v0 + np.exp(1j * np.pi / 3) * alpha) ** 4
        else:
            logger.debug(f"🔍 t0={t0:.4f} >= α={alpha}, une seule branche β = -π/3")
            end = 1 - (v0 + np.exp(-1j * np.pi / 3) * alpha) ** 4
        arc, end_modulus = _closing_arc(end, params.epsilon_o, n, per_panel)
        pieces = _conjugate_chain(upper) + upper + [arc]

    else:
        raise DomainError(f"Type de contour inconnu: {kind}")

    spec = ContourSpec(
        kind=kind,
        xi=xi,
        alpha=alpha,
        betas=[float(b) for b in betas],
        t0=t0,
        nodes=sum(piece.z.size for piece in pieces),
        end_modulus=float(end_modulus),
        pieces=pieces,
    )
    winding = winding_number(spec.points())
    if winding != 1:
        raise DomainError(f"Contour {kind.value} mal orienté (indice {winding} autour de 0)")
    return spec


def winding_number(points: np.ndarray, center: complex = 0j) -> int:
    """Indice du lacet fermé (dernier point relié au premier) par rapport à `center`"""
    shifted = np.asarray(points, dtype=np.complex128) - center
    increments = np.angle(np.roll(shifted, -1) / shifted)
    return int(round(increments.sum() / (2 * np.pi)))


# ============================================
# DÉCOUPAGE (A) + (B)
# ============================================

_KIND_AXIS = {
    ContourKind.UPLANE_HYBRID: "Y",
    ContourKind.VPLANE_QUARTER: "X",
    ContourKind.VPLANE_TWO_BETA: "X",
}


def split_integral(spec: ContourSpec, axis: str, k: int, n: int) -> SplitResult:
    """Valeurs numériques de (A) et (B), à l'échelle commune e^log_scale"""
    expected = _KIND_AXIS.get(spec.kind)
    if expected is not None and expected != axis:
        raise DomainError(f"Contour {spec.kind.value} réservé à l'axe {expected}")
    logs = [_log_integrand(axis, k, n, piece.z, piece.u) for piece in spec.pieces]
    shift = max(float(log.real.max()) for log in logs)

    parts = {"A": 0j, "B": 0j}
    for piece, log in zip(spec.pieces, logs):
        parts[piece.label] += complex((piece.weight * np.exp(log - shift)).sum() / (2j * np.pi))

    logger.debug(f"🔍 Découpage {spec.kind.value}: A={parts['A']:.6e}, B={parts['B']:.6e} (échelle e^{shift:.2f})")
    return SplitResult(
        kind=spec.kind,
        part_a=parts["A"],
        part_b=parts["B"],
        total=parts["A"] + parts["B"],
        log_scale=shift,
    )
