"""
Service oracle réseau : probabilités exactes de la marche simple sur le 2-peigne

Les lois sont dyadiques ; la programmation dynamique travaille sur des
numérateurs entiers au dénominateur commun 4^t.
"""
from fractions import Fraction
from typing import Optional
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import CapExceededError, DomainError
from app.schemas.schemas import ORIGIN, CombVertex, DistTable, LatticeProbability

logger = logging.getLogger(__name__)


def degree(v: CombVertex) -> int:
    return 4 if v.y == 0 else 2


def neighbors(v: CombVertex) -> list[CombVertex]:
    around = [CombVertex(v.x, v.y + 1), CombVertex(v.x, v.y - 1)]
    if v.y == 0:
        around += [CombVertex(v.x + 1, 0), CombVertex(v.x - 1, 0)]
    return around


def graph_distance(u: CombVertex, v: CombVertex) -> int:
    """Distance dans l'arbre : même dent (sans passer par l'axe) ou chemin via l'axe x"""
    if u.x == v.x and (u.y * v.y >= 0):
        return abs(u.y - v.y)
    return abs(u.y) + abs(u.x - v.x) + abs(v.y)


def delta_table(v: CombVertex) -> DistTable:
    return DistTable(step=0, entries={v: Fraction(1)})


def step(d: DistTable) -> DistTable:
    entries: dict[CombVertex, Fraction] = {}
    for v, mass in d.entries.items():
        if not mass:
            continue
        share = mass / degree(v)
        for w in neighbors(v):
            entries[w] = entries.get(w, Fraction(0)) + share
    return DistTable(step=d.step + 1, entries=entries)


def run_steps(d: DistTable, n: int) -> DistTable:
    for _ in range(n):
        d = step(d)
    return d


# ============================================
# PROGRAMMATION DYNAMIQUE DENSE
# ============================================

def _bounding_box(start: CombVertex, target: CombVertex, n: int) -> tuple[int, int, int]:
    """
    Boîte des sommets situés sur un chemin de longueur n de start à target.
    d(s,v) + d(v,t) >= |x_v - x_s| + |x_v - x_t| et >= 2|y_v| - |y_s| - |y_t|.
    """
    x_lo = -((n - start.x - target.x) // 2)  # ceil((x_s + x_t - n) / 2)
    x_hi = (start.x + target.x + n) // 2
    y_max = (n + abs(start.y) + abs(target.y)) // 2
    return x_lo, x_hi, y_max


def _propagate(start: CombVertex, target: CombVertex, n: int, exact: bool):
    x_lo, x_hi, y_max = _bounding_box(start, target, n)
    width, height = x_hi - x_lo + 1, 2 * y_max + 1
    dtype = object if exact else np.float64
    grid = np.zeros((width, height), dtype=dtype)
    axis_row = y_max
    grid[start.x - x_lo, start.y + y_max] = 1

    # facteur 2 sur les dents (deg 2) au dénominateur commun 4^(t+1)
    weight = np.full(height, 2, dtype=dtype)
    weight[axis_row] = 1
    if not exact:
        weight = weight / 4.0

    for _ in range(n):
        moved = grid * weight
        new = np.zeros_like(grid)
        new[:, 1:] += moved[:, :-1]
        new[:, :-1] += moved[:, 1:]
        new[1:, axis_row] += moved[:-1, axis_row]
        new[:-1, axis_row] += moved[1:, axis_row]
        grid = new

    return grid[target.x - x_lo, target.y + y_max]


def _parity_zero(start: CombVertex, target: CombVertex, n: int) -> bool:
    distance = graph_distance(start, target)
    return distance > n or (n - distance) % 2 == 1


def exact_prob(
    start: CombVertex,
    target: CombVertex,
    n: int,
    cap: Optional[int] = None,
) -> Fraction:
    if n < 0:
        raise DomainError(f"Nombre de pas négatif: {n}")
    cap = settings.EXACT_CAP if cap is None else cap
    if n > cap:
        raise CapExceededError(f"n={n} dépasse le plafond exact ({cap})")
    if _parity_zero(start, target, n):
        return Fraction(0)
    numerator = _propagate(start, target, n, exact=True)
    return Fraction(int(numerator), 4 ** n)


def transition_probability(
    start: CombVertex,
    target: CombVertex,
    n: int,
    mode: str = "auto",
    cap: Optional[int] = None,
) -> LatticeProbability:
    """
    Probabilité p^(n)(start, target) avec étiquette de mode.
    En mode auto, bascule en float64 au-delà du plafond exact.
    """
    cap = settings.EXACT_CAP if cap is None else cap
    if mode == "exact" or (mode == "auto" and n <= cap):
        return LatticeProbability(value=exact_prob(start, target, n, cap=cap), mode="exact")
    if mode not in ("auto", "float"):
        raise DomainError(f"Mode inconnu: {mode}")
    if n < 0:
        raise DomainError(f"Nombre de pas négatif: {n}")
    logger.warning(f"⚠️ n={n} au-delà du plafond exact ({cap}), mode float64")
    if _parity_zero(start, target, n):
        return LatticeProbability(value=0.0, mode="float")
    return LatticeProbability(value=float(_propagate(start, target, n, exact=False)), mode="float")


def odd_from_even_y(k: int, n: int, cap: Optional[int] = None) -> Fraction:
    """p^(2n+1)((0,2k+1), o) via la moyenne des deux voisins pairs"""
    if k < 0 or n < 0:
        raise DomainError(f"k et n doivent être >= 0 (k={k}, n={n})")
    upper = exact_prob(CombVertex(0, 2 * k + 2), ORIGIN, 2 * n, cap=cap)
    lower = exact_prob(CombVertex(0, 2 * k), ORIGIN, 2 * n, cap=cap)
    return (upper + lower) / 2


def axis_prob(axis: str, k: int, n: int, cap: Optional[int] = None) -> Fraction:
    """p^(2n)((0,2k), o) sur l'axe y ou p^(2n)((2k,0), o) sur l'axe x"""
    start = CombVertex(0, 2 * k) if axis == "Y" else CombVertex(2 * k, 0)
    return exact_prob(start, ORIGIN, 2 * n, cap=cap)
