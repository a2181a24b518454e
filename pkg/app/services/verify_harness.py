"""
Service de vérification : comparaison oracles exacts / estimateurs asymptotiques

Balayage de grilles (ξ, n), tendance d'uniformité par régime, démonstration
de l'absence de borne de Jones commune aux deux axes, et contrôle de
domination |f(z)| <= f(|z|).
"""
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import log
from typing import Any, Optional, Sequence
import csv
import io
import logging

import mpmath
import numpy as np
from pydantic import TypeAdapter

from app.core.config import PrecisionParams, RegimeParams, RunConfig
from app.core.errors import DomainError, InfeasibleError
from app.schemas.schemas import (
    DominationReport,
    ErrorRow,
    ErrorTable,
    ExactValue,
    JonesRow,
    Regime,
    UniformityTrend,
)
from app.services.asymptotic_estimators import dispatch, local_estimate
from app.services.contour_quadrature import cauchy_circle_log
from app.services.green_eval import eval_f1sq, eval_f2sq, eval_g
from app.services.lattice_oracle import axis_prob
from app.services.series_oracle import green_series_origin, prob_series

logger = logging.getLogger(__name__)

SERIES_FLOAT_MAX_K = 8
CSV_HEADER = ["axis", "n", "k", "xi", "exact_log", "estimate_log", "rel_error", "regime", "oracle"]


# ============================================
# ORACLES
# ============================================

def choose_oracle(axis: str, k: int, n: int, precision: Optional[PrecisionParams] = None) -> str:
    """
    latticeExact si 2n <= exact_cap, seriesExact si n <= series_exact_cap,
    seriesFloat si n <= series_float_cap et k petit, contour sinon.
    """
    precision = precision or PrecisionParams()
    if axis not in ("Y", "X"):
        raise DomainError(f"Axe inconnu: {axis}")
    if k < 0 or n < 0:
        raise DomainError(f"k et n doivent être >= 0 (k={k}, n={n})")
    if 2 * n <= precision.exact_cap:
        return "latticeExact"
    if n <= precision.series_exact_cap:
        return "seriesExact"
    if n <= precision.series_float_cap and k <= SERIES_FLOAT_MAX_K:
        return "seriesFloat"
    return "contour"


def _log_fraction(q: Fraction) -> float:
    if q <= 0:
        return float("-inf")
    # log sur entiers arbitraires, sans passer par un float qui sous-déborde
    return log(q.numerator) - log(q.denominator)


def exact_log(
    axis: str,
    k: int,
    n: int,
    precision: Optional[PrecisionParams] = None,
    oracle: Optional[str] = None,
) -> ExactValue:
    """log p^(2n) sur l'axe, avec la valeur rationnelle quand l'oracle est exact"""
    precision = precision or PrecisionParams()
    oracle = oracle or choose_oracle(axis, k, n, precision)
    logger.debug(f"🔍 Oracle {oracle} pour axe {axis}, k={k}, n={n}")

    if oracle == "latticeExact":
        if 2 * n > precision.exact_cap:
            raise InfeasibleError(f"2n={2 * n} au-delà du plafond réseau ({precision.exact_cap})")
        value = axis_prob(axis, k, n, cap=precision.exact_cap)
        return ExactValue(_log_fraction(value), value, oracle)

    if oracle == "seriesExact":
        if n > precision.series_exact_cap:
            raise InfeasibleError(f"n={n} au-delà du plafond séries exactes ({precision.series_exact_cap})")
        value = prob_series(axis, k, n, exact=True)[n]
        return ExactValue(_log_fraction(value), value, oracle)

    if oracle == "seriesFloat":
        if n > precision.series_float_cap:
            raise InfeasibleError(f"n={n} au-delà du plafond séries flottantes ({precision.series_float_cap})")
        value = prob_series(axis, k, n, exact=False, prec=precision.mantissa_bits)[n]
        with mpmath.workprec(precision.mantissa_bits):
            log_value = float(mpmath.log(value)) if value > 0 else float("-inf")
        return ExactValue(log_value, None, oracle)

    if oracle == "contour":
        return ExactValue(cauchy_circle_log(axis, k, n, precision=precision), None, oracle)

    raise DomainError(f"Oracle inconnu: {oracle}")


# ============================================
# GRILLES DE COMPARAISON
# ============================================

def _rel_error(estimate_log: float, exact: float) -> float:
    return float(abs(np.expm1(estimate_log - exact)))


def _compute_row(
    axis: str,
    n: int,
    k: int,
    regime: RegimeParams,
    precision: PrecisionParams,
    oracle: Optional[str] = None,
) -> ErrorRow:
    exact = exact_log(axis, k, n, precision, oracle)
    estimate = dispatch(axis, k, n, regime)
    return ErrorRow(
        axis=axis,
        n=n,
        k=k,
        xi=k / n,
        exact_log=exact.log_value,
        estimate_log=estimate.log_value,
        rel_error=_rel_error(estimate.log_value, exact.log_value),
        regime=estimate.regime,
        oracle=exact.oracle,
    )


def _regime_max(rows: Sequence[ErrorRow]) -> dict[str, dict[int, float]]:
    maxima: dict[str, dict[int, float]] = {}
    for row in rows:
        per_n = maxima.setdefault(row.regime.value, {})
        per_n[row.n] = max(per_n.get(row.n, 0.0), row.rel_error)
    return maxima


def compare_grid(
    axis: str,
    n_list: Sequence[int],
    xi_grid: Sequence[float],
    config: Optional[RunConfig] = None,
    oracle: Optional[str] = None,
) -> ErrorTable:
    """
    Tableau d'erreurs relatives sur la grille (n, ξ), k = round(ξ·n).
    Lignes indépendantes : pool de processus si config.workers > 1.
    """
    config = config or RunConfig()
    if not n_list or not xi_grid:
        raise DomainError("Grilles n et ξ non vides requises")
    if axis not in ("Y", "X"):
        raise DomainError(f"Axe inconnu: {axis}")

    jobs = sorted({(n, int(round(xi * n))) for n in n_list for xi in xi_grid})
    for n, k in jobs:
        if n < 1 or k < 0:
            raise DomainError(f"Point de grille invalide: n={n}, k={k}")

    logger.info(f"🚀 Comparaison axe {axis}: {len(jobs)} points, {config.workers} worker(s)")
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_compute_row, axis, n, k, config.regime, config.precision, oracle)
                for n, k in jobs
            ]
            rows = [future.result() for future in futures]
    else:
        rows = [_compute_row(axis, n, k, config.regime, config.precision, oracle) for n, k in jobs]

    rows.sort(key=lambda row: (row.n, row.xi))
    table = ErrorTable(axis=axis, rows=rows, regime_max=_regime_max(rows))
    for regime, per_n in table.regime_max.items():
        logger.info(f"📊 {regime}: " + ", ".join(f"n={n} → {err:.3e}" for n, err in sorted(per_n.items())))
    return table


def uniformity_trend(table: ErrorTable) -> UniformityTrend:
    """Max d'erreur par régime et par n, et monotonie (non croissante) le long de n"""
    maxima = table.regime_max or _regime_max(table.rows)
    non_increasing = {}
    for regime, per_n in maxima.items():
        ordered = [per_n[n] for n in sorted(per_n)]
        non_increasing[regime] = all(b <= a for a, b in zip(ordered, ordered[1:]))
    return UniformityTrend(axis=table.axis, regime_max=maxima, non_increasing=non_increasing)


def local_limit_table(
    m_list: Sequence[int],
    precision: Optional[PrecisionParams] = None,
    oracle: Optional[str] = None,
) -> ErrorTable:
    """Retour à l'origine p^(2m)(o,o) contre le théorème local (d = 2)"""
    precision = precision or PrecisionParams()
    rows = []
    for m in sorted(m_list):
        if m < 1:
            raise DomainError(f"m={m} doit être >= 1")
        exact = exact_log("Y", 0, m, precision, oracle)
        estimate = local_estimate(2, 2 * m)
        rows.append(
            ErrorRow(
                axis="Y",
                n=m,
                k=0,
                xi=0.0,
                exact_log=exact.log_value,
                estimate_log=estimate.log_value,
                rel_error=_rel_error(estimate.log_value, exact.log_value),
                regime=Regime.LOCAL,
                oracle=exact.oracle,
            )
        )
    return ErrorTable(axis="Y", rows=rows, regime_max=_regime_max(rows))


# ============================================
# RAPPORT x/y (JONES)
# ============================================

def jones_ratio(
    n_list: Sequence[int],
    exponent: float = 5 / 8,
    oracle_max_n: int = 0,
    config: Optional[RunConfig] = None,
) -> list[JonesRow]:
    """
    log(p_x/p_y) le long de ξ_n = n^(-exponent). Les oracles exacts sont
    utilisés jusqu'à oracle_max_n, les estimateurs au-delà.
    """
    config = config or RunConfig()
    if not 0.5 < exponent < 0.75:
        raise DomainError(f"Exposant {exponent} hors de ]1/2, 3/4[")

    rows = []
    for n in sorted(n_list):
        if n < 1:
            raise DomainError(f"n={n} doit être >= 1")
        k = max(1, int(round(n ** (1 - exponent))))
        estimate_x = dispatch("X", k, n, config.regime)
        estimate_y = dispatch("Y", k, n, config.regime)
        if n <= oracle_max_n:
            log_px = exact_log("X", k, n, config.precision).log_value
            log_py = exact_log("Y", k, n, config.precision).log_value
            source = "oracle"
        else:
            log_px, log_py, source = estimate_x.log_value, estimate_y.log_value, "estimate"
        rows.append(
            JonesRow(
                n=n,
                k=k,
                xi=k / n,
                log_px=log_px,
                log_py=log_py,
                log_ratio=log_px - log_py,
                source=source,
                estimate_log_px=estimate_x.log_value,
                estimate_log_py=estimate_y.log_value,
            )
        )
        logger.info(f"📊 n={n}, k={k}: log(p_x/p_y) = {log_px - log_py:.4f} ({source})")
    return rows


# ============================================
# DOMINATION |f(z)| <= f(|z|)
# ============================================

def domination_check(
    samples: int = 1000,
    seed: int = 0,
    radius: float = 0.99,
    series_order: int = 200,
    tol: float = 1e-20,
) -> DominationReport:
    """
    Tirage uniforme dans le disque de rayon `radius`, plus z = 0.5 et z = 0.5i.
    Les quatre fonctions ont des coefficients de Taylor positifs.
    """
    if samples < 0 or not 0 < radius < 1:
        raise DomainError(f"Paramètres invalides: samples={samples}, radius={radius}")
    rng = np.random.default_rng(seed)
    moduli = radius * np.sqrt(rng.random(samples))
    angles = 2 * np.pi * rng.random(samples)
    points = [complex(0.5, 0), complex(0, 0.5)] + list(moduli * np.exp(1j * angles))

    partial = green_series_origin(series_order, exact=False)
    functions = {
        "G": lambda z: eval_g(z),
        "F1²": lambda z: eval_f1sq(z),
        "F2²": lambda z: eval_f2sq(z),
        f"G_{series_order}": partial.evaluate,
    }

    violations = 0
    min_margin = float("inf")
    max_deviation = 0.0
    with mpmath.workprec(partial.prec):
        for z in points:
            z = mpmath.mpc(z)
            modulus = abs(z)
            for name, f in functions.items():
                dominant = mpmath.re(f(modulus))
                if dominant <= 0:
                    continue
                margin = float((dominant - abs(f(z))) / dominant)
                if margin < -tol:
                    violations += 1
                    logger.warning(f"⚠️ Domination violée pour {name} en z={complex(z)}: marge {margin:.3e}")
                if z.imag == 0 and z.real >= 0:
                    max_deviation = max(max_deviation, abs(margin))
                elif z.imag != 0:
                    min_margin = min(min_margin, margin)

    logger.info(f"✅ Domination: {len(points)} points, {violations} violation(s), marge min {min_margin:.3e}")
    return DominationReport(
        samples=len(points),
        violations=violations,
        min_margin_nonreal=min_margin,
        max_real_deviation=max_deviation,
        functions=list(functions),
    )


# ============================================
# SÉRIALISATION
# ============================================

def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _row_record(row: ErrorRow) -> dict:
    return {
        "axis": row.axis,
        "n": row.n,
        "k": row.k,
        "xi": _fmt(row.xi),
        "exact_log": _fmt(row.exact_log),
        "estimate_log": _fmt(row.estimate_log),
        "rel_error": _fmt(row.rel_error),
        "regime": row.regime.value,
        "oracle": row.oracle,
    }


def to_csv(table: ErrorTable) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in table.rows:
        writer.writerow(_row_record(row))
    return buffer.getvalue()


_RECORDS = TypeAdapter(list[dict[str, Any]])


def to_json(table: ErrorTable) -> str:
    """Tableau d'objets aux clés du CSV ; flottants relus depuis le format à 17 chiffres"""
    records = []
    for row in table.rows:
        record = _row_record(row)
        for key in ("xi", "exact_log", "estimate_log", "rel_error"):
            record[key] = float(record[key])
        records.append(record)
    return _RECORDS.dump_json(records, indent=2).decode()
