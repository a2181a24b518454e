"""
COMBWALK - Interface en ligne de commande

    python -m app.cli exact 0 1 --axis y
    python -m app.cli compare --axis y --n 200,400 --xi 0.3,0.5 --format csv

Résultats sur stdout (ou --out), journaux sur stderr.
Codes de sortie : 0 ok, 2 validation/domaine, 3 infaisable, 4 tolérance.
"""
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence
import argparse
import csv
import io
import json
import logging
import math
import sys

import mpmath
from pydantic import BaseModel, ValidationError

from app.core.config import RunConfig, load_run_config, settings
from app.core.errors import CombWalkError
from app.schemas.schemas import ContourKind
from app.services import asymptotic_estimators, contour_quadrature, green_eval, saddle_core, verify_harness
from app.services.series_oracle import prob_series

logger = logging.getLogger("app.cli")

JONES_HEADER = ["n", "k", "xi", "log_px", "log_py", "log_ratio", "source"]


# ============================================
# PARSEUR
# ============================================

def _axis(value: str) -> str:
    axis = value.upper()
    if axis not in ("Y", "X"):
        raise argparse.ArgumentTypeError(f"axe invalide: {value} (y ou x)")
    return axis


def _int_list(value: str) -> list[int]:
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"liste d'entiers invalide: {value}")


def _float_list(value: str) -> list[float]:
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"liste de réels invalide: {value}")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="fichier TOML [regime]/[precision]/[output]")
    common.add_argument("--format", choices=["csv", "json"], help="format de sortie")
    common.add_argument("--out", type=Path, help="fichier de sortie (stdout par défaut)")
    common.add_argument("--log-level", default=None, help="niveau de journalisation (stderr)")

    regime = common.add_argument_group("régimes")
    regime.add_argument("--a", type=float)
    regime.add_argument("--c", type=float)
    regime.add_argument("--alpha", type=float)
    regime.add_argument("--epsilon", type=float)
    regime.add_argument("--epsilon-tiny", type=float)

    precision = common.add_argument_group("précision")
    precision.add_argument("--exact-cap", type=int)
    precision.add_argument("--mantissa-bits", type=int)
    precision.add_argument("--quad-tol", type=float)
    precision.add_argument("--workers", type=int)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="combwalk", description="Marche aléatoire simple sur le 2-peigne")
    sub = parser.add_subparsers(dest="command", required=True)

    exact = sub.add_parser("exact", parents=[common], help="p^(2n) exacte sur un axe")
    exact.add_argument("k", type=int)
    exact.add_argument("n", type=int)
    exact.add_argument("--axis", type=_axis, default="Y")
    exact.add_argument("--oracle", choices=["latticeExact", "seriesExact", "seriesFloat", "contour"])

    series = sub.add_parser("series", parents=[common], help="coefficients de G·F^(2k) jusqu'à l'ordre N")
    series.add_argument("k", type=int)
    series.add_argument("order", type=int, metavar="N")
    series.add_argument("--axis", type=_axis, default="Y")
    series.add_argument("--float", dest="float_mode", action="store_true", help="coefficients mpmath")

    green = sub.add_parser("green", parents=[common], help="évaluation complexe de G ou G_d")
    green.add_argument("z", type=complex)
    green.add_argument("--d", type=int, help="dimension du peigne (récurrence G_d)")
    green.add_argument("--function", choices=["g", "f1sq", "f2sq"], default="g")
    green.add_argument("--extend", action="store_true", help="prolongement sur la coupure")

    saddle = sub.add_parser("saddle", parents=[common], help="point-col z_o(ξ) et dérivées")
    saddle.add_argument("xi", type=float)
    saddle.add_argument("--axis", type=_axis, default="Y")

    asym = sub.add_parser("asym", parents=[common], help="estimation asymptotique par régime")
    asym.add_argument("k", type=int)
    asym.add_argument("n", type=int)
    asym.add_argument("--axis", type=_axis, default="Y")

    contour = sub.add_parser("contour", parents=[common], help="découpage (A)/(B) d'un contour")
    contour.add_argument("--kind", choices=[kind.value for kind in ContourKind], required=True)
    contour.add_argument("--xi", type=float, required=True)
    contour.add_argument("--n", type=int, required=True)
    contour.add_argument("--k", type=int, required=True)
    contour.add_argument("--axis", type=_axis, default="Y")

    compare = sub.add_parser("compare", parents=[common], help="tableau d'erreurs sur une grille (n, ξ)")
    compare.add_argument("--axis", type=_axis, default="Y")
    compare.add_argument("--n", type=_int_list, required=True)
    compare.add_argument("--xi", type=_float_list, required=True)
    compare.add_argument("--oracle", choices=["latticeExact", "seriesExact", "seriesFloat", "contour"])

    jones = sub.add_parser("jones", parents=[common], help="log(p_x/p_y) le long de ξ_n = n^(-exposant)")
    jones.add_argument("--n", type=_int_list, required=True)
    jones.add_argument("--exponent", type=float, default=5 / 8)
    jones.add_argument("--oracle-max-n", type=int, default=0)

    domination = sub.add_parser("domination", parents=[common], help="contrôle |f(z)| <= f(|z|)")
    domination.add_argument("--samples", type=int, default=1000)
    domination.add_argument("--seed", type=int, default=0)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "regime": {
            "a": args.a,
            "c": args.c,
            "alpha": args.alpha,
            "epsilon": args.epsilon,
            "epsilon_tiny": args.epsilon_tiny,
        },
        "precision": {
            "exact_cap": args.exact_cap,
            "mantissa_bits": args.mantissa_bits,
            "quad_tol": args.quad_tol,
        },
        "output": {"format": args.format, "path": args.out},
        "workers": args.workers,
    }


# ============================================
# RENDU
# ============================================

def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _encode(value: Any, level: int) -> str:
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(value, Enum):
        return json.dumps(value.value, ensure_ascii=False)
    if isinstance(value, complex):
        return _encode([value.real, value.imag], level)
    if isinstance(value, float):
        return _fmt(value) if math.isfinite(value) else json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(key), ensure_ascii=False)}: {_encode(item, level + 1)}" for key, item in value.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(f"{inner}{_encode(item, level + 1)}" for item in value) + f"\n{pad}]"
    if value is None or isinstance(value, (bool, int, str)):
        return json.dumps(value, ensure_ascii=False)
    return json.dumps(str(value), ensure_ascii=False)


def _json(value: Any) -> str:
    """JSON indenté, flottants au format fixe (17 chiffres significatifs, exposant minuscule)"""
    return _encode(value, 0) + "\n"


def _model(result: BaseModel) -> str:
    return _json(result.model_dump())


def _rows(header: Sequence[str], records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return _json(records)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(header), lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({key: _fmt(v) if isinstance(v, float) else v for key, v in record.items()})
    return buffer.getvalue()


# ============================================
# COMMANDES
# ============================================

def _cmd_exact(args, config: RunConfig) -> str:
    value = verify_harness.exact_log(args.axis, args.k, args.n, config.precision, args.oracle)
    rational = str(value.rational) if value.rational is not None else None
    if config.output.format == "json":
        record = {"axis": args.axis, "k": args.k, "n": args.n, "rational": rational,
                  "log_value": value.log_value, "oracle": value.oracle}
        return _json(record)
    first = rational if rational is not None else _fmt(float(mpmath.exp(value.log_value)))
    return f"{first}\n{_fmt(value.log_value)}\n"


def _cmd_series(args, config: RunConfig) -> str:
    series = prob_series(args.axis, args.k, args.order, exact=not args.float_mode,
                         prec=config.precision.mantissa_bits)
    records = [{"n": n, "coeff": str(c)} for n, c in enumerate(series.coeffs)]
    return _rows(["n", "coeff"], records, config.output.format)


def _cmd_green(args, config: RunConfig) -> str:
    if args.d is not None:
        value = green_eval.eval_gd(args.d, args.z, extend=args.extend)
    else:
        function = {"g": green_eval.eval_g, "f1sq": green_eval.eval_f1sq, "f2sq": green_eval.eval_f2sq}[args.function]
        value = function(args.z, extend=args.extend)
    value = complex(value)
    if config.output.format == "json":
        return _json({"d": args.d, "z": [args.z.real, args.z.imag], "value": [value.real, value.imag]})
    return f"{_fmt(value.real)},{_fmt(value.imag)}\n"


def _cmd_saddle(args, config: RunConfig) -> str:
    return _model(saddle_core.saddle(args.axis, args.xi))


def _cmd_asym(args, config: RunConfig) -> str:
    return _model(asymptotic_estimators.dispatch(args.axis, args.k, args.n, config.regime))


def _cmd_contour(args, config: RunConfig) -> str:
    spec = contour_quadrature.build_contour(ContourKind(args.kind), args.xi, args.n, axis=args.axis, params=config.regime)
    return _model(contour_quadrature.split_integral(spec, args.axis, args.k, args.n))


def _cmd_compare(args, config: RunConfig) -> str:
    table = verify_harness.compare_grid(args.axis, args.n, args.xi, config, args.oracle)
    if config.output.format == "json":
        return verify_harness.to_json(table) + "\n"
    return verify_harness.to_csv(table)


def _cmd_jones(args, config: RunConfig) -> str:
    rows = verify_harness.jones_ratio(args.n, args.exponent, args.oracle_max_n, config)
    records = [
        {"n": r.n, "k": r.k, "xi": r.xi, "log_px": r.log_px, "log_py": r.log_py,
         "log_ratio": r.log_ratio, "source": r.source}
        for r in rows
    ]
    constants = asymptotic_estimators.einstein_constants()
    logger.info(f"📊 δ_s={constants.delta_s}, δ_f={constants.delta_f}, δ_w={constants.delta_w}")
    return _rows(JONES_HEADER, records, config.output.format)


def _cmd_domination(args, config: RunConfig) -> str:
    return _model(verify_harness.domination_check(args.samples, args.seed))


COMMANDS = {
    "exact": _cmd_exact,
    "series": _cmd_series,
    "green": _cmd_green,
    "saddle": _cmd_saddle,
    "asym": _cmd_asym,
    "contour": _cmd_contour,
    "compare": _cmd_compare,
    "jones": _cmd_jones,
    "domination": _cmd_domination,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        config = load_run_config(args.config, _overrides(args))
        mpmath.mp.prec = config.precision.mantissa_bits
        output = COMMANDS[args.command](args, config)
    except ValidationError as e:
        logger.error(f"❌ Configuration invalide: {e.errors()[0]['msg']}")
        print(f"erreur: configuration invalide ({e.error_count()} problème(s))", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        logger.error(f"❌ {e}")
        print(f"erreur: {e}", file=sys.stderr)
        return 2
    except CombWalkError as e:
        logger.error(f"❌ {type(e).__name__}: {e.detail}")
        print(f"erreur: {e.detail}", file=sys.stderr)
        return e.exit_code

    if config.output.path is not None:
        config.output.path.write_text(output)
        logger.info(f"✅ Résultat écrit dans {config.output.path}")
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
