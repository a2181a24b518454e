import csv
import io
import json
from fractions import Fraction

import pytest

from app.core.config import PrecisionParams, RunConfig
from app.core.errors import DomainError, InfeasibleError
from app.schemas.schemas import ErrorRow, ErrorTable, Regime
from app.services import verify_harness
from app.services.verify_harness import (
    CSV_HEADER,
    choose_oracle,
    compare_grid,
    domination_check,
    exact_log,
    jones_ratio,
    local_limit_table,
    to_csv,
    to_json,
    uniformity_trend,
)


# ============================================
# ORACLES
# ============================================

@pytest.mark.parametrize(
    "k, n, oracle",
    [
        (3, 150, "latticeExact"),
        (3, 151, "seriesExact"),
        (3, 400, "seriesExact"),
        (3, 1000, "seriesFloat"),
        (20, 1000, "contour"),
        (3, 5000, "contour"),
    ],
)
def test_choose_oracle(k, n, oracle):
    assert choose_oracle("Y", k, n) == oracle


def test_choose_oracle_unknown_axis():
    with pytest.raises(DomainError):
        choose_oracle("Z", 1, 10)


@pytest.mark.parametrize("axis", ["Y", "X"])
def test_exact_oracles_agree(axis):
    lattice = exact_log(axis, 4, 30, oracle="latticeExact")
    series = exact_log(axis, 4, 30, oracle="seriesExact")
    assert lattice.rational == series.rational
    assert isinstance(lattice.rational, Fraction)
    assert lattice.log_value == pytest.approx(series.log_value, rel=1e-15)


@pytest.mark.parametrize("oracle", ["seriesFloat", "contour"])
def test_float_oracles_close_to_rational(oracle):
    exact = exact_log("Y", 5, 40, oracle="latticeExact")
    other = exact_log("Y", 5, 40, oracle=oracle)
    assert other.rational is None
    assert other.oracle == oracle
    assert other.log_value == pytest.approx(exact.log_value, rel=1e-9)


def test_return_probability_rational():
    assert exact_log("Y", 0, 1).rational == Fraction(3, 8)


def test_exact_log_caps():
    with pytest.raises(InfeasibleError):
        exact_log("Y", 0, 200, oracle="latticeExact")
    with pytest.raises(InfeasibleError):
        exact_log("Y", 0, 500, oracle="seriesExact")
    with pytest.raises(InfeasibleError):
        exact_log("Y", 0, 50, PrecisionParams(series_float_cap=10), oracle="seriesFloat")
    with pytest.raises(DomainError):
        exact_log("Y", 0, 5, oracle="oracleInconnu")


def test_unreachable_target_is_minus_infinity():
    assert exact_log("Y", 10, 5, oracle="latticeExact").log_value == float("-inf")


# ============================================
# GRILLES
# ============================================

def test_compare_grid_rows():
    table = compare_grid("Y", [40, 20], [0.5, 0.3])
    assert [(row.n, row.k) for row in table.rows] == [(20, 6), (20, 10), (40, 12), (40, 20)]
    assert all(row.regime == Regime.Y_BULK for row in table.rows)
    assert all(row.oracle == "latticeExact" for row in table.rows)
    assert set(table.regime_max["Y_BULK"]) == {20, 40}
    assert table.regime_max["Y_BULK"][40] == max(row.rel_error for row in table.rows if row.n == 40)


def test_compare_grid_deduplicates_points():
    table = compare_grid("Y", [20], [0.5, 0.51])
    assert len(table.rows) == 1


def test_compare_grid_with_workers_matches_sequential():
    sequential = compare_grid("X", [20, 30], [0.3, 0.6])
    parallel = compare_grid("X", [20, 30], [0.3, 0.6], RunConfig(workers=2))
    assert parallel.rows == sequential.rows


def test_compare_grid_validation():
    with pytest.raises(DomainError):
        compare_grid("Y", [], [0.5])
    with pytest.raises(DomainError):
        compare_grid("Y", [0], [0.5])


def _row(regime: Regime, n: int, error: float) -> ErrorRow:
    return ErrorRow(
        axis="Y", n=n, k=1, xi=1 / n, exact_log=0.0, estimate_log=0.0,
        rel_error=error, regime=regime, oracle="contour",
    )


def test_uniformity_trend():
    table = ErrorTable(
        axis="Y",
        rows=[
            _row(Regime.Y_BULK, 100, 0.05),
            _row(Regime.Y_BULK, 100, 0.02),
            _row(Regime.Y_BULK, 200, 0.03),
            _row(Regime.Y_SMALL, 100, 0.01),
            _row(Regime.Y_SMALL, 200, 0.04),
        ],
    )
    trend = uniformity_trend(table)
    assert trend.regime_max["Y_BULK"] == {100: 0.05, 200: 0.03}
    assert trend.non_increasing == {"Y_BULK": True, "Y_SMALL": False}


def test_local_limit_table_small_m():
    table = local_limit_table([10, 5], oracle="latticeExact")
    assert [row.n for row in table.rows] == [5, 10]
    assert all(row.regime == Regime.LOCAL for row in table.rows)
    assert table.rows[1].rel_error < table.rows[0].rel_error


@pytest.mark.slow
def test_local_limit_table_converges():
    table = local_limit_table([500, 1000, 2000, 5000], oracle="contour")
    errors = [row.rel_error for row in table.rows]
    assert errors[0] < 0.05
    assert all(b < a for a, b in zip(errors, errors[1:]))


# ============================================
# JONES
# ============================================

def test_jones_ratio_sources():
    rows = jones_ratio([50, 2000], oracle_max_n=100)
    assert [row.source for row in rows] == ["oracle", "estimate"]
    assert rows[0].k == round(50 ** 0.375)
    assert rows[0].log_ratio == pytest.approx(rows[0].log_px - rows[0].log_py)
    assert rows[1].log_px == rows[1].estimate_log_px


@pytest.mark.parametrize("exponent", [0.5, 0.75, 0.9])
def test_jones_ratio_exponent_range(exponent):
    with pytest.raises(DomainError):
        jones_ratio([100], exponent=exponent)


# ============================================
# DOMINATION
# ============================================

def test_domination_check():
    report = domination_check(samples=50, seed=1)
    assert report.samples == 52
    assert report.violations == 0
    assert report.min_margin_nonreal > 0
    assert report.max_real_deviation < 1e-12
    assert len(report.functions) == 4


@pytest.mark.slow
def test_domination_check_full_sample():
    report = domination_check(samples=1000, seed=7)
    assert report.samples == 1002
    assert report.violations == 0
    assert report.min_margin_nonreal > 0


def test_domination_check_parameters():
    with pytest.raises(DomainError):
        domination_check(samples=10, radius=1.0)


# ============================================
# SÉRIALISATION
# ============================================

def test_csv_and_json_agree():
    table = compare_grid("Y", [20], [0.5])
    text = to_csv(table)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)

    csv_rows = list(csv.DictReader(io.StringIO(text)))
    json_rows = json.loads(to_json(table))
    assert len(csv_rows) == len(json_rows) == 1
    assert json_rows[0]["regime"] == csv_rows[0]["regime"] == "Y_BULK"
    for key in ("xi", "exact_log", "estimate_log", "rel_error"):
        assert json_rows[0][key] == float(csv_rows[0][key])
    assert verify_harness._fmt(0.5) == "5.0000000000000000e-01"
