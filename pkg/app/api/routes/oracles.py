"""
Routes API des oracles exacts : probabilités, séries, fonctions de Green, contours
"""
from typing import Literal, Optional
import logging

from fastapi import APIRouter, Depends, HTTPException, Query

from app.api.deps import get_run_config, run_service
from app.core.config import RunConfig
from app.schemas.schemas import (
    Axis,
    ContourKind,
    ExactResponse,
    GreenResponse,
    OracleName,
    SeriesResponse,
    SplitResult,
)
from app.services import contour_quadrature, green_eval
from app.services.series_oracle import prob_series
from app.services.verify_harness import exact_log

logger = logging.getLogger(__name__)
router = APIRouter(tags=["oracles"])


@router.get("/exact", response_model=ExactResponse)
async def get_exact(
    k: int = Query(..., ge=0),
    n: int = Query(..., ge=0),
    axis: Axis = "Y",
    oracle: Optional[OracleName] = None,
    config: RunConfig = Depends(get_run_config),
):
    """p^(2n)((0,2k), o) ou p^(2n)((2k,0), o) par l'oracle choisi"""
    value = await run_service(exact_log, axis, k, n, config.precision, oracle)
    return ExactResponse(
        axis=axis,
        k=k,
        n=n,
        rational=str(value.rational) if value.rational is not None else None,
        log_value=value.log_value,
        oracle=value.oracle,
    )


@router.get("/series", response_model=SeriesResponse)
async def get_series(
    k: int = Query(..., ge=0),
    order: int = Query(..., ge=0),
    axis: Axis = "Y",
    config: RunConfig = Depends(get_run_config),
):
    if order > config.precision.series_exact_cap:
        raise HTTPException(
            status_code=409,
            detail=f"Ordre {order} au-delà du plafond séries exactes ({config.precision.series_exact_cap})",
        )
    series = await run_service(prob_series, axis, k, order, True)
    return SeriesResponse(axis=axis, k=k, order=order, coeffs=[str(c) for c in series.coeffs])


@router.get("/green", response_model=GreenResponse)
async def get_green(
    re: float,
    im: float = 0.0,
    d: Optional[int] = Query(None, ge=1),
    function: Literal["g", "f1sq", "f2sq"] = "g",
    extend: bool = False,
):
    z = complex(re, im)
    if d is not None:
        value = await run_service(green_eval.eval_gd, d, z, extend=extend)
        return GreenResponse(function="gd", d=d, z=z, value=complex(value))
    evaluate = {"g": green_eval.eval_g, "f1sq": green_eval.eval_f1sq, "f2sq": green_eval.eval_f2sq}[function]
    value = await run_service(evaluate, z, extend=extend)
    return GreenResponse(function=function, z=z, value=complex(value))


@router.get("/contour", response_model=SplitResult)
async def get_contour(
    kind: ContourKind,
    xi: float = Query(..., ge=0, lt=1),
    n: int = Query(..., ge=1),
    k: int = Query(..., ge=0),
    axis: Axis = "Y",
    config: RunConfig = Depends(get_run_config),
):
    """Découpage (A) + (B) ; valeurs à l'échelle e^log_scale"""
    spec = await run_service(contour_quadrature.build_contour, kind, xi, n, axis=axis, params=config.regime)
    return await run_service(contour_quadrature.split_integral, spec, axis, k, n)
