"""
Routes API asymptotiques : point-col et estimations par régime
"""
from fastapi import APIRouter, Depends, Query

from app.api.deps import get_run_config, run_service
from app.core.config import RunConfig
from app.schemas.schemas import Axis, EstimateResult, SaddleData
from app.services.asymptotic_estimators import dispatch
from app.services.saddle_core import saddle

router = APIRouter(tags=["asymptotics"])


@router.get("/saddle", response_model=SaddleData)
async def get_saddle(xi: float = Query(..., ge=0, lt=1), axis: Axis = "Y"):
    return await run_service(saddle, axis, xi)


@router.get("/asym", response_model=EstimateResult)
async def get_asym(
    k: int = Query(..., ge=0),
    n: int = Query(..., ge=1),
    axis: Axis = "Y",
    config: RunConfig = Depends(get_run_config),
):
    """Estimation du régime contenant ξ = k/n (avec estimations voisines près d'une frontière)"""
    return await run_service(dispatch, axis, k, n, config.regime)
