"""
Routes API de vérification : grilles de comparaison, rapport de Jones, domination
"""
from typing import Optional
import logging

from fastapi import APIRouter, Depends, Query

from app.api.deps import get_run_config, run_service
from app.core.config import RunConfig
from app.schemas.schemas import CompareRequest, DominationReport, ErrorTable, JonesResponse
from app.services.asymptotic_estimators import einstein_constants
from app.services.verify_harness import compare_grid, domination_check, jones_ratio

logger = logging.getLogger(__name__)
router = APIRouter(tags=["verification"])


@router.post("/compare", response_model=ErrorTable)
async def post_compare(request: CompareRequest, config: RunConfig = Depends(get_run_config)):
    logger.info(f"📊 Grille axe {request.axis}: n={request.n}, ξ={request.xi}")
    return await run_service(compare_grid, request.axis, request.n, request.xi, config, request.oracle)


@router.get("/jones", response_model=JonesResponse)
async def get_jones(
    n: list[int] = Query(...),
    exponent: float = Query(5 / 8, gt=0.5, lt=0.75),
    oracle_max_n: Optional[int] = Query(0, ge=0),
    config: RunConfig = Depends(get_run_config),
):
    rows = await run_service(jones_ratio, n, exponent, oracle_max_n, config)
    constants = einstein_constants()
    return JonesResponse(
        rows=rows,
        delta_s=str(constants.delta_s),
        delta_f=str(constants.delta_f),
        delta_w=str(constants.delta_w),
        relation_holds=constants.relation_holds,
    )


@router.get("/domination", response_model=DominationReport)
async def get_domination(samples: int = Query(1000, ge=0, le=100_000), seed: int = 0):
    return await run_service(domination_check, samples, seed)
