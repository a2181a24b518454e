"""
Dépendances communes des routes : configuration de run et exécution des calculs
"""
from functools import partial
from typing import Callable, TypeVar
import asyncio
import logging

from fastapi import HTTPException

from app.core.config import RunConfig
from app.core.errors import CombWalkError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def get_run_config() -> RunConfig:
    """RunConfig issue des défauts et des variables COMBWALK_*"""
    return RunConfig()


async def run_service(fn: Callable[..., T], *args, **kwargs) -> T:
    """Exécute un calcul bloquant dans un thread ; erreurs métier -> HTTPException"""
    try:
        return await asyncio.to_thread(partial(fn, *args, **kwargs))
    except CombWalkError as e:
        logger.warning(f"⚠️ {type(e).__name__}: {e.detail}")
        raise HTTPException(status_code=e.status_code, detail=e.detail)
