"""
Fixtures partagées
"""
import mpmath
import pytest
import pytest_asyncio
from httpx import ASGITransport, AsyncClient

from app.core.config import PrecisionParams, RegimeParams, RunConfig


@pytest.fixture
def regime_params() -> RegimeParams:
    return RegimeParams()


@pytest.fixture
def precision() -> PrecisionParams:
    return PrecisionParams()


@pytest.fixture
def run_config() -> RunConfig:
    return RunConfig()


@pytest.fixture(autouse=True)
def _restore_mp_prec():
    """La CLI fixe mpmath.mp.prec ; on le remet à sa valeur après chaque test"""
    saved = mpmath.mp.prec
    yield
    mpmath.mp.prec = saved


@pytest_asyncio.fixture
async def client():
    from app.main import app

    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as ac:
        yield ac
