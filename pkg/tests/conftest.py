import pytest

from app.config import settings
from app.schemas.sphere import FamilyParams
from app.schemas.verdict import BasinTestConfig
from app.storages import MemoryStorageProvider, get_storage_provider, reset_storage_provider

# reference parameters: quasicircle, depth-three capture, non-escaping, Siegel-type
LAMBDA_QUASICIRCLE = 4.0 + 0.0j
LAMBDA_DEPTH_THREE = 1.319448 + 1.633170j
LAMBDA_NON_ESCAPING = 1.5 + 0.866025j
LAMBDA_SIEGEL = 2.046736 + 1.589069j


@pytest.fixture(autouse=True)
def serial_workers(monkeypatch):
    monkeypatch.setattr(settings, "workers", 1)


@pytest.fixture
def quadratic():
    return FamilyParams.create(2, LAMBDA_QUASICIRCLE)


@pytest.fixture
def basin_cfg():
    return BasinTestConfig()


@pytest.fixture
def memory_storage():
    reset_storage_provider()
    provider = get_storage_provider("memory")
    assert isinstance(provider, MemoryStorageProvider)
    yield provider
    reset_storage_provider()
