"""
공용 테스트 픽스처
"""
import numpy as np
import pytest

from app.config.settings import get_settings, load_collimator_fixtures
from app.models.physics_models import CollimatorGeometry, GaussianPacketSpec, PhysicsContext


@pytest.fixture
def neutron() -> PhysicsContext:
    return PhysicsContext.neutron()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def collimators():
    """fixtures/collimators.json의 세 콜리메이터 (k_z = 1)"""
    return {name: CollimatorGeometry(**spec) for name, spec in load_collimator_fixtures().items()}


@pytest.fixture
def fig4_spec() -> GaussianPacketSpec:
    return GaussianPacketSpec(k_y_mean=1.0, sigma_y=float(np.sqrt(0.1)), R=1.0)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """환경 변수 재정의가 테스트 사이에 새지 않도록 설정 캐시 초기화"""
    for key in ("ETWIST_OUTPUT_DIR", "ETWIST_LOG_LEVEL", "ETWIST_RNG_SEED", "ETWIST_SWEEP_WORKERS"):
        monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
