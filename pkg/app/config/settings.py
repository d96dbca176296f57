"""
실행 환경 설정
ETWIST_ 접두사 환경 변수와 .env 파일, 콜리메이터 기본값 파일 로드
"""
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.shared.constants import MonteCarloDefaults

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[2]


class EtwistSettings(BaseSettings):
    """프로세스 수준 설정"""
    model_config = SettingsConfigDict(env_prefix="ETWIST_", env_file=".env", extra="ignore")

    output_dir: Path = Field(Path("results"), description="결과 파일 기본 디렉터리")
    log_level: str = Field("INFO", description="로그 레벨")
    rng_seed: int = Field(MonteCarloDefaults.SEED, ge=0, lt=2 ** 64, description="기본 난수 시드")
    sweep_workers: int = Field(4, ge=1, description="스윕 병렬 작업자 수")
    collimator_fixtures: Path = Field(
        PROJECT_ROOT / "fixtures" / "collimators.json", description="그림 1 콜리메이터 기본값 파일"
    )


@lru_cache()
def get_settings() -> EtwistSettings:
    """설정 싱글턴"""
    return EtwistSettings()


@lru_cache()
def load_collimator_fixtures(path: Path = None) -> Dict[str, Dict[str, Any]]:
    """
    콜리메이터 기본값 로드

    Returns:
        종류 이름 → CollimatorGeometry 필드 딕셔너리 ('_'로 시작하는 키는 주석)
    """
    path = Path(path) if path is not None else get_settings().collimator_fixtures
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    fixtures = {name: spec for name, spec in data.items() if not name.startswith("_")}
    logger.debug(f"콜리메이터 기본값 로드: {path} ({len(fixtures)}개)")
    return fixtures
