"""
실행 설정 모델 정의
명령별 파라미터와 RunConfig (알 수 없는 키는 거부)
"""
import itertools
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config.settings import load_collimator_fixtures
from app.models.physics_models import CollimatorGeometry, PhysicsContext, SpinState
from app.shared.constants import (
    DEGREE, DesignDefaults, Figure1Defaults, Figure2Defaults, Figure3Defaults, Figure4Defaults,
    MonteCarloDefaults,
)


class Command(str, Enum):
    """CLI 명령"""
    FIGURE1 = "figure1"
    FIGURE2 = "figure2"
    FIGURE3 = "figure3"
    FIGURE4 = "figure4"
    VOLTAGE = "voltage"
    DESIGN = "design"
    SWEEP = "sweep"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Figure1Params(_Section):
    """세로 전송 깊이 스캔 (무차원 단위)"""
    k_z: float = Field(Figure1Defaults.K_Z, gt=0, description="종방향 파수")
    C: float = Field(Figure1Defaults.COUPLING, description="결합 상수")
    z_max: float = Field(Figure1Defaults.Z_MAX, gt=0, description="최대 깊이")
    z_points: int = Field(Figure1Defaults.Z_POINTS, ge=2, description="깊이 표본 수")
    n_phi: int = Field(Figure1Defaults.N_PHI, ge=8, description="방위 표본 수")
    radial_panels: int = Field(Figure1Defaults.RADIAL_PANELS, ge=1)
    radial_order: int = Field(Figure1Defaults.RADIAL_ORDER, ge=2)
    tail_fraction: float = Field(Figure1Defaults.TAIL_FRACTION, gt=0, le=1, description="대비 측정 구간")
    monte_carlo_rays: int = Field(0, ge=0, description="발산 프로파일 몬테카를로 검증 광선 수 (0이면 생략)")
    two_pinholes: CollimatorGeometry
    exit_and_pinhole: CollimatorGeometry
    annulus_and_pinhole: CollimatorGeometry

    @model_validator(mode="before")
    @classmethod
    def merge_fixture_defaults(cls, data: Any) -> Any:
        """콜리메이터 기본값 위에 부분 재정의를 병합"""
        data = dict(data or {})
        fixtures = load_collimator_fixtures()
        for name, defaults in fixtures.items():
            override = data.get(name)
            if isinstance(override, BaseModel):
                continue
            merged = dict(defaults)
            merged.update(override or {})
            data[name] = merged
        return data

    def geometries(self) -> List[CollimatorGeometry]:
        """k_z를 맞춘 세 콜리메이터"""
        return [
            geom.model_copy(update={"k_z": self.k_z})
            for geom in (self.two_pinholes, self.exit_and_pinhole, self.annulus_and_pinhole)
        ]


class Figure2Params(_Section):
    """스치는 입사 반사 스캔"""
    wavelength: float = Field(Figure2Defaults.WAVELENGTH, gt=0, description="파장 (m)")
    E: float = Field(Figure2Defaults.FIELD, description="전기장 (V/m)")
    theta_min: float = Field(Figure2Defaults.THETA_MIN_DEG * DEGREE, gt=0, description="최소 스치는 각 (rad)")
    theta_max: float = Field(Figure2Defaults.THETA_MAX_DEG * DEGREE, gt=0, description="최대 스치는 각 (rad)")
    theta_points: int = Field(Figure2Defaults.THETA_POINTS, ge=2)
    incident_spin: SpinState = Field(SpinState.DOWN)

    @model_validator(mode="after")
    def validate_range(self) -> "Figure2Params":
        if self.theta_min >= self.theta_max:
            raise ValueError("theta_min은 theta_max보다 작아야 합니다")
        return self


class Figure3Params(_Section):
    """가우시안 파속 OAM 표면"""
    sigma_y: List[float] = Field(default_factory=lambda: list(Figure3Defaults.SIGMA_Y), min_length=1)
    R: List[float] = Field(default_factory=lambda: list(Figure3Defaults.R), min_length=1)
    k_y_mean: float = Field(Figure3Defaults.K_Y_MEAN)
    n_phi: int = Field(Figure3Defaults.N_PHI, ge=8)
    radial_panels: int = Field(Figure3Defaults.RADIAL_PANELS, ge=1)
    radial_order: int = Field(Figure3Defaults.RADIAL_ORDER, ge=2)
    exact: bool = Field(False, description="이상적 올리기 대신 정확한 전개 사용")
    C: Optional[float] = Field(None, description="정확한 전개용 결합 상수")
    t: Optional[float] = Field(None, ge=0, description="정확한 전개용 시간")

    @field_validator("sigma_y", "R", mode="before")
    @classmethod
    def wrap_scalar(cls, v: Any) -> Any:
        return v if isinstance(v, (list, tuple)) else [v]

    @field_validator("sigma_y", "R")
    @classmethod
    def validate_positive(cls, v: List[float]) -> List[float]:
        if any(x <= 0 for x in v):
            raise ValueError("값은 모두 양수여야 합니다")
        return v

    @model_validator(mode="after")
    def validate_exact(self) -> "Figure3Params":
        if self.exact and (self.C is None or self.t is None):
            raise ValueError("exact = true 에는 C와 t가 필요합니다")
        return self


class Figure4Params(_Section):
    """실공간 합성"""
    k_y_mean: float = Field(Figure4Defaults.K_Y_MEAN)
    sigma_y_squared: float = Field(Figure4Defaults.SIGMA_Y_SQUARED, gt=0)
    R: float = Field(Figure4Defaults.R, gt=0)
    k_points: int = Field(Figure4Defaults.K_POINTS, ge=3)
    x_extent: float = Field(Figure4Defaults.X_EXTENT, gt=0, description="실공간 반폭")
    x_points: int = Field(Figure4Defaults.X_POINTS, ge=3)
    spin: SpinState = Field(SpinState.DOWN)


class VoltageParams(_Section):
    """완전 트위스트 전압"""
    alpha: Optional[float] = Field(None, gt=0, description="발산각 (rad)")


class DesignParams(_Section):
    """빔 트위스터 설계점 (E × L 데카르트 곱)"""
    E: List[float] = Field(default_factory=lambda: list(DesignDefaults.FIELDS), min_length=1)
    L: List[float] = Field(default_factory=lambda: list(DesignDefaults.LENGTHS), min_length=1)

    @field_validator("E", "L", mode="before")
    @classmethod
    def wrap_scalar(cls, v: Any) -> Any:
        """스윕 점의 단일 값 허용"""
        return v if isinstance(v, (list, tuple)) else [v]

    @field_validator("L")
    @classmethod
    def validate_lengths(cls, v: List[float]) -> List[float]:
        if any(x < 0 for x in v):
            raise ValueError("길이는 0 이상이어야 합니다")
        return v

    def plan(self) -> List[Tuple[float, float]]:
        return list(itertools.product(self.E, self.L))


class SweepParams(_Section):
    """스윕: target 명령과 점별 재정의 축"""
    target: Optional[Command] = None
    axes: Dict[str, List[Any]] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def collect_axes(cls, data: Any) -> Any:
        """sweep.<점 키> = [...] 항목을 axes로 모음"""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        axes = dict(data.pop("axes", {}) or {})

        def _flatten(prefix: str, node: Any):
            if isinstance(node, dict):
                for key, value in node.items():
                    _flatten(f"{prefix}.{key}" if prefix else key, value)
            else:
                axes[prefix] = node if isinstance(node, list) else [node]

        target = data.pop("target", None)
        _flatten("", data)
        return {"target": target, "axes": axes}

    @field_validator("target")
    @classmethod
    def validate_target(cls, v: Optional[Command]) -> Optional[Command]:
        if v == Command.SWEEP:
            raise ValueError("스윕 대상으로 sweep을 지정할 수 없습니다")
        return v

    @field_validator("axes")
    @classmethod
    def validate_axes(cls, v: Dict[str, List[Any]]) -> Dict[str, List[Any]]:
        for key, values in v.items():
            if len(values) == 0:
                raise ValueError(f"스윕 축 {key}가 비어 있습니다")
        return v

    def plan(self) -> List[Dict[str, Any]]:
        """축들의 데카르트 곱 (키 순서 고정)"""
        keys = sorted(self.axes)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.axes[k] for k in keys))]


class RunConfig(_Section):
    """검증된 실행 설정"""
    command: Command
    physics: PhysicsContext = Field(default_factory=PhysicsContext)
    rng_seed: int = Field(MonteCarloDefaults.SEED, ge=0, lt=2 ** 64)
    output_dir: Optional[Path] = None
    figure1: Figure1Params = Field(default_factory=Figure1Params)
    figure2: Figure2Params = Field(default_factory=Figure2Params)
    figure3: Figure3Params = Field(default_factory=Figure3Params)
    figure4: Figure4Params = Field(default_factory=Figure4Params)
    voltage: VoltageParams = Field(default_factory=VoltageParams)
    design: DesignParams = Field(default_factory=DesignParams)
    sweep: SweepParams = Field(default_factory=SweepParams)
