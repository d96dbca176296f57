"""
물리 도메인 데이터 모델
설정에서 들어오는 값은 pydantic 모델, 수치 결과는 numpy 배열을 담는 dataclass
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.errors import EmptyProfileError, PhysicsDomainError
from app.shared.constants import PhysicalConstants, NumericTolerances


# === 열거형 정의 ===

class ParticleKind(str, Enum):
    """입자 종류"""
    NEUTRON = "neutron"
    CUSTOM = "custom"


class SpinState(str, Enum):
    """입사 스핀 (z축 기준)"""
    UP = "up"
    DOWN = "down"


class CollimatorKind(str, Enum):
    """콜리메이터 종류"""
    TWO_PINHOLES = "two_pinholes"
    EXIT_AND_PINHOLE = "exit_and_pinhole"
    ANNULUS_AND_PINHOLE = "annulus_and_pinhole"


# === 설정 계열 모델 (pydantic) ===

class PhysicsContext(BaseModel):
    """물리 상수 컨텍스트"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    gyromagnetic_ratio: float = Field(
        PhysicalConstants.NEUTRON_GYROMAGNETIC_RATIO, description="자기회전비 γ (rad·s⁻¹·T⁻¹)"
    )
    speed_of_light: float = Field(PhysicalConstants.SPEED_OF_LIGHT, gt=0, description="광속 c (m/s)")
    default_particle: ParticleKind = Field(ParticleKind.NEUTRON, description="입자 프리셋")

    @field_validator("gyromagnetic_ratio")
    @classmethod
    def validate_gyromagnetic_ratio(cls, v: float) -> float:
        if v == 0 or not np.isfinite(v):
            raise ValueError("자기회전비는 0이 아닌 유한한 값이어야 합니다")
        return v

    @model_validator(mode="after")
    def validate_neutron_preset(self) -> "PhysicsContext":
        if self.default_particle == ParticleKind.NEUTRON:
            magnitude = float(f"{abs(self.gyromagnetic_ratio):.5e}")
            if magnitude != PhysicalConstants.NEUTRON_GYROMAGNETIC_RATIO_CHECK:
                raise ValueError(
                    "중성자 프리셋의 |γ|는 CODATA 값 1.83247e8과 6자리까지 일치해야 합니다 "
                    "(다른 값은 default_particle = custom 사용)"
                )
        return self

    @classmethod
    def neutron(cls) -> "PhysicsContext":
        """CODATA 중성자 프리셋"""
        return cls()


class GaussianPacketSpec(BaseModel):
    """가우시안 스펙트럼 파속 모델 (σ_x = R·σ_y)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    k_y_mean: float = Field(1.0, description="평균 종방향 파수 k_y′ (m⁻¹)")
    sigma_y: float = Field(..., gt=0, description="역 결맞음 길이 σ_y (m⁻¹)")
    R: float = Field(1.0, gt=0, description="대칭 인자 σ_x/σ_y")


class CollimatorGeometry(BaseModel):
    """두 개구 콜리메이터 기하 (길이 단위 m)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: CollimatorKind
    entrance_radius: Optional[float] = Field(None, gt=0, description="입구 원형 개구 반경")
    annulus_inner: Optional[float] = Field(None, gt=0, description="입구 고리 내경")
    annulus_outer: Optional[float] = Field(None, gt=0, description="입구 고리 외경")
    exit_radius: float = Field(..., gt=0, description="출구 핀홀 반경")
    separation: float = Field(..., gt=0, description="개구 간 거리")
    k_z: float = Field(1.0, gt=0, description="종방향 파수 (m⁻¹)")

    @model_validator(mode="after")
    def validate_apertures(self) -> "CollimatorGeometry":
        if self.kind == CollimatorKind.ANNULUS_AND_PINHOLE:
            if self.annulus_inner is None or self.annulus_outer is None:
                raise ValueError("고리형 개구에는 annulus_inner, annulus_outer가 필요합니다")
            if self.annulus_inner >= self.annulus_outer:
                raise ValueError("annulus_inner는 annulus_outer보다 작아야 합니다")
        else:
            if self.entrance_radius is None:
                raise ValueError("원형 입구 개구에는 entrance_radius가 필요합니다")
            if self.kind == CollimatorKind.TWO_PINHOLES and not np.isclose(
                self.entrance_radius, self.exit_radius, rtol=1e-12
            ):
                raise ValueError("two_pinholes는 동일한 두 핀홀이어야 합니다")
        return self

    @property
    def max_angle(self) -> float:
        """최대 발산각 (rad, 소각 근사)"""
        outer = self.annulus_outer if self.kind == CollimatorKind.ANNULUS_AND_PINHOLE else self.entrance_radius
        return (outer + self.exit_radius) / self.separation

    @property
    def min_angle(self) -> float:
        """최소 발산각 (고리형에서만 0보다 큼)"""
        if self.kind == CollimatorKind.ANNULUS_AND_PINHOLE:
            return max(0.0, (self.annulus_inner - self.exit_radius) / self.separation)
        return 0.0


# === 계산 결과 모델 (dataclass) ===

@dataclass(frozen=True)
class CouplingConstant:
    """결합 상수 C = γE/c²"""
    value: float  # m⁻¹
    field_strength: float  # V/m


@dataclass(frozen=True)
class BesselBeamSpec:
    """OAM이 없는 입사 베셀 빔"""
    k_rho: float
    k_z: float
    b_plus: complex = 0.0
    b_minus: complex = 1.0

    def __post_init__(self):
        if self.k_rho < 0:
            raise PhysicsDomainError("k_rho는 0 이상이어야 합니다", field="k_rho", code="NEGATIVE_K_RHO")
        if self.k_z <= 0:
            raise PhysicsDomainError("k_z는 양수여야 합니다", field="k_z", code="NONPOSITIVE_K_Z")
        if abs(self.b_plus) == 0 and abs(self.b_minus) == 0:
            raise PhysicsDomainError("스핀 진폭이 모두 0입니다", field="b_plus", code="ZERO_SPINOR")

    def normalized(self) -> "BesselBeamSpec":
        """|b₊|² + |b₋|² = 1로 정규화"""
        norm = np.sqrt(abs(self.b_plus) ** 2 + abs(self.b_minus) ** 2)
        return BesselBeamSpec(self.k_rho, self.k_z, self.b_plus / norm, self.b_minus / norm)


@dataclass(frozen=True)
class SpectralMode:
    """입사 스피너의 가로 푸리에 모드 (배열 값 허용)"""
    k_r: Any
    phi: Any
    k_z: Any
    eps: Any
    f_plus: Any
    f_minus: Any

    def __post_init__(self):
        if np.any(np.asarray(self.k_r) < 0):
            raise PhysicsDomainError("k_r는 0 이상이어야 합니다", field="k_r", code="NEGATIVE_K_R")
        if np.any(np.asarray(self.k_z) <= 0):
            raise PhysicsDomainError(
                "k_z = 0 (완전 스치는 입사)은 허용되지 않습니다", field="k_z", code="NONPOSITIVE_K_Z"
            )
        expected = np.asarray(self.k_z, dtype=float) ** 2 + np.asarray(self.k_r, dtype=float) ** 2
        if not np.allclose(self.eps, expected, rtol=NumericTolerances.ENERGY_CONSISTENCY, atol=0.0):
            raise PhysicsDomainError(
                "ε는 k_z² + k_r²와 같아야 합니다", field="eps", code="INCONSISTENT_ENERGY"
            )

    @classmethod
    def build(cls, k_r, phi, k_z, f_plus=0.0, f_minus=1.0) -> "SpectralMode":
        """ε = k_z² + k_r²로 모드 생성, φ는 [0, 2π)로 정리"""
        k_r = np.asarray(k_r, dtype=float)
        k_z = np.asarray(k_z, dtype=float)
        phi = np.mod(np.asarray(phi, dtype=float), 2.0 * np.pi)
        return cls(
            k_r=k_r,
            phi=phi,
            k_z=k_z,
            eps=k_z ** 2 + k_r ** 2,
            f_plus=np.asarray(f_plus, dtype=complex),
            f_minus=np.asarray(f_minus, dtype=complex),
        )


@dataclass(frozen=True)
class ScatteringCoefficients:
    """모드별 투과/반사 계수"""
    t2: Any
    t4: Any
    r_plus: Any
    r_minus: Any
    k_plus: Any
    k_minus: Any
    k_z: Any


@dataclass
class RadialGrid:
    """반경 구적 격자 (복합 가우스-르장드르)"""
    nodes: np.ndarray
    weights: np.ndarray
    edges: Optional[np.ndarray] = None
    order: int = 16

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise PhysicsDomainError("반경 격자 형상이 맞지 않습니다", field="radial_grid", code="GRID_SHAPE")
        if self.nodes.size and self.nodes[0] < 0:
            raise PhysicsDomainError("반경 격자는 0 이상에서 시작해야 합니다", field="radial_grid", code="NEGATIVE_NODE")
        if np.any(np.diff(self.nodes) <= 0):
            raise PhysicsDomainError("반경 격자는 순증가여야 합니다", field="radial_grid", code="NOT_INCREASING")
        if np.any(self.weights <= 0):
            raise PhysicsDomainError("구적 가중치는 양수여야 합니다", field="radial_grid", code="NONPOSITIVE_WEIGHT")

    @classmethod
    def gauss_legendre(cls, k_max: float, panels: int = 32, order: int = 16, k_min: float = 0.0) -> "RadialGrid":
        """[k_min, k_max] 균등 패널 위 가우스-르장드르 격자"""
        if k_max <= k_min:
            raise PhysicsDomainError("k_max는 k_min보다 커야 합니다", field="k_max", code="EMPTY_INTERVAL")
        return cls.from_edges(np.linspace(k_min, k_max, panels + 1), order)

    @classmethod
    def from_edges(cls, edges, order: int = 16) -> "RadialGrid":
        """패널 경계로부터 격자 생성"""
        edges = np.asarray(edges, dtype=float)
        x, w = np.polynomial.legendre.leggauss(order)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return cls(nodes=nodes, weights=weights, edges=edges, order=order)

    def refined(self) -> "RadialGrid":
        """각 패널을 이등분한 격자 (수렴 검사용)"""
        if self.edges is None:
            raise PhysicsDomainError("패널 정보가 없는 격자는 세분할 수 없습니다", field="radial_grid", code="NO_EDGES")
        mids = 0.5 * (self.edges[1:] + self.edges[:-1])
        edges = np.sort(np.concatenate([self.edges, mids]))
        return RadialGrid.from_edges(edges, self.order)

    @property
    def k_max(self) -> float:
        return float(self.edges[-1]) if self.edges is not None else float(self.nodes[-1])

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """∫ values · k dk (마지막 축이 반경)"""
        return np.sum(values * (self.weights * self.nodes), axis=-1)


@dataclass
class AzimuthalSpectrum:
    """ℓ별 반경 스펙트럼 함수 f̂ℓ(k_r), 방위 변환은 1/2π 인자 없이 정의"""
    ell_min: int
    ell_max: int
    coeffs: np.ndarray  # (n_ell, n_k)
    radial_grid: RadialGrid
    total_norm: Optional[float] = None  # 창 밖까지 포함한 ∑ℓ∫|f̂ℓ|²k dk

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        expected = (self.ell_max - self.ell_min + 1, self.radial_grid.nodes.size)
        if self.coeffs.shape != expected:
            raise PhysicsDomainError(
                f"계수 배열 형상 {self.coeffs.shape}이 창/격자 {expected}와 다릅니다",
                field="coeffs", code="SPECTRUM_SHAPE"
            )

    @property
    def ells(self) -> np.ndarray:
        return np.arange(self.ell_min, self.ell_max + 1)

    def coefficient(self, ell: int) -> np.ndarray:
        """ℓ 성분 (창 밖이면 0)"""
        if ell < self.ell_min or ell > self.ell_max:
            return np.zeros(self.radial_grid.nodes.size, dtype=complex)
        return self.coeffs[ell - self.ell_min]

    @property
    def windowed_norm(self) -> float:
        return float(np.sum(self.radial_grid.integrate(np.abs(self.coeffs) ** 2)))

    @property
    def tail_mass(self) -> float:
        """창 밖 상대 질량 (전체 노름을 모르면 0)"""
        if not self.total_norm:
            return 0.0
        return max(0.0, 1.0 - self.windowed_norm / self.total_norm)


@dataclass
class RealSpaceField:
    """실공간 스피너 필드 (극좌표 또는 직교 격자)"""
    kind: str  # "polar" | "cartesian"
    axis0: np.ndarray  # r 또는 x
    axis1: np.ndarray  # θ 또는 y
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    radial_weights: Optional[np.ndarray] = None
    steps: Dict[str, float] = field(default_factory=dict)

    def intensity(self) -> np.ndarray:
        return np.abs(self.psi_plus) ** 2 + np.abs(self.psi_minus) ** 2


@dataclass
class OAMDistribution:
    """정규화된 OAM 모드 가중치와 모멘트"""
    weights: Dict[int, float]
    mean_Lz: float
    sigma_ell: float

    def amplitude(self, ell: int) -> float:
        return self.weights.get(ell, 0.0)


@dataclass
class DivergenceProfile:
    """발산 프로파일 |f|²(k_r), ∫|f|² k_r dk_r = 1"""
    grid: RadialGrid
    density: np.ndarray
    geometry: Optional[CollimatorGeometry] = None

    def __post_init__(self):
        self.density = np.asarray(self.density, dtype=float)
        if self.density.shape != self.grid.nodes.shape:
            raise PhysicsDomainError("밀도 배열 형상이 격자와 다릅니다", field="density", code="PROFILE_SHAPE")
        if self.density.size == 0 or not np.any(self.density > 0):
            raise EmptyProfileError("발산 프로파일이 비어 있습니다", field="density", code="EMPTY_PROFILE")
        if np.any(self.density < 0):
            raise PhysicsDomainError("발산 밀도는 음수일 수 없습니다", field="density", code="NEGATIVE_DENSITY")
        total = float(self.grid.integrate(self.density))
        if abs(total - 1.0) > NumericTolerances.NORMALIZATION:
            raise PhysicsDomainError(
                f"발산 프로파일이 정규화되지 않았습니다 (∫ = {total:.12g})",
                field="density", code="NOT_NORMALIZED"
            )

    @property
    def mean_k(self) -> float:
        return float(self.grid.integrate(self.density * self.grid.nodes))

    @property
    def variance_k(self) -> float:
        mean = self.mean_k
        return float(self.grid.integrate(self.density * (self.grid.nodes - mean) ** 2))


@dataclass
class SpectralPacket:
    """직교 (k_x, k_y) 격자 위 스피너 스펙트럼 â± (배열 형상 (n_x, n_y))"""
    kx: np.ndarray
    ky: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    k_z: float = 0.0
    metadata: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        shape = (np.size(self.kx), np.size(self.ky))
        self.a_plus = np.asarray(self.a_plus, dtype=complex)
        self.a_minus = np.asarray(self.a_minus, dtype=complex)
        if self.a_plus.shape != shape or self.a_minus.shape != shape:
            raise PhysicsDomainError("파속 배열 형상이 격자와 다릅니다", field="packet", code="PACKET_SHAPE")

    @property
    def cell_area(self) -> float:
        """균등 격자 셀 면적 dk_x·dk_y"""
        return float((self.kx[1] - self.kx[0]) * (self.ky[1] - self.ky[0]))

    def polar(self):
        """격자점의 (k_r, φ), k_x ± ik_y = k_r e^{±iφ}"""
        KX, KY = np.meshgrid(self.kx, self.ky, indexing="ij")
        return np.hypot(KX, KY), np.arctan2(KY, KX)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.a_plus) ** 2 + np.abs(self.a_minus) ** 2) * self.cell_area)
