"""
결합 상수 서비스 (Coupling Service)
슈윙거 결합 상수 C = γE/c²와 빔 트위스터 설계 공식

스펙트럼 계산은 2m/ħ² = 1 단위를 쓰므로 에너지는 k² (m⁻²), 운동량은 파수로 다룬다.
SI ↔ 무차원 변환은 이 모듈에서만 한다.
"""
import logging
import math

import numpy as np

from app.models.errors import PhysicsDomainError
from app.models.physics_models import CouplingConstant, PhysicsContext

logger = logging.getLogger(__name__)


def coupling_constant(ctx: PhysicsContext, E: float) -> CouplingConstant:
    """
    결합 상수 계산

    Args:
        ctx: 물리 상수 컨텍스트
        E: 전기장 세기 E_z (V/m), 부호 포함

    Returns:
        CouplingConstant (value 단위 m⁻¹, 부호는 γ·E의 부호)
    """
    value = ctx.gyromagnetic_ratio * E / ctx.speed_of_light ** 2
    return CouplingConstant(value=value, field_strength=E)


def scaled_coupling(ctx: PhysicsContext, E: float, length_unit: float) -> float:
    """길이 단위 length_unit (m)로 무차원화한 C"""
    if length_unit <= 0:
        raise PhysicsDomainError("길이 단위는 양수여야 합니다", field="length_unit", code="NONPOSITIVE_UNIT")
    return coupling_constant(ctx, E).value * length_unit


def full_twist_voltage(ctx: PhysicsContext, alpha: float) -> float:
    """
    ℓ=0 → ℓ=±1 완전 전환에 필요한 전압 강하 크기 V = πc²/(|γ|α)

    극성은 전극 방향으로 정해지므로 크기만 반환한다.
    """
    if not alpha > 0:
        raise PhysicsDomainError(
            f"발산각은 양수여야 합니다: alpha={alpha}", field="alpha", code="NONPOSITIVE_DIVERGENCE"
        )
    voltage = math.pi * ctx.speed_of_light ** 2 / (abs(ctx.gyromagnetic_ratio) * alpha)
    logger.debug(f"완전 트위스트 전압: alpha={alpha:.6g} rad → V={voltage:.6e} V")
    return voltage


def full_twist_length(ctx: PhysicsContext, E: float, alpha: float) -> float:
    """전기장 E에서 완전 트위스트가 일어나는 축전기 길이 (m)"""
    if E == 0:
        raise PhysicsDomainError("전기장이 0이면 트위스트가 일어나지 않습니다", field="E", code="ZERO_FIELD")
    return full_twist_voltage(ctx, alpha) / abs(E)


def twister_amplitude(ctx: PhysicsContext, E: float, length: float) -> float:
    """
    가로 전기장 트위스터의 OAM 모드 진폭 |sin(C·L/2)|

    군속도 사상 t = L/(2k_y′)에서 회전각 C·k_r·t ≈ C·L/2 이므로 파장과 무관하다.
    """
    if length < 0:
        raise PhysicsDomainError("경로 길이는 0 이상이어야 합니다", field="length", code="NEGATIVE_LENGTH")
    C = coupling_constant(ctx, E).value
    return float(abs(np.sin(0.5 * C * length)))


def neutron_wavenumber(wavelength: float) -> float:
    """파장 λ (m) → 파수 k = 2π/λ (m⁻¹)"""
    if wavelength <= 0:
        raise PhysicsDomainError("파장은 양수여야 합니다", field="lambda", code="NONPOSITIVE_WAVELENGTH")
    return 2.0 * math.pi / wavelength


def divergence_to_transverse(k_z: float, alpha: float) -> float:
    """발산각 α → 가로 파수 k_ρ = k_z·tan α"""
    return k_z * math.tan(alpha)
