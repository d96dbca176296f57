"""
스펙트럼 산란 엔진 (Scattering Engine)
반무한 전기장 영역의 종방향 투과/반사 경계값 문제를 가로 푸리에 모드별로 푼다

위상 규약: 전진파는 e^{−ikz}, 반사파는 e^{+ik_z z}.
분기 규칙: 근호 안이 음수이면 k = −i√|·| (e^{−ikz}가 z → +∞에서 감쇠).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import jv

from app.models.errors import PhysicsDomainError, SingularityError
from app.models.physics_models import (
    BesselBeamSpec, PhysicsContext, ScatteringCoefficients, SpectralMode, SpinState
)
from app.services.coupling_service import coupling_constant, neutron_wavenumber

logger = logging.getLogger(__name__)


@dataclass
class BesselTransmission:
    """베셀 빔 투과 성분 진폭: ψ± = ψ⁰±J₀(k_ρr) + e^{∓iθ}ψ¹±J₁(k_ρr)"""
    k_rho: float
    j0_plus: complex
    j0_minus: complex
    j1_plus: complex
    j1_minus: complex

    def radial_profiles(self, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(ψ⁰₊, ψ⁰₋, ψ¹₊, ψ¹₋) 반경 프로파일"""
        j0 = jv(0, self.k_rho * np.asarray(r, dtype=float))
        j1 = jv(1, self.k_rho * np.asarray(r, dtype=float))
        return self.j0_plus * j0, self.j0_minus * j0, self.j1_plus * j1, self.j1_minus * j1

    def field(self, r, theta) -> Tuple[np.ndarray, np.ndarray]:
        """실공간 스피너 ψ±(r, θ)"""
        p0, m0, p1, m1 = self.radial_profiles(r)
        theta = np.asarray(theta, dtype=float)
        return p0 + np.exp(-1j * theta) * p1, m0 + np.exp(1j * theta) * m1


def _branch_sqrt(radicand) -> np.ndarray:
    """감쇠 분기 제곱근: 음수 근호는 −i√|·|"""
    radicand = np.asarray(radicand, dtype=float)
    root = np.sqrt(np.abs(radicand))
    return np.where(radicand >= 0, root + 0j, -1j * root)


def longitudinal_wavenumbers(eps, k_r, C: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    k± = √(ε − k_r² ± C·k_r) 분기 해석

    Returns:
        (k_plus, k_minus) 복소 배열
    """
    eps = np.asarray(eps, dtype=float)
    k_r = np.asarray(k_r, dtype=float)
    if np.any(eps < 0) or np.any(k_r < 0):
        raise PhysicsDomainError("ε와 k_r는 0 이상이어야 합니다", field="eps", code="NEGATIVE_ENERGY")
    base = eps - k_r ** 2
    return _branch_sqrt(base + C * k_r), _branch_sqrt(base - C * k_r)


def scatter_mode(mode: SpectralMode, C: float) -> ScatteringCoefficients:
    """
    경계값 문제의 닫힌 해

    t̂₍₂,₄₎ = k_z(f̂₋ ∓ ie^{iφ}f̂₊)/(k_z + k±)
    r̂± = [(k_z² − k₊k₋)f̂± ∓ ik_z(k₊ − k₋)e^{∓iφ}f̂∓]/((k₊ + k_z)(k₋ + k_z))
    """
    k_z = np.asarray(mode.k_z, dtype=float)
    k_r = np.asarray(mode.k_r, dtype=float)
    # ε − k_r² = k_z² 를 직접 써서 스치는 입사에서의 자리수 손실을 피한다
    kz2 = k_z ** 2
    k_plus = _branch_sqrt(kz2 + C * k_r)
    k_minus = _branch_sqrt(kz2 - C * k_r)

    d_plus = k_z + k_plus
    d_minus = k_z + k_minus
    if np.any(d_plus == 0) or np.any(d_minus == 0):
        raise SingularityError("k_z + k± = 0 인 퇴화 모드", field="k_z", code="DEGENERATE_DENOMINATOR")

    e_phi = np.exp(1j * np.asarray(mode.phi, dtype=float))
    f_plus = np.asarray(mode.f_plus, dtype=complex)
    f_minus = np.asarray(mode.f_minus, dtype=complex)

    t2 = k_z * (f_minus - 1j * e_phi * f_plus) / d_plus
    t4 = k_z * (f_minus + 1j * e_phi * f_plus) / d_minus

    denom = d_plus * d_minus
    diag = kz2 - k_plus * k_minus
    split = k_z * (k_plus - k_minus)
    r_plus = (diag * f_plus - 1j * split * np.conj(e_phi) * f_minus) / denom
    r_minus = (diag * f_minus + 1j * split * e_phi * f_plus) / denom

    return ScatteringCoefficients(
        t2=t2, t4=t4, r_plus=r_plus, r_minus=r_minus, k_plus=k_plus, k_minus=k_minus, k_z=k_z
    )


def transmitted_spinor(coefs: ScatteringCoefficients, phi, z) -> Tuple[np.ndarray, np.ndarray]:
    """
    전기장 영역 내부 투과 스피너

    ψ̂₊ = ie^{−iφ}[t̂₂e^{−ik₊z} − t̂₄e^{−ik₋z}],  ψ̂₋ = t̂₂e^{−ik₊z} + t̂₄e^{−ik₋z}
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise PhysicsDomainError("z는 0 이상이어야 합니다", field="z", code="NEGATIVE_DEPTH")
    wave_plus = coefs.t2 * np.exp(-1j * coefs.k_plus * z)
    wave_minus = coefs.t4 * np.exp(-1j * coefs.k_minus * z)
    psi_plus = 1j * np.exp(-1j * np.asarray(phi, dtype=float)) * (wave_plus - wave_minus)
    psi_minus = wave_plus + wave_minus
    return psi_plus, psi_minus


def transmitted_gradient(coefs: ScatteringCoefficients, phi, z) -> Tuple[np.ndarray, np.ndarray]:
    """투과 스피너의 ∂/∂z"""
    z = np.asarray(z, dtype=float)
    wave_plus = -1j * coefs.k_plus * coefs.t2 * np.exp(-1j * coefs.k_plus * z)
    wave_minus = -1j * coefs.k_minus * coefs.t4 * np.exp(-1j * coefs.k_minus * z)
    d_plus = 1j * np.exp(-1j * np.asarray(phi, dtype=float)) * (wave_plus - wave_minus)
    return d_plus, wave_plus + wave_minus


def mode_flux_balance(mode: SpectralMode, coefs: ScatteringCoefficients) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    모드별 플럭스 항

    Returns:
        (입사, 반사, 투과), 보존 관계 입사 = 반사 + 투과
    """
    k_z = coefs.k_z
    incident = k_z * (np.abs(mode.f_plus) ** 2 + np.abs(mode.f_minus) ** 2)
    reflected = k_z * (np.abs(coefs.r_plus) ** 2 + np.abs(coefs.r_minus) ** 2)
    # T의 두 열은 직교하고 노름²이 2이므로 교차항이 없다
    transmitted = 2.0 * np.real(coefs.k_plus) * np.abs(coefs.t2) ** 2 \
        + 2.0 * np.real(coefs.k_minus) * np.abs(coefs.t4) ** 2
    return incident, reflected, transmitted


def _validate_grazing(theta, wavelength: float) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0) or np.any(theta > math.pi / 2):
        raise PhysicsDomainError(
            "스치는 각은 0 < θ ≤ π/2 범위여야 합니다", field="theta", code="THETA_OUT_OF_RANGE"
        )
    if wavelength <= 0:
        raise PhysicsDomainError("파장은 양수여야 합니다", field="lambda", code="NONPOSITIVE_WAVELENGTH")
    return theta


def reflection_probability(
    theta,
    wavelength: float,
    E: float,
    incident_spin: SpinState = SpinState.DOWN,
    ctx: Optional[PhysicsContext] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    스치는 입사 반사 확률 (반사 플럭스 / 입사 플럭스)

    Args:
        theta: 스치는 각 (rad), 배열 허용
        wavelength: 파장 λ (m)
        E: 전기장 (V/m)
        incident_spin: 입사 스핀

    Returns:
        (P_flip, P_nonflip)
    """
    theta = _validate_grazing(theta, wavelength)
    ctx = ctx or PhysicsContext.neutron()
    C = coupling_constant(ctx, E).value
    k = neutron_wavenumber(wavelength)

    spin = SpinState(incident_spin)
    f_plus, f_minus = (1.0, 0.0) if spin == SpinState.UP else (0.0, 1.0)
    mode = SpectralMode.build(k_r=k * np.cos(theta), phi=0.0, k_z=k * np.sin(theta), f_plus=f_plus, f_minus=f_minus)
    coefs = scatter_mode(mode, C)

    if logger.isEnabledFor(logging.DEBUG):
        evanescent = int(np.count_nonzero(np.real(coefs.k_minus) == 0) + np.count_nonzero(np.real(coefs.k_plus) == 0))
        logger.debug(f"반사 스캔: {theta.size}개 각도, 감쇠 분기 {evanescent}개")

    p_plus = np.abs(coefs.r_plus) ** 2
    p_minus = np.abs(coefs.r_minus) ** 2
    if spin == SpinState.DOWN:
        return p_plus, p_minus
    return p_minus, p_plus


def critical_angle(wavelength: float, E: float, ctx: Optional[PhysicsContext] = None) -> float:
    """
    한 분기가 감쇠파가 되는 임계 스치는 각 (k_z² = |C|·k_r)

    sin²θ = |C|cosθ/k 를 sin²θ에 대한 이차식으로 푼다.
    """
    ctx = ctx or PhysicsContext.neutron()
    a = abs(coupling_constant(ctx, E).value) / neutron_wavenumber(wavelength)
    if a == 0:
        return 0.0
    s2 = 0.5 * (-a * a + math.sqrt(a ** 4 + 4.0 * a * a))
    return math.asin(math.sqrt(s2))


def bessel_beam_transmission(beam: BesselBeamSpec, C: float, z) -> BesselTransmission:
    """
    OAM이 없는 베셀 빔 입사의 정확한 투과 해

    ψ⁰± = k_z b± (P₊ + P₋),  ψ¹± = ±k_z b∓ (P₊ − P₋),  P± = e^{−iK±z}/(k_z + K±),
    K± = √(k_z² ± C k_ρ)
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise PhysicsDomainError("z는 0 이상이어야 합니다", field="z", code="NEGATIVE_DEPTH")
    k_z = beam.k_z
    K_plus = _branch_sqrt(k_z ** 2 + C * beam.k_rho)
    K_minus = _branch_sqrt(k_z ** 2 - C * beam.k_rho)
    P_plus = np.exp(-1j * K_plus * z) / (k_z + K_plus)
    P_minus = np.exp(-1j * K_minus * z) / (k_z + K_minus)

    even = k_z * (P_plus + P_minus)
    odd = k_z * (P_plus - P_minus)
    return BesselTransmission(
        k_rho=beam.k_rho,
        j0_plus=beam.b_plus * even,
        j0_minus=beam.b_minus * even,
        j1_plus=beam.b_minus * odd,
        j1_minus=-beam.b_plus * odd,
    )


def linearized_bessel_transmission(
    beam: BesselBeamSpec, ctx: PhysicsContext, E: float, alpha: float, z
) -> BesselTransmission:
    """
    C·k_ρ가 작을 때 근호를 선형화한 해

    ψ± = [b± cos(Ωz)J₀ ± b∓ sin(Ωz)e^{∓iθ}J₁]e^{−ik_z z},  Ω = γE_zα/(2c²)
    """
    z = np.asarray(z, dtype=float)
    omega = ctx.gyromagnetic_ratio * E * alpha / (2.0 * ctx.speed_of_light ** 2)
    carrier = np.exp(-1j * beam.k_z * z)
    cos_part = np.cos(omega * z) * carrier
    sin_part = np.sin(omega * z) * carrier
    return BesselTransmission(
        k_rho=beam.k_rho,
        j0_plus=beam.b_plus * cos_part,
        j0_minus=beam.b_minus * cos_part,
        j1_plus=beam.b_minus * sin_part,
        j1_minus=-beam.b_plus * sin_part,
    )


@dataclass
class ReflectionScan:
    """스치는 각 스캔 결과"""
    theta: np.ndarray  # rad
    p_flip: np.ndarray
    p_nonflip: np.ndarray
    critical: float  # rad

    @property
    def peak_angle(self) -> float:
        """스핀 반전 반사 확률이 최대인 각 (rad)"""
        return float(self.theta[int(np.argmax(self.p_flip))])


def reflection_scan(
    thetas,
    wavelength: float,
    E: float,
    incident_spin: SpinState = SpinState.DOWN,
    ctx: Optional[PhysicsContext] = None,
) -> ReflectionScan:
    """각도 배열 전체에 대한 반사 확률 스캔"""
    thetas = np.asarray(thetas, dtype=float)
    p_flip, p_nonflip = reflection_probability(thetas, wavelength, E, incident_spin, ctx)
    scan = ReflectionScan(
        theta=thetas, p_flip=p_flip, p_nonflip=p_nonflip, critical=critical_angle(wavelength, E, ctx)
    )
    logger.info(
        f"반사 스캔 완료: 최대 반전 각 {math.degrees(scan.peak_angle):.4e}°, "
        f"임계각 {math.degrees(scan.critical):.4e}°"
    )
    return scan
