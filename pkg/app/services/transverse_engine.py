"""
가로 전기장 시간 전개 엔진 (Transverse Engine)
무한 가로 전기장 영역의 스피너 회전, 이상적 OAM 올리기, OAM 표면과 실공간 합성

전개식: ψ̂± = e^{iεt}[â±cos(Ck_rt) ± â∓sin(Ck_rt)e^{∓iφ}]
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from app.models.errors import PhysicsDomainError, ResolutionError
from app.models.physics_models import (
    AzimuthalSpectrum, GaussianPacketSpec, RealSpaceField, SpectralPacket, SpinState,
)
from app.services.beam_service import gaussian_polar_field, gaussian_radial_grid
from app.services.oam_analysis import mode_amplitudes
from app.services.transform_service import azimuthal_decompose, uniform_angles
from app.shared.constants import Figure3Defaults, NumericTolerances
from app.utils.time_tracker import PerformanceMonitor

logger = logging.getLogger(__name__)


def rotate_spinor(a_plus, a_minus, k_r, phi, C: float, t: float, eps=None):
    """
    점별 2×2 유니터리 회전

    Returns:
        (ψ₊, ψ₋)
    """
    if t < 0:
        raise PhysicsDomainError("시간 t는 0 이상이어야 합니다", field="t", code="NEGATIVE_TIME")
    angle = C * np.asarray(k_r, dtype=float) * t
    cos, sin = np.cos(angle), np.sin(angle)
    e_phi = np.exp(1j * np.asarray(phi, dtype=float))
    psi_plus = a_plus * cos + a_minus * sin * np.conj(e_phi)
    psi_minus = a_minus * cos - a_plus * sin * e_phi
    if eps is not None:
        carrier = np.exp(1j * np.asarray(eps, dtype=float) * t)
        psi_plus = carrier * psi_plus
        psi_minus = carrier * psi_minus
    return psi_plus, psi_minus


def evolve(packet: SpectralPacket, C: float, t: float) -> SpectralPacket:
    """직교 격자 파속을 시간 t까지 전개 (전역 위상 e^{iεt} 포함)"""
    k_r, phi = packet.polar()
    eps = k_r ** 2 + packet.k_z ** 2
    psi_plus, psi_minus = rotate_spinor(packet.a_plus, packet.a_minus, k_r, phi, C, t, eps=eps)
    metadata = dict(packet.metadata)
    metadata["t"] = metadata.get("t", 0.0) + t
    return SpectralPacket(
        kx=packet.kx, ky=packet.ky, a_plus=psi_plus, a_minus=psi_minus, k_z=packet.k_z, metadata=metadata
    )


def flipped_fraction(packet: SpectralPacket, evolved: SpectralPacket) -> float:
    """초기 파속에서 비어 있던 스핀 성분으로 옮겨간 노름 비율"""
    up = float(np.sum(np.abs(packet.a_plus) ** 2))
    down = float(np.sum(np.abs(packet.a_minus) ** 2))
    target = evolved.a_minus if up >= down else evolved.a_plus
    total = evolved.norm_squared()
    if total == 0:
        raise PhysicsDomainError("노름이 0인 파속입니다", field="packet", code="ZERO_PACKET")
    return float(np.sum(np.abs(target) ** 2) * evolved.cell_area / total)


# === 이상적 OAM 올리기/내리기 ===

def _shift(spec: AzimuthalSpectrum, offset: int) -> AzimuthalSpectrum:
    return AzimuthalSpectrum(
        ell_min=spec.ell_min + offset, ell_max=spec.ell_max + offset,
        coeffs=spec.coeffs.copy(), radial_grid=spec.radial_grid, total_norm=spec.total_norm,
    )


def ideal_raise(spec: AzimuthalSpectrum) -> AzimuthalSpectrum:
    """ℓ → ℓ+1 재표기 (완전한 π/2 트위스터)"""
    return _shift(spec, 1)


def ideal_lower(spec: AzimuthalSpectrum) -> AzimuthalSpectrum:
    """ℓ → ℓ−1 재표기"""
    return _shift(spec, -1)


def raise_packet(packet: SpectralPacket) -> SpectralPacket:
    """직교 격자 파속에 e^{iφ} = (k_x + ik_y)/k_r 를 곱함 (k_r = 0에서는 0)"""
    KX, KY = np.meshgrid(packet.kx, packet.ky, indexing="ij")
    k_r = np.hypot(KX, KY)
    factor = np.zeros_like(k_r, dtype=complex)
    nonzero = k_r > 0
    factor[nonzero] = (KX[nonzero] + 1j * KY[nonzero]) / k_r[nonzero]
    metadata = dict(packet.metadata)
    metadata["raised"] = metadata.get("raised", 0.0) + 1.0
    return SpectralPacket(
        kx=packet.kx, ky=packet.ky, a_plus=packet.a_plus * factor, a_minus=packet.a_minus * factor,
        k_z=packet.k_z, metadata=metadata,
    )


# === OAM 표면 ===

@dataclass
class OAMSurfaces:
    """(σ_y, R) 격자 위 A¹과 σ_ℓ"""
    sigma_y: np.ndarray
    R: np.ndarray
    A1: np.ndarray  # (n_sigma, n_R)
    sigma_ell: np.ndarray

    @property
    def log_sigma_ell(self) -> np.ndarray:
        return np.log(self.sigma_ell)


def _exact_twist_weights(spec: GaussianPacketSpec, C: float, t: float, n_phi: int, panels: int, order: int):
    """스핀 업 입사를 전개한 뒤 반전된 스핀 다운 성분의 분포와 가중치"""
    grid = gaussian_radial_grid(spec, panels=panels, order=order)
    field = gaussian_polar_field(spec, grid, n_phi)
    phi = uniform_angles(n_phi)[None, :]
    k = grid.nodes[:, None]
    psi_plus, psi_minus = rotate_spinor(field, np.zeros_like(field), k, phi, C, t)
    flipped = azimuthal_decompose(psi_minus, grid)
    dist = mode_amplitudes(flipped)
    incident = float(np.sum(grid.integrate(np.abs(field.T) ** 2)))
    flipped_weight = float(np.sum(grid.integrate(np.abs(psi_minus.T) ** 2)))
    return dist, flipped_weight / incident


@PerformanceMonitor.measure_sync_function("oam_surfaces")
def fig3_surfaces(
    sigma_y_range: Sequence[float] = Figure3Defaults.SIGMA_Y,
    R_range: Sequence[float] = Figure3Defaults.R,
    k_y_mean: float = Figure3Defaults.K_Y_MEAN,
    n_phi: int = Figure3Defaults.N_PHI,
    panels: int = Figure3Defaults.RADIAL_PANELS,
    order: int = Figure3Defaults.RADIAL_ORDER,
    exact: bool = False,
    C: Optional[float] = None,
    t: Optional[float] = None,
) -> OAMSurfaces:
    """
    (σ_y, R) 격자마다 가우시안 파속의 A¹과 σ_ℓ 계산

    Args:
        exact: False이면 이상적 올리기, True이면 C, t로 정확한 전개 후 반전 성분을 사용
    """
    sigma_y_range = np.asarray(sigma_y_range, dtype=float)
    R_range = np.asarray(R_range, dtype=float)
    if sigma_y_range.size == 0 or R_range.size == 0:
        raise PhysicsDomainError("σ_y, R 범위가 비어 있습니다", field="sigma_y", code="EMPTY_RANGE")
    if np.any(sigma_y_range <= 0) or np.any(R_range <= 0):
        raise PhysicsDomainError("σ_y, R은 양수여야 합니다", field="sigma_y", code="NONPOSITIVE_RANGE")
    if exact and (C is None or t is None):
        raise PhysicsDomainError("정확한 전개에는 C와 t가 필요합니다", field="C", code="MISSING_EVOLUTION")

    A1 = np.empty((sigma_y_range.size, R_range.size))
    sigma_ell = np.empty_like(A1)
    for i, sigma_y in enumerate(sigma_y_range):
        for j, R in enumerate(R_range):
            spec = GaussianPacketSpec(k_y_mean=k_y_mean, sigma_y=float(sigma_y), R=float(R))
            if exact:
                dist, weight = _exact_twist_weights(spec, C, t, n_phi, panels, order)
                A1[i, j] = weight * dist.amplitude(1)
            else:
                grid = gaussian_radial_grid(spec, panels=panels, order=order)
                spectrum = azimuthal_decompose(gaussian_polar_field(spec, grid, n_phi), grid)
                dist = mode_amplitudes(ideal_raise(spectrum))
                A1[i, j] = dist.amplitude(1)
            sigma_ell[i, j] = dist.sigma_ell
            logger.debug(f"σ_y={sigma_y:.3g}, R={R:.3g}: A¹={A1[i, j]:.6f}, σ_ℓ={sigma_ell[i, j]:.6f}")

    return OAMSurfaces(sigma_y=sigma_y_range, R=R_range, A1=A1, sigma_ell=sigma_ell)


# === 실공간 합성 ===

def _check_real_grid(packet: SpectralPacket, x: np.ndarray, y: np.ndarray) -> None:
    k_max = float(max(np.max(np.abs(packet.kx)), np.max(np.abs(packet.ky))))
    for name, axis, k_axis in (("x", x, packet.kx), ("y", y, packet.ky)):
        if axis.size < 2:
            continue
        step = float(np.max(np.diff(axis)))
        if k_max > 0 and step > np.pi / (NumericTolerances.NYQUIST_FACTOR * k_max):
            raise ResolutionError(
                f"{name} 간격 {step:.4g}가 k_max={k_max:.4g}를 표현하지 못합니다",
                field=name, code="UNDER_RESOLVED"
            )
        period = 2.0 * np.pi / float(k_axis[1] - k_axis[0])
        extent = float(axis[-1] - axis[0])
        if extent >= period:
            raise ResolutionError(
                f"{name} 범위 {extent:.4g}가 스펙트럼 격자 주기 {period:.4g}를 넘습니다",
                field=name, code="ALIAS_PERIOD"
            )


def synthesize_real_space(
    packet: SpectralPacket,
    x: np.ndarray,
    y: np.ndarray,
    raised: bool = False,
) -> RealSpaceField:
    """
    2차원 역푸리에 합성 ψ(x, y) = Σ â(k)e^{−ik·r}Δk_xΔk_y

    커널이 분리되므로 ψ = E_x · â · E_yᵀ 로 계산한다.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_real_grid(packet, x, y)
    if raised:
        packet = raise_packet(packet)
    ex = np.exp(-1j * np.outer(x, packet.kx))
    ey = np.exp(-1j * np.outer(y, packet.ky))
    scale = packet.cell_area
    psi_plus = ex @ packet.a_plus @ ey.T * scale
    psi_minus = ex @ packet.a_minus @ ey.T * scale
    return RealSpaceField(
        kind="cartesian", axis0=x, axis1=y, psi_plus=psi_plus, psi_minus=psi_minus,
        steps={"dx": float(x[1] - x[0]) if x.size > 1 else 0.0,
               "dy": float(y[1] - y[0]) if y.size > 1 else 0.0},
    )


def envelope_centroid(field: RealSpaceField) -> Tuple[float, float]:
    """세기 가중 중심 (x̄, ȳ)"""
    if field.kind != "cartesian":
        raise PhysicsDomainError("직교 격자 필드만 지원합니다", field="field", code="NOT_CARTESIAN")
    intensity = field.intensity()
    total = float(np.sum(intensity))
    if total == 0:
        raise PhysicsDomainError("세기가 0인 필드입니다", field="field", code="ZERO_FIELD")
    X, Y = np.meshgrid(field.axis0, field.axis1, indexing="ij")
    return float(np.sum(X * intensity) / total), float(np.sum(Y * intensity) / total)


def carrier_phase(field: RealSpaceField, x: float, y: float, spin: Optional[SpinState] = None) -> float:
    """(x, y)에 가장 가까운 격자점의 위상 (spin이 없으면 세기가 큰 성분)"""
    i = int(np.argmin(np.abs(field.axis0 - x)))
    j = int(np.argmin(np.abs(field.axis1 - y)))
    if spin is None:
        up, down = field.psi_plus[i, j], field.psi_minus[i, j]
        value = up if abs(up) >= abs(down) else down
    else:
        value = field.psi_plus[i, j] if SpinState(spin) == SpinState.UP else field.psi_minus[i, j]
    return float(np.angle(value))
