"""
변환 서비스 (Transform Service)
방위 푸리에 분해와 반경 베셀/한켈 변환, 파스발 노름

방위 변환은 f̂ℓ(k_r) = ∫₀^{2π} f̂(k_r, φ)e^{−iℓφ}dφ (1/2π 인자 없음).
합성은 ψ(r, θ) = Σℓ i^{−ℓ}e^{iℓθ}∫ f̂ℓ(k_r)J_ℓ(k_r r)k_r dk_r 이며
이는 커널 e^{−ik·r}의 2차원 푸리에 적분과 같다.
"""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import jv

from app.models.errors import AliasingError, PhysicsDomainError, ResolutionError
from app.models.physics_models import AzimuthalSpectrum, RadialGrid, RealSpaceField, SpinState
from app.shared.constants import NumericTolerances, OAMWindowDefaults

logger = logging.getLogger(__name__)

Window = Tuple[int, int]


def max_window_modes(n_phi: int) -> int:
    """N_φ 표본으로 분해할 수 있는 최대 모드 수 (N_φ ≥ 2·(모드 수 + 1))"""
    return n_phi // 2 - 1


def check_window(n_phi: int, window: Window) -> None:
    """창이 비어 있지 않고 N_φ 표본으로 앨리어싱 없이 분해되는지 확인"""
    ell_min, ell_max = window
    if ell_max < ell_min:
        raise PhysicsDomainError(
            f"OAM 창이 비어 있습니다: [{ell_min}, {ell_max}]", field="window", code="EMPTY_WINDOW"
        )
    n_modes = ell_max - ell_min + 1
    if n_phi < 2 * (n_modes + 1):
        raise AliasingError(
            f"φ 표본 {n_phi}개로는 {n_modes}개 모드 창 [{ell_min}, {ell_max}]을 분해할 수 없습니다 "
            f"(최소 {2 * (n_modes + 1)}개 필요)",
            field="n_phi", code="ALIASING"
        )


def uniform_angles(n: int) -> np.ndarray:
    """[0, 2π) 균등 각도 격자"""
    return 2.0 * np.pi * np.arange(n) / n


def azimuthal_coefficients(samples: np.ndarray, ells: Sequence[int]) -> np.ndarray:
    """
    마지막 축이 균등 φ 격자인 표본의 방위 계수 (2π/N)·Σ f e^{−iℓφ_j}

    Returns:
        마지막 축이 ℓ인 배열 (앞쪽 축은 그대로)
    """
    samples = np.asarray(samples, dtype=complex)
    n_phi = samples.shape[-1]
    spectrum = np.fft.fft(samples, axis=-1) * (2.0 * np.pi / n_phi)
    index = np.mod(np.asarray(ells, dtype=int), n_phi)
    return spectrum[..., index]


def azimuthal_decompose(
    field: np.ndarray,
    radial_grid: RadialGrid,
    window: Optional[Window] = None,
) -> AzimuthalSpectrum:
    """
    (k_r, φ) 격자 표본의 방위 분해

    Args:
        field: 형상 (n_k, N_φ) 복소 표본, φ_j = 2πj/N_φ
        radial_grid: k_r 구적 격자
        window: (ℓ_min, ℓ_max), None이면 꼬리 질량 < 10⁻¹⁰이 될 때까지 자동 확장

    Returns:
        AzimuthalSpectrum (total_norm은 모든 FFT 성분의 노름)
    """
    field = np.atleast_2d(np.asarray(field, dtype=complex))
    n_k, n_phi = field.shape
    if n_k != radial_grid.nodes.size:
        raise PhysicsDomainError(
            f"표본 행 수 {n_k}가 반경 격자 {radial_grid.nodes.size}와 다릅니다",
            field="field", code="GRID_MISMATCH"
        )

    all_coeffs = np.fft.fft(field, axis=-1) * (2.0 * np.pi / n_phi)
    per_bin = radial_grid.integrate(np.abs(all_coeffs.T) ** 2)
    total_norm = float(np.sum(per_bin))

    if window is None:
        window = _auto_window(per_bin, total_norm, n_phi)
    check_window(n_phi, window)

    ells = np.arange(window[0], window[1] + 1)
    coeffs = all_coeffs[:, np.mod(ells, n_phi)].T
    spec = AzimuthalSpectrum(
        ell_min=int(window[0]), ell_max=int(window[1]), coeffs=coeffs,
        radial_grid=radial_grid, total_norm=total_norm
    )
    if spec.tail_mass > NumericTolerances.TAIL_MASS:
        logger.warning(f"⚠️  OAM 창 [{window[0]}, {window[1]}] 밖 꼬리 질량 {spec.tail_mass:.3e}")
    logger.debug(f"방위 분해: N_φ={n_phi}, n_k={n_k}, 창=[{window[0]}, {window[1]}]")
    return spec


def _auto_window(per_bin: np.ndarray, total_norm: float, n_phi: int) -> Window:
    """기본 창에서 시작해 꼬리 질량 기준을 만족할 때까지 대칭 확장"""
    capacity = max_window_modes(n_phi)
    half = min(OAMWindowDefaults.ELL_MAX, (capacity - 1) // 2)
    limit = min(OAMWindowDefaults.MAX_HALF_WIDTH, (capacity - 1) // 2)
    if total_norm == 0:
        return (-half, half)
    while True:
        ells = np.arange(-half, half + 1)
        inside = float(np.sum(per_bin[np.mod(ells, n_phi)]))
        if 1.0 - inside / total_norm <= NumericTolerances.TAIL_MASS or half >= limit:
            return (-half, half)
        half = min(limit, 2 * half)


def hankel_mode(spec: AzimuthalSpectrum, ell: int, r) -> np.ndarray:
    """ℓ 성분 반경 함수 ∫ f̂ℓ(k)J_ℓ(kr)k dk (i^{−ℓ} 위상 제외)"""
    r = np.asarray(r, dtype=float)
    grid = spec.radial_grid
    kernel = jv(ell, np.multiply.outer(r, grid.nodes))
    return kernel @ (spec.coefficient(ell) * grid.weights * grid.nodes)


def _check_bandwidth(r: np.ndarray, k_max: float) -> None:
    if r.size < 2:
        return
    step = float(np.max(np.diff(r)))
    limit = np.pi / (NumericTolerances.NYQUIST_FACTOR * k_max)
    if step > limit:
        raise ResolutionError(
            f"반경 간격 {step:.4g}가 k_max={k_max:.4g}의 표본화 한계 {limit:.4g}를 넘습니다",
            field="r", code="UNDER_RESOLVED"
        )


def hankel_synthesize(
    spec: AzimuthalSpectrum,
    r: Union[RadialGrid, np.ndarray],
    theta: np.ndarray,
    spec_minus: Optional[AzimuthalSpectrum] = None,
) -> RealSpaceField:
    """
    방위 스펙트럼 → 극좌표 실공간 필드

    Args:
        spec: 스핀 업 (또는 단일 성분) 스펙트럼
        r: 반경 격자 (RadialGrid이면 구적 가중치를 함께 보관)
        theta: 각도 격자
        spec_minus: 스핀 다운 스펙트럼 (없으면 0)
    """
    radial_weights = None
    if isinstance(r, RadialGrid):
        radial_weights = r.weights
        r = r.nodes
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _check_bandwidth(r, spec.radial_grid.k_max)

    def _synthesize(s: Optional[AzimuthalSpectrum]) -> np.ndarray:
        psi = np.zeros((r.size, theta.size), dtype=complex)
        if s is None:
            return psi
        for ell in s.ells:
            radial = hankel_mode(s, int(ell), r)
            psi += np.outer(radial, (1j) ** (-int(ell)) * np.exp(1j * ell * theta))
        return psi

    steps = {"dr": float(np.max(np.diff(r))) if r.size > 1 else 0.0,
             "dtheta": float(theta[1] - theta[0]) if theta.size > 1 else 0.0}
    return RealSpaceField(
        kind="polar", axis0=r, axis1=theta,
        psi_plus=_synthesize(spec), psi_minus=_synthesize(spec_minus),
        radial_weights=radial_weights, steps=steps,
    )


def _theta_modes(field: RealSpaceField, ells: Sequence[int], spin: SpinState) -> np.ndarray:
    if field.kind != "polar":
        raise PhysicsDomainError("극좌표 필드만 방위 분해할 수 있습니다", field="field", code="NOT_POLAR")
    n_theta = field.axis1.size
    if not np.allclose(field.axis1, uniform_angles(n_theta), atol=1e-12):
        raise PhysicsDomainError("θ 격자는 [0, 2π) 균등 격자여야 합니다", field="theta", code="NONUNIFORM_THETA")
    ells = list(ells)
    reach = max(abs(int(e)) for e in ells)
    check_window(n_theta, (-reach, reach))
    psi = field.psi_plus if SpinState(spin) == SpinState.UP else field.psi_minus
    return azimuthal_coefficients(psi, ells)


def _radial_weights(field: RealSpaceField) -> np.ndarray:
    if field.radial_weights is not None:
        return field.radial_weights
    # 구적 가중치가 없으면 사다리꼴
    r = field.axis0
    weights = np.zeros_like(r)
    dr = np.diff(r)
    weights[:-1] += 0.5 * dr
    weights[1:] += 0.5 * dr
    return weights


def hankel_analyze(
    field: RealSpaceField,
    k_grid: RadialGrid,
    window: Window,
    spin: SpinState = SpinState.UP,
) -> AzimuthalSpectrum:
    """
    극좌표 실공간 필드 → 방위 스펙트럼 (hankel_synthesize의 역변환)

    θ 분해 d_ℓ(r) = 2π i^{−ℓ} H_ℓ[f̂ℓ](r) 이고 한켈 변환은 자기 역이므로
    f̂ℓ = i^{ℓ} H_ℓ[d_ℓ] / 2π.
    """
    ells = np.arange(window[0], window[1] + 1)
    modes = _theta_modes(field, ells, spin)  # (n_r, n_ell)
    r = field.axis0
    rw = _radial_weights(field) * r
    coeffs = np.empty((ells.size, k_grid.nodes.size), dtype=complex)
    for i, ell in enumerate(ells):
        kernel = jv(int(ell), np.multiply.outer(k_grid.nodes, r))
        coeffs[i] = (1j) ** int(ell) * (kernel @ (modes[:, i] * rw)) / (2.0 * np.pi)
    return AzimuthalSpectrum(
        ell_min=int(window[0]), ell_max=int(window[1]), coeffs=coeffs, radial_grid=k_grid
    )


def parseval_mode_norm(spec: AzimuthalSpectrum, ell: int) -> float:
    """역공간 모드 노름 ∫|f̂ℓ|²k dk"""
    return float(spec.radial_grid.integrate(np.abs(spec.coefficient(ell)) ** 2))


def real_space_mode_norm(field: RealSpaceField, ell: int, spin: SpinState = SpinState.UP) -> float:
    """실공간 모드 노름 ∫|ψℓ(r)|²r dr, ψℓ = d_ℓ/2π"""
    modes = _theta_modes(field, [ell, ell], spin)[:, 0] / (2.0 * np.pi)
    return float(np.sum(np.abs(modes) ** 2 * field.axis0 * _radial_weights(field)))
