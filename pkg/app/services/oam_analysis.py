"""
OAM 분석 서비스 (OAM Analysis)
모드 가중치, 모멘트, 대역폭과 깊이에 따른 위상 풀림(dephasing) 곡선
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from app.models.errors import EmptyProfileError, PhysicsDomainError, UndefinedDistributionError
from app.models.physics_models import (
    AzimuthalSpectrum, DivergenceProfile, OAMDistribution, SpectralMode, SpinState,
)
from app.services.scattering_engine import scatter_mode, transmitted_spinor
from app.services.transform_service import (
    azimuthal_coefficients, azimuthal_decompose, check_window, parseval_mode_norm, uniform_angles,
)
from app.shared.constants import Figure1Defaults

logger = logging.getLogger(__name__)

_Z_BLOCK = 64


def distribution_from_weights(raw: Dict[int, float]) -> OAMDistribution:
    """정규화되지 않은 ℓ별 가중치 → OAMDistribution"""
    total = float(sum(raw.values()))
    if not total > 0:
        raise UndefinedDistributionError(
            "전체 OAM 노름이 0이라 분포를 정의할 수 없습니다", field="spectrum", code="ZERO_NORM"
        )
    weights = {ell: value / total for ell, value in raw.items()}
    ells = np.array(list(weights.keys()), dtype=float)
    probs = np.array(list(weights.values()))
    mean = float(np.sum(ells * probs))
    variance = max(0.0, float(np.sum((ells - mean) ** 2 * probs)))
    return OAMDistribution(weights=weights, mean_Lz=mean, sigma_ell=float(np.sqrt(variance)))


def mode_amplitudes(spec: AzimuthalSpectrum) -> OAMDistribution:
    """Aᵐ = ∫|f̂ᵐ|²k dk 를 창 전체에서 구해 정규화"""
    raw = {int(ell): parseval_mode_norm(spec, int(ell)) for ell in spec.ells}
    return distribution_from_weights(raw)


@dataclass
class SpinorModeWeights:
    """(스핀, ℓ) 결합 가중치, 전체 합 1"""
    weights: Dict[Tuple[SpinState, int], float]

    def weight(self, spin: SpinState, ell: int) -> float:
        return self.weights.get((SpinState(spin), ell), 0.0)

    def spin_total(self, spin: SpinState) -> float:
        return float(sum(w for (s, _), w in self.weights.items() if s == SpinState(spin)))

    def orbital(self) -> OAMDistribution:
        """스핀을 합친 ℓ 주변 분포"""
        raw: Dict[int, float] = {}
        for (_, ell), w in self.weights.items():
            raw[ell] = raw.get(ell, 0.0) + w
        return distribution_from_weights(raw)

    def total_angular_momentum(self) -> Dict[float, float]:
        """J = ℓ + s 별 가중치 (스핀 업 s = +1/2)"""
        out: Dict[float, float] = {}
        for (spin, ell), w in self.weights.items():
            j = ell + (0.5 if spin == SpinState.UP else -0.5)
            out[j] = out.get(j, 0.0) + w
        return out


def spinor_mode_amplitudes(spec_plus: AzimuthalSpectrum, spec_minus: AzimuthalSpectrum) -> SpinorModeWeights:
    """두 스핀 성분의 결합 (스핀, ℓ) 가중치"""
    raw: Dict[Tuple[SpinState, int], float] = {}
    for spin, spec in ((SpinState.UP, spec_plus), (SpinState.DOWN, spec_minus)):
        for ell in spec.ells:
            raw[(spin, int(ell))] = parseval_mode_norm(spec, int(ell))
    total = sum(raw.values())
    if not total > 0:
        raise UndefinedDistributionError(
            "전체 스피너 노름이 0입니다", field="spectrum", code="ZERO_NORM"
        )
    return SpinorModeWeights(weights={key: value / total for key, value in raw.items()})


@dataclass
class DepthScan:
    """
    깊이 z에 따른 OAM 가중치 (입사 노름으로 정규화)

    스핀 다운 ℓ=0 입사에서 반전 채널은 스핀 업 ℓ=−1 이다.
    창에 없는 채널은 0으로 채운다.
    """
    z: np.ndarray
    flipped: np.ndarray  # 스핀 업 ℓ=−1
    unconverted: np.ndarray  # 스핀 다운 ℓ=0
    total: np.ndarray  # 창 안 모든 (스핀, ℓ) 합
    window: Tuple[int, int] = (0, 0)
    mode_weights: Dict[Tuple[SpinState, int], np.ndarray] = field(default_factory=dict)


def _incident_amplitude(profile: DivergenceProfile, n_phi: int, angular_factor) -> np.ndarray:
    """f̂₋(k_r, φ_j) = √ρ(k_r)·g(k_r, φ_j), 형상 (n_k, N_φ)"""
    amplitude = np.sqrt(profile.density)[:, None]
    shape = (profile.grid.nodes.size, n_phi)
    if angular_factor is None:
        return np.broadcast_to(amplitude, shape).astype(complex)
    try:
        factor = np.broadcast_to(np.asarray(angular_factor, dtype=complex), shape)
    except ValueError:
        raise PhysicsDomainError(
            f"방위 인자 형상 {np.shape(angular_factor)}를 {shape}에 맞출 수 없습니다",
            field="angular_factor", code="GRID_MISMATCH"
        )
    return amplitude * factor


def oam_vs_depth(
    profile: DivergenceProfile,
    C: float,
    k_z: float,
    z_grid: Sequence[float],
    n_phi: int = Figure1Defaults.N_PHI,
    window: Optional[Tuple[int, int]] = None,
    angular_factor: Optional[np.ndarray] = None,
) -> DepthScan:
    """
    발산 프로파일의 각 반경 표본을 산란 해에 통과시켜 z별 OAM 가중치를 계산

    입사는 스핀 다운 f̂₋ = √ρ(k_r)·g(φ), f̂₊ = 0. g가 없으면 φ 무관.

    Args:
        window: 입사 스펙트럼의 (ℓ_min, ℓ_max). None이면 [−8, 8]에서 시작해 자동 확장.
            스핀 반전은 ℓ을 1 낮추므로 스캔 창은 (ℓ_min − 1, ℓ_max).
        angular_factor: g(φ_j) 표본, 형상 (N_φ,) 또는 (n_k, N_φ)
    """
    if profile.grid.nodes.size == 0:
        raise EmptyProfileError("발산 프로파일이 비어 있습니다", field="profile", code="EMPTY_PROFILE")
    z = np.asarray(z_grid, dtype=float)
    if z.size == 0:
        raise PhysicsDomainError("z 격자가 비어 있습니다", field="z_grid", code="EMPTY_Z_GRID")

    grid = profile.grid
    phi = uniform_angles(n_phi)
    f_minus = _incident_amplitude(profile, n_phi, angular_factor)
    incident = azimuthal_decompose(f_minus, grid, window)
    scan_window = (incident.ell_min - 1, incident.ell_max)
    check_window(n_phi, scan_window)
    ells = np.arange(scan_window[0], scan_window[1] + 1)

    mode = SpectralMode.build(k_r=grid.nodes[:, None], phi=phi[None, :], k_z=k_z, f_plus=0.0, f_minus=f_minus)
    coefs = scatter_mode(mode, C)
    evanescent = int(np.count_nonzero(np.imag(coefs.k_minus) != 0))
    if evanescent:
        logger.warning(f"⚠️  감쇠 채널 포함: k₋가 허수인 표본 {evanescent}개")

    incident_norm = incident.total_norm
    if not incident_norm > 0:
        raise EmptyProfileError("입사 노름이 0입니다", field="profile", code="ZERO_NORM")

    kw = grid.weights * grid.nodes
    per_spin = {SpinState.UP: [], SpinState.DOWN: []}
    for start in range(0, z.size, _Z_BLOCK):
        zz = z[start:start + _Z_BLOCK, None, None]
        psi_plus, psi_minus = transmitted_spinor(coefs, phi[None, None, :], zz)
        for spin, psi in ((SpinState.UP, psi_plus), (SpinState.DOWN, psi_minus)):
            modes = azimuthal_coefficients(psi, ells)  # (n_z, n_k, n_ell)
            per_spin[spin].append(np.einsum("zkl,k->zl", np.abs(modes) ** 2, kw) / incident_norm)

    weights: Dict[Tuple[SpinState, int], np.ndarray] = {}
    for spin, blocks in per_spin.items():
        per_ell = np.concatenate(blocks, axis=0)
        for i, ell in enumerate(ells):
            weights[(spin, int(ell))] = per_ell[:, i]

    total = np.sum(np.stack(list(weights.values())), axis=0)
    scan = DepthScan(
        z=z,
        flipped=weights.get((SpinState.UP, -1), np.zeros_like(z)),
        unconverted=weights.get((SpinState.DOWN, 0), np.zeros_like(z)),
        total=total,
        window=scan_window,
        mode_weights=weights,
    )
    logger.debug(
        f"깊이 스캔: z {z.size}점, k_r {grid.nodes.size}점, 창 [{scan_window[0]}, {scan_window[1]}], "
        f"최대 반전 가중치 {float(np.max(scan.flipped)):.4e}"
    )
    return scan


def envelope_contrast(values: np.ndarray, tail_fraction: float = Figure1Defaults.TAIL_FRACTION) -> float:
    """곡선 후반부의 대비 (max − min)/(max + min)"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise PhysicsDomainError("빈 곡선의 대비는 정의되지 않습니다", field="values", code="EMPTY_CURVE")
    if not 0 < tail_fraction <= 1:
        raise PhysicsDomainError("tail_fraction은 (0, 1] 범위여야 합니다", field="tail_fraction", code="BAD_FRACTION")
    start = min(values.size - 1, int(np.floor(values.size * (1.0 - tail_fraction))))
    tail = values[start:]
    hi, lo = float(np.max(tail)), float(np.min(tail))
    if hi + lo == 0:
        return 0.0
    return (hi - lo) / (hi + lo)
