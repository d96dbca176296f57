"""
입사 빔 서비스 (Beam Service)
베셀 빔, 가우시안 파속, 콜리메이터 기하에서 얻는 발산 프로파일
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from app.models.errors import PhysicsDomainError
from app.models.physics_models import (
    AzimuthalSpectrum, BesselBeamSpec, CollimatorGeometry, CollimatorKind, DivergenceProfile,
    GaussianPacketSpec, RadialGrid, SpectralPacket, SpinState,
)
from app.services.transform_service import uniform_angles
from app.shared.constants import MonteCarloDefaults, QuadratureDefaults

logger = logging.getLogger(__name__)


# === 가우시안 파속 ===

def gaussian_spectral_amplitude(spec: GaussianPacketSpec, k_x, k_y) -> np.ndarray:
    """â = e^{−(k_y−k_y′)²/σ_y²}·e^{−k_x²/(R²σ_y²)} (정규화 전)"""
    k_x = np.asarray(k_x, dtype=float)
    k_y = np.asarray(k_y, dtype=float)
    sigma2 = spec.sigma_y ** 2
    return np.exp(-(k_y - spec.k_y_mean) ** 2 / sigma2 - k_x ** 2 / (spec.R ** 2 * sigma2))


def gaussian_norm_squared(spec: GaussianPacketSpec) -> float:
    """평면 전체 ∫∫|â|² dk_x dk_y = πRσ_y²/2"""
    return 0.5 * np.pi * spec.R * spec.sigma_y ** 2


def gaussian_bandwidth_closed_form(spec: GaussianPacketSpec) -> float:
    """
    가우시안 모델의 OAM 대역폭 σ_ℓ (올리기 전 ⟨L_z⟩ = 0)

    σ_ℓ² = k_y′²/(R²σ_y²) + (1 − R²)²/(4R²)
    """
    R = spec.R
    variance = spec.k_y_mean ** 2 / (R ** 2 * spec.sigma_y ** 2) + (1.0 - R ** 2) ** 2 / (4.0 * R ** 2)
    return float(np.sqrt(variance))


def gaussian_half_widths(spec: GaussianPacketSpec) -> Tuple[float, float]:
    """|â|²가 e^{−50} 아래로 떨어지는 (k_x, k_y − k_y′) 반폭"""
    reach = 0.5 * QuadratureDefaults.TAIL_SIGMAS
    return reach * spec.R * spec.sigma_y, reach * spec.sigma_y


def gaussian_radial_grid(
    spec: GaussianPacketSpec,
    panels: int = QuadratureDefaults.PANELS,
    order: int = QuadratureDefaults.ORDER,
) -> RadialGrid:
    """파속 지지 영역을 덮는 k_r 격자"""
    half_x, half_y = gaussian_half_widths(spec)
    k_max = float(np.hypot(abs(spec.k_y_mean) + half_y, half_x))
    return RadialGrid.gauss_legendre(k_max, panels=panels, order=order)


def gaussian_polar_field(spec: GaussianPacketSpec, grid: RadialGrid, n_phi: int) -> np.ndarray:
    """극좌표 (k_r, φ_j) 표본, 형상 (n_k, n_phi)"""
    phi = uniform_angles(n_phi)
    k = grid.nodes[:, None]
    return gaussian_spectral_amplitude(spec, k * np.cos(phi)[None, :], k * np.sin(phi)[None, :]) + 0j


def gaussian_k_axes(spec: GaussianPacketSpec, n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """파속을 덮는 균등 직교 (k_x, k_y) 축"""
    half_x, half_y = gaussian_half_widths(spec)
    kx = np.linspace(-half_x, half_x, n_points)
    ky = np.linspace(spec.k_y_mean - half_y, spec.k_y_mean + half_y, n_points)
    return kx, ky


def gaussian_packet(
    spec: GaussianPacketSpec,
    kx: np.ndarray,
    ky: np.ndarray,
    spin: SpinState = SpinState.DOWN,
) -> SpectralPacket:
    """직교 격자 위 단일 스핀 가우시안 파속"""
    KX, KY = np.meshgrid(kx, ky, indexing="ij")
    amplitude = gaussian_spectral_amplitude(spec, KX, KY) + 0j
    zeros = np.zeros_like(amplitude)
    up = SpinState(spin) == SpinState.UP
    return SpectralPacket(
        kx=np.asarray(kx, dtype=float), ky=np.asarray(ky, dtype=float),
        a_plus=amplitude if up else zeros, a_minus=zeros if up else amplitude,
        metadata={"k_y_mean": spec.k_y_mean, "sigma_y": spec.sigma_y, "R": spec.R},
    )


# === 베셀 빔 ===

def bessel_spectrum(
    spec: BesselBeamSpec,
    width: Optional[float] = None,
    panels: int = QuadratureDefaults.PANELS,
    order: int = QuadratureDefaults.ORDER,
) -> Tuple[AzimuthalSpectrum, AzimuthalSpectrum]:
    """
    ℓ=0 델타 링 스펙트럼 f̂⁰± = b±δ(k_r − k_ρ)/k_r 의 정규화 근사

    링 가중치 |f̂⁰|²k_r 를 폭 width의 정규화된 가우시안으로 둔다.

    Returns:
        (스핀 업 스펙트럼, 스핀 다운 스펙트럼)
    """
    if width is None:
        width = QuadratureDefaults.RING_WIDTH_FRACTION * (spec.k_rho if spec.k_rho > 0 else spec.k_z)
    if width <= 0:
        raise PhysicsDomainError("링 정규화 폭은 양수여야 합니다", field="width", code="NONPOSITIVE_WIDTH")

    reach = QuadratureDefaults.TAIL_SIGMAS * width
    grid = RadialGrid.gauss_legendre(
        spec.k_rho + reach, panels=panels, order=order, k_min=max(0.0, spec.k_rho - reach)
    )
    k = grid.nodes
    density = np.exp(-0.5 * ((k - spec.k_rho) / width) ** 2)
    density /= np.sum(density * grid.weights)
    ring = np.sqrt(density / k)

    def _spectrum(b: complex) -> AzimuthalSpectrum:
        coeffs = (b * ring)[None, :]
        return AzimuthalSpectrum(
            ell_min=0, ell_max=0, coeffs=coeffs, radial_grid=grid,
            total_norm=float(grid.integrate(np.abs(coeffs[0]) ** 2)),
        )

    return _spectrum(spec.b_plus), _spectrum(spec.b_minus)


def delta_ring_profile(k_rho: float) -> DivergenceProfile:
    """단일 k_r 노드로 표현한 정확한 델타 링 발산 프로파일"""
    if k_rho <= 0:
        raise PhysicsDomainError("링 반경은 양수여야 합니다", field="k_rho", code="NONPOSITIVE_K_RHO")
    grid = RadialGrid(nodes=np.array([k_rho]), weights=np.array([1.0 / k_rho]), order=1)
    return DivergenceProfile(grid=grid, density=np.array([1.0]))


# === 콜리메이터 발산 프로파일 ===

def disk_overlap(d, a: float, b: float) -> np.ndarray:
    """중심 거리 d인 반경 a, b 두 원판의 겹침 넓이"""
    d = np.abs(np.asarray(d, dtype=float))
    small, large = min(a, b), max(a, b)
    area = np.zeros_like(d)

    inside = d <= large - small
    area[inside] = np.pi * small ** 2

    lens = (~inside) & (d < a + b)
    if np.any(lens):
        dl = d[lens]
        cos_a = np.clip((dl ** 2 + a ** 2 - b ** 2) / (2.0 * dl * a), -1.0, 1.0)
        cos_b = np.clip((dl ** 2 + b ** 2 - a ** 2) / (2.0 * dl * b), -1.0, 1.0)
        kite = (-dl + a + b) * (dl + a - b) * (dl - a + b) * (dl + a + b)
        area[lens] = a ** 2 * np.arccos(cos_a) + b ** 2 * np.arccos(cos_b) - 0.5 * np.sqrt(np.maximum(kite, 0.0))
    return area


def _aperture_overlap(geom: CollimatorGeometry, d) -> np.ndarray:
    """입구 개구와 출구 핀홀 지시함수의 상호상관 (변위 d)"""
    p = geom.exit_radius
    if geom.kind == CollimatorKind.ANNULUS_AND_PINHOLE:
        return disk_overlap(d, geom.annulus_outer, p) - disk_overlap(d, geom.annulus_inner, p)
    return disk_overlap(d, geom.entrance_radius, p)


def divergence_density(geom: CollimatorGeometry, k_r) -> np.ndarray:
    """정규화 전 발산 밀도 (소각 근사 k_r = k_z·α, α = d/D)"""
    d = geom.separation * np.asarray(k_r, dtype=float) / geom.k_z
    return _aperture_overlap(geom, d)


def _breakpoints(geom: CollimatorGeometry) -> np.ndarray:
    """밀도의 꺾임점 (변위 단위)"""
    p = geom.exit_radius
    if geom.kind == CollimatorKind.ANNULUS_AND_PINHOLE:
        radii = [geom.annulus_inner, geom.annulus_outer]
    else:
        radii = [geom.entrance_radius]
    points = [0.0]
    for radius in radii:
        points.extend([abs(radius - p), radius + p])
    lo = geom.min_angle * geom.separation
    hi = geom.max_angle * geom.separation
    points = np.unique(np.clip(points, lo, hi))
    return points


def divergence_profile(
    geom: CollimatorGeometry,
    panels: int = QuadratureDefaults.PANELS,
    order: int = QuadratureDefaults.ORDER,
) -> DivergenceProfile:
    """
    콜리메이터 기하의 발산 프로파일

    두 개구 지시함수의 겹침 넓이를 각도로 사상한 뒤 ∫|f|²k dk = 1로 정규화한다.
    패널 경계는 밀도의 꺾임점에 맞춘다.
    """
    points = _breakpoints(geom)
    lengths = np.diff(points)
    counts = np.maximum(1, np.round(panels * lengths / lengths.sum()).astype(int))
    edges = [points[0]]
    for start, stop, n in zip(points[:-1], points[1:], counts):
        edges.extend(np.linspace(start, stop, n + 1)[1:])
    k_edges = geom.k_z * np.asarray(edges) / geom.separation

    grid = RadialGrid.from_edges(k_edges, order)
    raw = divergence_density(geom, grid.nodes)
    density = raw / grid.integrate(raw)
    profile = DivergenceProfile(grid=grid, density=density, geometry=geom)
    logger.info(
        f"발산 프로파일 생성: {geom.kind.value}, 노드 {grid.nodes.size}개, "
        f"평균 k_r={profile.mean_k:.4e}, 분산={profile.variance_k:.4e}"
    )
    return profile


def analytic_cdf(geom: CollimatorGeometry, k_r) -> np.ndarray:
    """k_r의 누적분포 F(k) = ∫₀^k ρ(k′)k′dk′ (정규화)"""
    k_hi = geom.k_z * geom.max_angle
    dense = np.linspace(0.0, k_hi, QuadratureDefaults.CDF_POINTS)
    cumulative = cumulative_trapezoid(divergence_density(geom, dense) * dense, dense, initial=0.0)
    cumulative /= cumulative[-1]
    return np.interp(np.asarray(k_r, dtype=float), dense, cumulative, left=0.0, right=1.0)


def _sample_points(rng: np.random.Generator, n: int, inner: float, outer: float) -> np.ndarray:
    """반경 [inner, outer] 고리 (inner=0이면 원판) 위 균등 점"""
    radius = np.sqrt(inner ** 2 + rng.random(n) * (outer ** 2 - inner ** 2))
    angle = 2.0 * np.pi * rng.random(n)
    return np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=-1)


def _sample_chunk(geom: CollimatorGeometry, n: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    if geom.kind == CollimatorKind.ANNULUS_AND_PINHOLE:
        entrance = _sample_points(rng, n, geom.annulus_inner, geom.annulus_outer)
    else:
        entrance = _sample_points(rng, n, 0.0, geom.entrance_radius)
    exit_ = _sample_points(rng, n, 0.0, geom.exit_radius)
    d = np.hypot(*(entrance - exit_).T)
    return geom.k_z * d / geom.separation


def sample_divergence(
    geom: CollimatorGeometry,
    n_rays: int = MonteCarloDefaults.RAYS,
    seed: int = MonteCarloDefaults.SEED,
    chunk: int = MonteCarloDefaults.CHUNK,
    max_workers: int = 4,
) -> np.ndarray:
    """
    몬테카를로 광선 표본 k_r

    시드를 청크별 하위 스트림으로 나누고 청크 순서대로 병합하므로
    작업자 수와 관계없이 결과가 같다.
    """
    if n_rays <= 0:
        raise PhysicsDomainError("광선 수는 양수여야 합니다", field="n_rays", code="NONPOSITIVE_RAYS")
    sizes: List[int] = [chunk] * (n_rays // chunk)
    if n_rays % chunk:
        sizes.append(n_rays % chunk)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        parts = list(executor.map(lambda args: _sample_chunk(geom, *args), zip(sizes, children)))

    logger.debug(f"몬테카를로 표본: {n_rays}개 광선, {len(sizes)}개 청크, seed={seed}")
    return np.concatenate(parts)
