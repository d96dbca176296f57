import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ive

from app.models.errors import AliasingError, EmptyProfileError, PhysicsDomainError, UndefinedDistributionError
from app.models.physics_models import (
    AzimuthalSpectrum, BesselBeamSpec, DivergenceProfile, GaussianPacketSpec, RadialGrid, SpinState,
)
from app.services.beam_service import (
    delta_ring_profile, divergence_profile, gaussian_bandwidth_closed_form, gaussian_polar_field,
    gaussian_radial_grid,
)
from app.services.oam_analysis import (
    distribution_from_weights, envelope_contrast, mode_amplitudes, oam_vs_depth, spinor_mode_amplitudes,
)
from app.services.scattering_engine import bessel_beam_transmission
from app.services.transform_service import azimuthal_decompose, uniform_angles
from app.services.transverse_engine import ideal_lower, ideal_raise
from app.shared.constants import Figure1Defaults


def single_mode(ell, grid, amplitude=1.0):
    coeffs = amplitude * np.exp(-grid.nodes ** 2)[None, :]
    return AzimuthalSpectrum(ell_min=ell, ell_max=ell, coeffs=coeffs, radial_grid=grid)


@pytest.fixture
def small_grid():
    return RadialGrid.gauss_legendre(6.0, panels=8, order=16)


def gaussian_distribution(spec, n_phi=128):
    grid = gaussian_radial_grid(spec)
    return mode_amplitudes(azimuthal_decompose(gaussian_polar_field(spec, grid, n_phi), grid))


class TestDistribution:
    def test_pure_mode(self, small_grid):
        dist = mode_amplitudes(single_mode(3, small_grid))
        assert dist.amplitude(3) == pytest.approx(1.0)
        assert dist.mean_Lz == pytest.approx(3.0)
        assert dist.sigma_ell == pytest.approx(0.0, abs=1e-12)

    def test_equal_superposition(self):
        dist = distribution_from_weights({0: 2.0, 1: 2.0})
        assert dist.weights == {0: 0.5, 1: 0.5}
        assert dist.mean_Lz == pytest.approx(0.5)
        assert dist.sigma_ell == pytest.approx(0.5)

    def test_zero_norm(self, small_grid):
        with pytest.raises(UndefinedDistributionError) as exc:
            mode_amplitudes(single_mode(0, small_grid, amplitude=0.0))
        assert exc.value.code == "ZERO_NORM"

    def test_raise_and_lower(self, small_grid):
        spec = AzimuthalSpectrum(
            ell_min=-1, ell_max=1, radial_grid=small_grid,
            coeffs=np.stack([np.exp(-small_grid.nodes ** 2) * w for w in (1.0, 2.0, 0.5)]),
        )
        base = mode_amplitudes(spec)
        raised = mode_amplitudes(ideal_raise(spec))
        lowered = mode_amplitudes(ideal_lower(spec))
        assert raised.mean_Lz == pytest.approx(base.mean_Lz + 1)
        assert lowered.mean_Lz == pytest.approx(base.mean_Lz - 1)
        assert raised.sigma_ell == pytest.approx(base.sigma_ell)
        assert raised.amplitude(1) == pytest.approx(base.amplitude(0))


class TestGaussianPacket:
    def test_weights_match_bessel_quadrature(self):
        # R = 1: â = e^{−(k² + k′²)/σ²}·e^{(2kk′/σ²)sinφ} 이므로 |f̂ℓ|² ∝ I_ℓ(2k)²
        spec = GaussianPacketSpec(k_y_mean=1.0, sigma_y=1.0, R=1.0)
        dist = gaussian_distribution(spec)

        def weight(ell):
            integrand = lambda k: ive(ell, 2 * k) ** 2 * np.exp(4 * k - 2 * k ** 2 - 2) * k
            return quad(integrand, 0.0, 12.0, epsabs=0.0, epsrel=1e-12, limit=200)[0]

        raw = {ell: weight(ell) for ell in dist.weights}
        total = sum(raw.values())
        for ell in range(-4, 5):
            assert dist.amplitude(ell) == pytest.approx(raw[ell] / total, abs=1e-10)

    @pytest.mark.parametrize("sigma_y, R", [(np.sqrt(0.1), 1.0), (0.5, 0.6), (0.9, 1.2)])
    def test_bandwidth_closed_form(self, sigma_y, R):
        spec = GaussianPacketSpec(k_y_mean=1.0, sigma_y=sigma_y, R=R)
        dist = gaussian_distribution(spec, n_phi=512)
        assert dist.mean_Lz == pytest.approx(0.0, abs=1e-10)
        assert dist.sigma_ell == pytest.approx(gaussian_bandwidth_closed_form(spec), rel=1e-6)

    def test_narrow_packet_bandwidth(self):
        spec = GaussianPacketSpec(k_y_mean=1.0, sigma_y=np.sqrt(0.1), R=1.0)
        assert gaussian_bandwidth_closed_form(spec) == pytest.approx(np.sqrt(10.0))


class TestSpinorWeights:
    def test_total_angular_momentum(self, small_grid):
        up = single_mode(0, small_grid)
        down = single_mode(1, small_grid, amplitude=2.0)
        weights = spinor_mode_amplitudes(up, down)
        assert weights.weight(SpinState.UP, 0) == pytest.approx(0.2)
        assert weights.weight(SpinState.DOWN, 1) == pytest.approx(0.8)
        assert weights.spin_total(SpinState.DOWN) == pytest.approx(0.8)
        assert weights.total_angular_momentum() == pytest.approx({0.5: 1.0})
        assert weights.orbital().mean_Lz == pytest.approx(0.8)

    def test_zero_spinor(self, small_grid):
        zero = single_mode(0, small_grid, amplitude=0.0)
        with pytest.raises(UndefinedDistributionError):
            spinor_mode_amplitudes(zero, zero)


class TestDepthScan:
    def test_delta_ring_matches_bessel_solution(self):
        k_rho, C = 0.05, 0.1
        z = np.linspace(0.0, 4000.0, 41)
        scan = oam_vs_depth(delta_ring_profile(k_rho), C, 1.0, z)
        exact = bessel_beam_transmission(BesselBeamSpec(k_rho=k_rho, k_z=1.0), C, z)
        np.testing.assert_allclose(scan.flipped, np.abs(exact.j1_plus) ** 2, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(scan.unconverted, np.abs(exact.j0_minus) ** 2, rtol=1e-10)
        assert scan.mode_weights[(SpinState.DOWN, 1)] == pytest.approx(np.zeros_like(z), abs=1e-20)

    def test_nothing_flipped_at_entrance(self, collimators):
        profile = divergence_profile(collimators["two_pinholes"], panels=8)
        scan = oam_vs_depth(profile, Figure1Defaults.COUPLING, 1.0, [0.0])
        assert scan.flipped[0] < 1e-8
        assert scan.unconverted[0] == pytest.approx(1.0, abs=1e-6)

    def test_annulus_dephases_less(self, collimators):
        z = np.linspace(0.0, Figure1Defaults.Z_MAX, 201)
        contrast = {}
        for name in ("two_pinholes", "annulus_and_pinhole"):
            profile = divergence_profile(collimators[name], panels=Figure1Defaults.RADIAL_PANELS)
            scan = oam_vs_depth(profile, Figure1Defaults.COUPLING, Figure1Defaults.K_Z, z)
            contrast[name] = envelope_contrast(scan.flipped)
        assert contrast["annulus_and_pinhole"] > contrast["two_pinholes"]

    def test_empty_profile(self):
        grid = RadialGrid.gauss_legendre(1.0, panels=1, order=4)
        with pytest.raises(EmptyProfileError):
            DivergenceProfile(grid=grid, density=np.zeros(4))

    def test_empty_depth_grid(self):
        with pytest.raises(PhysicsDomainError):
            oam_vs_depth(delta_ring_profile(0.1), 0.1, 1.0, [])

    def test_phi_samples_too_few(self):
        with pytest.raises(AliasingError):
            oam_vs_depth(delta_ring_profile(0.1), 0.1, 1.0, [0.0], n_phi=4)

    def test_explicit_window_needs_samples(self, collimators):
        profile = divergence_profile(collimators["two_pinholes"], panels=4)
        with pytest.raises(AliasingError):
            oam_vs_depth(profile, 0.1, 1.0, [0.0], n_phi=16, window=(-8, 8))

    def test_default_window_covers_flip_channel(self, collimators):
        profile = divergence_profile(collimators["two_pinholes"], panels=4)
        scan = oam_vs_depth(profile, 0.1, 1.0, [0.0, 100.0])
        assert scan.window == (-9, 8)
        assert set(scan.mode_weights) == {(s, ell) for s in SpinState for ell in range(-9, 9)}

    def test_azimuthal_input_shifts_channels(self, collimators):
        profile = divergence_profile(collimators["exit_and_pinhole"], panels=8)
        z = np.linspace(0.0, 2.0e4, 9)
        plain = oam_vs_depth(profile, 0.1, 1.0, z)
        twisted = oam_vs_depth(
            profile, 0.1, 1.0, z, angular_factor=np.exp(2j * uniform_angles(Figure1Defaults.N_PHI))
        )
        assert twisted.window == (-9, 8)
        np.testing.assert_allclose(twisted.mode_weights[(SpinState.UP, 1)], plain.flipped, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(twisted.mode_weights[(SpinState.DOWN, 2)], plain.unconverted, rtol=1e-10)
        assert twisted.flipped == pytest.approx(np.zeros_like(z), abs=1e-20)
        assert twisted.unconverted == pytest.approx(np.zeros_like(z), abs=1e-20)
        np.testing.assert_allclose(twisted.total, plain.total, rtol=1e-10)

    def test_angular_factor_shape_mismatch(self):
        with pytest.raises(PhysicsDomainError) as exc:
            oam_vs_depth(delta_ring_profile(0.1), 0.1, 1.0, [0.0], angular_factor=np.ones(7))
        assert exc.value.code == "GRID_MISMATCH"

    @pytest.mark.parametrize("name", ["two_pinholes", "exit_and_pinhole", "annulus_and_pinhole"])
    def test_total_constant_in_depth(self, collimators, name):
        # 고정 표본 k_r ≤ 5.1e-3 이므로 k± 모두 실수
        profile = divergence_profile(collimators[name], panels=8)
        scan = oam_vs_depth(profile, Figure1Defaults.COUPLING, 1.0, np.linspace(0.0, Figure1Defaults.Z_MAX, 41))
        assert np.ptp(scan.total) < 1e-10 * scan.total[0]

    def test_conversion_vanishes_with_coupling(self, collimators):
        profile = divergence_profile(collimators["two_pinholes"], panels=8)
        z = np.linspace(0.0, Figure1Defaults.Z_MAX, 21)
        peak = {C: float(np.max(oam_vs_depth(profile, C, 1.0, z).flipped)) for C in (1e-3, 1e-4, 1e-5)}
        assert peak[1e-3] > peak[1e-4] > peak[1e-5] > 0
        # 약결합에서 반전 가중치는 C²에 비례
        assert peak[1e-4] / peak[1e-5] == pytest.approx(100.0, rel=1e-2)
        assert np.all(oam_vs_depth(profile, 0.0, 1.0, z).flipped == 0.0)

    @pytest.mark.parametrize("name", ["two_pinholes", "exit_and_pinhole", "annulus_and_pinhole"])
    def test_doubling_radial_panels(self, collimators, name):
        z = np.linspace(0.0, Figure1Defaults.Z_MAX, 21)
        coarse, fine = (
            oam_vs_depth(
                divergence_profile(collimators[name], panels=panels, order=Figure1Defaults.RADIAL_ORDER),
                Figure1Defaults.COUPLING, Figure1Defaults.K_Z, z,
            )
            for panels in (Figure1Defaults.RADIAL_PANELS, 2 * Figure1Defaults.RADIAL_PANELS)
        )
        assert np.max(np.abs(fine.flipped - coarse.flipped)) < 1e-6
        assert np.max(np.abs(fine.unconverted - coarse.unconverted)) < 1e-6


class TestEnvelopeContrast:
    def test_constant_curve(self):
        assert envelope_contrast(np.full(10, 0.3)) == 0.0

    def test_full_oscillation(self):
        values = np.sin(np.linspace(0.0, 20.0, 400)) ** 2
        assert envelope_contrast(values) == pytest.approx(1.0, abs=5e-3)

    def test_zero_curve(self):
        assert envelope_contrast(np.zeros(5)) == 0.0

    def test_bad_fraction(self):
        with pytest.raises(PhysicsDomainError):
            envelope_contrast(np.ones(5), tail_fraction=0.0)
