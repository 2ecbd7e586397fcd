
import numpy as np
import pytest

from biphoton_airy import (
    DomainError,
    FeatureNotFoundError,
    Normalization,
    OpticalConfig,
    PatternMetrics,
    ScanProfile,
    classical_airy_profile,
    doubleslit_fringe_profiles,
    first_zero,
    fringe_period,
    fwhm,
    pattern_metrics,
    quantum_airy_profile,
    resolution_ratio,
)

from conftest import (
    APERTURE_RADIUS,
    CLASSICAL_FIRST_ZERO,
    CLASSICAL_FWHM,
    FOCAL_LENGTH,
    QUANTUM_FIRST_ZERO,
    QUANTUM_FWHM,
    WAVELENGTH,
)

FINE_RADII = np.arange(0.0, 1.2e-3, 1e-6)  # 1 um step


class TestAiryProfiles:
    def test_peak_values(self, cfg):
        for builder in (classical_airy_profile, quantum_airy_profile):
            profile = builder(APERTURE_RADIUS, cfg, FINE_RADII)
            assert profile.values[0] == 1.0
            assert profile.normalization is Normalization.PEAK_NORMALIZED

    def test_first_zeros_match_oracle(self, cfg):
        classical = classical_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        quantum = quantum_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        assert first_zero(classical) == pytest.approx(CLASSICAL_FIRST_ZERO, abs=1e-6)
        assert first_zero(quantum) == pytest.approx(QUANTUM_FIRST_ZERO, abs=1e-6)

    def test_tail_below_two_percent_beyond_third_ring(self, cfg):
        # third zero of the kernel is at x ~ 10.17; everything beyond stays
        # under 0.02
        profile = classical_airy_profile(
            APERTURE_RADIUS, cfg, np.arange(0.0, 4e-3, 2e-6)
        )
        scale = cfg.q_scale * APERTURE_RADIUS
        tail = profile.values[scale * profile.positions > 10.2]
        assert tail.size > 100
        assert np.max(tail) < 0.02

    def test_argument_doubling_identity(self, cfg):
        # quantum(a) at r equals classical(a) at 2r
        radii = np.linspace(0.0, 6e-4, 301)
        quantum = quantum_airy_profile(APERTURE_RADIUS, cfg, radii)
        classical = classical_airy_profile(APERTURE_RADIUS, cfg, 2.0 * radii)
        np.testing.assert_allclose(quantum.values, classical.values, atol=1e-12)

    def test_equivalent_to_doubled_aperture(self, cfg):
        radii = np.linspace(0.0, 6e-4, 301)
        quantum = quantum_airy_profile(APERTURE_RADIUS, cfg, radii)
        doubled = classical_airy_profile(2.0 * APERTURE_RADIUS, cfg, radii)
        np.testing.assert_allclose(quantum.values, doubled.values, atol=1e-12)

    @pytest.mark.parametrize("k", [0.5, 2.0, 10.0])
    def test_focal_length_scaling_law(self, cfg, k):
        # scaling f by k scales every radius metric by exactly k
        scaled_cfg = OpticalConfig(WAVELENGTH, k * FOCAL_LENGTH)
        base = classical_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        scaled = classical_airy_profile(APERTURE_RADIUS, scaled_cfg, k * FINE_RADII)
        assert first_zero(scaled) == pytest.approx(k * first_zero(base), rel=1e-9)
        assert fwhm(scaled) == pytest.approx(k * fwhm(base), rel=1e-9)

    @pytest.mark.parametrize("a", [0.0, -1e-4])
    def test_invalid_aperture(self, cfg, a):
        with pytest.raises(DomainError):
            quantum_airy_profile(a, cfg, FINE_RADII)


class TestFirstZero:
    def test_monotone_profile_raises(self):
        positions = np.linspace(0.0, 1.0, 50)
        values = 1.0 / (1.0 + positions)  # decays but never below threshold
        profile = ScanProfile(positions, values / values.max(), Normalization.PEAK_NORMALIZED)
        with pytest.raises(FeatureNotFoundError):
            first_zero(profile, threshold=1e-3)

    def test_grid_refinement_invariance(self, cfg):
        steps = (1e-6, 0.5e-6, 2e-6)
        zeros = []
        for step in steps:
            radii = np.arange(0.0, 8e-4, step)
            zeros.append(first_zero(quantum_airy_profile(APERTURE_RADIUS, cfg, radii)))
        assert max(zeros) - min(zeros) < 1e-6

    def test_requires_peak_normalized(self):
        profile = ScanProfile(
            np.array([0.0, 1.0, 2.0]),
            np.array([10.0, 5.0, 0.1]),
            Normalization.RAW_COUNTS,
        )
        with pytest.raises(DomainError):
            first_zero(profile)

    def test_noisy_profile_with_loose_threshold(self, cfg):
        rng = np.random.default_rng(11)
        radii = np.arange(0.0, 8e-4, 5e-6)
        clean = quantum_airy_profile(APERTURE_RADIUS, cfg, radii).values
        noisy = np.clip(clean + rng.normal(0.0, 0.01, clean.shape), 0.0, None)
        noisy[0] = 1.0
        profile = ScanProfile(radii, noisy / noisy.max(), Normalization.PEAK_NORMALIZED)
        zero = first_zero(profile, threshold=0.05)
        assert zero == pytest.approx(QUANTUM_FIRST_ZERO, abs=4e-5)


class TestFwhm:
    def test_oracle_values(self, cfg):
        classical = classical_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        quantum = quantum_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        assert fwhm(classical) == pytest.approx(CLASSICAL_FWHM, abs=1e-6)
        assert fwhm(quantum) == pytest.approx(QUANTUM_FWHM, abs=1e-6)

    def test_quantum_to_classical_ratio(self, cfg):
        classical = classical_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        quantum = quantum_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        assert fwhm(quantum) / fwhm(classical) == pytest.approx(0.5, abs=0.005)

    def test_symmetric_crossings(self, cfg):
        from biphoton_airy import airy_kernel

        positions = np.arange(-8e-4, 8.0001e-4, 1e-6)
        values = airy_kernel(cfg.q_scale * 2 * APERTURE_RADIUS * np.abs(positions))
        sym = ScanProfile(positions, values, Normalization.PEAK_NORMALIZED)
        assert sym.peak_position == pytest.approx(0.0, abs=1e-6)
        assert fwhm(sym) == pytest.approx(QUANTUM_FWHM, abs=2e-6)

    def test_flat_profile_raises(self):
        profile = ScanProfile(
            np.linspace(0, 1, 20), np.ones(20), Normalization.PEAK_NORMALIZED
        )
        with pytest.raises(FeatureNotFoundError):
            fwhm(profile)


class TestDoubleSlit:
    W, D = 1e-4, 4e-4

    def test_unity_at_center(self, cfg):
        x = np.linspace(-2e-3, 2e-3, 2001)
        classical, quantum = doubleslit_fringe_profiles(self.W, self.D, cfg, x)
        center = np.argmin(np.abs(x))
        assert classical.values[center] == 1.0
        assert quantum.values[center] == 1.0

    def test_period_ratio_is_half(self, cfg):
        lam_f = WAVELENGTH * FOCAL_LENGTH
        period = lam_f / self.D
        x = np.arange(-2.2 * period, 2.2 * period, period / 80)
        classical, quantum = doubleslit_fringe_profiles(self.W, self.D, cfg, x)
        ratio = fringe_period(quantum) / fringe_period(classical)
        assert ratio == pytest.approx(0.5, rel=0.01)

    def test_classical_null_is_quantum_fringe_maximum(self, cfg):
        lam_f = WAVELENGTH * FOCAL_LENGTH
        x_null = lam_f / (2.0 * self.D)
        x = np.array([0.0, x_null])
        classical, quantum = doubleslit_fringe_profiles(self.W, self.D, cfg, x)
        assert classical.values[1] < 1e-12
        # the quantum fringe factor is at a maximum there: the value equals
        # the envelope alone (cos^2 factor = 1)
        envelope = float(np.sinc(2.0 * self.W * x_null / lam_f)) ** 2
        assert quantum.values[1] == pytest.approx(envelope, rel=1e-12)

    def test_invalid_geometry(self, cfg):
        with pytest.raises(DomainError):
            doubleslit_fringe_profiles(4e-4, 1e-4, cfg, np.linspace(-1e-3, 1e-3, 5))


class TestMetricsAndRatio:
    def test_resolution_ratio_paper_parameters(self, cfg):
        classical = pattern_metrics(classical_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII))
        quantum = pattern_metrics(quantum_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII))
        assert resolution_ratio(classical, quantum) == pytest.approx(2.0, abs=0.01)

    def test_identical_metrics_give_one(self, cfg):
        metrics = pattern_metrics(quantum_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII))
        assert resolution_ratio(metrics, metrics) == 1.0

    def test_metrics_invariant_enforced(self):
        with pytest.raises(DomainError):
            PatternMetrics(first_zero_radius=1e-4, fwhm=3e-4, peak_position=0.0)
        with pytest.raises(DomainError):
            PatternMetrics(first_zero_radius=0.0, fwhm=0.0, peak_position=0.0)


class TestScanProfileValidation:
    def test_decreasing_positions_rejected(self):
        with pytest.raises(DomainError):
            ScanProfile(np.array([0.0, 2.0, 1.0]), np.ones(3), Normalization.PEAK_NORMALIZED)

    def test_length_mismatch_rejected(self):
        with pytest.raises(DomainError):
            ScanProfile(np.array([0.0, 1.0]), np.ones(3), Normalization.RAW_COUNTS)

    def test_negative_values_rejected(self):
        with pytest.raises(DomainError):
            ScanProfile(
                np.array([0.0, 1.0]), np.array([1.0, -0.1]), Normalization.RAW_COUNTS
            )

    def test_peak_normalized_must_reach_one(self):
        with pytest.raises(DomainError):
            ScanProfile(
                np.array([0.0, 1.0]), np.array([0.5, 0.4]), Normalization.PEAK_NORMALIZED
            )

    def test_uncertainty_length_checked(self):
        with pytest.raises(DomainError):
            ScanProfile(
                np.array([0.0, 1.0]),
                np.array([1.0, 0.5]),
                Normalization.PEAK_NORMALIZED,
                uncertainties=np.array([0.1]),
            )

    def test_values_within_unit_interval_after_normalization(self, cfg):
        profile = quantum_airy_profile(APERTURE_RADIUS, cfg, FINE_RADII)
        assert np.all(profile.values >= 0.0)
        assert np.all(profile.values <= 1.0)
