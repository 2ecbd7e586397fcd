import math

import numpy as np
import pytest

from biphoton_airy import (
    CountRecord,
    DetectorModel,
    DomainError,
    FitPattern,
    J1_FIRST_ROOT,
    expected_counts,
    fit_profile,
    poisson_sample,
    quantum_airy_function,
    classical_airy_function,
    records_to_profile,
    scan_positions_from_mirror,
    simulate_scan,
)

from conftest import APERTURE_RADIUS, QUANTUM_FIRST_ZERO


def make_model(**overrides) -> DetectorModel:
    params = dict(
        pinhole_radius=25e-6,
        pair_flux=200.0,
        dwell_time=10.0,
        coincidence_window=2e-9,
        singles_rate=1e4,
        rng_seed=20240901,
    )
    params.update(overrides)
    return DetectorModel(**params)


@pytest.fixture(scope="module")
def quantum_fn(cfg):
    return quantum_airy_function(APERTURE_RADIUS, cfg)


SCAN_POSITIONS = np.arange(-6e-4, 6.0001e-4, 2e-5)


class TestDetectorModel:
    def test_accidentals(self):
        model = make_model()
        assert model.accidentals_per_dwell == pytest.approx(1e8 * 2e-9 * 10.0)

    def test_window_must_be_small(self):
        with pytest.raises(DomainError):
            make_model(coincidence_window=1.0)

    @pytest.mark.parametrize("key", ["pinhole_radius", "dwell_time"])
    def test_positive_required(self, key):
        with pytest.raises(DomainError):
            make_model(**{key: 0.0})

    def test_zero_rates_allowed(self):
        model = make_model(pair_flux=0.0, singles_rate=0.0)
        assert model.accidentals_per_dwell == 0.0

    def test_negative_seed_rejected(self):
        with pytest.raises(DomainError):
            make_model(rng_seed=-1)


class TestExpectedCounts:
    def test_peak_with_small_pinhole(self, quantum_fn):
        model = make_model(pinhole_radius=1e-6)
        value = expected_counts(0.0, model, quantum_fn)
        assert value == pytest.approx(
            model.pair_flux * model.dwell_time + model.accidentals_per_dwell,
            rel=1e-4,
        )

    def test_pinhole_vanishing_limit(self, cfg, quantum_fn):
        # pinhole radius = first_zero / 100: within 0.1% of the pointwise value
        position = 1.3e-4
        model = make_model(pinhole_radius=QUANTUM_FIRST_ZERO / 100.0)
        pointwise = (
            model.pair_flux * model.dwell_time * quantum_fn(position)
            + model.accidentals_per_dwell
        )
        assert expected_counts(position, model, quantum_fn) == pytest.approx(
            pointwise, rel=1e-3
        )

    def test_first_zero_gives_accidentals_only(self, quantum_fn):
        model = make_model(pinhole_radius=1e-7)
        value = expected_counts(QUANTUM_FIRST_ZERO, model, quantum_fn)
        assert value == pytest.approx(model.accidentals_per_dwell, abs=1e-3)

    def test_averaging_strictly_below_peak(self, quantum_fn):
        model = make_model(pinhole_radius=QUANTUM_FIRST_ZERO / 4.0)
        value = expected_counts(0.0, model, quantum_fn)
        assert value < model.pair_flux * model.dwell_time + model.accidentals_per_dwell

    def test_negative_background_rejected(self, quantum_fn):
        with pytest.raises(DomainError):
            expected_counts(0.0, make_model(), quantum_fn, background=-1.0)

    def test_background_rate_adds_counts(self, quantum_fn):
        model = make_model()
        base = expected_counts(0.0, model, quantum_fn)
        with_bg = expected_counts(0.0, model, quantum_fn, background=3.0)
        assert with_bg == pytest.approx(base + 3.0 * model.dwell_time)


class TestPoissonSampler:
    def test_zero_mean(self):
        rng = np.random.default_rng(1)
        assert poisson_sample(rng, 0.0) == 0

    def test_deterministic(self):
        draws_a = [poisson_sample(np.random.default_rng(99), m) for m in (3.0, 700.0)]
        draws_b = [poisson_sample(np.random.default_rng(99), m) for m in (3.0, 700.0)]
        assert draws_a == draws_b

    def test_moments_small_mean(self):
        rng = np.random.default_rng(7)
        mean = 23.7
        n = 20000
        draws = np.array([poisson_sample(rng, mean) for _ in range(n)])
        se = math.sqrt(mean / n)
        assert abs(draws.mean() - mean) < 3 * se
        var_se = mean * math.sqrt(2.0 / n)  # approx SE of the variance
        assert abs(draws.var() - mean) < 4 * var_se

    def test_normal_cutoff_against_exact_inversion(self):
        # independent inversion oracle, valid for any mean with exp(-m) > 0
        def inversion(rng, mean):
            u = rng.random()
            prob = math.exp(-mean)
            cum = prob
            k = 0
            while u > cum and k < 10000:
                k += 1
                prob *= mean / k
                cum += prob
            return k

        mean = 520.0  # just above the cutoff: package uses the normal branch
        n = 20000
        rng = np.random.default_rng(31415)
        package = np.array([poisson_sample(rng, mean) for _ in range(n)])
        rng = np.random.default_rng(27182)
        exact = np.array([inversion(rng, mean) for _ in range(n)])
        se = math.sqrt(mean / n)
        assert abs(package.mean() - exact.mean()) < 4 * se
        assert abs(package.var() / exact.var() - 1.0) < 0.05

    def test_invalid_mean(self):
        rng = np.random.default_rng(1)
        with pytest.raises(DomainError):
            poisson_sample(rng, -1.0)
        with pytest.raises(DomainError):
            poisson_sample(rng, math.inf)


class TestSimulateScan:
    def test_deterministic_for_seed(self, quantum_fn):
        model = make_model()
        a = simulate_scan(SCAN_POSITIONS, model, quantum_fn)
        b = simulate_scan(SCAN_POSITIONS, model, quantum_fn)
        assert a == b

    def test_seed_changes_draws(self, quantum_fn):
        a = simulate_scan(SCAN_POSITIONS, make_model(rng_seed=1), quantum_fn)
        b = simulate_scan(SCAN_POSITIONS, make_model(rng_seed=2), quantum_fn)
        assert any(x.coincidences != y.coincidences for x, y in zip(a, b))

    def test_source_off_gives_zero_counts(self, quantum_fn):
        model = make_model(pair_flux=0.0, singles_rate=0.0)
        records = simulate_scan(SCAN_POSITIONS, model, quantum_fn)
        assert all(rec.coincidences == 0 for rec in records)

    def test_sample_mean_matches_expectation(self, quantum_fn):
        # statistical self-test at one position over many repetitions
        position = 1e-4
        base = make_model()
        expected = expected_counts(position, base, quantum_fn)
        n = 10000
        draws = np.empty(n)
        for i in range(n):
            model = make_model(rng_seed=50000 + i)
            (record,) = simulate_scan([position], model, quantum_fn)
            draws[i] = record.coincidences
        se = math.sqrt(expected / n)
        assert abs(draws.mean() - expected) < 3 * se

    def test_records_to_profile_sorted(self, quantum_fn):
        records = simulate_scan([3e-4, -1e-4, 0.0], make_model(), quantum_fn)
        profile = records_to_profile(records)
        assert list(profile.positions) == [-1e-4, 0.0, 3e-4]


class TestFitProfile:
    def test_noiseless_self_consistency(self, cfg):
        # exact (unquantized) model samples: parameters come back to 1e-6
        # relative and the reduced chi-square is ~0
        scale = cfg.q_scale * 2.0 * APERTURE_RADIUS
        from biphoton_airy import airy_kernel

        truth = (2000.0, -2.1e-5, 2.0)

        class FloatRecord:
            def __init__(self, position, value):
                self.position = position
                self.coincidences = value

        records = [
            FloatRecord(
                float(x),
                truth[0] * airy_kernel(scale * (x - truth[1])) + truth[2],
            )
            for x in SCAN_POSITIONS
        ]
        result = fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.QUANTUM_AIRY)
        assert result.amplitude == pytest.approx(truth[0], rel=1e-6)
        assert result.center_offset == pytest.approx(truth[1], rel=1e-6, abs=1e-12)
        assert result.background == pytest.approx(truth[2], rel=1e-6)
        assert result.reduced_chi_square == pytest.approx(0.0, abs=1e-12)

    def test_poisson_scan_chi_square(self, cfg, quantum_fn):
        records = simulate_scan(SCAN_POSITIONS, make_model(), quantum_fn)
        result = fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.QUANTUM_AIRY)
        assert 0.5 <= result.reduced_chi_square <= 2.0
        assert result.first_zero_estimate == pytest.approx(
            QUANTUM_FIRST_ZERO, abs=3 * result.first_zero_sigma + 1e-9
        )

    def test_wrong_pattern_is_detectable(self, cfg, quantum_fn):
        records = simulate_scan(SCAN_POSITIONS, make_model(), quantum_fn)
        result = fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.CLASSICAL_AIRY)
        assert result.reduced_chi_square > 10.0

    def test_classical_pattern_fit(self, cfg):
        classical_fn = classical_airy_function(APERTURE_RADIUS, cfg)
        positions = np.arange(-1.2e-3, 1.20001e-3, 4e-5)
        records = simulate_scan(positions, make_model(), classical_fn)
        result = fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.CLASSICAL_AIRY)
        expected_zero = 2.0 * QUANTUM_FIRST_ZERO
        assert result.first_zero_estimate == pytest.approx(
            expected_zero, abs=3 * result.first_zero_sigma + 1e-9
        )

    def test_covariance_properties(self, cfg, quantum_fn):
        records = simulate_scan(SCAN_POSITIONS, make_model(), quantum_fn)
        result = fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.QUANTUM_AIRY)
        eigenvalues = np.linalg.eigvalsh(result.covariance)
        assert np.all(eigenvalues > 0)

    def test_too_few_records(self, cfg):
        records = [
            CountRecord(position=float(x), coincidences=5, expected=5.0, accidental_estimate=0.0)
            for x in np.linspace(-5e-4, 5e-4, 5)
        ]
        with pytest.raises(DomainError):
            fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.QUANTUM_AIRY)

    def test_records_must_span_first_zero(self, cfg, quantum_fn):
        narrow = np.linspace(-1e-4, 1e-4, 21)
        records = simulate_scan(narrow, make_model(), quantum_fn)
        with pytest.raises(DomainError):
            fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.QUANTUM_AIRY)

    def test_zero_offset_mapping(self, cfg, quantum_fn):
        records = simulate_scan(SCAN_POSITIONS, make_model(), quantum_fn)
        result = fit_profile(records, APERTURE_RADIUS, cfg, FitPattern.QUANTUM_AIRY)
        scale = cfg.q_scale * 2.0 * APERTURE_RADIUS
        assert result.first_zero_estimate == pytest.approx(
            result.center_offset + J1_FIRST_ROOT / scale, rel=1e-12
        )


class TestMirrorScan:
    def test_zero_angle(self):
        assert scan_positions_from_mirror([0.0], 1.0) == [0.0]

    def test_doubling(self):
        assert scan_positions_from_mirror([1e-3], 2.0) == [pytest.approx(4e-3)]

    def test_equal_spacing_preserved(self):
        angles = np.linspace(-0.01, 0.01, 11)
        positions = scan_positions_from_mirror(angles, 0.75)
        spacings = np.diff(positions)
        assert np.allclose(spacings, spacings[0], rtol=1e-12)

    def test_large_angle_rejected(self):
        with pytest.raises(DomainError):
            scan_positions_from_mirror([0.06], 1.0)
