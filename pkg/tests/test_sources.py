import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbsp import (
    DomainError,
    HeraldingDetector,
    HSPSSource,
    VariantError,
    WCPSource,
    heralded_pnd,
    heralded_single_mean,
    poisson_pmf,
    thermal_pmf,
    tmd_response,
)
from rbsp.sources import poisson_pmf_array, thermal_pmf_array, truncated_sum


def occupancy_response(l, m, eta, modes):
    """Independent route to P(l|m): photons arrive one at a time and either get
    lost, fall into an already-lit mode, or light a new one."""
    dist = np.zeros(modes + 1)
    dist[0] = 1.0
    for _ in range(m):
        lit = np.arange(modes + 1)
        stay = (1 - eta) + eta * lit / modes
        new = np.zeros_like(dist)
        new += dist * stay
        new[1:] += dist[:-1] * eta * (modes - lit[:-1]) / modes
        dist = new
    return dist[l]


class TestPoisson:
    def test_vacuum_at_zero_intensity(self):
        assert poisson_pmf(0.0, 0) == 1.0
        assert poisson_pmf(0.0, 3) == 0.0

    def test_single_photon_value(self):
        # mpmath, 40 digits: 0.625 * exp(-0.625)
        assert poisson_pmf(0.625, 1) == pytest.approx(0.33453839282436890, rel=1e-14)

    def test_zero_and_one_equal_at_unit_mean(self):
        assert poisson_pmf(1.0, 0) == pytest.approx(poisson_pmf(1.0, 1), rel=1e-15)
        assert poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1), rel=1e-15)

    @pytest.mark.parametrize("mu, n", [(-0.1, 0), (0.5, -1), (0.5, 1.5)])
    def test_domain(self, mu, n):
        with pytest.raises(DomainError):
            poisson_pmf(mu, n)


class TestThermal:
    def test_trivial_values(self):
        assert thermal_pmf(0.0, 0) == 1.0
        assert thermal_pmf(1.0, 0) == 0.5

    def test_two_pairs(self):
        # mpmath: 0.605**2 / 1.605**3
        assert thermal_pmf(0.605, 2) == pytest.approx(0.088529016411547882, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            thermal_pmf(-1.0, 0)

    def test_array_matches_scalar(self):
        arr = thermal_pmf_array(0.7, 30)
        assert arr == pytest.approx([thermal_pmf(0.7, n) for n in range(31)], rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(mu=st.floats(0.0, 2.0))
def test_pmfs_normalised(mu):
    assert truncated_sum(poisson_pmf_array(mu)) == pytest.approx(1.0, abs=1e-10)
    assert truncated_sum(thermal_pmf_array(mu)) == pytest.approx(1.0, abs=1e-10)


def test_truncation_stops_early_for_fast_tails():
    terms = np.array([1.0, 1e-10, 1e-20, 5.0])
    # the 1e-20 term is below 1e-18 of the running sum, so the series stops there
    assert truncated_sum(terms) == pytest.approx(1.0 + 1e-10, rel=1e-15)


class TestTMD:
    def test_empty_pulse(self, detector):
        assert tmd_response(0, 0, detector) == 1.0

    @pytest.mark.parametrize("stages", [0, 1, 2, 5])
    @pytest.mark.parametrize("eta", [0.04, 0.5, 0.85, 1.0])
    def test_single_photon_is_detected_with_eta(self, stages, eta):
        det = HeraldingDetector(stages, eta, 0.0)
        assert tmd_response(1, 1, det) == pytest.approx(eta, rel=1e-12)

    def test_two_photons_two_modes_unit_efficiency(self):
        det = HeraldingDetector(1, 1.0, 0.0)
        assert tmd_response(1, 2, det) == pytest.approx(0.5, rel=1e-14)

    def test_too_many_clicks(self, detector):
        with pytest.raises(DomainError):
            tmd_response(5, 10, detector)

    @pytest.mark.parametrize("stages", [0, 1, 2, 3, 6, 10])
    @pytest.mark.parametrize("eta", [0.0, 0.04, 0.5, 0.85, 1.0])
    def test_completeness(self, stages, eta):
        det = HeraldingDetector(stages, eta, 0.0)
        for m in range(0, 51):
            total = math.fsum(tmd_response(l, m, det) for l in range(0, min(det.modes, m) + 1))
            assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("m", [0, 1, 5, 20])
    def test_zero_efficiency_never_clicks(self, m):
        det = HeraldingDetector(3, 0.0, 0.0)
        assert tmd_response(0, m, det) == 1.0

    def test_no_more_clicks_than_photons(self):
        det = HeraldingDetector(3, 0.9, 0.0)
        for m in range(0, 8):
            for l in range(m + 1, det.modes + 1):
                assert tmd_response(l, m, det) == 0.0

    @pytest.mark.parametrize("stages", [1, 2, 4, 10])
    @pytest.mark.parametrize("eta", [0.04, 0.85, 1.0])
    def test_against_occupancy_chain(self, stages, eta):
        det = HeraldingDetector(stages, eta, 0.0)
        for m in (1, 2, 3, 7, 15, 40):
            for l in range(0, min(m, det.modes) + 1):
                expected = occupancy_response(l, m, eta, det.modes)
                assert tmd_response(l, m, det) == pytest.approx(expected, rel=1e-9, abs=1e-14)

    def test_detector_from_modes(self):
        det = HeraldingDetector.from_modes(8, 0.9, 1e-6)
        assert det.stages == 3 and det.modes == 8
        with pytest.raises(DomainError):
            HeraldingDetector.from_modes(6)
        with pytest.raises(DomainError):
            HeraldingDetector(2, 1.5, 0.0)


class TestHeraldedSingleMean:
    def test_vacuum(self, detector):
        assert heralded_single_mean(HSPSSource(0.0, detector)) == 0.0

    def test_ideal_wide_detector(self):
        # mpmath partial sums to i = 400 of thermal(0.605, i) P(1|i), X = 1024, eta = 1
        src = HSPSSource(0.605, HeraldingDetector(10, 1.0, 0.0))
        assert heralded_single_mean(src) == pytest.approx(0.23494445511204474, rel=1e-12)
        # with more modes it approaches the single-pair probability
        assert heralded_single_mean(src) == pytest.approx(thermal_pmf(0.605, 1), rel=1e-3)

    def test_standard_detector(self, hsps):
        # mpmath, X = 4, eta = 0.85
        assert heralded_single_mean(hsps) == pytest.approx(0.24508200168103675, rel=1e-12)

    def test_monotone_in_efficiency(self):
        values = [heralded_single_mean(HSPSSource(0.605, HeraldingDetector(2, eta, 0.0))) for eta in np.linspace(0, 1, 21)]
        assert np.all(np.diff(values) > 0)
        assert 0 < values[-1] < 1

    def test_wcp_rejected(self):
        with pytest.raises(VariantError):
            heralded_single_mean(WCPSource(0.5))


class TestHeraldedPND:
    def test_normalised(self, hsps):
        assert math.fsum(heralded_pnd(hsps, n) for n in range(201)) == pytest.approx(1.0, abs=1e-10)

    def test_no_vacuum_herald_without_dark_counts(self):
        src = HSPSSource(0.605, HeraldingDetector(10, 1.0, 0.0))
        assert heralded_pnd(src, 0) == 0.0

    def test_dark_heralds_dominate_at_low_intensity(self):
        src = HSPSSource(1e-12, HeraldingDetector(2, 0.85, 1e-6))
        assert heralded_pnd(src, 0) > 0.999

    def test_monte_carlo(self, hsps):
        rng = np.random.default_rng(20240611)
        samples, det = 1_000_000, hsps.detector
        n = rng.geometric(1 / (1 + hsps.mu), size=samples) - 1
        lit = np.zeros(samples, dtype=np.int64)
        for slot in range(int(n.max())):
            hit = (slot < n) & (rng.random(samples) < det.efficiency)
            lit |= hit.astype(np.int64) << rng.integers(0, det.modes, size=samples)
        for mode in range(det.modes):
            lit |= (rng.random(samples) < det.dark_rate).astype(np.int64) << mode
        clicks = np.zeros(samples, dtype=np.int64)
        for mode in range(det.modes):
            clicks += (lit >> mode) & 1
        heralded = n[clicks == 1]
        for k in range(0, 5):
            p = heralded_pnd(hsps, k)
            observed = np.mean(heralded == k)
            sigma = math.sqrt(max(p * (1 - p), 1e-12) / heralded.size)
            assert abs(observed - p) < 4 * sigma + 1e-6, (k, observed, p)
