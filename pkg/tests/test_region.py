import numpy as np
import pytest

from hsr_qos.allocators import Strategy, conditional_capacity, rdi_max, rds_max
from hsr_qos.channel import dbm_to_mw, uniform_link
from hsr_qos.errors import DomainError
from hsr_qos.region import (
    RateRegionBoundary,
    baseline_region,
    rds_grid,
    separate_schedule_region,
    simultaneous_region_two_channels,
    sweep_region,
    throughput_gain,
    upper_concave_envelope,
)
from hsr_qos.scenario import Scenario

P0 = dbm_to_mw(30.0)


@pytest.fixture(scope="module")
def hybrid(scenario: Scenario) -> RateRegionBoundary:
    return sweep_region(scenario, P0, 50)


@pytest.fixture(scope="module")
def two_channel(
    scenario: Scenario,
) -> tuple[RateRegionBoundary, RateRegionBoundary]:
    P0_total = dbm_to_mw(40.0)
    return (
        simultaneous_region_two_channels(scenario, P0_total, 50),
        separate_schedule_region(scenario, P0_total, 200),
    )


class TestSweep:
    @pytest.mark.parametrize("p0_dbm", [20.0, 30.0, 40.0])
    def test_endpoints(self, scenario: Scenario, p0_dbm: float) -> None:
        budget = dbm_to_mw(p0_dbm)
        boundary = sweep_region(scenario, budget, 5)
        assert boundary.r_ds[0] == 0.0
        assert boundary.r_di[0] == pytest.approx(rdi_max(scenario, budget), rel=1e-6)
        assert boundary.r_ds[-1] == pytest.approx(rds_max(scenario, budget), rel=1e-6)
        assert boundary.r_di[-1] == 0.0

    def test_ordering(self, hybrid: RateRegionBoundary) -> None:
        assert np.all(np.diff(hybrid.r_ds) > 0)
        assert np.all(np.diff(hybrid.r_di) <= 0)

    def test_reference_points(self, hybrid: RateRegionBoundary) -> None:
        assert hybrid.r_ds[-1] == pytest.approx(3.2663e6, rel=1e-4)
        assert len(hybrid.points) == 50

    def test_nested_in_budget(self, scenario: Scenario, hybrid: RateRegionBoundary) -> None:
        larger = 2.0 * P0
        for r_ds, r_di in hybrid.points[1:-1]:
            assert conditional_capacity(scenario, r_ds, larger) > r_di

    def test_empty_budget(self, scenario: Scenario) -> None:
        boundary = sweep_region(scenario, 0.0, 10)
        assert boundary.points == [(0.0, 0.0)]

    def test_too_few_points(self, scenario: Scenario) -> None:
        with pytest.raises(DomainError):
            rds_grid(uniform_link(scenario), P0, 1)

    def test_dataframe(self, hybrid: RateRegionBoundary) -> None:
        df = hybrid.dataframe()
        assert list(df.columns) == ["strategy", "r_ds_bps", "r_di_bps"]
        assert (df["strategy"] == "HAA").all()


class TestBaselines:
    @pytest.mark.parametrize("strategy", [Strategy.FPA, Strategy.CIA, Strategy.WFA])
    def test_hybrid_dominates(
        self, scenario: Scenario, hybrid: RateRegionBoundary, strategy: Strategy
    ) -> None:
        baseline = baseline_region(scenario, P0, strategy, 50)
        np.testing.assert_array_equal(baseline.r_ds, hybrid.r_ds)
        tolerance = 1e-6 * hybrid.r_di[0]
        assert np.all(hybrid.r_di >= baseline.r_di - tolerance)
        interior = slice(1, -1)
        assert np.any(hybrid.r_di[interior] > baseline.r_di[interior] + tolerance)

    def test_cia_is_a_line(self, scenario: Scenario) -> None:
        boundary = baseline_region(scenario, P0, Strategy.CIA, 11)
        np.testing.assert_allclose(
            boundary.r_di + boundary.r_ds, rds_max(scenario, P0), rtol=1e-12
        )

    def test_wfa_starts_at_ergodic_rate(
        self, scenario: Scenario, hybrid: RateRegionBoundary
    ) -> None:
        boundary = baseline_region(scenario, P0, Strategy.WFA, 20)
        assert boundary.r_di[0] == pytest.approx(hybrid.r_di[0], rel=1e-12)

    def test_hybrid_is_not_a_baseline(self, scenario: Scenario) -> None:
        with pytest.raises(DomainError):
            baseline_region(scenario, P0, Strategy.HAA, 5)


class TestTwoChannels:
    def test_gain_at_zero_rds(
        self, two_channel: tuple[RateRegionBoundary, RateRegionBoundary]
    ) -> None:
        simultaneous, separate = two_channel
        assert 0.47 <= throughput_gain(simultaneous, separate) <= 0.67

    def test_simultaneous_dominates(
        self, two_channel: tuple[RateRegionBoundary, RateRegionBoundary]
    ) -> None:
        simultaneous, separate = two_channel
        for r_ds, r_di in separate.points:
            assert simultaneous.r_di_at(r_ds) >= r_di

    def test_separate_frontier(
        self,
        scenario: Scenario,
        two_channel: tuple[RateRegionBoundary, RateRegionBoundary],
    ) -> None:
        _, separate = two_channel
        P0_total = dbm_to_mw(40.0)
        assert separate.r_di[0] == pytest.approx(rdi_max(scenario, P0_total))
        assert separate.r_ds[-1] == pytest.approx(rds_max(scenario, P0_total))
        assert np.all(np.diff(separate.r_ds) > 0)
        assert separate.r_di_at(10e6) >= 25e6

    def test_reference_point_is_dominated(
        self, two_channel: tuple[RateRegionBoundary, RateRegionBoundary]
    ) -> None:
        simultaneous, _ = two_channel
        assert simultaneous.r_di_at(10e6) >= 37e6
        assert simultaneous.r_di_at(17.5e6) >= 25e6


class TestEnvelope:
    def test_drops_points_below_hull(self) -> None:
        x = np.array([0.0, 1.0, 2.0, 3.0])
        y = np.array([3.0, 1.0, 2.0, 0.0])
        hull_x, hull_y = upper_concave_envelope(x, y)
        np.testing.assert_array_equal(hull_x, [0.0, 2.0, 3.0])
        np.testing.assert_array_equal(hull_y, [3.0, 2.0, 0.0])

    def test_collinear_points_collapse(self) -> None:
        x = np.array([0.0, 1.0, 2.0])
        y = np.array([2.0, 1.0, 0.0])
        hull_x, _ = upper_concave_envelope(x, y)
        np.testing.assert_array_equal(hull_x, [0.0, 2.0])

    def test_gain_without_separate_rate(self) -> None:
        empty = RateRegionBoundary(np.zeros(1), np.zeros(1), 0.0, "separate")
        assert np.isnan(throughput_gain(empty, empty))
