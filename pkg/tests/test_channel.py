import numpy as np
import pytest

from hsr_qos.channel import (
    dbm_to_mw,
    distance,
    inst_rate,
    mean_pathloss,
    mw_to_dbm,
    power_for_rate,
    time_grid,
    uniform_link,
)
from hsr_qos.errors import DomainError
from hsr_qos.scenario import Scenario


class TestGeometry:
    def test_distance_at_foot_point(self, scenario: Scenario) -> None:
        assert distance(scenario, 0.0) == pytest.approx(np.sqrt(104.0))

    def test_distance_at_cell_edge(self, scenario: Scenario) -> None:
        assert distance(scenario, 5.0) == pytest.approx(np.sqrt(250104.0))

    def test_distance_is_even(self, scenario: Scenario) -> None:
        t = np.linspace(0.0, 5.0, 11)
        np.testing.assert_array_equal(distance(scenario, t), distance(scenario, -t))

    def test_outside_window(self, scenario: Scenario) -> None:
        with pytest.raises(DomainError):
            distance(scenario, 5.1)

    def test_time_grid(self, scenario: Scenario) -> None:
        grid = time_grid(scenario)
        assert grid.size == scenario.panels + 1
        assert grid.samples[0] == -5.0
        assert grid.samples[-1] == 5.0
        assert grid.duration == 10.0

    def test_mean_pathloss(self, scenario: Scenario) -> None:
        assert mean_pathloss(scenario) == pytest.approx(83437.333333333, rel=1e-10)

    @pytest.mark.parametrize("panels", [2, 512, 4096])
    def test_mean_pathloss_doubled_panels(self, scenario: Scenario, panels: int) -> None:
        coarse = mean_pathloss(scenario.replace(panels=panels))
        fine = mean_pathloss(scenario.replace(panels=2 * panels))
        assert fine == pytest.approx(coarse, rel=1e-12)

    def test_mean_pathloss_of_a_point_cell(self, scenario: Scenario) -> None:
        tiny = scenario.replace(L=1e-6)
        assert mean_pathloss(tiny) == pytest.approx(104.0, rel=1e-9)


class TestRatePower:
    def test_zero_power(self, scenario: Scenario) -> None:
        assert inst_rate(scenario, 0.0, 100.0) == 0.0

    def test_unit_snr_gives_bandwidth(self, scenario: Scenario) -> None:
        # kappa p / d^2 = 10 * 1000 / 100^2 = 1
        assert inst_rate(scenario, 1000.0, 100.0) == pytest.approx(scenario.B)

    def test_cell_edge_power(self, scenario: Scenario) -> None:
        d = np.sqrt(250104.0)
        assert power_for_rate(scenario, 20e6, d) == pytest.approx(25010.4)
        assert inst_rate(scenario, 25010.4, d) == pytest.approx(20e6, rel=1e-9)

    def test_inverse(self, scenario: Scenario) -> None:
        d = np.array([12.0, 150.0, 500.0])
        r = np.array([1e6, 7.5e6, 40e6])
        np.testing.assert_allclose(
            inst_rate(scenario, power_for_rate(scenario, r, d), d), r, rtol=1e-12
        )

    def test_negative_power(self, scenario: Scenario) -> None:
        with pytest.raises(DomainError):
            inst_rate(scenario, -1.0, 100.0)

    def test_negative_rate(self, scenario: Scenario) -> None:
        with pytest.raises(DomainError):
            power_for_rate(scenario, -1.0, 100.0)

    def test_non_positive_distance(self, scenario: Scenario) -> None:
        with pytest.raises(DomainError):
            inst_rate(scenario, 1.0, 0.0)


class TestLink:
    def test_inverse_gain_bounds(self, scenario: Scenario) -> None:
        link = uniform_link(scenario)
        assert link.g_min == pytest.approx(10.4)
        assert link.g_max == pytest.approx(25010.4)
        assert link.mean_inv_gain == pytest.approx(8343.7333333, rel=1e-10)

    def test_rate_power_agree_with_scenario_functions(self, scenario: Scenario) -> None:
        link = uniform_link(scenario)
        d = distance(scenario, link.grid.samples)
        np.testing.assert_allclose(
            link.power(5e6), power_for_rate(scenario, 5e6, d), rtol=1e-12
        )
        np.testing.assert_allclose(
            link.rate(np.full(d.shape, 300.0)),
            inst_rate(scenario, 300.0, d),
            rtol=1e-12,
        )

    def test_combined_resource(self, scenario: Scenario) -> None:
        link = uniform_link(scenario, bandwidth=2 * scenario.B, kappa=5.0)
        assert link.bandwidth == 40e6
        assert link.g_max == pytest.approx(50020.8)


class TestUnits:
    def test_dbm(self) -> None:
        assert dbm_to_mw(30.0) == pytest.approx(1000.0)
        assert mw_to_dbm(10000.0) == pytest.approx(40.0)
        assert mw_to_dbm(0.0) == float("-inf")
