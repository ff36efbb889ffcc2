import json
import os

import pytest
from pydantic import ValidationError

from hsr_qos.constants import SCENARIO_ENV
from hsr_qos.errors import ScenarioError
from hsr_qos.scenario import (
    RatePair,
    Scenario,
    build_scenario,
    classify_flows,
    crossing_period,
    load_scenario,
    resolve_scenario,
    save_scenario,
    scenario_digest,
)

TEST_DATA_FOLDER = os.path.join(os.path.dirname(__file__), "data")


class TestLoad:
    def test_file_matches_default(self, scenario: Scenario, scenario_file: str) -> None:
        assert load_scenario(scenario_file) == scenario

    def test_save_load_identity(self, scenario: Scenario, tmp_path) -> None:
        path = save_scenario(scenario, str(tmp_path / "cell.json"))
        assert load_scenario(path) == scenario

    def test_file_uses_lower_case_keys(self, scenario: Scenario, tmp_path) -> None:
        path = save_scenario(scenario, str(tmp_path / "cell.json"))
        with open(path) as f:
            keys = set(json.load(f))
        assert {"l", "b"} <= keys
        assert "L" not in keys

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(ScenarioError, match="does not exist"):
            load_scenario(str(tmp_path / "missing.json"))

    def test_zero_length_names_field(self) -> None:
        path = os.path.join(TEST_DATA_FOLDER, "invalid_length.json")
        with pytest.raises(ScenarioError) as e:
            load_scenario(path)
        assert "l:" in str(e.value)
        assert "greater than 0" in str(e.value)

    def test_unknown_key(self, scenario: Scenario, tmp_path) -> None:
        data = json.loads(scenario.to_json())
        data["speed"] = 3.0
        path = tmp_path / "cell.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ScenarioError, match="speed"):
            load_scenario(str(path))

    def test_resolve_from_environment(
        self, scenario_file: str, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setenv(SCENARIO_ENV, scenario_file)
        assert resolve_scenario().L == 500.0

    def test_resolve_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv(SCENARIO_ENV, raising=False)
        assert resolve_scenario().kappa == 10.0


class TestValidation:
    def test_odd_panels(self) -> None:
        with pytest.raises(ScenarioError, match="even"):
            build_scenario(
                d0=2, h0=10, L=500, v0=100, alpha=2, B=20e6, kappa=10,
                panels=11, rate_tol=1e-6, power_tol=1e-9,
            )  # fmt: skip

    def test_replace_is_validated(self, scenario: Scenario) -> None:
        assert scenario.replace(v0=50.0).v0 == 50.0
        with pytest.raises(ScenarioError, match="v0"):
            scenario.replace(v0=-1.0)

    def test_frozen(self, scenario: Scenario) -> None:
        with pytest.raises(ValidationError):
            scenario.v0 = 10.0  # type: ignore[misc]

    def test_digest_is_canonical(self, scenario: Scenario) -> None:
        digest = scenario_digest(scenario)
        assert digest == scenario_digest(scenario.replace(v0=100.0))
        assert digest != scenario_digest(scenario.replace(v0=50.0))
        assert " " not in digest


class TestFlows:
    def test_crossing_period(self, scenario: Scenario) -> None:
        assert crossing_period(scenario) == pytest.approx(10.0)

    def test_classify_by_delay(self, scenario: Scenario) -> None:
        flows = [(5e6, 0.1), (3e6, 10.0), (2e6, 60.0), (1e6, 9.99)]
        demand = classify_flows(scenario, flows)
        assert demand.r_di == pytest.approx(5e6)
        assert demand.r_ds == pytest.approx(6e6)

    def test_negative_flow(self, scenario: Scenario) -> None:
        with pytest.raises(ScenarioError):
            classify_flows(scenario, [(-1.0, 1.0)])

    def test_empty(self, scenario: Scenario) -> None:
        assert classify_flows(scenario, []) == RatePair()


class TestRatePair:
    def test_from_mbps(self) -> None:
        demand = RatePair.from_mbps(15, 5)
        assert demand.r_di == 15e6
        assert demand.r_ds == 5e6
        assert demand.total == 20e6
        assert demand.as_mbps() == (15.0, 5.0)

    def test_negative_rate(self) -> None:
        with pytest.raises(ValidationError):
            RatePair(r_di=-1.0)
