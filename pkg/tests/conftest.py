import os

import pytest

from hsr_qos.scenario import Scenario, default_scenario, load_scenario

TEST_DATA_FOLDER = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def scenario() -> Scenario:
    return default_scenario()


@pytest.fixture(scope="session")
def coarse_scenario() -> Scenario:
    """Default cell on 512 panels, for tests that only check structure."""
    return default_scenario().replace(panels=512)


@pytest.fixture()
def scenario_file() -> str:
    return os.path.join(TEST_DATA_FOLDER, "scenario.json")


@pytest.fixture()
def file_scenario(scenario_file: str) -> Scenario:
    return load_scenario(scenario_file)
