from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("hsr-qos")
except PackageNotFoundError:
    # Package is not installed (e.g., during local development)
    __version__ = "unknown"

from hsr_qos.allocators import (  # noqa: E402
    Strategy,
    cia_profile,
    conditional_capacity,
    haa_profile,
    min_power_cia,
    min_power_fpa,
    min_power_haa,
    min_power_table,
    min_power_wfa,
    rdi_max,
    rds_max,
    wfa_profile,
)
from hsr_qos.region import (  # noqa: E402
    baseline_region,
    separate_schedule_region,
    simultaneous_region_two_channels,
    sweep_region,
)
from hsr_qos.scenario import (  # noqa: E402
    RatePair,
    Scenario,
    default_scenario,
    load_scenario,
    save_scenario,
)

__all__ = [
    "RatePair",
    "Scenario",
    "Strategy",
    "baseline_region",
    "cia_profile",
    "conditional_capacity",
    "default_scenario",
    "haa_profile",
    "load_scenario",
    "min_power_cia",
    "min_power_fpa",
    "min_power_haa",
    "min_power_table",
    "min_power_wfa",
    "rdi_max",
    "rds_max",
    "save_scenario",
    "separate_schedule_region",
    "simultaneous_region_two_channels",
    "sweep_region",
    "wfa_profile",
]
