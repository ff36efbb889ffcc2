"""Parameter model of one base-station cell along the railway.

A `Scenario` carries the cell geometry, the radio constants and the numerics
settings shared by every other module. It is immutable; scenario files are JSON
objects with exactly the lower-case field names of the model.
"""

import json
import logging
import os
from typing import Annotated, Iterable, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from hsr_qos import constants
from hsr_qos.errors import ScenarioError

logger = logging.getLogger(__name__)

Bps = Annotated[float, Field(ge=0, allow_inf_nan=False)]


class Scenario(BaseModel):
    """Cell geometry, radio constants and numerics settings.

    Powers are milliwatts, distances meters, rates bit/second. `kappa` is the
    gain-to-noise ratio G/σ0², so that SNR = kappa·p/d^alpha.
    """

    model_config = ConfigDict(
        frozen=True, extra="forbid", populate_by_name=True, allow_inf_nan=False
    )

    d0: float = Field(..., gt=0, description="Distance base station to railway, m")
    h0: float = Field(..., gt=0, description="Antenna height, m")
    L: float = Field(..., gt=0, alias="l", description="Half coverage length, m")
    v0: float = Field(..., gt=0, description="Mean train speed, m/s")
    alpha: float = Field(..., ge=1, description="Path-loss exponent")
    B: float = Field(..., gt=0, alias="b", description="Bandwidth, Hz")
    kappa: float = Field(..., gt=0, description="Gain-to-noise ratio, m^alpha/mW")
    panels: int = Field(..., ge=2, description="Quadrature panels, even")
    rate_tol: float = Field(..., gt=0, lt=1, description="Relative rate tolerance")
    power_tol: float = Field(..., gt=0, lt=1, description="Relative power tolerance")

    @field_validator("panels")
    @classmethod
    def _panels_even(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"panels must be even, got {value}")
        return value

    @property
    def half_window(self) -> float:
        """L/v0, seconds."""
        return self.L / self.v0

    def replace(self, **changes: float) -> "Scenario":
        """Validated copy with some fields changed (python names, e.g. `v0`)."""
        data = self.model_dump()
        data.update(changes)
        return build_scenario(**data)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


class RatePair(BaseModel):
    """Delay-insensitive and delay-sensitive rate, bit/second."""

    model_config = ConfigDict(frozen=True)

    r_di: Bps = 0.0
    r_ds: Bps = 0.0

    @classmethod
    def from_mbps(cls, r_di: float, r_ds: float) -> "RatePair":
        return cls(r_di=r_di * constants.MBPS, r_ds=r_ds * constants.MBPS)

    @property
    def total(self) -> float:
        return self.r_di + self.r_ds

    def as_mbps(self) -> tuple[float, float]:
        return self.r_di / constants.MBPS, self.r_ds / constants.MBPS


def _describe(error: ValidationError) -> str:
    parts = []
    for detail in error.errors():
        field = ".".join(str(loc) for loc in detail["loc"]) or "scenario"
        parts.append(f"{field}: {detail['msg']}")
    return "; ".join(parts)


def build_scenario(**fields: float) -> Scenario:
    """Construct a Scenario, raising ScenarioError on invalid input."""
    try:
        return Scenario(**fields)  # type: ignore[arg-type]
    except ValidationError as e:
        raise ScenarioError(f"Invalid scenario. {_describe(e)}") from e


def default_scenario() -> Scenario:
    """Reference cell used by the minimum-power table (kappa calibrated to 10)."""
    return Scenario(
        d0=2.0,
        h0=10.0,
        L=500.0,
        v0=100.0,
        alpha=2.0,
        B=20e6,
        kappa=10.0,
        panels=4096,
        rate_tol=1e-6,
        power_tol=1e-9,
    )


def load_scenario(path: str) -> Scenario:
    """Load and validate a scenario file.

    Args:
        path (str): JSON file with the fields d0, h0, l, v0, alpha, b, kappa,
            panels, rate_tol and power_tol.

    Returns:
        Scenario: validated, immutable scenario.

    Raises:
        ScenarioError: If the file is missing, does not parse, has unknown keys
            or a value breaks its bound (the message names the field).
    """
    if not os.path.exists(path):
        raise ScenarioError(f"The file {path} does not exist.")
    with open(path, encoding="utf-8") as f:
        text = f.read()
    try:
        scenario = Scenario.model_validate_json(text)
    except ValidationError as e:
        raise ScenarioError(f"Invalid scenario file {path}. {_describe(e)}") from e
    logger.info("Scenario loaded from %s", path)
    return scenario


def save_scenario(scenario: Scenario, path: str) -> str:
    """Write a scenario file readable by `load_scenario`.

    Returns:
        str: the path written.
    """
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(scenario.to_json())
        f.write("\n")
    return path


def resolve_scenario(path: Optional[str] = None) -> Scenario:
    """Scenario from an explicit path, else from HSR_QOS_SCENARIO, else default."""
    path = path or os.getenv(constants.SCENARIO_ENV)
    if path:
        return load_scenario(path)
    return default_scenario()


def scenario_digest(scenario: Scenario) -> str:
    """Canonical JSON used for hashing (sorted keys, no whitespace)."""
    return json.dumps(
        scenario.model_dump(by_alias=True), sort_keys=True, separators=(",", ":")
    )


def crossing_period(scenario: Scenario) -> float:
    """Time 2L/v0 the train needs to cross one cell, seconds."""
    return 2.0 * scenario.half_window


def classify_flows(
    scenario: Scenario, flows: Iterable[tuple[float, float]]
) -> RatePair:
    """Split flows into delay-insensitive and delay-sensitive sums.

    A flow whose tolerable delay covers one whole crossing period can be served
    at any time during the crossing; every other flow needs its rate at every
    instant.

    Args:
        scenario (Scenario): cell parameters, defining the crossing period.
        flows (Iterable[tuple[float, float]]): (rate bit/s, tolerable delay s).

    Returns:
        RatePair: summed rates.
    """
    period = crossing_period(scenario)
    r_di = 0.0
    r_ds = 0.0
    for rate, delay in flows:
        if rate < 0 or delay < 0:
            raise ScenarioError(
                f"Flow rate and delay must be non-negative, got ({rate}, {delay})"
            )
        if delay >= period:
            r_di += rate
        else:
            r_ds += rate
    return RatePair(r_di=r_di, r_ds=r_ds)
