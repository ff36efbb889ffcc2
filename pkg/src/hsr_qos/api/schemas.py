from typing import Annotated, Optional

from pydantic import BaseModel, Field

from hsr_qos.allocators import Method, Strategy
from hsr_qos.constants import MARGIN_RATIOS


class Demand(BaseModel):
    r_di_mbps: Annotated[float, Field(ge=0, le=1e4)] = Field(
        0.0, description="Delay-insensitive rate, Mbit/s"
    )
    r_ds_mbps: Annotated[float, Field(ge=0, le=1e4)] = Field(
        0.0, description="Delay-sensitive rate, Mbit/s"
    )


class MinPowerQuery(Demand):
    strategy: Strategy = Field(Strategy.HAA, description="Allocation strategy")
    method: Method = Field(
        "bisection", description="Dual solver of the hybrid strategy"
    )


class MarginQuery(Demand):
    ratios: list[float] = Field(
        default_factory=lambda: list(MARGIN_RATIOS),
        description="Speed deviation ratios dv/v0 in [0, 1)",
    )


class MinPowerResult(BaseModel):
    strategy: Strategy = Field(..., description="Allocation strategy")
    r_di_mbps: float = Field(..., description="Demanded delay-insensitive rate")
    r_ds_mbps: float = Field(..., description="Demanded delay-sensitive rate")
    power_mw: float = Field(..., description="Minimum average power, mW")
    power_dbm: float = Field(..., description="Minimum average power, dBm")
    energy_j: float = Field(..., description="Energy of one cell crossing, J")
    water_level_mw: Optional[float] = Field(None, description="Water level, mW")


class Table1Row(BaseModel):
    r_di_mbps: float
    r_ds_mbps: float
    fpa_mw: float
    wfa_mw: float
    cia_mw: float
    haa_mw: float
    row_min: Strategy = Field(..., description="Cheapest strategy of the row")


class RegionQuery(BaseModel):
    p0_dbm: Annotated[float, Field(ge=-30, le=60)] = Field(
        30.0, description="Average power budget, dBm"
    )
    points: Annotated[int, Field(ge=2, le=500)] = Field(
        50, description="Number of boundary points"
    )
    strategy: Strategy = Field(Strategy.HAA, description="Allocation strategy")


class RegionPoint(BaseModel):
    r_ds_bps: float
    r_di_bps: float


class RegionResult(BaseModel):
    strategy: Strategy
    budget_mw: float = Field(..., description="Average power budget, mW")
    points: list[RegionPoint]


class MarginPoint(BaseModel):
    ratio: float = Field(..., description="Speed deviation over mean speed")
    normalized_power: float = Field(..., description="Worst case over uniform")
    db: float = Field(..., description="Normalized power, dB")
