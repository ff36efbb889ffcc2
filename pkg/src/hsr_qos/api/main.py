import logging
import math
from http import HTTPStatus
from typing import Annotated

import uvicorn
from fastapi import Depends, FastAPI, HTTPException, Query, status
from fastapi.middleware.cors import CORSMiddleware

from hsr_qos import __version__
from hsr_qos.allocators import (
    Strategy,
    allocate_min_power,
    crossing_energy,
    min_power_table,
)
from hsr_qos.api import schemas
from hsr_qos.api.tags import Tag
from hsr_qos.channel import dbm_to_mw, mw_to_dbm
from hsr_qos.errors import (
    DomainError,
    InfeasibleDemandError,
    QosError,
    ScenarioError,
    VelocityProfileError,
)
from hsr_qos.experiments.runner import table1_demands
from hsr_qos.nonuniform import power_margin_curve
from hsr_qos.region import baseline_region, sweep_region
from hsr_qos.scenario import RatePair, Scenario, resolve_scenario

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


def get_scenario() -> Scenario:
    """Scenario of the file in HSR_QOS_SCENARIO, else the default one."""
    try:
        return resolve_scenario()
    except ScenarioError as e:
        logger.error(f"Error loading scenario: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Error loading scenario. {e}",
        ) from e


description = """A RESTful API for QoS-aware power allocation on high-speed railways."""

app = FastAPI(
    title="RESTful API for HSR QoS",
    description=description,
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # Allows all origins
    allow_credentials=True,
    allow_methods=["*"],  # Allows all methods
    allow_headers=["*"],  # Allows all headers
)


def run_server(host: str = "0.0.0.0", port: int = 8000) -> None:
    uvicorn.run(
        app="hsr_qos.api.main:app",
        host=host,
        port=port,
        log_level="warning",
    )


def to_http_error(e: QosError) -> HTTPException:
    """422 for requests the model cannot serve, 500 for solver failures."""
    if isinstance(
        e, (ScenarioError, InfeasibleDemandError, VelocityProfileError, DomainError)
    ):
        return HTTPException(
            status_code=HTTPStatus.UNPROCESSABLE_ENTITY, detail=str(e)
        )
    logger.error(f"Solver failure: {e}")
    return HTTPException(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        detail=f"Solver failure. {e}",
    )


@app.get("/")
def root() -> dict[str, str]:
    return {"msg": "Running!"}


###############################################################################
# Scenario
###############################################################################


@app.get("/scenario/", response_model=Scenario, tags=[Tag.SCENARIO])
async def get_active_scenario(scenario: Scenario = Depends(get_scenario)) -> Scenario:
    """Returns the scenario all computations run on."""
    return scenario


###############################################################################
# Minimum Power
###############################################################################


@app.get("/min_power/", response_model=schemas.MinPowerResult, tags=[Tag.POWER])
async def get_min_power(
    query: Annotated[schemas.MinPowerQuery, Query()],
    scenario: Scenario = Depends(get_scenario),
) -> schemas.MinPowerResult:
    """
    Minimum average transmit power supporting the demanded rates.
    """
    demand = RatePair.from_mbps(query.r_di_mbps, query.r_ds_mbps)
    try:
        result = allocate_min_power(scenario, demand, query.strategy, query.method)
    except QosError as e:
        raise to_http_error(e) from e
    return schemas.MinPowerResult(
        strategy=query.strategy,
        r_di_mbps=query.r_di_mbps,
        r_ds_mbps=query.r_ds_mbps,
        power_mw=result.avg_power,
        power_dbm=mw_to_dbm(result.avg_power),
        energy_j=crossing_energy(scenario, result.avg_power),
        water_level_mw=result.profile.water_level,
    )


@app.get("/table1/", response_model=list[schemas.Table1Row], tags=[Tag.POWER])
async def get_table1(
    scenario: Scenario = Depends(get_scenario),
) -> list[schemas.Table1Row]:
    """
    Minimum average power of the four strategies for the reference demands.
    """
    try:
        df = min_power_table(scenario, table1_demands())
    except QosError as e:
        raise to_http_error(e) from e
    return [schemas.Table1Row(**row) for row in df.to_dict(orient="records")]


###############################################################################
# Rate Region
###############################################################################


@app.get("/region/", response_model=schemas.RegionResult, tags=[Tag.REGION])
async def get_region(
    query: Annotated[schemas.RegionQuery, Query()],
    scenario: Scenario = Depends(get_scenario),
) -> schemas.RegionResult:
    """
    Boundary of the achievable (r_ds, r_di) region of one strategy.
    """
    P0 = dbm_to_mw(query.p0_dbm)
    try:
        if query.strategy == Strategy.HAA:
            boundary = sweep_region(scenario, P0, query.points)
        else:
            boundary = baseline_region(scenario, P0, query.strategy, query.points)
    except QosError as e:
        raise to_http_error(e) from e
    return schemas.RegionResult(
        strategy=query.strategy,
        budget_mw=P0,
        points=[
            schemas.RegionPoint(r_ds_bps=r_ds, r_di_bps=r_di)
            for r_ds, r_di in boundary.points
        ],
    )


@app.get("/margin/", response_model=list[schemas.MarginPoint], tags=[Tag.REGION])
async def get_margin(
    query: Annotated[schemas.MarginQuery, Query()],
    scenario: Scenario = Depends(get_scenario),
) -> list[schemas.MarginPoint]:
    """
    Worst-case minimum power over the uniform-motion one, per ratio.
    """
    rates = RatePair.from_mbps(query.r_di_mbps, query.r_ds_mbps)
    try:
        curve = power_margin_curve(scenario, rates, query.ratios)
    except QosError as e:
        raise to_http_error(e) from e
    return [
        schemas.MarginPoint(
            ratio=ratio, normalized_power=value, db=10.0 * math.log10(value)
        )
        for ratio, value in curve
    ]
