import functools
import logging
import os
from typing import Any, Callable, Optional, TypeVar, cast, get_args

import click

from hsr_qos import __version__
from hsr_qos.allocators import Method, Strategy
from hsr_qos.api.main import run_server
from hsr_qos.channel import dbm_to_mw
from hsr_qos.constants import (
    ALGORITHM1_MAX_ITERATIONS,
    MARGIN_RATIOS,
    MBPS,
    SCENARIO_ENV,
    WORST_CASE_RATIOS,
)
from hsr_qos.errors import (
    DomainError,
    InfeasibleDemandError,
    NumericsError,
    ScenarioError,
    VelocityProfileError,
)
from hsr_qos.experiments.runner import ExperimentRunner
from hsr_qos.scenario import (
    RatePair,
    classify_flows,
    default_scenario,
    resolve_scenario,
    save_scenario,
)

logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_NUMERICS = 3
EXIT_INFEASIBLE = 4

F = TypeVar("F", bound=Callable[..., Any])


def exit_codes(func: F) -> F:
    """Turn library errors into the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (ScenarioError, VelocityProfileError, DomainError) as e:
            click.echo(f"Invalid input. {e}", err=True)
            raise SystemExit(EXIT_INVALID) from e
        except InfeasibleDemandError as e:
            click.echo(f"Infeasible demand. {e}", err=True)
            raise SystemExit(EXIT_INFEASIBLE) from e
        except NumericsError as e:
            click.echo(f"Solver failure. {e}", err=True)
            raise SystemExit(EXIT_NUMERICS) from e

    return wrapper  # type: ignore[return-value]


def parse_floats(value: str) -> list[float]:
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError as e:
        raise click.BadParameter(f"Expected numbers, got {value!r}") from e


def parse_strategies(value: str) -> list[Strategy]:
    if value.lower() == "all":
        return list(Strategy)
    try:
        return [Strategy(item.strip().upper()) for item in value.split(",")]
    except ValueError as e:
        raise click.BadParameter(f"Unknown strategy in {value!r}") from e


def parse_flow(value: str) -> tuple[float, float]:
    """RATE_MBPS:DELAY_S to (bit/s, s)."""
    try:
        rate, delay = value.split(":")
        return float(rate) * MBPS, float(delay)
    except ValueError as e:
        message = f"Flow must be RATE_MBPS:DELAY_S, got {value!r}"
        raise click.BadParameter(message) from e


def parse_demand(value: str) -> tuple[float, float]:
    """RDI_MBPS:RDS_MBPS to a pair of Mbps values."""
    try:
        r_di, r_ds = value.split(":")
        return float(r_di), float(r_ds)
    except ValueError as e:
        message = f"Demand must be RDI_MBPS:RDS_MBPS, got {value!r}"
        raise click.BadParameter(message) from e


scenario_option = click.option(
    "-s",
    "--scenario",
    "scenario_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="Scenario JSON file [default: $HSR_QOS_SCENARIO or built-in scenario]",
)
out_option = click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False),
    default=None,
    help="Output folder [default: $HSR_QOS_OUTPUT or ~/.hsr/qos/output]",
)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Power allocation and QoS rate regions of a high-speed railway link.

    Every command writes a CSV file and a `.manifest.json` sidecar.\n
    Exit codes: 2 invalid input, 3 solver failure, 4 infeasible demand.
    """
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


@main.command("region")
@scenario_option
@out_option
@click.option("--p0-dbm", type=float, default=30.0, help="Budget [default: 30]")
@click.option("--points", type=int, default=50, help="Boundary points [default: 50]")
@click.option(
    "--strategies",
    default="all",
    help="Comma-separated subset of haa,fpa,cia,wfa [default: all]",
)
@exit_codes
def region(
    scenario_path: Optional[str],
    out: Optional[str],
    p0_dbm: float = 30.0,
    points: int = 50,
    strategies: str = "all",
) -> None:
    """Rate-region boundaries of the allocation strategies.

    Args:
        scenario_path (str): scenario file
        out (str): output folder
        p0_dbm (float): average power budget, dBm
        points (int): number of r_ds points per boundary
        strategies (str): comma-separated strategies
    """
    chosen = parse_strategies(strategies)
    runner = ExperimentRunner(resolve_scenario(scenario_path), out)
    path = runner.region(p0_dbm=p0_dbm, points=points, strategies=chosen)
    click.echo(f"Region boundaries written to {path}")


@main.command("table1")
@scenario_option
@out_option
@click.option(
    "--demand",
    "demands",
    multiple=True,
    help="Row RDI_MBPS:RDS_MBPS, repeatable [default: the reference rows]",
)
@exit_codes
def table1(
    scenario_path: Optional[str], out: Optional[str], demands: tuple[str, ...] = ()
) -> None:
    """Minimum average power of FPA, WFA, CIA and HAA per demand row."""
    rows = [_demand(*parse_demand(d)) for d in demands] or None
    path = ExperimentRunner(resolve_scenario(scenario_path), out).table1(rows)
    click.echo(f"Minimum-power table written to {path}")


@main.command("minpower")
@scenario_option
@click.option("--rdi-mbps", type=float, default=0.0, help="Delay-insensitive rate")
@click.option("--rds-mbps", type=float, default=0.0, help="Delay-sensitive rate")
@click.option(
    "--flow",
    "flows",
    multiple=True,
    help="Extra flow RATE_MBPS:DELAY_S, classified by its tolerable delay",
)
@click.option(
    "--strategy",
    type=click.Choice([s.value for s in Strategy], case_sensitive=False),
    default=Strategy.HAA.value,
    help="Allocation strategy [default: HAA]",
)
@click.option(
    "--method",
    type=click.Choice(list(get_args(Method))),
    default="bisection",
    help="Dual solver of HAA [default: bisection]",
)
@click.option(
    "--max-iterations",
    type=int,
    default=ALGORITHM1_MAX_ITERATIONS,
    help=f"Step cap of the update schedules [default: {ALGORITHM1_MAX_ITERATIONS}]",
)
@click.option("--v0", type=float, default=None, help="Override the mean speed, m/s")
@click.option(
    "--budget-dbm",
    type=float,
    default=None,
    help="Available average power; exit 4 if the demand needs more",
)
@click.option(
    "--profile-out",
    type=click.Path(dir_okay=False),
    default=None,
    help="CSV file of the power profile (t_s, p_mw)",
)
@exit_codes
def minpower(
    scenario_path: Optional[str],
    rdi_mbps: float,
    rds_mbps: float,
    flows: tuple[str, ...],
    strategy: str,
    method: str,
    max_iterations: int,
    v0: Optional[float],
    budget_dbm: Optional[float],
    profile_out: Optional[str],
) -> None:
    """Minimum average transmit power supporting a demand."""
    scenario = resolve_scenario(scenario_path)
    if v0 is not None:
        scenario = scenario.replace(v0=v0)
    explicit = _demand(rdi_mbps, rds_mbps)
    classified = classify_flows(scenario, [parse_flow(f) for f in flows])
    demand = RatePair(
        r_di=explicit.r_di + classified.r_di,
        r_ds=explicit.r_ds + classified.r_ds,
    )
    folder, name = None, None
    if profile_out:
        folder = os.path.dirname(os.path.abspath(profile_out))
        name = os.path.splitext(os.path.basename(profile_out))[0]
    runner = ExperimentRunner(scenario, folder)
    outcome = runner.minpower(
        demand,
        Strategy(strategy.upper()),
        cast(Method, method),
        profile_name=name,
        max_iterations=max_iterations,
    )
    r_di, r_ds = demand.as_mbps()
    click.echo(f"Demand: r_di={r_di:g} Mbps, r_ds={r_ds:g} Mbps")
    click.echo(
        f"Minimum average power: {outcome.power_mw:.6g} mW "
        f"({outcome.power_dbm:.4g} dBm)"
    )
    click.echo(f"Energy per cell crossing: {outcome.energy_j:.6g} J")
    if outcome.profile_path:
        click.echo(f"Power profile written to {outcome.profile_path}")
    if budget_dbm is not None:
        budget = dbm_to_mw(budget_dbm)
        if outcome.power_mw > budget * (1.0 + scenario.power_tol):
            raise InfeasibleDemandError(
                f"Demand needs {outcome.power_mw:.6g} mW, budget is {budget:.6g} mW"
            )


@main.command("two-channel")
@scenario_option
@out_option
@click.option("--p0-dbm", type=float, default=40.0, help="Total budget [default: 40]")
@click.option("--points", type=int, default=50, help="Boundary points [default: 50]")
@click.option("--n-split", type=int, default=200, help="Power splits [default: 200]")
@exit_codes
def two_channel(
    scenario_path: Optional[str],
    out: Optional[str],
    p0_dbm: float,
    points: int,
    n_split: int,
) -> None:
    """Simultaneous and separate schedules on two sub-channels."""
    runner = ExperimentRunner(resolve_scenario(scenario_path), out)
    path, gain = runner.two_channel(p0_dbm=p0_dbm, points=points, n_split=n_split)
    click.echo(f"Throughput gain at r_ds=0: {100 * gain:.1f}%")
    click.echo(f"Two-channel frontiers written to {path}")


@main.command("nonuniform")
@scenario_option
@out_option
@click.option("--p0-dbm", type=float, default=40.0, help="Budget [default: 40]")
@click.option(
    "--ratios",
    default=",".join(f"{r:g}" for r in WORST_CASE_RATIOS),
    help="Comma-separated speed deviation ratios dv/v0",
)
@click.option("--points", type=int, default=50, help="Boundary points [default: 50]")
@exit_codes
def nonuniform(
    scenario_path: Optional[str],
    out: Optional[str],
    p0_dbm: float,
    ratios: str,
    points: int,
) -> None:
    """Worst-case rate regions under non-uniform motion."""
    runner = ExperimentRunner(resolve_scenario(scenario_path), out)
    path = runner.nonuniform(p0_dbm=p0_dbm, ratios=parse_floats(ratios), points=points)
    click.echo(f"Worst-case regions written to {path}")


@main.command("margin")
@scenario_option
@out_option
@click.option("--rdi-mbps", type=float, default=30.0, help="[default: 30]")
@click.option("--rds-mbps", type=float, default=10.0, help="[default: 10]")
@click.option(
    "--ratios",
    default=",".join(f"{r:g}" for r in MARGIN_RATIOS),
    help="Comma-separated speed deviation ratios dv/v0",
)
@exit_codes
def margin(
    scenario_path: Optional[str],
    out: Optional[str],
    rdi_mbps: float,
    rds_mbps: float,
    ratios: str,
) -> None:
    """Power margin of the worst-case speed realization."""
    runner = ExperimentRunner(resolve_scenario(scenario_path), out)
    demand = _demand(rdi_mbps, rds_mbps)
    path = runner.margin(demand, ratios=parse_floats(ratios))
    click.echo(f"Power margin written to {path}")


@main.command("dominance")
@scenario_option
@out_option
@click.option("--rdi-mbps", type=float, default=30.0, help="[default: 30]")
@click.option("--rds-mbps", type=float, default=10.0, help="[default: 10]")
@click.option("--ratio", type=float, default=0.05, help="dv/v0 [default: 0.05]")
@click.option("--seed", type=int, default=0, help="First seed [default: 0]")
@click.option("--samples", type=int, default=100, help="Realizations [default: 100]")
@exit_codes
def dominance(
    scenario_path: Optional[str],
    out: Optional[str],
    rdi_mbps: float,
    rds_mbps: float,
    ratio: float,
    seed: int,
    samples: int,
) -> None:
    """Check sampled speed realizations against the worst case."""
    runner = ExperimentRunner(resolve_scenario(scenario_path), out)
    path, holds = runner.dominance(
        _demand(rdi_mbps, rds_mbps), ratio=ratio, seed=seed, samples=samples
    )
    verdict = "holds" if holds else "VIOLATED"
    click.echo(f"Worst-case dominance {verdict} over {samples} samples")
    click.echo(f"Sampled powers written to {path}")


@main.command("write-scenario")
@click.argument("path", type=click.Path(dir_okay=False), default="scenario.json")
@exit_codes
def write_scenario(path: str = "scenario.json") -> None:
    """Write the built-in scenario as a JSON file to edit."""
    click.echo(f"Scenario written to {save_scenario(default_scenario(), path)}")


@main.command("run-api")
@click.option(
    "--host", "-h", default="0.0.0.0", help="API server host [default: 0.0.0.0]"
)
@click.option("--port", "-P", default=8000, help="API server port [default: 8000]")
@scenario_option
def run_api(
    host: str = "0.0.0.0",
    port: int = 8000,
    scenario_path: Optional[str] = None,
) -> None:
    """Run the API server.

    Args:
        host (str): API server host
        port (int): API server port
        scenario_path (str): scenario file served by the API
    """
    if scenario_path:
        # the API resolves its scenario from the environment
        os.environ[SCENARIO_ENV] = os.path.abspath(scenario_path)
    host_shown = "127.0.0.1" if host == "0.0.0.0" else host
    click.echo(f"API server running at http://{host_shown}:{port}/docs#/")
    run_server(host=host, port=port)


def _demand(rdi_mbps: float, rds_mbps: float) -> RatePair:
    if rdi_mbps < 0 or rds_mbps < 0:
        raise DomainError("Rates must be non-negative")
    return RatePair.from_mbps(rdi_mbps, rds_mbps)


if __name__ == "__main__":
    main()
