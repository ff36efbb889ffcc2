"""Power allocation strategies, conditional capacity and minimum-power solvers.

Four strategies share one sampled `Link`:

* FPA: constant power over the crossing.
* CIA: channel inversion, constant instantaneous rate.
* WFA: water-filling, p(t) = max(w - g(t), 0).
* HAA: hybrid, p(t) = max(c·g(t), w - g(t)) with c = 2^(r_ds/B) - 1, a
  channel-inversion floor for the delay-sensitive rate plus water-filling
  for the delay-insensitive rest.

`g(t)` is the inverse channel gain d(t)^alpha/kappa (mW) and `w` the water
level B/lambda. Every dual variable is searched as a water level, which is
monotone in both average power and average rate.
"""

import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import Iterable, Literal, Optional

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from hsr_qos import constants, numerics
from hsr_qos.channel import Link, TimeGrid, snr_for_rate, uniform_link
from hsr_qos.errors import ConvergenceError, DomainError, InfeasibleDemandError
from hsr_qos.scenario import RatePair, Scenario, crossing_period

logger = logging.getLogger(__name__)

Method = Literal["bisection", "algorithm1", "algorithm1_literal"]


class Strategy(StrEnum):
    FPA = "FPA"
    CIA = "CIA"
    WFA = "WFA"
    HAA = "HAA"


# preference on ties of the minimum-power table
ROW_MIN_ORDER = (Strategy.HAA, Strategy.CIA, Strategy.WFA, Strategy.FPA)


@dataclass(frozen=True)
class PowerProfile:
    grid: TimeGrid
    p: NDArray[np.float64]
    avg_power: float
    water_level: Optional[float] = None

    @property
    def dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({"t_s": self.grid.samples, "p_mw": self.p})


@dataclass(frozen=True)
class AllocationResult:
    profile: PowerProfile
    achieved: RatePair
    strategy: Strategy

    @property
    def avg_power(self) -> float:
        return self.profile.avg_power


def _check_non_negative(**values: float) -> None:
    for name, value in values.items():
        if not np.isfinite(value) or value < 0:
            raise DomainError(f"{name} must be finite and non-negative, got {value}")


def _result(
    link: Link,
    p: NDArray[np.float64],
    r_ds: float,
    strategy: Strategy,
    water_level: Optional[float] = None,
) -> AllocationResult:
    r_di = link.average(link.rate(p)) - r_ds
    profile = PowerProfile(
        grid=link.grid, p=p, avg_power=link.average(p), water_level=water_level
    )
    return AllocationResult(
        profile=profile,
        achieved=RatePair(r_di=max(r_di, 0.0), r_ds=r_ds),
        strategy=strategy,
    )


def _hybrid_power(link: Link, c: float, w: float) -> NDArray[np.float64]:
    return np.maximum(c * link.inv_gain, w - link.inv_gain)


def _hybrid_rate(link: Link, c: float, w: float) -> float:
    """Average rate of the hybrid profile with floor `c` and level `w`."""
    snr_plus_one = np.maximum(1.0 + c, w / link.inv_gain)
    return link.average(link.bandwidth * np.log2(snr_plus_one))


###############################################################################
# Fixed-budget allocators
###############################################################################


def rds_max_on_link(link: Link, P0: float) -> float:
    return float(link.bandwidth * np.log2(1.0 + P0 / link.mean_inv_gain))


def cia_on_link(
    link: Link, r_ds: float, strategy: Strategy = Strategy.CIA
) -> AllocationResult:
    p = link.power(r_ds)
    profile = PowerProfile(grid=link.grid, p=p, avg_power=link.average(p))
    return AllocationResult(
        profile=profile, achieved=RatePair(r_di=0.0, r_ds=r_ds), strategy=strategy
    )


def haa_on_link(
    link: Link, r_ds: float, P0: float, strategy: Strategy = Strategy.HAA
) -> AllocationResult:
    """Hybrid profile spending exactly `P0` on average.

    Raises:
        InfeasibleDemandError: If `r_ds` exceeds the rate `P0` can hold.
    """
    _check_non_negative(r_ds=r_ds, P0=P0)
    r_max = rds_max_on_link(link, P0)
    if r_ds > r_max * (1.0 + link.rate_tol):
        raise InfeasibleDemandError(
            f"Delay-sensitive rate {r_ds:.6g} bit/s exceeds {r_max:.6g} bit/s "
            f"supported by {P0:.6g} mW"
        )
    # inside the tolerance band the floor alone must not exceed P0
    r_ds = min(r_ds, r_max)
    c = snr_for_rate(r_ds, link.bandwidth)
    p_floor = c * link.mean_inv_gain
    if P0 <= p_floor * (1.0 + link.power_tol):
        # no power left above the floor
        return cia_on_link(link, r_ds, strategy)

    def excess_power(w: float) -> float:
        return link.average(_hybrid_power(link, c, w)) - P0

    lo = (1.0 + c) * link.g_min
    lo, hi = numerics.expand_bracket(excess_power, lo, 2.0 * lo)
    w = numerics.solve_monotone(excess_power, lo, hi, link.solver_tol)
    logger.debug("Water level %.9g mW for r_ds=%.6g, P0=%.6g", w, r_ds, P0)
    return _result(link, _hybrid_power(link, c, w), r_ds, strategy, w)


def conditional_capacity_on_link(link: Link, r_ds: float, P0: float) -> float:
    return haa_on_link(link, r_ds, P0).achieved.r_di


def rdi_max_on_link(link: Link, P0: float) -> float:
    return haa_on_link(link, 0.0, P0, Strategy.WFA).achieved.r_di


def rds_max(s: Scenario, P0: float) -> float:
    """Largest constant rate an average budget `P0` (mW) holds, bit/s."""
    _check_non_negative(P0=P0)
    return rds_max_on_link(uniform_link(s), P0)


def cia_profile(s: Scenario, r_ds: float) -> AllocationResult:
    """Channel inversion holding `r_ds` bit/s at every instant."""
    _check_non_negative(r_ds=r_ds)
    return cia_on_link(uniform_link(s), r_ds)


def wfa_profile(s: Scenario, P0: float) -> AllocationResult:
    """Water-filling at average budget `P0`; the ergodic-rate optimum."""
    return haa_on_link(uniform_link(s), 0.0, P0, Strategy.WFA)


def haa_profile(s: Scenario, r_ds: float, P0: float) -> AllocationResult:
    """Hybrid allocation holding `r_ds` and maximizing the delay-insensitive rate.

    Args:
        s (Scenario): cell parameters.
        r_ds (float): delay-sensitive rate, bit/s.
        P0 (float): average power budget, mW.

    Returns:
        AllocationResult: profile with average power `P0`, achieved
            (conditional capacity, r_ds).

    Raises:
        InfeasibleDemandError: If `r_ds` is above `rds_max(s, P0)`.
    """
    return haa_on_link(uniform_link(s), r_ds, P0)


def conditional_capacity(s: Scenario, r_ds: float, P0: float) -> float:
    """Largest average delay-insensitive rate next to a guaranteed `r_ds`."""
    return haa_profile(s, r_ds, P0).achieved.r_di


def rdi_max(s: Scenario, P0: float) -> float:
    """Ergodic rate of water-filling at `P0`; 0 for an empty budget."""
    return wfa_profile(s, P0).achieved.r_di


###############################################################################
# Minimum power
###############################################################################


def _haa_algorithm1(
    link: Link,
    demand: RatePair,
    c: float,
    max_iterations: int,
    threshold: float,
    on_multiplier: bool = False,
) -> float:
    """Water level found by the multiplicative update schedule.

    The schedule starts where the water touches the channel-inversion floor
    and stops once the delay-insensitive rate is within `threshold`.

    With `on_multiplier` the steps act on the Lagrange multiplier
    lambda = B/w: lambda is divided by 1.1 while the rate
    overshoots and multiplied by 1.07 otherwise. Dividing lambda raises the
    level, so an overshoot grows and a shortfall is never closed; from the
    floor the rate stays at r_ds and the schedule always ends in
    ConvergenceError.

    By default the same factors act on the level itself (w / 1.1 on
    overshoot, w * 1.07 otherwise), which reverses the direction of every
    step and converges.
    """
    w = (1.0 + c) * link.g_min
    residual = float("inf")
    for iteration in range(max_iterations):
        residual = _hybrid_rate(link, c, w) - demand.r_ds - demand.r_di
        if abs(residual) < threshold:
            logger.debug("Update schedule converged after %d steps", iteration)
            return w
        if on_multiplier:
            w = w * 1.1 if residual > 0 else w / 1.07
        else:
            w = w / 1.1 if residual > 0 else w * 1.07
    logger.warning(
        "Update schedule did not converge after %d steps, residual %.6g bit/s",
        max_iterations,
        residual,
    )
    raise ConvergenceError(
        f"Multiplicative update did not reach {threshold:g} bit/s "
        f"within {max_iterations} steps (residual {residual:.6g} bit/s)",
        iterations=max_iterations,
        residual=residual,
    )


def min_power_haa_on_link(
    link: Link,
    demand: RatePair,
    method: Method = "bisection",
    max_iterations: int = constants.ALGORITHM1_MAX_ITERATIONS,
    threshold: float = constants.ALGORITHM1_RATE_THRESHOLD,
) -> AllocationResult:
    c = snr_for_rate(demand.r_ds, link.bandwidth)
    if demand.r_di == 0:
        return cia_on_link(link, demand.r_ds, Strategy.HAA)

    if method in ("algorithm1", "algorithm1_literal"):
        on_multiplier = method == "algorithm1_literal"
        w = _haa_algorithm1(link, demand, c, max_iterations, threshold, on_multiplier)
    elif method == "bisection":

        def rate_gap(level: float) -> float:
            return _hybrid_rate(link, c, level) - demand.r_ds - demand.r_di

        lo = (1.0 + c) * link.g_min
        lo, hi = numerics.expand_bracket(rate_gap, lo, 2.0 * lo)
        w = numerics.solve_monotone(rate_gap, lo, hi, link.solver_tol)
    else:
        raise DomainError(f"Unknown method {method!r}")
    return _result(link, _hybrid_power(link, c, w), demand.r_ds, Strategy.HAA, w)


def min_power_wfa_on_link(link: Link, demand: RatePair) -> AllocationResult:
    """Cheapest water-filling profile meeting the minimum and average rate."""
    total = demand.total
    if total == 0:
        return cia_on_link(link, 0.0, Strategy.WFA)
    w_edge = 0.0
    if demand.r_ds > 0:
        # weakest instant must carry r_ds
        w_edge = link.g_max * (1.0 + snr_for_rate(demand.r_ds, link.bandwidth))

    def rate_gap(level: float) -> float:
        return _hybrid_rate(link, 0.0, level) - total

    lo, hi = numerics.expand_bracket(rate_gap, link.g_min, 2.0 * link.g_min)
    w_avg = numerics.solve_monotone(rate_gap, lo, hi, link.solver_tol)
    w = max(w_edge, w_avg)
    return _result(link, _hybrid_power(link, 0.0, w), demand.r_ds, Strategy.WFA, w)


def min_power_fpa_on_link(link: Link, demand: RatePair) -> AllocationResult:
    """Cheapest constant power meeting the minimum and average rate."""
    total = demand.total
    p_edge = link.g_max * snr_for_rate(demand.r_ds, link.bandwidth)
    p_avg = 0.0
    if total > 0:

        def rate_gap(p: float) -> float:
            return link.average(link.rate(np.full_like(link.inv_gain, p))) - total

        start = link.g_min * snr_for_rate(total, link.bandwidth)
        lo, hi = numerics.expand_bracket(rate_gap, 0.0, start)
        p_avg = numerics.solve_monotone(rate_gap, lo, hi, link.solver_tol)
    p = np.full_like(link.inv_gain, max(p_edge, p_avg))
    return _result(link, p, demand.r_ds, Strategy.FPA)


def min_power_cia_on_link(link: Link, demand: RatePair) -> AllocationResult:
    """Channel inversion at the summed rate, all traffic as delay-sensitive."""
    return cia_on_link(link, demand.total)


def allocate_min_power_on_link(
    link: Link,
    demand: RatePair,
    strategy: Strategy = Strategy.HAA,
    method: Method = "bisection",
    max_iterations: int = constants.ALGORITHM1_MAX_ITERATIONS,
) -> AllocationResult:
    if strategy == Strategy.HAA:
        return min_power_haa_on_link(link, demand, method, max_iterations)
    if strategy == Strategy.WFA:
        return min_power_wfa_on_link(link, demand)
    if strategy == Strategy.FPA:
        return min_power_fpa_on_link(link, demand)
    return min_power_cia_on_link(link, demand)


def allocate_min_power(
    s: Scenario,
    demand: RatePair,
    strategy: Strategy = Strategy.HAA,
    method: Method = "bisection",
    max_iterations: int = constants.ALGORITHM1_MAX_ITERATIONS,
) -> AllocationResult:
    """Minimum-power profile of `strategy` supporting `demand`."""
    return allocate_min_power_on_link(
        uniform_link(s), demand, strategy, method, max_iterations
    )


def min_power_haa(
    s: Scenario,
    demand: RatePair,
    method: Method = "bisection",
    max_iterations: int = constants.ALGORITHM1_MAX_ITERATIONS,
) -> AllocationResult:
    """Minimum average power supporting `demand` under hybrid allocation.

    Args:
        s (Scenario): cell parameters.
        demand (RatePair): delay-insensitive and delay-sensitive rate, bit/s.
        method (Method): "bisection" (default) searches the water level on the
            monotone average-rate map; "algorithm1" runs the multiplicative
            update schedule on the water level with a 0.001 Mbps stopping
            rule; "algorithm1_literal" applies the same steps to the
            multiplier B/w and does not converge.
        max_iterations (int): cap of the "algorithm1" schedule.

    Returns:
        AllocationResult: profile of minimum average power.

    Raises:
        ConvergenceError: If an update schedule does not stop within
            `max_iterations`; always for "algorithm1_literal".
    """
    return min_power_haa_on_link(uniform_link(s), demand, method, max_iterations)


def min_power_fpa(s: Scenario, demand: RatePair) -> float:
    return min_power_fpa_on_link(uniform_link(s), demand).avg_power


def min_power_wfa(s: Scenario, demand: RatePair) -> float:
    return min_power_wfa_on_link(uniform_link(s), demand).avg_power


def min_power_cia(s: Scenario, demand: RatePair) -> float:
    return min_power_cia_on_link(uniform_link(s), demand).avg_power


def row_minimum(powers: dict[Strategy, float], rel_tol: float) -> Strategy:
    """Cheapest strategy; ties within `rel_tol` go to the earlier of ROW_MIN_ORDER."""
    lowest = min(powers.values())
    for strategy in ROW_MIN_ORDER:
        if powers[strategy] <= lowest + rel_tol * abs(lowest):
            return strategy
    raise ValueError("Empty power row")  # unreachable for a full row


def min_power_table(s: Scenario, demands: Iterable[RatePair]) -> pd.DataFrame:
    """Minimum average power (mW) of the four strategies for each demand.

    Returns:
        pd.DataFrame: columns r_di_mbps, r_ds_mbps, fpa_mw, wfa_mw, cia_mw,
            haa_mw and row_min, the cheapest strategy.
    """
    link = uniform_link(s)
    rows = []
    for demand in demands:
        powers = {
            Strategy.FPA: min_power_fpa_on_link(link, demand).avg_power,
            Strategy.WFA: min_power_wfa_on_link(link, demand).avg_power,
            Strategy.CIA: min_power_cia_on_link(link, demand).avg_power,
            Strategy.HAA: min_power_haa_on_link(link, demand).avg_power,
        }
        r_di, r_ds = demand.as_mbps()
        rows.append(
            {
                "r_di_mbps": r_di,
                "r_ds_mbps": r_ds,
                "fpa_mw": powers[Strategy.FPA],
                "wfa_mw": powers[Strategy.WFA],
                "cia_mw": powers[Strategy.CIA],
                "haa_mw": powers[Strategy.HAA],
                "row_min": str(
                    row_minimum(powers, max(link.power_tol, link.rate_tol))
                ),
            }
        )
    logger.info("Minimum-power table computed for %d demands", len(rows))
    return pd.DataFrame(rows)


def crossing_energy(s: Scenario, power_mw: float) -> float:
    """Energy in joules spent at average power `power_mw` during one crossing."""
    return power_mw * 1e-3 * crossing_period(s)
