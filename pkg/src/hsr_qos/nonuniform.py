"""Non-uniform train motion.

An admissible speed realization stays within [v0 - dv, v0 + dv] at every
instant and averages to v0 over the crossing window [-L/v0, L/v0], so the
train still covers 2L. The two-valued worst case runs fast in the middle half
of the window and slow in the outer quarters. It spends the least time close
to the base station, so no admissible realization needs more power.
"""

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Iterable

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from tqdm import tqdm

from hsr_qos import constants
from hsr_qos.allocators import (
    conditional_capacity_on_link,
    min_power_haa_on_link,
    rds_max_on_link,
)
from hsr_qos.channel import (
    Link,
    TimeGrid,
    link_from_distance,
    time_grid,
    uniform_link,
)
from hsr_qos.errors import DomainError, VelocityProfileError
from hsr_qos.region import RateRegionBoundary, rds_grid
from hsr_qos.scenario import RatePair, Scenario

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

MEAN_TOLERANCE = 1e-9
DEFAULT_SEGMENTS = 16
_MAX_RESCALE_STEPS = 1000


class VelocityKind(StrEnum):
    UNIFORM = "uniform"
    WORST_CASE = "worst_case"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class VelocityProfile:
    """Piecewise-constant speed: `speeds[i]` holds on [times[i], times[i+1]]."""

    kind: VelocityKind
    v0: float
    delta_v: float
    times: Array
    speeds: Array

    def speed(self, t: ArrayLike) -> Array:
        index = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right")
        return self.speeds[np.clip(index - 1, 0, self.speeds.size - 1)]

    @property
    def mean_speed(self) -> float:
        durations = np.diff(self.times)
        return float(np.sum(self.speeds * durations) / durations.sum())


@dataclass(frozen=True)
class VelocityCheck:
    passed: bool
    bound_excess: float
    mean_error: float
    messages: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class DominanceReport:
    """Required powers of sampled realizations next to the worst case."""

    delta_v: float
    demand: RatePair
    worst_power: float
    seeds: list[int]
    sampled_powers: Array

    def holds(self, rel_tol: float = 1e-6) -> bool:
        return bool(np.all(self.sampled_powers <= self.worst_power * (1.0 + rel_tol)))

    @property
    def dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "seed": self.seeds,
                "p_mw": self.sampled_powers,
                "worst_case_mw": self.worst_power,
            }
        )


def uniform_velocity(s: Scenario) -> VelocityProfile:
    half = s.half_window
    return VelocityProfile(
        kind=VelocityKind.UNIFORM,
        v0=s.v0,
        delta_v=0.0,
        times=np.array([-half, half]),
        speeds=np.array([s.v0]),
    )


def _check_delta_v(s: Scenario, delta_v: float) -> None:
    if not 0 <= delta_v < s.v0:
        raise VelocityProfileError(
            f"Speed deviation must lie in [0, {s.v0:g}) m/s, got {delta_v:g}"
        )


def worst_case_velocity(s: Scenario, delta_v: float) -> VelocityProfile:
    """Fast (v0 + dv) on the middle half of the window, slow elsewhere."""
    _check_delta_v(s, delta_v)
    if delta_v == 0:
        return uniform_velocity(s)
    half = s.half_window
    slow, fast = s.v0 - delta_v, s.v0 + delta_v
    return VelocityProfile(
        kind=VelocityKind.WORST_CASE,
        v0=s.v0,
        delta_v=delta_v,
        times=np.array([-half, -half / 2, half / 2, half]),
        speeds=np.array([slow, fast, slow]),
    )


def position(s: Scenario, vp: VelocityProfile, t: ArrayLike) -> Array:
    """Signed along-track coordinate (m) from the cell center at time `t`."""
    times = np.asarray(t, dtype=float)
    if np.any(np.abs(times) > s.half_window * (1.0 + 1e-12)):
        raise DomainError("Time outside the cell window")
    travelled = np.concatenate(([0.0], np.cumsum(vp.speeds * np.diff(vp.times))))
    # exact: position is linear between breakpoints
    return -s.L + np.interp(times, vp.times, travelled)


def distance_profile(s: Scenario, vp: VelocityProfile, t: ArrayLike) -> Array:
    return np.sqrt(s.d0**2 + s.h0**2 + position(s, vp, t) ** 2)


def worst_case_distance(s: Scenario, delta_v: float, t: ArrayLike) -> Array:
    """Closed-form worst-case distance on the half window [0, L/v0].

    Up to L/(2v0) the train moves at v0 + dv from the center, afterwards at
    v0 - dv, reaching L at the window end.
    """
    times = np.asarray(t, dtype=float)
    inner = (s.v0 + delta_v) * times
    outer = (s.v0 - delta_v) * times + delta_v * s.L / s.v0
    along = np.where(times <= s.half_window / 2, inner, outer)
    return np.sqrt(s.d0**2 + s.h0**2 + along**2)


def half_window_panels(panels: int) -> int:
    """Panels on [0, L/v0]: panels/2 rounded up to a multiple of 4.

    The speed switch at L/(2v0) then sits on an even node, the end of a
    Simpson pair, so each smooth piece is integrated on its own.
    """
    return max(4, -(-(panels // 2) // 4) * 4)


def _half_window_grid(s: Scenario) -> TimeGrid:
    panels = half_window_panels(s.panels)
    half = s.half_window
    samples = np.linspace(0.0, half, panels + 1)
    return TimeGrid(t_start=0.0, t_end=half, samples=samples)


def worst_case_link(s: Scenario, delta_v: float) -> Link:
    """Worst-case link on the half window; the profile is even in t."""
    _check_delta_v(s, delta_v)
    if delta_v == 0:
        return uniform_link(s)
    grid = _half_window_grid(s)
    return link_from_distance(s, grid, worst_case_distance(s, delta_v, grid.samples))


def velocity_link(s: Scenario, vp: VelocityProfile) -> Link:
    """Link seen along the realization `vp`.

    Raises:
        VelocityProfileError: If `vp` is not admissible.
    """
    check = validate_velocity(s, vp)
    if not check.passed:
        raise VelocityProfileError("; ".join(check.messages))
    if vp.kind == VelocityKind.UNIFORM:
        return uniform_link(s)
    if vp.kind == VelocityKind.WORST_CASE:
        return worst_case_link(s, vp.delta_v)
    grid = time_grid(s)
    return link_from_distance(s, grid, distance_profile(s, vp, grid.samples))


def validate_velocity(s: Scenario, vp: VelocityProfile) -> VelocityCheck:
    """Check the speed bound and the mean-speed constraint of `vp`.

    Returns:
        VelocityCheck: `passed` plus the bound excess (m/s), the relative mean
            error and a message per failed constraint.
    """
    messages: list[str] = []
    half = s.half_window
    if vp.times.size != vp.speeds.size + 1 or vp.speeds.size == 0:
        return VelocityCheck(
            False, float("nan"), float("nan"), ["times must have one more entry"]
        )
    if np.any(np.diff(vp.times) <= 0):
        messages.append("times must be strictly increasing")
    if not (
        np.isclose(vp.times[0], -half, rtol=1e-12, atol=0)
        and np.isclose(vp.times[-1], half, rtol=1e-12, atol=0)
    ):
        messages.append(f"times must span [-{half:g}, {half:g}] s")
    if messages:
        return VelocityCheck(False, float("nan"), float("nan"), messages)

    lo, hi = s.v0 - vp.delta_v, s.v0 + vp.delta_v
    slack = 1e-12 * s.v0
    excess = float(max(np.max(vp.speeds - hi), np.max(lo - vp.speeds), 0.0))
    if excess > slack:
        messages.append(f"speed leaves [{lo:g}, {hi:g}] m/s by {excess:.6g} m/s")
    mean_error = abs(vp.mean_speed - s.v0) / s.v0
    if mean_error > MEAN_TOLERANCE:
        messages.append(
            f"mean speed {vp.mean_speed:.9g} m/s differs from {s.v0:g} m/s "
            f"by {mean_error:.3g} relative"
        )
    return VelocityCheck(not messages, excess, mean_error, messages)


def sample_admissible_velocity(
    s: Scenario, delta_v: float, seed: int, segments: int = DEFAULT_SEGMENTS
) -> VelocityProfile:
    """Random admissible piecewise-constant realization, reproducible from `seed`.

    Speeds of `segments` equal segments are drawn uniformly from the admissible
    band, then rescaled to mean v0 and clipped back into the band until the
    mean holds to 1e-10. Falls back to uniform motion if that fails.
    """
    _check_delta_v(s, delta_v)
    if delta_v == 0:
        return uniform_velocity(s)
    lo, hi = s.v0 - delta_v, s.v0 + delta_v
    rng = np.random.default_rng(seed)
    speeds = rng.uniform(lo, hi, size=segments)
    for _ in range(_MAX_RESCALE_STEPS):
        mean = speeds.mean()
        if abs(mean - s.v0) <= MEAN_TOLERANCE * s.v0 / 10:
            break
        speeds = np.clip(speeds * (s.v0 / mean), lo, hi)
    else:
        logger.warning("Sampler fell back to uniform motion for seed %d", seed)
        return uniform_velocity(s)
    half = s.half_window
    return VelocityProfile(
        kind=VelocityKind.SAMPLED,
        v0=s.v0,
        delta_v=delta_v,
        times=np.linspace(-half, half, segments + 1),
        speeds=speeds,
    )


def rds_max_worst(s: Scenario, delta_v: float, P0: float) -> float:
    return rds_max_on_link(worst_case_link(s, delta_v), P0)


def conditional_capacity_worst(
    s: Scenario, delta_v: float, r_ds: float, P0: float
) -> float:
    """Conditional capacity along the worst-case realization.

    Raises:
        InfeasibleDemandError: If `r_ds` exceeds `rds_max_worst`.
    """
    return conditional_capacity_on_link(worst_case_link(s, delta_v), r_ds, P0)


def worst_case_region(
    s: Scenario, delta_v: float, P0: float, n: int = constants.DEFAULT_REGION_POINTS
) -> RateRegionBoundary:
    """Worst-case boundary on the r_ds grid of uniform motion.

    Grid points beyond the worst-case rds_max report r_di = 0.
    """
    link = worst_case_link(s, delta_v)
    grid = rds_grid(uniform_link(s), P0, n)
    r_max = rds_max_on_link(link, P0)
    r_di = np.array(
        [conditional_capacity_on_link(link, r, P0) if r < r_max else 0.0 for r in grid]
    )
    return RateRegionBoundary(
        r_ds=grid, r_di=r_di, budget=P0, strategy=f"{delta_v / s.v0:g}"
    )


def min_power_profile(s: Scenario, vp: VelocityProfile, demand: RatePair) -> float:
    """Minimum average power (mW) supporting `demand` along the realization `vp`."""
    return min_power_haa_on_link(velocity_link(s, vp), demand).avg_power


def power_margin_curve(
    s: Scenario, demand: RatePair, ratios: Iterable[float]
) -> list[tuple[float, float]]:
    """Worst-case minimum power over the uniform one, per ratio dv/v0.

    Returns:
        list[tuple[float, float]]: (ratio, normalized power), first value 1 at
            ratio 0.
    """
    if demand.total == 0:
        raise DomainError("The margin of an empty demand is undefined")
    reference = min_power_profile(s, uniform_velocity(s), demand)
    curve = []
    for ratio in ratios:
        if not 0 <= ratio < 1:
            raise VelocityProfileError(f"Ratio must lie in [0, 1), got {ratio}")
        vp = worst_case_velocity(s, ratio * s.v0)
        curve.append((float(ratio), min_power_profile(s, vp, demand) / reference))
    return curve


def dominance_check(
    s: Scenario,
    delta_v: float,
    demand: RatePair,
    seeds: Iterable[int],
    progress: bool = True,
) -> DominanceReport:
    """Required power of sampled realizations against the worst case."""
    seed_list = list(seeds)
    worst = min_power_profile(s, worst_case_velocity(s, delta_v), demand)
    logger.info("Dominance check: %d samples at dv=%.6g m/s", len(seed_list), delta_v)
    powers = []
    for seed in tqdm(seed_list, desc="Sampled realizations", disable=not progress):
        vp = sample_admissible_velocity(s, delta_v, seed)
        powers.append(min_power_profile(s, vp, demand))
    return DominanceReport(
        delta_v=delta_v,
        demand=demand,
        worst_power=worst,
        seeds=seed_list,
        sampled_powers=np.array(powers),
    )
