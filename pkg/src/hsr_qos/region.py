"""Boundaries of the achievable (r_ds, r_di) region.

A boundary is sampled on an evenly spaced r_ds grid from 0 to the largest
delay-sensitive rate of the budget. Baseline strategies are evaluated on the
same grid as the hybrid one; a grid point a baseline cannot support reports
r_di = 0.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from hsr_qos import constants
from hsr_qos.allocators import (
    Strategy,
    conditional_capacity_on_link,
    haa_on_link,
    rdi_max_on_link,
    rds_max_on_link,
)
from hsr_qos.channel import Link, uniform_link
from hsr_qos.errors import DomainError
from hsr_qos.scenario import Scenario

logger = logging.getLogger(__name__)

SIMULTANEOUS = "simultaneous"
SEPARATE = "separate"


@dataclass(frozen=True)
class RateRegionBoundary:
    """Ordered boundary points, r_ds increasing and r_di non-increasing."""

    r_ds: NDArray[np.float64]
    r_di: NDArray[np.float64]
    budget: float
    strategy: str

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(float(x), float(y)) for x, y in zip(self.r_ds, self.r_di)]

    def r_di_at(self, r_ds: float) -> float:
        """Boundary r_di at `r_ds` by linear interpolation, 0 past the last point."""
        return float(np.interp(r_ds, self.r_ds, self.r_di, right=0.0))

    def dataframe(self, label_column: str = "strategy") -> pd.DataFrame:
        return pd.DataFrame(
            {
                label_column: self.strategy,
                "r_ds_bps": self.r_ds,
                "r_di_bps": self.r_di,
            }
        )


def rds_grid(link: Link, P0: float, n: int) -> NDArray[np.float64]:
    """`n` evenly spaced r_ds from 0 to the largest rate of `P0` on `link`."""
    if n < 2:
        raise DomainError(f"A boundary needs at least 2 points, got {n}")
    if P0 < 0:
        raise DomainError(f"Power budget must be non-negative, got {P0}")
    r_max = rds_max_on_link(link, P0)
    if r_max == 0:
        return np.zeros(1)
    return np.linspace(0.0, r_max, n)


def sweep_on_link(
    link: Link, P0: float, n: int, label: str = Strategy.HAA.value
) -> RateRegionBoundary:
    grid = rds_grid(link, P0, n)
    r_di = np.array([conditional_capacity_on_link(link, r, P0) for r in grid])
    r_di[-1] = 0.0
    return RateRegionBoundary(r_ds=grid, r_di=r_di, budget=P0, strategy=label)


def sweep_region(
    s: Scenario, P0: float, n: int = constants.DEFAULT_REGION_POINTS
) -> RateRegionBoundary:
    """Hybrid-allocation boundary: conditional capacity on `n` r_ds points.

    Args:
        s (Scenario): cell parameters.
        P0 (float): average power budget, mW.
        n (int): number of r_ds points, >= 2.

    Returns:
        RateRegionBoundary: from (0, rdi_max) to (rds_max, 0).
    """
    logger.info("Sweeping hybrid region at %.6g mW, %d points", P0, n)
    return sweep_on_link(uniform_link(s), P0, n)


def baseline_on_link(
    link: Link, P0: float, strategy: Strategy, n: int
) -> RateRegionBoundary:
    grid = rds_grid(link, P0, n)
    if strategy == Strategy.CIA:
        r_di = grid[-1] - grid
    elif strategy == Strategy.FPA:
        avg_rate = link.average(link.rate(np.full_like(link.inv_gain, P0)))
        edge_rate = link.bandwidth * np.log2(1.0 + P0 / link.g_max)
        r_di = np.where(grid <= edge_rate, avg_rate - grid, 0.0)
    elif strategy == Strategy.WFA:
        wfa = haa_on_link(link, 0.0, P0, Strategy.WFA)
        level = wfa.profile.water_level or 0.0
        # rate at the cell edge, the weakest instant
        edge_rate = link.bandwidth * np.log2(max(level / link.g_max, 1.0))
        r_di = np.where(grid <= edge_rate, wfa.achieved.r_di - grid, 0.0)
    else:
        raise DomainError(f"{strategy} is not a baseline strategy")
    r_di = np.maximum(r_di, 0.0)
    return RateRegionBoundary(r_ds=grid, r_di=r_di, budget=P0, strategy=strategy.value)


def baseline_region(
    s: Scenario,
    P0: float,
    strategy: Strategy,
    n: int = constants.DEFAULT_REGION_POINTS,
) -> RateRegionBoundary:
    """Boundary of a fixed-shape strategy on the hybrid r_ds grid.

    FPA spends P0 at every instant, CIA inverts the channel at r_ds + r_di and
    WFA keeps the water level of the budget, supporting r_ds only up to its
    cell-edge rate.
    """
    return baseline_on_link(uniform_link(s), P0, strategy, n)


def upper_concave_envelope(
    x: NDArray[np.float64], y: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Vertices of the upper hull of points sorted by increasing `x`."""
    hull: list[tuple[float, float]] = []
    for point in zip(x.tolist(), y.tolist()):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1)
            if cross < 0:
                break
            hull.pop()
        hull.append(point)
    xs, ys = zip(*hull)
    return np.array(xs), np.array(ys)


def separate_schedule_region(
    s: Scenario, P0_total: float, n_split: int = constants.DEFAULT_SEPARATE_SPLITS
) -> RateRegionBoundary:
    """Two sub-channels of bandwidth B, one per traffic class.

    Sub-channel A inverts the channel with power P_A, sub-channel B
    water-fills with the rest. P_A is swept over `n_split` values in
    [0, P0_total]; the frontier is the upper concave envelope of the points.
    """
    if n_split < 2:
        raise DomainError(f"n_split must be >= 2, got {n_split}")
    link = uniform_link(s)
    splits = np.linspace(0.0, P0_total, n_split)
    r_ds = np.array([rds_max_on_link(link, p) for p in splits])
    r_di = np.array([rdi_max_on_link(link, P0_total - p) for p in splits])
    r_di[-1] = 0.0
    if r_ds[-1] == 0:
        return RateRegionBoundary(
            r_ds=np.zeros(1), r_di=np.zeros(1), budget=P0_total, strategy=SEPARATE
        )
    hull_ds, hull_di = upper_concave_envelope(r_ds, r_di)
    return RateRegionBoundary(
        r_ds=hull_ds, r_di=hull_di, budget=P0_total, strategy=SEPARATE
    )


def combined_link(s: Scenario) -> Link:
    """Both sub-channels as one resource: bandwidth 2B, noise of 2B."""
    return uniform_link(s, bandwidth=2.0 * s.B, kappa=s.kappa / 2.0)


def simultaneous_region_two_channels(
    s: Scenario, P0_total: float, n: int = constants.DEFAULT_REGION_POINTS
) -> RateRegionBoundary:
    """Hybrid allocation over both sub-channels with the full budget."""
    boundary = sweep_on_link(combined_link(s), P0_total, n, SIMULTANEOUS)
    logger.info("Simultaneous two-channel region at %.6g mW", P0_total)
    return boundary


def throughput_gain(
    simultaneous: RateRegionBoundary, separate: RateRegionBoundary
) -> float:
    """Relative r_di gain of `simultaneous` over `separate` at r_ds = 0."""
    if separate.r_di[0] == 0:
        return float("nan")
    return float(simultaneous.r_di[0] / separate.r_di[0] - 1.0)
