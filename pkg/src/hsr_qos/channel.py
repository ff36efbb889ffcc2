"""Cell geometry and the instantaneous rate/power relation of the link.

The train moves along the railway through a cell of half length L centered at
the foot point of the base station; `t` runs over [-L/v0, L/v0].
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from hsr_qos import numerics
from hsr_qos.errors import DomainError
from hsr_qos.scenario import Scenario

logger = logging.getLogger(__name__)

Array = NDArray[np.float64]

# tolerance of the window check, relative to L/v0
_WINDOW_SLACK = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling of one crossing window."""

    t_start: float
    t_end: float
    samples: Array

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def size(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class Link:
    """Sampled channel seen by the allocators.

    `inv_gain` is d(t)^alpha/kappa, the transmit power in mW that yields unit
    SNR at each sample. Allocators only see a Link, so the same solvers serve
    uniform motion, non-uniform motion and the combined two-channel resource.
    """

    grid: TimeGrid
    inv_gain: Array
    bandwidth: float
    rate_tol: float
    power_tol: float

    @property
    def g_min(self) -> float:
        return float(self.inv_gain.min())

    @property
    def g_max(self) -> float:
        return float(self.inv_gain.max())

    @property
    def mean_inv_gain(self) -> float:
        return self.average(self.inv_gain)

    @property
    def solver_tol(self) -> float:
        """Relative tolerance of the dual solvers."""
        return min(self.power_tol, self.rate_tol) * 1e-3

    def average(self, values: ArrayLike) -> float:
        return numerics.average_samples(values, self.grid.samples)

    def rate(self, p: ArrayLike) -> Array:
        """Instantaneous rate in bit/s of the power samples `p` (mW)."""
        snr = np.asarray(p, dtype=float) / self.inv_gain
        return self.bandwidth * np.log2(1.0 + snr)

    def power(self, r: float) -> Array:
        """Power samples that hold the instantaneous rate at `r` bit/s."""
        return self.inv_gain * snr_for_rate(r, self.bandwidth)


def snr_for_rate(r: float, bandwidth: float) -> float:
    """2^(r/B) - 1, the SNR that carries `r` bit/s."""
    return float(np.expm1(np.log(2.0) * r / bandwidth))


def time_grid(s: Scenario, panels: Optional[int] = None) -> TimeGrid:
    """Uniform grid of `panels` + 1 samples over [-L/v0, L/v0]."""
    half = s.half_window
    n = panels if panels is not None else s.panels
    return TimeGrid(t_start=-half, t_end=half, samples=np.linspace(-half, half, n + 1))


def _check_window(s: Scenario, t: ArrayLike) -> Array:
    times = np.asarray(t, dtype=float)
    limit = s.half_window * (1.0 + _WINDOW_SLACK)
    if np.any(np.abs(times) > limit):
        raise DomainError(
            f"Time outside the cell window [-{s.half_window:g}, {s.half_window:g}] s"
        )
    return times


def distance(s: Scenario, t: ArrayLike) -> Array:
    """Distance in m between base-station antenna and train at time `t`."""
    times = _check_window(s, t)
    return np.sqrt(s.d0**2 + s.h0**2 + (s.v0 * times) ** 2)


def inst_rate(s: Scenario, p: ArrayLike, d: ArrayLike) -> Array:
    """B·log2(1 + kappa·p/d^alpha), bit/s."""
    power = np.asarray(p, dtype=float)
    dist = np.asarray(d, dtype=float)
    if np.any(power < 0):
        raise DomainError("Transmit power must be non-negative")
    if np.any(dist <= 0):
        raise DomainError("Distance must be positive")
    return s.B * np.log2(1.0 + s.kappa * power / dist**s.alpha)


def power_for_rate(s: Scenario, r: ArrayLike, d: ArrayLike) -> Array:
    """d^alpha·(2^(r/B) - 1)/kappa, mW; the inverse of `inst_rate`."""
    rate = np.asarray(r, dtype=float)
    dist = np.asarray(d, dtype=float)
    if np.any(rate < 0):
        raise DomainError("Rate must be non-negative")
    if np.any(dist <= 0):
        raise DomainError("Distance must be positive")
    return dist**s.alpha * np.expm1(np.log(2.0) * rate / s.B) / s.kappa


def mean_pathloss(s: Scenario) -> float:
    """Time-average of d(t)^alpha over one crossing, m^alpha."""
    grid = time_grid(s)
    return numerics.average_samples(distance(s, grid.samples) ** s.alpha, grid.samples)


def link_from_distance(
    s: Scenario,
    grid: TimeGrid,
    d: Array,
    bandwidth: Optional[float] = None,
    kappa: Optional[float] = None,
) -> Link:
    """Link whose distance samples `d` are aligned with `grid`."""
    gain = kappa if kappa is not None else s.kappa
    return Link(
        grid=grid,
        inv_gain=np.asarray(d, dtype=float) ** s.alpha / gain,
        bandwidth=bandwidth if bandwidth is not None else s.B,
        rate_tol=s.rate_tol,
        power_tol=s.power_tol,
    )


def uniform_link(
    s: Scenario, bandwidth: Optional[float] = None, kappa: Optional[float] = None
) -> Link:
    """Link of a train crossing the cell at constant speed v0."""
    grid = time_grid(s)
    return link_from_distance(s, grid, distance(s, grid.samples), bandwidth, kappa)


def dbm_to_mw(p_dbm: float) -> float:
    return float(10.0 ** (p_dbm / 10.0))


def mw_to_dbm(p_mw: float) -> float:
    if p_mw <= 0:
        return float("-inf")
    return float(10.0 * np.log10(p_mw))
