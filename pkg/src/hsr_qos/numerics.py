"""Quadrature and monotone root finding shared by all allocators."""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate as sp_integrate
from scipy import optimize

from hsr_qos.constants import MAX_BISECTION_STEPS
from hsr_qos.errors import BracketError, ConvergenceError, NumericsError

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(float).eps)

RealFunction = Callable[[NDArray[np.float64]], ArrayLike]
ScalarFunction = Callable[[float], float]


@dataclass(frozen=True)
class Quadrature:
    """Composite Simpson rule on `panels` equal panels."""

    panels: int
    rule: str = "simpson"

    def __post_init__(self) -> None:
        if self.panels < 2 or self.panels % 2:
            raise NumericsError(
                f"Quadrature needs an even panel count >= 2, got {self.panels}"
            )
        if self.rule != "simpson":
            raise NumericsError(f"Unknown quadrature rule {self.rule!r}")

    def nodes(self, a: float, b: float) -> NDArray[np.float64]:
        return np.linspace(a, b, self.panels + 1)


def integrate_samples(y: ArrayLike, x: ArrayLike) -> float:
    """Composite Simpson integral of samples `y` taken at the nodes `x`.

    Raises:
        NumericsError: If a sample is not finite.
    """
    values = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericsError("Non-finite function value in quadrature")
    return float(sp_integrate.simpson(values, x=np.asarray(x, dtype=float)))


def average_samples(y: ArrayLike, x: NDArray[np.float64]) -> float:
    """Time-average of samples over [x[0], x[-1]]."""
    return integrate_samples(y, x) / float(x[-1] - x[0])


def integrate(f: RealFunction, a: float, b: float, q: Quadrature) -> float:
    """Integrate the vectorized function `f` over [a, b].

    Args:
        f (RealFunction): function accepting a numpy array of nodes; a scalar
            return value is broadcast (constant integrand).
        a (float): lower limit.
        b (float): upper limit, > a.
        q (Quadrature): rule and panel count.

    Returns:
        float: composite Simpson approximation.
    """
    if not a < b:
        raise NumericsError(f"Empty or reversed interval [{a}, {b}]")
    x = q.nodes(a, b)
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    return integrate_samples(y, x)


def expand_bracket(
    g: ScalarFunction,
    lo: float,
    hi: float,
    factor: float = 2.0,
    max_steps: int = MAX_BISECTION_STEPS,
) -> tuple[float, float]:
    """Grow `hi` geometrically until the increasing function `g` is >= 0 there.

    Returns:
        tuple[float, float]: bracket (lo, hi) with g(lo) < 0 <= g(hi).

    Raises:
        BracketError: If `g` is still negative after `max_steps` expansions.
    """
    if g(lo) >= 0:
        return lo, lo
    for _ in range(max_steps):
        if g(hi) >= 0:
            return lo, hi
        lo, hi = hi, hi * factor
    raise BracketError(f"No sign change found up to {hi:g}")


def solve_monotone(g: ScalarFunction, lo: float, hi: float, tol: float) -> float:
    """Root of a monotone function by bisection.

    Args:
        g (ScalarFunction): strictly monotone on [lo, hi].
        lo (float): lower end of the bracket.
        hi (float): upper end of the bracket.
        tol (float): relative tolerance on the root.

    Returns:
        float: the root, within `tol` relative of the exact one.

    Raises:
        BracketError: If g(lo) and g(hi) have the same sign.
        ConvergenceError: If bisection does not finish within its step cap.
    """
    g_lo = g(lo)
    if g_lo == 0:
        return lo
    g_hi = g(hi)
    if g_hi == 0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(
            f"No sign change on [{lo:g}, {hi:g}]: g(lo)={g_lo:g}, g(hi)={g_hi:g}"
        )
    root, result = optimize.bisect(
        g,
        lo,
        hi,
        xtol=_EPS * (abs(lo) + abs(hi)),
        rtol=max(tol, 4 * _EPS),
        maxiter=MAX_BISECTION_STEPS,
        full_output=True,
        disp=False,
    )
    if not result.converged:
        raise ConvergenceError(
            f"Bisection stopped after {result.iterations} steps ({result.flag})",
            iterations=result.iterations,
            residual=float(g(root)),
        )
    logger.debug("Bisection root %.12g after %d steps", root, result.iterations)
    return float(root)
