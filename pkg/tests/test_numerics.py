import numpy as np
import pytest

from hsr_qos.errors import BracketError, NumericsError
from hsr_qos.numerics import (
    Quadrature,
    expand_bracket,
    integrate,
    integrate_samples,
    solve_monotone,
)


class TestIntegrate:
    def test_simpson_is_exact_on_cubics(self) -> None:
        q = Quadrature(panels=2)
        assert integrate(lambda x: x**2, 0.0, 1.0, q) == pytest.approx(1 / 3, abs=1e-15)
        assert integrate(lambda x: x**3, 0.0, 2.0, q) == pytest.approx(4.0, abs=1e-14)

    def test_constant_integrand(self) -> None:
        assert integrate(lambda x: 3.0, 2.0, 5.0, Quadrature(8)) == pytest.approx(9.0)

    def test_squared_distance(self) -> None:
        # d(t)^2 = 104 + (100 t)^2 over one crossing
        value = integrate(lambda t: 104.0 + (100.0 * t) ** 2, -5.0, 5.0, Quadrature(4))
        assert value == pytest.approx(834373.3333333, rel=1e-12)

    def test_linearity(self) -> None:
        q = Quadrature(64)

        def f(x: np.ndarray) -> np.ndarray:
            return np.exp(-x)

        def g(x: np.ndarray) -> np.ndarray:
            return np.sin(x)

        combined = integrate(lambda x: 2.0 * f(x) - 3.0 * g(x), 0.0, 1.0, q)
        separate = 2.0 * integrate(f, 0.0, 1.0, q) - 3.0 * integrate(g, 0.0, 1.0, q)
        assert combined == pytest.approx(separate, rel=1e-13)

    def test_odd_panels(self) -> None:
        with pytest.raises(NumericsError):
            Quadrature(panels=5)

    def test_unknown_rule(self) -> None:
        with pytest.raises(NumericsError):
            Quadrature(panels=4, rule="trapezoid")

    def test_reversed_interval(self) -> None:
        with pytest.raises(NumericsError):
            integrate(lambda x: x, 1.0, 0.0, Quadrature(4))

    def test_non_finite_samples(self) -> None:
        with pytest.raises(NumericsError):
            integrate_samples([0.0, np.inf, 1.0], [0.0, 0.5, 1.0])


class TestSolveMonotone:
    def test_increasing(self) -> None:
        assert solve_monotone(lambda x: x**3 - 8.0, 0.0, 5.0, 1e-12) == pytest.approx(
            2.0, rel=1e-11
        )

    def test_decreasing(self) -> None:
        assert solve_monotone(lambda x: 2.0 - x, 0.0, 5.0, 1e-12) == pytest.approx(
            2.0, rel=1e-11
        )

    def test_root_on_bracket_end(self) -> None:
        assert solve_monotone(lambda x: x - 1.0, 1.0, 3.0, 1e-9) == 1.0

    def test_no_sign_change(self) -> None:
        with pytest.raises(BracketError):
            solve_monotone(lambda x: x + 1.0, 0.0, 5.0, 1e-9)


class TestExpandBracket:
    def test_expands_upper_end(self) -> None:
        lo, hi = expand_bracket(lambda x: x - 100.0, 1.0, 2.0)
        assert lo < 100.0 <= hi
        assert hi == 128.0

    def test_lower_end_already_non_negative(self) -> None:
        assert expand_bracket(lambda x: x, 3.0, 6.0) == (3.0, 3.0)

    def test_gives_up(self) -> None:
        with pytest.raises(BracketError):
            expand_bracket(lambda x: -1.0, 1.0, 2.0, max_steps=10)
