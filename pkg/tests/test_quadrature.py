import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conelw.exprs import parse
from conelw.quadrature import (
    IntegrationError, InstanceValidationError, cumulative, integrate, panel_integrals,
)


@pytest.mark.parametrize("n", [1, 2, 7, 64])
def test_constant(n):
    assert integrate(lambda x: np.ones_like(x), 0.0, 1.0, n) == pytest.approx(1.0, abs=1e-15)


def test_linear():
    assert abs(integrate(lambda x: x, 0.0, 1.0) - 0.5) < 1e-12


def test_exponential():
    assert abs(integrate(np.exp, 0.0, 1.0) - (math.e - 1.0)) < 1e-10


def test_degree_nine_exact_on_one_panel():
    # 5-point Gauss-Legendre integrates polynomials up to degree 9 exactly
    assert integrate(lambda x: x**9, 0.0, 1.0, 1) == pytest.approx(0.1, abs=1e-15)
    assert abs(integrate(lambda x: x**10, 0.0, 1.0, 1) - 1 / 11) > 1e-8


def test_high_order_convergence():
    exact = 1.0 - math.cos(3.0)
    e1 = abs(integrate(np.sin, 0.0, 3.0, 2) - exact)
    e2 = abs(integrate(np.sin, 0.0, 3.0, 4) - exact)
    assert e1 / e2 > 2**9


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        integrate(np.exp, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, 1.0, 0)
    assert integrate(np.exp, 0.5, 0.5) == 0.0


def test_non_finite_sample_names_point():
    with pytest.raises(IntegrationError, match="x ="):
        integrate(lambda x: np.where(x > 0.5, np.inf, 1.0), 0.0, 1.0)


@settings(max_examples=50)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_additivity(a, b, c):
    a, b, c = sorted((a, b, c))
    f = lambda x: np.exp(np.sin(3 * x))
    whole = integrate(f, a, c)
    assert abs(whole - integrate(f, a, b) - integrate(f, b, c)) < 1e-12


def test_panel_integrals_sum():
    edges = np.linspace(0, 2, 11)
    assert np.sum(panel_integrals(np.cos, edges)) == pytest.approx(math.sin(2), abs=1e-14)


def test_cumulative_zero_and_one():
    P0 = cumulative(parse("0"), 16)
    assert np.all(P0.values == 0) and P0(0.37) == 0.0
    P1 = cumulative(parse("1"), 16)
    for t in np.linspace(0, 1, 23):
        assert abs(P1(t) - t) < 1e-12


def test_cumulative_two_t():
    P = cumulative(parse("2*t"), 64)
    assert abs(P.total - 1.0) < 1e-10
    assert abs(P(0.3) - 0.09) < 1e-12


def test_cumulative_invariants():
    p = parse("1 + sin(3.14159265358979*t)^2")
    P = cumulative(p, 64)
    assert P.values[0] == 0.0
    assert np.all(np.diff(P.values) >= 0)
    ts = np.sort(np.random.default_rng(0).uniform(0, 1, 50))
    vals = P(ts)
    assert np.all(np.diff(vals) >= 0)
    for t1, t2 in zip(ts[:-1], ts[1:]):
        direct = integrate(lambda x: p(x, np.zeros_like(x)), t1, t2)
        assert abs((P(t2) - P(t1)) - direct) < 1e-12


def test_cumulative_between_nodes_is_not_linear():
    # P(t) = t^3 for p = 3t^2; linear interpolation on 4 cells would be off by ~1e-2
    P = cumulative(parse("3*t^2"), 4)
    assert abs(P(0.1) - 0.001) < 1e-14


def test_cumulative_validation():
    with pytest.raises(InstanceValidationError, match="nonnegative"):
        cumulative(parse("t - 0.5"), 16)
    with pytest.raises(InstanceValidationError, match="only depend on t"):
        cumulative(parse("y"), 16)
    with pytest.raises(ValueError):
        cumulative(parse("1"), 16)(1.5)
