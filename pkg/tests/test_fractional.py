import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetarho.fractional import (
    GridFunction,
    caputo_deriv,
    gamma_fn,
    product_weights,
    rl_integral,
    rl_integral_grid,
    trapezoid_to,
)
from thetarho.metric import DomainError


def power_exact(mu, beta, t):
    return math.gamma(mu + 1) / math.gamma(mu + beta + 1) * t ** (mu + beta)


def rel_sup_error(mu, beta, M, t0=0.0, T=1.0):
    f = GridFunction.from_callable(lambda t: (t - t0) ** mu, t0, T, M)
    exact = power_exact(mu, beta, f.nodes - t0)
    return np.max(np.abs(rl_integral_grid(f, beta) - exact)) / np.max(np.abs(exact))


def test_gamma_small_values():
    assert gamma_fn(1) == 1
    assert gamma_fn(5) == 24
    with pytest.raises(DomainError):
        gamma_fn(0)
    with pytest.raises(DomainError):
        gamma_fn(-1.5)


@pytest.mark.parametrize("z", [0.5, 1.7, 2.7, 4.7, 6.7, 7.7, 12.3])
def test_gamma_against_mpmath(z):
    with mpmath.workdps(30):
        oracle = float(mpmath.gamma(mpmath.mpf(str(z))))
    assert gamma_fn(z) == pytest.approx(oracle, rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5, 20))
def test_gamma_recurrence(z):
    assert gamma_fn(z + 1) == pytest.approx(z * gamma_fn(z), rel=1e-10)


@pytest.mark.parametrize("beta", [0.5, 1.5, 6.7])
@pytest.mark.parametrize("mu", [0, 1, 2])
def test_power_identity(mu, beta):
    assert rel_sup_error(mu, beta, 1000) <= 1e-4


@pytest.mark.parametrize("beta", [0.5, 1.5, 6.7])
def test_linear_functions_are_exact(beta):
    assert rel_sup_error(0, beta, 64) <= 1e-13
    assert rel_sup_error(1, beta, 64) <= 1e-13


@pytest.mark.parametrize("beta", [0.5, 1.5, 6.7])
def test_second_order_convergence(beta):
    errs = [rel_sup_error(2, beta, M) for M in (250, 500, 1000)]
    orders = [math.log2(a / b) for a, b in zip(errs[:-1], errs[1:])]
    assert min(orders) >= 1.9


def test_shifted_interval():
    t0, T = 0.5, 2.0
    f = GridFunction.from_callable(lambda t: t - t0, t0, T, 200)
    assert rl_integral(f, 0.7, T) == pytest.approx(power_exact(1, 0.7, T - t0), rel=1e-12)


def test_off_node_evaluation():
    f = GridFunction.from_callable(lambda t: t, 0, 1, 10)
    for t in (0.05, 0.333, 0.999):
        assert rl_integral(f, 0.5, t) == pytest.approx(power_exact(1, 0.5, t), rel=1e-12)
    assert rl_integral(f, 0.5, 0.0) == 0.0
    with pytest.raises(DomainError):
        rl_integral(f, 0.5, 1.5)
    with pytest.raises(DomainError):
        rl_integral(f, 0.0, 0.5)


def test_semigroup_half_plus_half_is_ordinary_integral():
    f = GridFunction.from_callable(lambda t: t**2, 0, 1, 1000)
    half = f.like(rl_integral_grid(f, 0.5))
    twice = rl_integral_grid(half, 0.5)
    assert np.max(np.abs(twice - f.nodes**3 / 3)) <= 1e-5


def test_trapezoid():
    f = GridFunction.from_callable(lambda t: 3 * t**2, 0, 1, 1000)
    assert trapezoid_to(f, 1.0) == pytest.approx(1.0, abs=1e-6)
    assert trapezoid_to(f, 0.5) == pytest.approx(0.125, abs=1e-6)


def test_weights_nonnegative():
    for beta in (0.3, 0.5, 1.0, 1.5, 6.7):
        left, right = product_weights(beta, 500, 1 / 500)
        assert np.all(left >= 0) and np.all(right >= 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=17, max_size=17), st.lists(st.floats(-10, 10), min_size=17, max_size=17), st.floats(-3, 3))
def test_linearity_and_monotonicity(a, b, c):
    fa = GridFunction(0, 1, np.array(a))
    fb = GridFunction(0, 1, np.array(b))
    lhs = rl_integral_grid(fa.like(fa.values + c * fb.values), 1.3)
    rhs = rl_integral_grid(fa, 1.3) + c * rl_integral_grid(fb, 1.3)
    assert np.allclose(lhs, rhs, atol=1e-11)
    pos = fa.like(np.abs(fa.values))
    assert np.all(rl_integral_grid(pos, 0.4) >= 0)


def test_caputo_simple_cases():
    const = GridFunction.constant(3.0, 0, 1, 200)
    assert np.max(np.abs(caputo_deriv(const, 0.6).values)) <= 1e-12
    assert np.max(np.abs(caputo_deriv(const, 1.6).values)) <= 1e-9
    lin = caputo_deriv(lambda t: t, 0.5, nth_derivative=np.ones_like)
    exact = lin.nodes**0.5 / math.gamma(1.5)
    assert np.max(np.abs(lin.values - exact)) <= 1e-12
    with pytest.raises(DomainError):
        caputo_deriv(const, 2.0)
    with pytest.raises(ValueError):
        caputo_deriv(lambda t: t, 0.5)


@pytest.mark.parametrize("beta", [0.5, 1.5])
def test_caputo_inverts_the_integral(beta):
    n = math.floor(beta) + 1
    f = GridFunction.from_callable(lambda t: t**n, 0, 1, 1000)
    back = caputo_deriv(f.like(rl_integral_grid(f, beta)), beta)
    assert np.max(np.abs(back.values - f.values)) <= 1e-4


def test_caputo_inverts_the_integral_third_order_interior():
    # repeated one-sided differences lose accuracy only at the two ends
    f = GridFunction.from_callable(lambda t: t**3, 0, 1, 1000)
    back = caputo_deriv(f.like(rl_integral_grid(f, 2.5)), 2.5)
    assert np.max(np.abs(back.values - f.values)[50:-50]) <= 1e-4


def test_grid_function_basics(tmp_path):
    f = GridFunction.from_callable(np.sin, 0, 2, 100)
    assert f.h == 0.02 and f.M == 100
    assert f.norm() == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(ValueError):
        GridFunction(0, 1, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        GridFunction(1, 0, np.zeros(5))
    text = f.to_csv()
    assert text.splitlines()[0] == "t,value"
    g = GridFunction.from_csv(text)
    assert g.same_grid(f)
    assert np.max(np.abs(g.values - f.values)) <= 1e-14
    assert f(0.01) == pytest.approx((math.sin(0) + math.sin(0.02)) / 2)
