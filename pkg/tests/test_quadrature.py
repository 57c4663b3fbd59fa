import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewflow.quadrature import QuadParams, panel_count, signal_integral, simpson, simpson_log
from skewflow.signal_space import Signal


def test_panel_count_multiple_of_four():
    for length in (0.0, 0.003, 0.01, 0.04, 1.0, 19.99, 20.0):
        n = panel_count(length, 0.01)
        assert n % 4 == 0 and n >= 4
        assert length / n <= 0.01 + 1e-15


def test_exp_integral_closed_form():
    r = simpson(lambda x: np.exp(-x), 0.0, 1.0)
    assert abs(r.value - (1 - math.exp(-1))) <= r.error


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_error_estimate_dominates(alpha):
    a, b = 0.0, np.array([0.3, 2.0, 7.5, 20.0])
    r = simpson(lambda u: np.exp(-alpha * u), a, b)
    exact = (1 - np.exp(-alpha * b)) / alpha
    assert np.all(np.abs(r.value - exact) <= r.error)


def test_empty_interval():
    r = simpson(lambda u: np.exp(u), 2.0, 2.0)
    assert r.value == 0.0 and r.error == 0.0


def test_log_variant_matches_linear():
    lv, le, _ = simpson_log(lambda u: 3.0 * u, 0.0, 2.0)
    r = simpson(lambda u: np.exp(3.0 * u), 0.0, 2.0)
    assert math.exp(lv) == pytest.approx(r.value, rel=1e-12)
    big, _, _ = simpson_log(lambda u: 800.0 + 0.0 * u, 0.0, 1.0)
    assert big == pytest.approx(800.0, rel=1e-12)


@given(st.floats(0.0, 5.0), st.floats(0.0, 10.0))
def test_signal_integral_of_generator(lower, length):
    x = Signal(lambda tau: np.exp(-tau) + 1.0)
    upper = lower + length
    value = signal_integral(x, lower, upper)
    exact = length + math.exp(-lower) - math.exp(-upper)
    assert value == pytest.approx(exact, rel=1e-12, abs=1e-13)


@given(st.floats(0.001, 0.05))
def test_halving_step_within_estimate(step):
    f = lambda u: np.exp(np.sin(u)) * np.exp(-0.3 * u)  # noqa: E731
    coarse = simpson(f, 0.0, 6.0, QuadParams(step))
    fine = simpson(f, 0.0, 6.0, QuadParams(step / 2))
    assert abs(coarse.value - fine.value) <= coarse.error + fine.error


def test_step_validated():
    with pytest.raises(ValueError):
        QuadParams(0.0)
