import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feqwave.errors import NonMonotone, OutOfRange
from feqwave.functions import Interval, ScalarFn
from feqwave.inversion import MonotoneFn, bracket_at, build_inverse, invert_at, monotone


def test_shifted_identity():
    m = MonotoneFn(ScalarFn(lambda x: x - 1.0), 0.0, 3.0)
    assert invert_at(m, 0.25) == pytest.approx(1.25, abs=1e-12)


def test_cubic_without_derivative():
    m = MonotoneFn(ScalarFn(lambda x: x ** 3), -2.0, 2.0)
    assert invert_at(m, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert invert_at(m, -8.0) == -2.0


def test_decreasing_function():
    m = MonotoneFn.checked(ScalarFn(lambda x: -np.exp(x)), 0.0, 1.0)
    assert not m.increasing
    assert invert_at(m, -math.e ** 0.5) == pytest.approx(0.5, abs=1e-12)


def test_out_of_range():
    m = MonotoneFn(ScalarFn(lambda x: x), 0.0, 1.0)
    with pytest.raises(OutOfRange):
        invert_at(m, 1.5)


def test_checked_rejects_non_monotone():
    with pytest.raises(NonMonotone):
        MonotoneFn.checked(ScalarFn(lambda x: x * x), -1.0, 1.0, increasing=True)


def test_bracket_is_tight():
    m = MonotoneFn(ScalarFn(np.sinh, derivative=np.cosh), -3.0, 3.0)
    ys = np.linspace(-10.0, 10.0, 101)
    x, a, b = bracket_at(m, ys)
    assert np.all(b - a <= 2e-12)
    assert np.all((a <= x) & (x <= b))
    assert np.max(np.abs(np.sinh(x) - ys)) < 1e-11


def test_build_inverse_derivative():
    f = ScalarFn(lambda x: x + 0.5 * x ** 3, Interval.closed(-1, 1), lambda x: 1 + 1.5 * x ** 2)
    inv = build_inverse(monotone(f))
    y = 0.3
    x = inv(y)
    assert inv.deriv(y) == pytest.approx(1.0 / (1 + 1.5 * x * x), rel=1e-10)


def test_array_shape_preserved():
    m = MonotoneFn(ScalarFn(lambda x: 2 * x), 0.0, 1.0)
    out = invert_at(m, np.full((3, 4), 1.0))
    assert out.shape == (3, 4)
    assert np.allclose(out, 0.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(0.05, 2.0))
def test_round_trip_property(x, k):
    f = ScalarFn(lambda s: s + k * np.tanh(s), derivative=lambda s: 1 + k / np.cosh(s) ** 2)
    m = MonotoneFn(f, -4.0, 4.0)
    y = float(f(x))
    assert abs(invert_at(m, y) - x) <= 1e-11
