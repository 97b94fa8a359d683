import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feqwave.errors import DegenerateFamily, NotEven, SlopeTooLarge, UnknownFamily
from feqwave.funceq import (
    builtin_family, find_fixed_point, involution_from_even_profile, involution_report,
    residual_functional_eq, sign_structure_report, solution_from_involution, transform,
)
from feqwave.functions import Interval, ScalarFn


@pytest.mark.parametrize("name,params", [
    ("linear", [0.0]), ("linear", [-3.0]), ("golab_schinzel", []), ("piecewise_constant", []),
    ("hyperbolic", [1.0]), ("hyperbolic", [-4.0]), ("quadratic", [1.0, 0.0, -1.0]),
])
def test_family_residuals(name, params):
    rep = residual_functional_eq(builtin_family(name, params), 1001, 1e-12)
    assert rep.passed, rep.first_failure()


def test_golab_schinzel_values():
    sol = builtin_family("golab_schinzel")
    assert sol.F(0.0) == 1.0
    assert sol.fixed_points == (0.5,)


def test_quadratic_discriminant_sign():
    # positive discriminant gives -(x - 1/x)
    pos = builtin_family("quadratic", [1.0, 0.0, -1.0])
    assert pos.F(2.0) == pytest.approx(-(2.0 - 0.5))
    assert pos.fixed_points == (-1.0, 1.0)
    neg = builtin_family("quadratic", [1.0, 0.0, 1.0])
    assert neg.F(2.0) == pytest.approx(-(2.0 + 0.5))
    assert neg.fixed_points == ()


def test_quadratic_degenerate():
    with pytest.raises(DegenerateFamily):
        builtin_family("quadratic", [1.0, 2.0, 1.0])
    with pytest.raises(UnknownFamily):
        builtin_family("cubic")


def test_quadratic_linear_limit():
    sol = builtin_family("quadratic", [0.0, 2.0, 1.0])
    assert sol.F(0.0) == pytest.approx(-1.0)


def test_conjugate_hyperbolic():
    sol = transform(builtin_family("hyperbolic", [1.0]), "conjugate", 0.5)
    assert sol.F(2.0) == pytest.approx(-(2.0 + 4.0 / 2.0))
    assert residual_functional_eq(sol, 1001, 1e-11).passed


@pytest.mark.parametrize("kind,a", [("shift", 1.5), ("reflect", 0.0), ("conjugate", -2.0)])
def test_transforms_preserve_solutions(kind, a):
    sol = transform(builtin_family("hyperbolic", [-1.0]), kind, a)
    assert residual_functional_eq(sol, 1001, 1e-11).passed


def test_fixed_point_slopes():
    for sol in (builtin_family("hyperbolic", [-4.0]), builtin_family("linear", [1.0])):
        for x0 in sol.fixed_points:
            assert sol.F.deriv(x0) == pytest.approx(-2.0, abs=1e-6)


def test_hyperbolic_slope_at_infinity():
    sol = builtin_family("hyperbolic", [1.0])
    assert abs(sol.F.deriv(1e6) + 1.0) <= 1e-5


def test_sign_structure():
    assert sign_structure_report(builtin_family("hyperbolic", [-1.0])).passed


def test_profile_rejections():
    with pytest.raises(NotEven):
        involution_from_even_profile(ScalarFn(lambda x: 0.3 * x), 1.0)
    with pytest.raises(SlopeTooLarge):
        involution_from_even_profile(ScalarFn(lambda x: x * x), 1.0)


def test_involution_from_parabola():
    psi = ScalarFn(lambda x: (x * x - 1) / 2, derivative=lambda x: x)
    phi = involution_from_even_profile(psi, 1.0)
    us = phi.domain.grid(201)
    assert involution_report(phi, us, 1e-10).passed
    x0 = find_fixed_point(phi, phi.domain)
    # the fixed point is x + psi(x) at x = 0
    assert x0 == pytest.approx(-0.5, abs=1e-10)


def test_solution_from_involution():
    phi = ScalarFn(lambda x: -x - 2.0, Interval.closed(-3.0, 1.0))
    sol = solution_from_involution(phi, Interval.closed(-3.0, -1.0), Interval.closed(-1.0, 1.0))
    assert sol.fixed_points[0] == pytest.approx(-1.0)
    assert residual_functional_eq(sol, 201, 1e-12).passed


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 0.45), st.floats(0.5, 2.0))
def test_involution_property(k, a):
    psi = ScalarFn(lambda x: k * x * x / a, derivative=lambda x: 2 * k * x / a)
    phi = involution_from_even_profile(psi, a)
    us = phi.domain.grid(51)
    assert np.max(np.abs(phi(phi(us)) - us)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(0.5, 3).map(lambda r: r * r))
def test_hyperbolic_negative_c_property(x, r2):
    sol = builtin_family("hyperbolic", [-r2])
    if abs(x) < 1e-3:
        return
    fx = sol.F(x)
    y = x + fx
    if abs(y) < 1e-3:
        return
    assert abs(sol.F(y) + fx) <= 1e-9 * (1 + abs(fx) + r2 / abs(y))
