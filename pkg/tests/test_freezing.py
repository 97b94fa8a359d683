import math

import numpy as np
import pytest

from feqwave.errors import EmptyGrid, InadmissibleProblem
from feqwave.fixtures import EPS4, fixture
from feqwave.freezing import (
    LENIENT, FreezingProblem, build_wave_profile, freezing_time_from_generator,
    generator_pair, generator_solution, pde_residual_fields, reflection_identity_check,
    residual_pde, sample_grid, synthesize_fields, validate_problem, verify_freezing_boundary,
)
from feqwave.funceq import residual_functional_eq
from feqwave.functions import Interval, ScalarFn


def _problem(name):
    return fixture(name).problem


def test_smooth_problem_is_admissible():
    findings = validate_problem(_problem("ex51"))
    assert all(f.passed for f in findings), [f for f in findings if not f.passed]


def test_constant_T_rejected_in_strict_mode():
    dom = Interval.closed(-1.0, 1.0)
    p = FreezingProblem(1.0, ScalarFn(lambda x: np.zeros(np.shape(x)), dom),
                        ScalarFn(lambda x: x, dom))
    with pytest.raises(InadmissibleProblem) as exc:
        generator_pair(p)
    assert any(f.name == "T_decreasing" and not f.passed for f in exc.value.findings)


def test_kinked_problem_needs_lenient_mode():
    p = _problem("ex53")
    with pytest.raises(InadmissibleProblem):
        generator_pair(p)
    g, g_inv = generator_pair(p, LENIENT)
    assert g_inv(0.0) == pytest.approx(0.5, abs=1e-12)


def test_generator_constant_T():
    g, g_inv = generator_pair(_problem("ex52"), LENIENT)
    zs = np.linspace(-2.0, 0.0, 11)
    assert np.allclose(g_inv(zs), zs + 1.0, atol=1e-12)


def test_generator_ex51_at_origin():
    _, g_inv = generator_pair(_problem("ex51"))
    assert abs(g_inv(-(2.0 - math.exp(-2.0)))) <= 1e-12


def test_freezing_time_from_generator():
    G = ScalarFn(lambda z: z + 1.0, Interval.closed(-5.0, 5.0), lambda z: np.ones(np.shape(z)))
    assert freezing_time_from_generator(G, 0.3) == pytest.approx(1.0, abs=1e-12)
    _, g_inv = generator_pair(_problem("ex51"))
    assert freezing_time_from_generator(g_inv, 0.0) == pytest.approx(2.0 - math.exp(-2.0), abs=1e-10)


def test_generator_solution_solves_equation():
    sol = generator_solution(_problem("ex51"))
    assert residual_functional_eq(sol, 1001, 1e-9).passed
    assert sol.fixed_points[0] == pytest.approx(-(2.0 - math.exp(-2.0)), abs=1e-10)


def test_wave_profile_ex51():
    prof = build_wave_profile(_problem("ex51"))
    assert prof(-1.0) == pytest.approx(2.0, abs=1e-10)
    zs = np.linspace(-1.9, 1.9, 50)
    assert np.allclose(prof(zs), np.log(zs + 2.0) + 2.0, atol=1e-10)


def test_linear_extension_is_c1():
    prof = build_wave_profile(_problem("ex51"))
    hi = prof.core.hi
    left = (prof(hi) - prof(hi - 1e-6)) / 1e-6
    right = (prof(hi + 1e-6) - prof(hi)) / 1e-6
    assert left == pytest.approx(right, rel=1e-4)


def test_fields_ex51_at_origin():
    fp = synthesize_fields(_problem("ex51"))
    assert fp.sigma(0.0, 0.0) == pytest.approx(2 * math.log(2) + 4, abs=1e-10)
    assert fp.mu(0.0, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_clamp_after_freezing():
    fx = fixture("ex51")
    fp = fx.fields()
    xs = np.linspace(-1.5, 1.5, 7)
    t = fx.problem.t_peak + 0.1
    assert np.all(fp.sigma(xs, t) == 0.0)
    assert np.array_equal(fp.mu(xs, t), fx.problem.h(xs))


def test_sample_grid_frozen_row():
    grid = sample_grid(fixture("ex52").fields(), 5, 5, 1.0)
    assert grid.sigma.shape == (5, 5)
    assert grid.frozen_mask[:, -1].all() and not grid.frozen_mask[:, :-1].any()
    assert np.all(grid.sigma >= 0)


def test_sample_grid_frozen_fraction():
    fx = fixture("ex51")
    grid = sample_grid(fx.fields(), 101, 101)
    dt = grid.ts[1] - grid.ts[0]
    expected = np.asarray(fx.problem.T(grid.xs))
    first_frozen = grid.ts[np.argmax(grid.frozen_mask, axis=1)]
    assert np.all(np.abs(first_frozen - expected) <= 2 * dt)


def test_csv_layout():
    text = sample_grid(fixture("ex52").fields(), 3, 4, 1.0).to_csv()
    lines = text.splitlines()
    assert lines[0] == "x,t,sigma,mu,frozen"
    assert len(lines) == 13
    assert lines[1].startswith("-1,0,")


def test_pde_stencil_on_exact_solution():
    f = np.sin
    sig = lambda x, t: f(x - t) + f(-x - t)  # noqa: E731
    mu = lambda x, t: f(x - t) - f(-x - t)  # noqa: E731
    r = pde_residual_fields(sig, mu, np.array([0.3]), np.array([0.4]), 1e-3)
    assert all(np.max(np.abs(c)) < 1e-6 for c in r)


def test_pde_residual_ex51():
    rep = residual_pde(fixture("ex51").fields(), 101, 101)
    assert rep.passed
    assert rep.sup_norm <= 1e-4


def test_pde_negative_control():
    fp = fixture("ex52").fields().perturbed(lambda z: 0.01 * z * z)
    rep = residual_pde(fp)
    assert not rep.passed
    assert rep.components["sigma_equation"].sup_norm > 1e-3


def test_pde_empty_grid():
    fx = fixture("ex51")
    with pytest.raises(EmptyGrid):
        residual_pde(fx.fields(), 3, 3)


@pytest.mark.parametrize("name", ["ex51", "ex52", "ex53"])
def test_freezing_boundary(name):
    fx = fixture(name)
    tol_mu = 1e-6 if name == "ex53" else 1e-8
    rep = verify_freezing_boundary(fx.fields(), 51, 1001, tol_mu=tol_mu)
    assert rep.passed, rep.first_failure()


def test_terminal_velocity_ex51_at_one():
    fx = fixture("ex51")
    fp = fx.fields()
    T1 = 2.0 - math.sqrt(1.0 + EPS4)
    h1 = 2.0 * math.log(math.sqrt(1.0 + EPS4) + 1.0) + 4.0
    assert float(fp.mu_active(1.0, T1)) == pytest.approx(h1, abs=1e-9)


def test_reflection_ex51():
    rep = reflection_identity_check(_problem("ex51"), 101)
    assert rep.sup_norm <= 1e-9
