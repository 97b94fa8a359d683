"""Worked examples with closed-form oracles.

Five closed-form solution families and three freezing problems:

* ``ex51`` (alias ``m30_1``): smooth progressive freezing,
  ``T(x) = 2 - sqrt(x^2 + e^-4)``, ``f(z) = log(z + 2) + 2``.
* ``ex52`` (alias ``m30_2``): simultaneous freezing, ``T = 1``, ``h = 2x``.
* ``ex53`` (alias ``m23_23``): mixed freezing with a flat-topped ``T``;
  sigma and mu are given branch by branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import MissingClosedForm, UnknownFixture
from .freezing import LENIENT, STRICT, FreezingProblem, synthesize_fields
from .funceq import FAMILIES, SolutionF, builtin_family
from .functions import Interval, ScalarFn
from .report import ResidualReport

# e^-4 at full precision
EPS4 = math.exp(-4.0)

ALIASES = {"m30_1": "ex51", "m30_2": "ex52", "m23_23": "ex53"}
PROBLEM_FIXTURES = ("ex51", "ex52", "ex53")
NAMES = FAMILIES + PROBLEM_FIXTURES


@dataclass(frozen=True)
class Fixture:
    """A named example.

    ``kink_lines`` are constants ``c`` of characteristic lines
    ``x - t = c`` and ``-x - t = c`` that oracle comparisons stay
    ``kink_band`` away from. ``ambiguous(x, t)``, when set, marks points
    on the boundary between two closed-form branches.
    """

    name: str
    problem: Optional[FreezingProblem] = None
    closed_forms: dict = field(default_factory=dict)
    solution: Optional[SolutionF] = None
    notes: str = ""
    mode: str = STRICT
    extension: Optional[Callable] = None
    kink_lines: tuple = ()
    kink_band: float = 1e-9
    oracle_tol: float = 1e-8
    ambiguous: Optional[Callable] = None

    def fields(self, mode: Optional[str] = None):
        if self.problem is None:
            raise MissingClosedForm(f"fixture {self.name} has no freezing problem")
        return synthesize_fields(self.problem, mode or self.mode, self.extension)


# --------------------------------------------------------------------------
# ex51: T(x) = 2 - sqrt(x^2 + e^-4)


def _ex51() -> Fixture:
    a = math.sqrt(4.0 - EPS4)
    dom = Interval.closed(-a, a)
    e2 = math.exp(2.0)

    def T(x):
        return 2.0 - np.sqrt(x * x + EPS4)

    def dT(x):
        return -x / np.sqrt(x * x + EPS4)

    # 2 log(sqrt(x^2 + e^-4) + x) + 4, written without cancellation at x < 0
    def h(x):
        return 2.0 * np.arcsinh(e2 * x)

    def dh(x):
        return 2.0 * e2 / np.sqrt(1.0 + (e2 * x) ** 2)

    if abs(T(a)) > 1e-12:
        raise AssertionError(f"ex51: expected T(a) = 0, got {T(a)!r}")
    problem = FreezingProblem(a, ScalarFn(T, dom, dT, "T51"), ScalarFn(h, dom, dh, "h51"),
                              label="ex51")

    def g_inv(z):
        w = z + 2.0
        return (w * w - EPS4) / (2.0 * w)

    def F(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -((2 * x + 2) ** 2 - EPS4) / (4 * x + 4)
        return np.where(x == -1.0, 0.0, out)

    closed = {
        "T": T,
        "h": h,
        "h_log": lambda x: 2.0 * np.log(np.sqrt(x * x + EPS4) + x) + 4.0,
        "g_inv": g_inv,
        "f": lambda z: np.log(z + 2.0) + 2.0,
        "sigma": lambda x, t: np.log(x - t + 2.0) + np.log(-x - t + 2.0) + 4.0,
        "mu": lambda x, t: np.log(x - t + 2.0) - np.log(-x - t + 2.0),
        "F": F,
        "phi": lambda x: x + F(x),
    }
    # F(x) = -g_inv(2x) is the quadratic solution with (a, b, c) = (2, 4, (4 - e^-4)/2)
    # checked on x in [-a/2, a/2], where 2x covers the core; for large |x| the
    # image x + F(x) crowds the pole at -1 and rounding is amplified ~1e4 times
    solution = replace(builtin_family("quadratic", [2.0, 4.0, (4.0 - EPS4) / 2.0]),
                       window=Interval.closed(-a / 2, a / 2))
    return Fixture("ex51", problem, closed, solution,
                   "progressive freezing from the edges inward; f(z) = log(z+2) + 2",
                   oracle_tol=1e-8)


# --------------------------------------------------------------------------
# ex52: T = 1, h = 2x on (-1, 1)


def _tent(z):
    z = np.asarray(z, dtype=float)
    return np.where(z <= 0.0, 1.0 + z, 1.0 - z)


def _ex52() -> Fixture:
    dom = Interval.closed(-1.0, 1.0)
    problem = FreezingProblem(
        1.0,
        ScalarFn(lambda x: np.ones(np.shape(x)), dom, lambda x: np.zeros(np.shape(x)), "T52"),
        ScalarFn(lambda x: 2.0 * np.asarray(x, dtype=float), dom,
                 lambda x: np.full(np.shape(x), 2.0), "h52"),
        label="ex52")

    def sigma(x, t):
        return np.where(np.abs(x) > t, 2.0 - 2.0 * np.abs(x), 2.0 - 2.0 * t)

    def mu(x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        # the left half mirrors the right: mu is odd in x
        return np.where(np.abs(x) > t, 2.0 * t * np.sign(x), 2.0 * x)

    closed = {
        "T": lambda x: np.ones(np.shape(x)),
        "h": lambda x: 2.0 * x,
        "g_inv": lambda z: z + 1.0,
        "f": _tent,
        "sigma": sigma,
        "mu": mu,
        "F": lambda x: -2.0 * (x + 0.5),
    }
    solution = builtin_family("linear", [0.5])
    # the data fix f only on [-2, 0]; the tent's right half is the chosen extension
    return Fixture("ex52", problem, closed, solution,
                   "simultaneous freezing at t = 1; f is the tent 1 - |z|",
                   mode=LENIENT, extension=_tent, kink_lines=(0.0,), oracle_tol=1e-10)


# --------------------------------------------------------------------------
# ex53: flat-topped T on (-2, 2)


def _ex53_branches(x, t):
    """Region predicates of the five closed-form branches, in order."""
    return [
        (x + 1.5 <= t) & (t <= -x - 0.5),
        (x - 0.5 <= t) & (t <= x + 1.5) & (t <= -x - 0.5),
        (x - 0.5 <= t) & (t <= x + 1.5) & (-x - 0.5 <= t) & (t <= -x + 1.5),
        (t <= x - 0.5) & (-x - 0.5 <= t) & (t <= -x + 1.5),
        (-x + 1.5 <= t) & (t <= x - 0.5),
    ]


def _ex53_select(x, t, values):
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    conds = _ex53_branches(x, t)
    return np.select(conds, [v(x, t) for v in values], default=np.nan)


_EX53_SIGMA = (
    lambda x, t: 2 / 3 * x - 4 / 3 * t + 4 / 3,
    lambda x, t: 1 / 6 * x - 5 / 6 * t + 7 / 12,
    lambda x, t: 1 / 2 - t + 0 * x,
    lambda x, t: -1 / 6 * x - 5 / 6 * t + 7 / 12,
    lambda x, t: -2 / 3 * x - 4 / 3 * t + 4 / 3,
)
_EX53_MU = (
    lambda x, t: 4 / 3 * x - 2 / 3 * t + 2 / 3,
    lambda x, t: 5 / 6 * x - 1 / 6 * t - 1 / 12,
    lambda x, t: x + 0 * t,
    lambda x, t: 5 / 6 * x + 1 / 6 * t + 1 / 12,
    lambda x, t: 4 / 3 * x + 2 / 3 * t - 2 / 3,
)


def _ex53_ambiguous(x, t):
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    hits = sum(c.astype(int) for c in _ex53_branches(x, t))
    return hits != 1


def _ex53() -> Fixture:
    dom = Interval.closed(-2.0, 2.0)

    def T(x):
        ax = np.abs(np.asarray(x, dtype=float))
        return np.where(ax >= 1.0, 1.0 - ax / 2.0, 0.5)

    def dT(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) > 1.0, -0.5 * np.sign(x), 0.0)

    # the displayed sigma and mu pin the terminal velocity down to h(x) = x
    problem = FreezingProblem(
        2.0, ScalarFn(T, dom, dT, "T53"),
        ScalarFn(lambda x: np.array(x, dtype=float, copy=True), dom,
                 lambda x: np.ones(np.shape(x)), "h53"),
        kinks=(-1.0, 1.0), label="ex53")

    def g_inv(z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= 0.5, 2 / 3 * (z + 1), np.where(z > -1.5, z + 0.5, 2 * (z + 1)))

    def F(x):
        return -g_inv(2.0 * np.asarray(x, dtype=float))

    closed = {
        "T": T,
        "h": lambda x: x,
        "g_inv": g_inv,
        "f": lambda z: 0.5 * g_inv(z),
        "sigma": lambda x, t: _ex53_select(x, t, _EX53_SIGMA),
        "mu": lambda x, t: _ex53_select(x, t, _EX53_MU),
        "F": F,
        "phi": lambda x: x + F(x),
    }
    Fs = ScalarFn(F, Interval.closed(-1.0, 1.0), None, "F53")
    solution = SolutionF(Fs, (), (-0.25,), (), Interval.closed(-1.0, 1.0))
    return Fixture("ex53", problem, closed, solution,
                   "mixed freezing: progressive for |x| > 1, simultaneous for |x| < 1",
                   mode=LENIENT, kink_lines=(-1.5, 0.5), oracle_tol=1e-8,
                   ambiguous=_ex53_ambiguous)


# --------------------------------------------------------------------------


def _family_fixture(name: str, params) -> Fixture:
    sol = builtin_family(name, params)
    return Fixture(name, None, {"F": sol.F.func, "phi": sol.phi.func}, sol,
                   f"closed-form solution family {name}")


_BUILDERS = {"ex51": _ex51, "ex52": _ex52, "ex53": _ex53}


def canonical_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in NAMES:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(NAMES)} "
                             f"(aliases {', '.join(ALIASES)})")
    return name


def fixture(name: str, params=()) -> Fixture:
    """Look up a fixture by name or alias; ``params`` feed the families."""
    name = canonical_name(name)
    if name in _BUILDERS:
        if params:
            raise ValueError(f"fixture {name} takes no parameters")
        return _BUILDERS[name]()
    return _family_fixture(name, params)


def oracle_compare(name: str, n_x: int = 101, n_t: int = 101, mode: Optional[str] = None,
                   tol: Optional[float] = None) -> ResidualReport:
    """Synthesised fields against the closed forms on unfrozen grid points.

    Grid is ``[-a, a] x [0, T(0)]``. Points on or within ``kink_band`` of
    declared characteristic lines, and points on closed-form branch
    boundaries, are skipped.
    """
    fx = fixture(name)
    if fx.problem is None or "sigma" not in fx.closed_forms or "mu" not in fx.closed_forms:
        raise MissingClosedForm(f"fixture {fx.name} has no closed-form sigma/mu")
    p = fx.problem
    fp = fx.fields(mode)
    xs = np.linspace(-p.a, p.a, n_x)
    ts = np.linspace(0.0, p.t_peak, n_t)
    X, Tt = np.meshgrid(xs, ts, indexing="ij")
    X, Tt = X.ravel(), Tt.ravel()
    keep = Tt < np.asarray(p.T.func(X))
    for c in fx.kink_lines:
        keep &= np.abs(X - Tt - c) > fx.kink_band
        keep &= np.abs(-X - Tt - c) > fx.kink_band
    if fx.ambiguous is not None:
        keep &= ~fx.ambiguous(X, Tt)
    X, Tt = X[keep], Tt[keep]
    sig_err = np.abs(fp.sigma(X, Tt) - fx.closed_forms["sigma"](X, Tt))
    mu_err = np.abs(fp.mu(X, Tt) - fx.closed_forms["mu"](X, Tt))
    tol = fx.oracle_tol if tol is None else tol
    grid = np.column_stack([X, Tt])
    comps = {
        "sigma": ResidualReport.from_arrays("sigma", grid, sig_err, tol),
        "mu": ResidualReport.from_arrays("mu", grid, mu_err, tol),
    }
    return ResidualReport.from_arrays(
        f"oracle[{fx.name}]", grid, np.maximum(sig_err, mu_err), tol,
        details={"grid": [n_x, n_t], "compared_points": int(X.size)}, components=comps)


__all__ = ["Fixture", "fixture", "oracle_compare", "canonical_name", "NAMES", "ALIASES",
           "PROBLEM_FIXTURES", "EPS4"]
