"""Solutions of F(x + F(x)) = -F(x) and their involutions.

A solution F corresponds to the map ``phi(x) = x + F(x)``, which is an
involution on each piece ``I u J`` of F's domain. This module builds
solutions from involutions, builds involutions from even profiles by
rotating their graphs a quarter turn, applies the scale/shift/reflect
symmetries, and checks residuals on sample grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateFamily, DomainMismatch, EmptyGrid, NoSignChange, NotEven,
    NotInvolution, SlopeTooLarge, UnknownFamily, ZeroScale,
)
from .functions import Interval, ScalarFn, numeric_derivative
from .inversion import MonotoneFn, build_inverse, invert_at
from .report import ResidualReport

TOL_FEQ = 1e-9
TOL_FEQ_NUMERIC = 1e-6
TOL_INV = 1e-10
TOL_ROOT = 1e-12
CHECK_SAMPLES = 201
POLE_RADIUS = 1e-6
EVEN_TOL = 1e-12


@dataclass(frozen=True)
class IntervalPair:
    """A piece of a solution's domain: phi swaps ``I`` and ``J``."""

    I: Interval
    J: Interval

    @property
    def connected(self) -> bool:
        """True when I and J share a point, so ``I u J`` is one interval."""
        return self.I.intersects(self.J)

    @property
    def hull(self) -> Interval:
        return self.I.hull(self.J)

    def map(self, fn) -> "IntervalPair":
        return IntervalPair(fn(self.I), fn(self.J))


@dataclass(frozen=True)
class SolutionF:
    """A candidate solution with its domain decomposition.

    ``singular`` lists points (poles, jumps) that residual grids keep a
    distance ``POLE_RADIUS`` from. ``window`` is the default finite
    sampling region.
    """

    F: ScalarFn
    pieces: tuple = ()
    fixed_points: tuple = ()
    singular: tuple = ()
    window: Interval = Interval(-10.0, 10.0)

    @property
    def phi(self) -> ScalarFn:
        F = self.F
        dF = F.derivative
        return ScalarFn(lambda x: x + F.func(x), F.domain,
                        None if dF is None else (lambda x: 1.0 + dF(x)),
                        f"phi[{F.label}]")

    def __call__(self, x):
        return self.F(x)


# --------------------------------------------------------------------------
# involutions


def _profile_slope(psi: ScalarFn, xs):
    if psi.derivative is not None:
        return np.asarray(psi.derivative(xs), dtype=float)
    return np.asarray(numeric_derivative(psi, xs, check_domain=False), dtype=float)


def involution_from_even_profile(psi: ScalarFn, a: float, tol: float = TOL_ROOT) -> ScalarFn:
    """Involution whose graph is the graph of ``psi`` turned by 45 degrees.

    ``phi(u) = u - 2 x(u)`` where ``x(u)`` inverts ``x -> x + psi(x)`` on
    ``[-a, a]``; phi lives on ``[-a + psi(a), a + psi(a)]``.

    Raises:
        NotEven: ``psi(x) != psi(-x)`` at a sample point.
        SlopeTooLarge: ``|psi'| >= 1`` at an interior sample point.
    """
    if not a > 0:
        raise ValueError(f"half-width must be positive, got {a!r}")
    xs = np.linspace(-a, a, CHECK_SAMPLES)
    gap = np.abs(np.asarray(psi(xs)) - np.asarray(psi(-xs)))
    if np.any(gap > EVEN_TOL):
        k = int(np.argmax(gap))
        raise NotEven(f"{psi.label} is not even: |psi(x)-psi(-x)|={gap[k]:.3g} at x={xs[k]!r}",
                      float(xs[k]))
    # the endpoints may touch slope 1 without breaking invertibility
    inner = xs[1:-1]
    slope = np.abs(_profile_slope(psi, inner))
    if np.any(slope >= 1.0):
        k = int(np.argmax(slope))
        raise SlopeTooLarge(f"|{psi.label}'|={slope[k]:.6g} >= 1 at x={inner[k]!r}",
                            float(inner[k]))

    dpsi = psi.derivative
    lift = ScalarFn(lambda x: x + psi.func(x), Interval.closed(-a, a),
                    None if dpsi is None else (lambda x: 1.0 + dpsi(x)),
                    f"x+{psi.label}")
    inv = build_inverse(MonotoneFn(lift, -a, a, True), tol=tol)
    shift = float(psi(a))

    def phi(u):
        return u - 2.0 * np.asarray(inv.func(u))

    def dphi(u):
        return 1.0 - 2.0 * np.asarray(inv.derivative(u))

    return ScalarFn(phi, Interval.closed(-a + shift, a + shift), dphi,
                    f"involution[{psi.label}]")


def _sample_pair(I: Interval, J: Interval, n: int):
    return np.concatenate([I.grid(n), J.grid(n)])


def solution_from_involution(phi: ScalarFn, I: Interval, J: Interval,
                             tol_inv: float = TOL_INV, n: int = CHECK_SAMPLES,
                             label: Optional[str] = None) -> SolutionF:
    """``F(x) = phi(x) - x`` on ``I u J`` after checking phi swaps I and J.

    Raises:
        DomainMismatch: a sample of I (or J) is not sent into J (or I).
        NotInvolution: ``|phi(phi(x)) - x| > tol_inv * (1 + |x|)`` somewhere;
            the worst point is the witness.
    """
    for src, dst, name in ((I, J, "I->J"), (J, I, "J->I")):
        xs = src.grid(n)
        ys = np.asarray(phi(xs))
        # closed targets are checked with a little slack for rounding
        inside = dst.contains(ys) | (np.abs(ys - dst.lo) <= 1e-9 * (1 + abs(dst.lo))) \
            | (np.abs(ys - dst.hi) <= 1e-9 * (1 + abs(dst.hi)))
        inside = np.asarray(inside) & np.isfinite(ys)
        if not inside.all():
            k = int(np.argmin(inside))
            raise DomainMismatch(f"{phi.label}: {name} fails at x={xs[k]!r} -> {ys[k]!r}",
                                 float(xs[k]))
    xs = _sample_pair(I, J, n)
    back = np.asarray(phi(np.asarray(phi(xs))))
    err = np.abs(back - xs) / (1.0 + np.abs(xs))
    if np.any(~(err <= tol_inv)):
        k = int(np.nanargmax(np.where(np.isfinite(err), err, np.inf)))
        raise NotInvolution(f"{phi.label} is not an involution: |phi(phi(x))-x|={abs(back[k]-xs[k]):.3g} "
                            f"at x={xs[k]!r}", float(xs[k]))

    pair = IntervalPair(I, J)
    dphi = phi.derivative
    F = ScalarFn(lambda x: np.asarray(phi.func(x)) - x, pair.hull,
                 None if dphi is None else (lambda x: np.asarray(dphi(x)) - 1.0),
                 label or f"F[{phi.label}]")
    fixed = ()
    if pair.connected:
        fixed = (find_fixed_point(phi, pair.hull),)
    window = pair.hull.clipped()
    return SolutionF(F, (pair,), fixed, (), window)


def find_fixed_point(phi: ScalarFn, K: Interval, tol: float = TOL_ROOT) -> float:
    """The unique ``x0`` in K with ``phi(x0) = x0``, phi decreasing.

    Bisection on ``x -> phi(x) - x`` (strictly decreasing). Infinite ends
    of K are replaced by a bracket grown outward until the sign changes.

    Raises:
        NoSignChange: ``phi(x) - x`` has one sign on all of K.
    """
    dphi = phi.derivative
    gap = ScalarFn(lambda x: np.asarray(phi.func(x)) - x, K,
                   None if dphi is None else (lambda x: np.asarray(dphi(x)) - 1.0),
                   f"{phi.label}-id")
    lo, hi = _finite_ends(gap, K)
    glo, ghi = gap(lo), gap(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if not (glo > 0 > ghi):
        raise NoSignChange(f"{phi.label}(x)-x keeps one sign on [{lo!r}, {hi!r}] "
                           f"({glo:.3g}, {ghi:.3g})", lo)
    return invert_at(MonotoneFn(gap, lo, hi, increasing=False), 0.0, tol)


def _finite_ends(gap: ScalarFn, K: Interval):
    inset = 1e-12
    lo = K.lo if K.lo_closed else K.lo + inset * max(1.0, abs(K.lo))
    hi = K.hi if K.hi_closed else K.hi - inset * max(1.0, abs(K.hi))
    if math.isinf(lo) or math.isinf(hi):
        centre = hi - 1.0 if math.isinf(lo) and not math.isinf(hi) else (
            lo + 1.0 if not math.isinf(lo) else 0.0)
        span = 1.0
        for _ in range(64):
            a = centre - span if math.isinf(lo) else lo
            b = centre + span if math.isinf(hi) else hi
            if gap(a) > 0 > gap(b) or gap(a) == 0 or gap(b) == 0:
                return a, b
            span *= 2.0
        return a, b
    return lo, hi


# --------------------------------------------------------------------------
# symmetries


def transform(sol: SolutionF, kind: str, a: float = 0.0) -> SolutionF:
    """Apply a symmetry of the equation.

    ``conjugate``: ``x -> F(a x)/a`` on ``A/a``; ``shift``: ``x -> F(a + x)``
    on ``A - a``; ``reflect``: ``x -> -F(-x)`` on ``-A`` (``a`` ignored).
    """
    F = sol.F
    f, df = F.func, F.derivative
    if kind == "conjugate":
        if a == 0:
            raise ZeroScale("conjugation needs a nonzero scale")
        new = lambda x: np.asarray(f(a * x)) / a  # noqa: E731
        dnew = None if df is None else (lambda x: np.asarray(df(a * x)))
        move = lambda S: S.scaled(a)  # noqa: E731
        point = lambda p: p / a  # noqa: E731
        name = f"conj({F.label},{a:g})"
    elif kind == "shift":
        new = lambda x: np.asarray(f(a + x))  # noqa: E731
        dnew = None if df is None else (lambda x: np.asarray(df(a + x)))
        move = lambda S: S.shifted(a)  # noqa: E731
        point = lambda p: p - a  # noqa: E731
        name = f"shift({F.label},{a:g})"
    elif kind == "reflect":
        new = lambda x: -np.asarray(f(-x))  # noqa: E731
        dnew = None if df is None else (lambda x: np.asarray(df(-x)))
        move = lambda S: S.reflected()  # noqa: E731
        point = lambda p: -p  # noqa: E731
        name = f"reflect({F.label})"
    else:
        raise ValueError(f"unknown transform {kind!r}; use conjugate, shift or reflect")
    return SolutionF(
        ScalarFn(new, move(F.domain), dnew, name),
        tuple(p.map(move) for p in sol.pieces),
        tuple(sorted(point(p) for p in sol.fixed_points)),
        tuple(sorted(point(p) for p in sol.singular)),
        move(sol.window),
    )


# --------------------------------------------------------------------------
# closed-form families


def _linear(shift: float, label: str) -> SolutionF:
    x0 = -shift
    F = ScalarFn(lambda x: -2.0 * (x + shift), Interval(), lambda x: np.full(np.shape(x), -2.0), label)
    pair = IntervalPair(Interval(-math.inf, x0, False, True), Interval(x0, math.inf, True, False))
    return SolutionF(F, (pair,), (x0,), (), Interval(x0 - 10.0, x0 + 10.0))


def _piecewise_constant(n_pairs: int = 5) -> SolutionF:
    def F(x):
        k = np.ceil(np.asarray(x, dtype=float)) - 1.0
        return np.where(np.mod(k, 2.0) == 0.0, 1.0, -1.0)

    pieces = tuple(
        IntervalPair(Interval(2.0 * m, 2.0 * m + 1, False, True),
                     Interval(2.0 * m + 1, 2.0 * m + 2, False, True))
        for m in range(-n_pairs, n_pairs))
    breaks = tuple(float(k) for k in range(-2 * n_pairs, 2 * n_pairs + 1))
    return SolutionF(ScalarFn(F, Interval(), lambda x: np.zeros(np.shape(x)), "piecewise_constant"),
                     pieces, (), breaks, Interval(-2.0 * n_pairs, 2.0 * n_pairs, False, True))


def _hyperbolic(c: float, centre: float = 0.0, label=None) -> SolutionF:
    """``F(x) = -(y + c/y)``, ``y = x - centre``, with ``F(centre) = 0``."""
    if c == 0:
        raise DegenerateFamily("hyperbolic family needs c != 0")

    def F(x):
        y = np.asarray(x, dtype=float) - centre
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -(y + c / y)
        return np.where(y == 0.0, 0.0, out)

    def dF(x):
        y = np.asarray(x, dtype=float) - centre
        with np.errstate(divide="ignore", invalid="ignore"):
            return -1.0 + c / (y * y)

    p = centre
    if c > 0:
        pieces = (IntervalPair(Interval(p, math.inf, False, False), Interval(-math.inf, p, False, False)),)
        fixed = ()
    else:
        r = math.sqrt(-c)
        pieces = (
            IntervalPair(Interval(p, p + r, False, True), Interval(p + r, math.inf, True, False)),
            IntervalPair(Interval(-math.inf, p - r, False, True), Interval(p - r, p, True, False)),
        )
        fixed = (p - r, p + r)
    return SolutionF(ScalarFn(F, Interval(), dF, label or f"hyperbolic({c:g})"),
                     pieces, fixed, (p,), Interval(p - 10.0, p + 10.0))


def _quadratic(a: float, b: float, c: float) -> SolutionF:
    """``G(x) = -2(a x^2 + b x + c)/(2 a x + b)`` with G = 0 at the pole.

    Completing the square with ``y = x + b/(2a)`` gives
    ``G = -(y - D/(4a^2 y))``, ``D = b^2 - 4ac``: a shifted hyperbolic
    solution with ``c' = -D/(4 a^2)``.
    """
    disc = b * b - 4.0 * a * c
    if a == 0 and b == 0:
        raise DegenerateFamily("quadratic family with a = b = 0")
    if disc == 0:
        raise DegenerateFamily(f"quadratic family with zero discriminant (a={a}, b={b}, c={c})")
    label = f"quadratic({a:g},{b:g},{c:g})"
    if a == 0:
        sol = _linear(c / b, label)
        return sol
    pole = -b / (2.0 * a)
    base = _hyperbolic(-disc / (4.0 * a * a), centre=pole, label=label)

    def G(x):
        x = np.asarray(x, dtype=float)
        den = 2.0 * a * x + b
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -2.0 * (a * x * x + b * x + c) / den
        return np.where(den == 0.0, 0.0, out)

    return replace(base, F=replace(base.F, func=G))


FAMILIES = ("linear", "golab_schinzel", "piecewise_constant", "hyperbolic", "quadratic")


def builtin_family(name: str, params: Sequence[float] = ()) -> SolutionF:
    """Closed-form solutions with their domain decompositions.

    ``linear(a)``: ``-2(x + a)``; ``golab_schinzel``: ``1 - 2x``;
    ``piecewise_constant``: ``(-1)^k`` on ``(k, k+1]`` (ten pairs around 0);
    ``hyperbolic(c)``: ``-(x + c/x)``, 0 at 0; ``quadratic(a, b, c)``.
    """
    params = [float(p) for p in params]

    def need(k, default):
        if len(params) > k:
            raise ValueError(f"{name} takes {k} parameter(s), got {len(params)}")
        return params + list(default[len(params):])

    if name == "linear":
        (shift,) = need(1, [0.0])
        return _linear(shift, f"linear({shift:g})")
    if name == "golab_schinzel":
        need(0, [])
        return _linear(-0.5, "golab_schinzel")
    if name == "piecewise_constant":
        need(0, [])
        return _piecewise_constant()
    if name == "hyperbolic":
        (c,) = need(1, [1.0])
        return _hyperbolic(c)
    if name == "quadratic":
        a, b, c = need(3, [1.0, 0.0, -1.0])
        return _quadratic(a, b, c)
    raise UnknownFamily(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")


# --------------------------------------------------------------------------
# residuals


def admissible_grid(sol: SolutionF, grid_size: int, interval: Optional[Interval] = None):
    """Uniform sample of the window where both x and x + F(x) are usable."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    box = interval or sol.window
    xs = box.grid(grid_size)
    ok = np.asarray(sol.F.domain.contains(xs), dtype=bool)
    with np.errstate(all="ignore"):
        fx = np.asarray(sol.F(xs), dtype=float)
        ys = xs + fx
    ok &= np.isfinite(ys)
    ok &= np.asarray(sol.F.domain.contains(np.where(np.isfinite(ys), ys, 0.0)), dtype=bool)
    for p in sol.singular:
        ok &= np.abs(xs - p) > POLE_RADIUS
        ok &= np.abs(ys - p) > POLE_RADIUS
    return xs[ok]


def residual_functional_eq(sol: SolutionF, grid_size: int = 1001, tol: float = TOL_FEQ,
                           interval: Optional[Interval] = None) -> ResidualReport:
    """``|F(x + F(x)) + F(x)|`` on a uniform grid.

    Points within ``POLE_RADIUS`` of a singular point, or whose image
    ``x + F(x)`` is, are left out.

    Raises:
        EmptyGrid: nothing admissible remains.
    """
    xs = admissible_grid(sol, grid_size, interval)
    if xs.size == 0:
        raise EmptyGrid(f"no admissible points for {sol.F.label}")
    fx = np.asarray(sol.F(xs))
    res = np.abs(np.asarray(sol.F(xs + fx)) + fx)
    return ResidualReport.from_arrays(f"functional_equation[{sol.F.label}]", xs, res, tol)


def involution_report(phi: ScalarFn, xs, tol: float = TOL_INV, label=None) -> ResidualReport:
    """``|phi(phi(x)) - x|`` scaled by ``1 + |x|``."""
    xs = np.asarray(xs, dtype=float)
    back = np.asarray(phi(np.asarray(phi(xs))))
    res = np.abs(back - xs) / (1.0 + np.abs(xs))
    return ResidualReport.from_arrays(label or f"involution[{phi.label}]", xs, res, tol)


def sign_structure_report(sol: SolutionF, n: int = CHECK_SAMPLES) -> ResidualReport:
    """Each connected piece: F > 0 left of its fixed point, F < 0 right of it.

    The residual at a sample is 1 when the sign is wrong, else 0.
    """
    xs_all, bad_all = [], []
    for pair in sol.pieces:
        if not pair.connected:
            continue
        K = pair.hull
        x0 = next((p for p in sol.fixed_points if K.contains(p)), None)
        if x0 is None:
            continue
        xs = K.clipped().grid(n)
        xs = xs[np.abs(xs - x0) > 1e-9 * (1 + abs(x0))]
        for p in sol.singular:
            xs = xs[np.abs(xs - p) > POLE_RADIUS]
        fx = np.asarray(sol.F(xs))
        bad = np.where(xs < x0, fx <= 0, fx >= 0)
        xs_all.append(xs)
        bad_all.append(bad.astype(float))
    if not xs_all:
        return ResidualReport("sign_structure", [], [], 0.5)
    return ResidualReport.from_arrays("sign_structure", np.concatenate(xs_all),
                                      np.concatenate(bad_all), 0.5)


__all__ = [
    "IntervalPair", "SolutionF", "involution_from_even_profile", "solution_from_involution",
    "find_fixed_point", "transform", "builtin_family", "residual_functional_eq",
    "involution_report", "sign_structure_report", "numeric_derivative", "FAMILIES",
]
