"""Frozen wave fields from freezing-time and terminal-velocity profiles.

Given a half-width ``a``, an even freezing time ``T`` and an odd terminal
velocity ``h`` on ``[-a, a]``, the fields

    sigma(x, t) = f(x - t) + f(-x - t)
    mu(x, t)    = f(x - t) - f(-x - t)

with ``f(z) = h(g^{-1}(z)) / 2`` and ``g(x) = x - T(x)`` solve
``mu_t = -sigma_x``, ``sigma_t = -mu_x`` while ``t < T(x)``; from ``T(x)``
on they are clamped to ``sigma = 0``, ``mu = h(x)``. The map
``z -> z - 2 g^{-1}(z)`` is an involution, which is what makes ``sigma``
vanish exactly on the curve ``t = T(x)``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import EmptyGrid, InadmissibleProblem
from .funceq import IntervalPair, SolutionF, find_fixed_point
from .functions import Interval, ScalarFn, numeric_derivative
from .inversion import MonotoneFn, build_inverse, invert_at
from .report import ResidualReport, format_float

SIGMA_FLOOR = 1e-12
DELTA = 1e-3
INV_TOL = 1e-12
CHECK_SAMPLES = 201
STRICT, LENIENT = "strict", "lenient"


@dataclass(frozen=True)
class FreezingProblem:
    """``(a, T, h)``; ``kinks`` lists x where T or h has a corner."""

    a: float
    T: ScalarFn
    h: ScalarFn
    kinks: tuple = ()
    label: str = "problem"

    @property
    def domain(self) -> Interval:
        return Interval.closed(-self.a, self.a)

    @property
    def t_peak(self) -> float:
        return float(self.T(0.0))


@dataclass(frozen=True)
class Finding:
    name: str
    passed: bool
    witness: Optional[float] = None
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "pass": self.passed, "witness": self.witness, "detail": self.detail}


# hypotheses that lenient mode may waive
_SMOOTHNESS = {"T_decreasing", "T_differentiable", "h_differentiable", "h_increasing", "h_odd"}


def _corner_gap(fn: ScalarFn, xs, eta=1e-6):
    """Jump between one-sided difference quotients, relative to the slope."""
    step = eta * (1.0 + np.abs(xs))
    f0 = np.asarray(fn.func(xs))
    right = (np.asarray(fn.func(xs + step)) - f0) / step
    left = (f0 - np.asarray(fn.func(xs - step))) / step
    return np.abs(right - left) / (1.0 + np.abs(0.5 * (right + left)))


def validate_problem(p: FreezingProblem, samples: int = CHECK_SAMPLES) -> list:
    """Check each hypothesis on ``samples`` uniform points of ``[-a, a]``.

    Returns one `Finding` per hypothesis, with a witnessing x on failure.
    Never raises.
    """
    xs = np.linspace(-p.a, p.a, samples)
    inner = xs[1:-1]
    pos = xs[xs > 0]
    T, h = p.T, p.h
    out = []

    def add(name, bad, where, detail):
        bad = np.asarray(bad, dtype=bool)
        if bad.any():
            k = int(np.argmax(bad))
            out.append(Finding(name, False, float(where[k]), detail))
        else:
            out.append(Finding(name, True))

    Tx = np.asarray(T(xs))
    add("T_even", np.abs(Tx - np.asarray(T(-xs))) > 1e-12, xs, "T(x) != T(-x)")
    Tp = np.asarray(T(pos))
    add("T_decreasing", np.diff(Tp) >= 0, pos[:-1], "T not strictly decreasing on (0, a]")
    slope = np.abs(np.asarray(T.deriv(inner)))
    add("T_slope", slope >= 1.0, inner, "|T'| >= 1")
    add("T_differentiable", _corner_gap(T, inner) > 1e-4, inner, "T has a corner")
    hx = np.asarray(h(xs))
    add("h_odd", np.abs(hx + np.asarray(h(-xs))) > 1e-12 * (1 + np.abs(hx)), xs, "h(x) != -h(-x)")
    add("h_increasing", np.diff(hx) <= 0, xs[:-1], "h not strictly increasing")
    add("h_differentiable", _corner_gap(h, inner) > 1e-4, inner, "h has a corner")
    return out


def _require(p: FreezingProblem, mode: str):
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"mode must be {STRICT!r} or {LENIENT!r}")
    findings = validate_problem(p)
    waived = _SMOOTHNESS if mode == LENIENT else set()
    failed = [f for f in findings if not f.passed and f.name not in waived]
    if failed:
        first = failed[0]
        raise InadmissibleProblem(
            f"{p.label}: {first.name} fails at x={first.witness!r} ({first.detail})",
            findings, first.witness)
    return findings


def generator_pair(p: FreezingProblem, mode: str = STRICT, tol: float = INV_TOL):
    """``g(x) = x - T(x)`` as a checked increasing map, and its inverse.

    Raises `InadmissibleProblem` when a hypothesis fails that ``mode``
    does not waive; inversion errors propagate.
    """
    _require(p, mode)
    T = p.T
    dT = T.derivative
    g = ScalarFn(lambda x: x - np.asarray(T.func(x)), p.domain,
                 None if dT is None else (lambda x: 1.0 - np.asarray(dT(x))),
                 f"g[{T.label}]")
    gm = MonotoneFn.checked(g, -p.a, p.a, increasing=True)
    return gm, build_inverse(gm, tol, label=f"g_inv[{T.label}]")


def freezing_time_from_generator(G: ScalarFn, x, tol: float = INV_TOL):
    """``T(x) = x - G^{-1}(x)`` for an increasing generator G on its domain.

    Raises `OutOfRange` if x is not a value of G.
    """
    gm = MonotoneFn(G, G.domain.lo, G.domain.hi, True)
    x_arr = np.asarray(x, dtype=float)
    out = x_arr - np.asarray(invert_at(gm, x_arr, tol))
    return float(out) if out.ndim == 0 else out


def generator_solution(p: FreezingProblem, mode: str = STRICT) -> SolutionF:
    """``F(z) = -2 g^{-1}(z)`` on the core interval, a solution whose
    involution ``z - 2 g^{-1}(z)`` fixes ``-T(0)``."""
    _, g_inv = generator_pair(p, mode)
    core = g_inv.domain
    dinv = g_inv.derivative
    F = ScalarFn(lambda z: -2.0 * np.asarray(g_inv.func(z)), core,
                 lambda z: -2.0 * np.asarray(dinv(z)), f"F[{p.label}]")
    phi = ScalarFn(lambda z: z - 2.0 * np.asarray(g_inv.func(z)), core,
                   lambda z: 1.0 - 2.0 * np.asarray(dinv(z)), f"phi[{p.label}]")
    x0 = find_fixed_point(phi, core)
    pair = IntervalPair(Interval.closed(core.lo, x0), Interval.closed(x0, core.hi))
    return SolutionF(F, (pair,), (x0,), (), core)


# --------------------------------------------------------------------------
# wave profile


@dataclass(frozen=True)
class WaveProfile:
    """The generating function ``f``; data-determined on ``core`` only."""

    f: ScalarFn
    core: Interval
    extension_kind: str = "linear-C1"
    kinks: tuple = ()

    def __call__(self, z):
        return self.f(z)

    def plus(self, bump: Callable, label: str = "perturbed") -> "WaveProfile":
        """``f + bump``; used to build deliberately wrong fields."""
        f = self.f
        return replace(self, f=ScalarFn(lambda z: np.asarray(f.func(z)) + bump(z),
                                        f.domain, None, label))


def build_wave_profile(p: FreezingProblem, mode: str = STRICT,
                       extension: Optional[Callable] = None) -> WaveProfile:
    """``f(z) = h(g^{-1}(z)) / 2`` on ``g([-a, a])``, extended to all of R.

    By default each end is continued by its tangent line. ``extension``,
    if given, supplies f outside the core instead.
    """
    _, g_inv = generator_pair(p, mode)
    core = g_inv.domain
    lo, hi = core.lo, core.hi
    h = p.h
    dinv = g_inv.derivative

    def f_core(z):
        return 0.5 * np.asarray(h.func(np.asarray(g_inv.func(z))))

    def df_core(z):
        x = np.asarray(g_inv.func(z))
        return 0.5 * np.asarray(h.deriv(x)) * np.asarray(dinv(z))

    f_lo, f_hi = float(f_core(lo)), float(f_core(hi))
    s_lo, s_hi = float(df_core(lo)), float(df_core(hi))

    def outside(z):
        if extension is not None:
            return np.asarray(extension(z), dtype=float)
        return np.where(z < lo, f_lo + s_lo * (z - lo), f_hi + s_hi * (z - hi))

    def d_outside(z):
        if extension is not None:
            return np.asarray(numeric_derivative(ScalarFn(extension), z, check_domain=False))
        return np.where(z < lo, s_lo, s_hi)

    def f(z):
        z = np.asarray(z, dtype=float)
        inside = (z >= lo) & (z <= hi)
        out = np.empty(z.shape)
        if inside.any():
            out[inside] = f_core(z[inside])
        if (~inside).any():
            out[~inside] = outside(z[~inside])
        return out

    def df(z):
        z = np.asarray(z, dtype=float)
        inside = (z >= lo) & (z <= hi)
        out = np.empty(z.shape)
        if inside.any():
            out[inside] = df_core(z[inside])
        if (~inside).any():
            out[~inside] = d_outside(z[~inside])
        return out

    kinks = {float(x - p.T(x)) for x in p.kinks if -p.a <= x <= p.a}
    if extension is not None:
        kinks |= {lo, hi}
    return WaveProfile(ScalarFn(f, Interval(), df, f"f[{p.label}]"), core,
                       "explicit" if extension is not None else "linear-C1",
                       tuple(sorted(kinks)))


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FieldPair:
    """sigma and mu for a problem.

    ``sigma_profile`` overrides the profile used for sigma only; it exists
    to build inconsistent pairs for negative controls.
    """

    problem: FreezingProblem
    profile: WaveProfile
    sigma_profile: Optional[WaveProfile] = None

    @property
    def kinks(self):
        ks = set(self.profile.kinks)
        if self.sigma_profile is not None:
            ks |= set(self.sigma_profile.kinks)
        return tuple(sorted(ks))

    def sigma_active(self, x, t):
        """The travelling-wave formula for sigma, without the clamp."""
        f = (self.sigma_profile or self.profile).f.func
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        return np.asarray(f(x - t)) + np.asarray(f(-x - t))

    def mu_active(self, x, t):
        f = self.profile.f.func
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        return np.asarray(f(x - t)) - np.asarray(f(-x - t))

    def frozen(self, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        return t >= np.asarray(self.problem.T.func(x))

    def sigma(self, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        frozen = self.frozen(x, t)
        # the active formula is positive before T(x); rounding can leave -eps
        out = np.where(frozen, 0.0, np.maximum(self.sigma_active(x, t), 0.0))
        return float(out) if out.ndim == 0 else out

    def mu(self, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        out = np.where(self.frozen(x, t), np.asarray(self.problem.h.func(x)), self.mu_active(x, t))
        return float(out) if out.ndim == 0 else out

    def perturbed(self, bump: Callable) -> "FieldPair":
        """Same mu, but sigma built from ``f + bump``."""
        return replace(self, sigma_profile=self.profile.plus(bump))


def synthesize_fields(p: FreezingProblem, mode: str = STRICT,
                      extension: Optional[Callable] = None) -> FieldPair:
    return FieldPair(p, build_wave_profile(p, mode, extension))


@dataclass(frozen=True)
class FieldGrid:
    xs: np.ndarray
    ts: np.ndarray
    sigma: np.ndarray
    mu: np.ndarray
    frozen_mask: np.ndarray

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, t in enumerate(self.ts):
                yield x, t, self.sigma[i, j], self.mu[i, j], bool(self.frozen_mask[i, j])

    def to_csv(self, stream=None) -> str:
        """CSV ``x,t,sigma,mu,frozen``, x-major, 17 significant digits."""
        buf = io.StringIO()
        buf.write("x,t,sigma,mu,frozen\n")
        for x, t, s, m, fr in self.rows():
            buf.write(f"{format_float(x)},{format_float(t)},{format_float(s)},"
                      f"{format_float(m)},{'true' if fr else 'false'}\n")
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def sample_grid(fp: FieldPair, n_x: int, n_t: int, t_max: Optional[float] = None) -> FieldGrid:
    """Uniform ``n_x`` by ``n_t`` sampling of ``[-a, a] x [0, t_max]``.

    ``t_max`` defaults to ``T(0)``.
    """
    if n_x < 3 or n_t < 3:
        raise ValueError("grid needs at least 3 points per axis")
    t_max = fp.problem.t_peak if t_max is None else float(t_max)
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    a = fp.problem.a
    xs = np.linspace(-a, a, n_x)
    ts = np.linspace(0.0, t_max, n_t)
    X, Tt = np.meshgrid(xs, ts, indexing="ij")
    return FieldGrid(xs, ts, fp.sigma(X, Tt), fp.mu(X, Tt), fp.frozen(X, Tt))


# --------------------------------------------------------------------------
# residual checks


def pde_residual_fields(sigma, mu, x, t, delta: float = DELTA):
    """Central-difference residuals at ``(x, t)`` with step ``delta``.

    Returns ``(mu_t + sigma_x, sigma_t + mu_x, sigma_tt - sigma_xx)``.
    """
    d = delta
    s0 = sigma(x, t)
    sxp, sxm = sigma(x + d, t), sigma(x - d, t)
    stp, stm = sigma(x, t + d), sigma(x, t - d)
    mxp, mxm = mu(x + d, t), mu(x - d, t)
    mtp, mtm = mu(x, t + d), mu(x, t - d)
    r_mu = (mtp - mtm) / (2 * d) + (sxp - sxm) / (2 * d)
    r_sigma = (stp - stm) / (2 * d) + (mxp - mxm) / (2 * d)
    r_wave = (stp - 2 * s0 + stm) / d**2 - (sxp - 2 * s0 + sxm) / d**2
    return r_mu, r_sigma, r_wave


def _interior_points(fp: FieldPair, n_x: int, n_t: int, delta: float, t_max=None):
    p = fp.problem
    t_max = p.t_peak if t_max is None else t_max
    xs = np.linspace(-p.a, p.a, n_x)
    ts = np.linspace(0.0, t_max, n_t)
    dx, dt = xs[1] - xs[0], ts[1] - ts[0]
    X, Tt = np.meshgrid(xs[2:-2], ts, indexing="ij")
    X, Tt = X.ravel(), Tt.ravel()
    Tx = np.asarray(p.T.func(X))
    ok = (Tt >= 2 * dt) & (Tt <= Tx - 2 * dt)
    band = 3 * delta
    for z in fp.kinks:
        ok &= np.abs(X - Tt - z) > band
        ok &= np.abs(-X - Tt - z) > band
    X, Tt = X[ok], Tt[ok]
    keep = fp.sigma(X, Tt) > SIGMA_FLOOR
    return X[keep], Tt[keep], dx, dt


def _third_derivative_bound(profile: WaveProfile, z, delta):
    f = profile.f.func
    h = delta
    d3 = (np.asarray(f(z + 2 * h)) - 2 * np.asarray(f(z + h))
          + 2 * np.asarray(f(z - h)) - np.asarray(f(z - 2 * h))) / (2 * h**3)
    return float(np.max(np.abs(d3))) if d3.size else 0.0


def residual_pde(fp: FieldPair, n_x: int = 101, n_t: int = 101, delta: float = DELTA,
                 tol: Optional[float] = None, t_max: Optional[float] = None) -> ResidualReport:
    """Finite-difference residuals of the PDE system and the wave equation.

    Samples interior grid points at least two grid steps from the edges
    of ``[-a, a] x [0, t_max]`` and from the front ``t = T(x)``, with
    ``sigma`` above ``SIGMA_FLOOR`` and outside bands of half-width
    ``3 delta`` around characteristics through kinks of f. The same points
    are re-checked at ``delta / 2``; the sup-norm ratios are reported under
    ``details["richardson"]``.

    Without ``tol`` the tolerance is ``max(1e-8, C delta^2)`` where ``C``
    is a third of the largest sampled ``|f'''|``.
    """
    X, Tt, dx, dt = _interior_points(fp, n_x, n_t, delta, t_max)
    if X.size == 0:
        raise EmptyGrid(f"no admissible interior points for {fp.problem.label}")
    args = np.concatenate([X - Tt, -X - Tt])
    profiles = [fp.profile] + ([fp.sigma_profile] if fp.sigma_profile is not None else [])
    C = max(_third_derivative_bound(pr, args, delta) for pr in profiles) / 3.0
    auto_tol = max(1e-8, C * delta**2)
    tol = auto_tol if tol is None else float(tol)

    names = ("mu_equation", "sigma_equation", "wave_equation")
    full = pde_residual_fields(fp.sigma, fp.mu, X, Tt, delta)
    half = pde_residual_fields(fp.sigma, fp.mu, X, Tt, delta / 2)
    grid = np.column_stack([X, Tt])
    comps, ratios = {}, {}
    for name, r, rh in zip(names, full, half):
        comps[name] = ResidualReport.from_arrays(name, grid, r, tol)
        sh = float(np.max(np.abs(rh)))
        ratios[name] = {"sup_delta": comps[name].sup_norm, "sup_half_delta": sh,
                        "ratio": comps[name].sup_norm / sh if sh > 0 else math.inf}
    worst = np.max(np.abs(np.vstack(full)), axis=0)
    details = {"delta": delta, "points": int(X.size), "grid_step_x": float(dx),
               "grid_step_t": float(dt), "tolerance_constant": C,
               "tolerance_rule": "max(1e-8, C*delta^2), C = max|f'''|/3" if tol == auto_tol else "fixed",
               "richardson": ratios}
    return ResidualReport.from_arrays(f"pde[{fp.problem.label}]", grid, worst, tol,
                                      details=details, components=comps)


def verify_freezing_boundary(fp: FieldPair, n_x: int = 51, n_t: int = 1001,
                             tol_mu: float = 1e-8, tol_antisym: float = 1e-8) -> ResidualReport:
    """Check that sigma first vanishes at ``T(x)`` with ``mu = h(x)`` there.

    ``n_x`` points strictly inside ``(-a, a)`` are examined. For each, the
    unclamped sigma is scanned on a time grid of step ``T(0)/(n_t - 1)``
    and the first time with ``sigma <= SIGMA_FLOOR`` must be within one
    step of ``T(x)``. Also checked: ``|mu(x, T(x)-) - h(x)|``,
    ``|f(x - T) + f(-x - T)|``, and ``sigma > 0`` before ``T(x) - dt``.
    """
    if n_x < 3:
        raise ValueError("n_x must be at least 3")
    p = fp.problem
    xs = np.linspace(-p.a, p.a, n_x + 2)[1:-1]
    Tx = np.asarray(p.T.func(xs))
    dt = p.t_peak / (n_t - 1)
    n_steps = int(math.ceil(float(np.max(Tx)) / dt)) + 3
    ts = dt * np.arange(n_steps)
    raw = fp.sigma_active(xs[:, None], ts[None, :])
    below = raw <= SIGMA_FLOOR
    first = np.where(below.any(axis=1), ts[np.argmax(below, axis=1)], np.inf)
    front = np.abs(first - Tx)

    mu_err = np.abs(fp.mu_active(xs, Tx) - np.asarray(p.h.func(xs)))
    antisym = np.abs(fp.sigma_active(xs, Tx))
    early = ts[None, :] < (Tx[:, None] - dt)
    positive = np.where(early, raw > 0, True).all(axis=1)

    comps = {
        "front_time": ResidualReport.from_arrays("front_time", xs, front, dt * (1 + 1e-9),
                                                 details={"dt": dt}),
        "terminal_velocity": ResidualReport.from_arrays("terminal_velocity", xs, mu_err, tol_mu),
        "antisymmetry": ResidualReport.from_arrays("antisymmetry", xs, antisym, tol_antisym),
        "positivity": ResidualReport.from_arrays("positivity", xs, (~positive).astype(float), 0.5),
    }
    worst = np.maximum.reduce([front / comps["front_time"].tolerance, mu_err / tol_mu,
                               antisym / tol_antisym, 2.0 * (~positive)])
    return ResidualReport.from_arrays(f"freezing_boundary[{p.label}]", xs, worst, 1.0,
                                      details={"dt": dt, "normalised": True}, components=comps)


def decay_report(fp: FieldPair, n_x: int = 51, n_t: int = 201,
                 strict: bool = True) -> ResidualReport:
    """``t -> sigma(x, t)`` decreasing on ``[0, T(x)]`` on a grid.

    Residual per x is 1 if some step fails to decrease, else 0. With
    ``strict=False`` flat steps are allowed; piecewise-linear profiles hold
    sigma constant until the first kink arrives.
    """
    p = fp.problem
    xs = np.linspace(-p.a, p.a, n_x + 2)[1:-1]
    ts = np.linspace(0.0, p.t_peak, n_t)
    raw = fp.sigma_active(xs[:, None], ts[None, :])
    live = ts[None, :] <= np.asarray(p.T.func(xs))[:, None]
    diffs = np.diff(raw, axis=1)
    steps = diffs < 0 if strict else diffs <= 1e-12 * (1.0 + np.abs(raw[:, 1:]))
    ok = np.where(live[:, 1:], steps, True).all(axis=1)
    return ResidualReport.from_arrays("decay", xs, (~ok).astype(float), 0.5)


def reflection_identity_check(p: FreezingProblem, n: int = 101, mode: str = STRICT,
                              tol: float = 1e-9) -> ResidualReport:
    """``phi(x - T(x)) = -T(x) - x`` and ``phi(-T(x) - x) = x - T(x)``
    with ``phi(z) = z - 2 g^{-1}(z)``, at ``n`` points of ``[-a, a]``."""
    _, g_inv = generator_pair(p, mode)
    xs = np.linspace(-p.a, p.a, n)
    Tx = np.asarray(p.T.func(xs))

    def phi(z):
        return z - 2.0 * np.asarray(g_inv.func(z))

    r_plus = np.abs(phi(xs - Tx) - (-Tx - xs))
    r_minus = np.abs(phi(-Tx - xs) - (xs - Tx))
    comps = {
        "reflect_plus": ResidualReport.from_arrays("reflect_plus", xs, r_plus, tol),
        "reflect_minus": ResidualReport.from_arrays("reflect_minus", xs, r_minus, tol),
    }
    return ResidualReport.from_arrays(f"reflection[{p.label}]", xs, np.maximum(r_plus, r_minus),
                                      tol, components=comps)


def bridge_identity_check(p: FreezingProblem, n: int = 101, mode: str = STRICT,
                          tol: float = 1e-8) -> ResidualReport:
    """``|g^{-1}(z - 2 g^{-1}(z)) + g^{-1}(z)|`` on ``n`` core points."""
    _, g_inv = generator_pair(p, mode)
    zs = g_inv.domain.grid(n)
    G = np.asarray(g_inv.func(zs))
    image = zs - 2.0 * G
    # rounding may push an endpoint image a hair outside the core
    snapped = np.clip(image, g_inv.domain.lo, g_inv.domain.hi)
    image = np.where(np.abs(snapped - image) <= 1e-12, snapped, image)
    res = np.abs(np.asarray(g_inv.func(image)) + G)
    return ResidualReport.from_arrays(f"bridge[{p.label}]", zs, res, tol)


__all__ = [
    "FreezingProblem", "Finding", "WaveProfile", "FieldPair", "FieldGrid",
    "validate_problem", "generator_pair", "freezing_time_from_generator", "generator_solution",
    "build_wave_profile", "synthesize_fields", "sample_grid", "pde_residual_fields",
    "residual_pde", "verify_freezing_boundary", "decay_report", "reflection_identity_check",
    "bridge_identity_check", "STRICT", "LENIENT",
]
