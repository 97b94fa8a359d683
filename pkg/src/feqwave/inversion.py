"""Bracketed inversion of strictly monotone functions.

The solver keeps a bracket ``[a, b]`` around the preimage of every target
value and shrinks it by bisection, taking Newton steps instead whenever a
derivative is known and the step stays strictly inside the bracket. It
works on whole arrays of targets at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NonMonotone, OutOfRange
from .functions import Interval, ScalarFn, numeric_derivative

MAX_ITER = 200
DEFAULT_TOL = 1e-12
# below this slope the inverse derivative is taken by differencing
SLOPE_FLOOR = 1e-8


@dataclass(frozen=True)
class MonotoneFn:
    """A function known to be strictly monotone on ``[lo, hi]``."""

    f: ScalarFn
    lo: float
    hi: float
    increasing: bool = True

    @classmethod
    def checked(cls, f: ScalarFn, lo: float, hi: float, increasing=None, samples: int = 101):
        """Build after confirming strict ordering on ``samples`` points.

        ``increasing=None`` infers the direction from the endpoint values.
        """
        lo, hi = float(lo), float(hi)
        xs = np.linspace(lo, hi, samples)
        ys = np.asarray(f(xs), dtype=float)
        if not np.all(np.isfinite(ys)):
            k = int(np.argmax(~np.isfinite(ys)))
            raise NonMonotone(f"{f.label} not finite at x={xs[k]!r}", float(xs[k]))
        if increasing is None:
            increasing = bool(ys[-1] > ys[0])
        steps = np.diff(ys) if increasing else -np.diff(ys)
        if np.any(steps <= 0):
            k = int(np.argmax(steps <= 0))
            raise NonMonotone(
                f"{f.label} is not strictly {'in' if increasing else 'de'}creasing "
                f"between x={xs[k]!r} and x={xs[k + 1]!r}", float(xs[k]))
        return cls(f, lo, hi, bool(increasing))

    @property
    def value_range(self):
        a, b = self.f(self.lo), self.f(self.hi)
        return (min(a, b), max(a, b))


def _solve(m: MonotoneFn, y: np.ndarray, tol: float, use_newton: bool = True):
    """Vectorised safeguarded Newton-bisection. Returns ``(x, a, b)``."""
    s = 1.0 if m.increasing else -1.0
    f = m.f.func
    df = m.f.derivative if use_newton else None

    a = np.full(y.shape, m.lo)
    b = np.full(y.shape, m.hi)
    ra = s * (f(a) - y)
    rb = s * (f(b) - y)
    lo_val, hi_val = m.value_range
    slack = 4 * np.finfo(float).eps * max(1.0, abs(lo_val), abs(hi_val))
    outside = (y < lo_val - slack) | (y > hi_val + slack) | np.isnan(y)
    if outside.any():
        bad = float(y[outside][0])
        raise OutOfRange(f"y={bad!r} outside the range [{lo_val!r}, {hi_val!r}] of {m.f.label}", bad)

    # targets sitting on an endpoint value
    done = (ra >= 0) | (rb <= 0)
    x = np.where(ra >= 0, a, np.where(rb <= 0, b, 0.5 * (a + b)))
    a = np.where(done, x, a)
    b = np.where(done, x, b)
    ra = np.where(done, 0.0, ra)
    rb = np.where(done, 0.0, rb)

    last_step = np.full(y.shape, np.inf)
    for _ in range(MAX_ITER):
        if done.all():
            break
        act = ~done
        r = np.where(act, s * (f(x) - y), 0.0)
        if np.any(act & ~np.isfinite(r)):
            k = np.flatnonzero(act & ~np.isfinite(r))[0]
            raise NonMonotone(f"{m.f.label} not finite at x={x.flat[k]!r}", float(x.flat[k]))
        # a monotone function cannot leave the bracket's value interval
        fuzz = 128 * np.finfo(float).eps * (1.0 + np.abs(y) + np.abs(r))
        broken = act & ((r < ra - fuzz) | (r > rb + fuzz))
        if broken.any():
            k = np.flatnonzero(broken)[0]
            raise NonMonotone(
                f"{m.f.label}: ordering violated at x={x.flat[k]!r} inside bracket "
                f"[{a.flat[k]!r}, {b.flat[k]!r}]", float(x.flat[k]))

        hit = act & (r == 0)
        go_left = act & (r > 0)
        go_right = act & (r < 0)
        b = np.where(go_left | hit, x, b)
        rb = np.where(go_left | hit, r, rb)
        a = np.where(go_right | hit, x, a)
        ra = np.where(go_right | hit, r, ra)

        width = b - a
        mid = 0.5 * (a + b)
        tight = (width <= 2 * tol) & (np.minimum(-ra, rb) <= tol)
        stuck = (mid <= a) | (mid >= b)  # no float strictly inside
        done = done | hit | tight | stuck
        if done.all():
            break

        cand = mid
        if df is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                step = -(s * r) / np.asarray(df(x), dtype=float)
                # a sub-tolerance step is stretched to tol so it lands
                # across the root and closes the bracket
                small = np.abs(step) < tol
                step = np.where(small, np.copysign(tol, step), step)
                newton = x + step
            ok = np.isfinite(newton) & (newton > a) & (newton < b)
            # Newton must contract, otherwise bisect
            ok &= np.abs(step) <= 0.5 * last_step
            cand = np.where(ok, newton, mid)
        last_step = np.where(done, last_step, np.abs(cand - x))
        x = np.where(done, x, cand)
    else:
        if not done.all():
            k = np.flatnonzero(~done)[0]
            raise ConvergenceError(
                f"inversion of {m.f.label} did not converge in {MAX_ITER} iterations "
                f"for y={y.flat[k]!r}; bracket [{a.flat[k]!r}, {b.flat[k]!r}]",
                float(y.flat[k]))

    # secant point inside the final bracket
    span = rb - ra
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(span > 0, -ra / span, 0.5)
    x = np.clip(a + lam * (b - a), a, b)
    return x, a, b


def invert_at(m: MonotoneFn, y, tol: float = DEFAULT_TOL):
    """Return ``x`` in ``[m.lo, m.hi]`` with ``f(x) = y``.

    Accepts a scalar or an array of targets. Raises `OutOfRange` for
    targets outside the function's value interval and `NonMonotone` if the
    bracket exposes an ordering violation.

    Examples:
        >>> from feqwave.functions import ScalarFn
        >>> g = MonotoneFn(ScalarFn(lambda x: x - 1.0), 0.0, 3.0)
        >>> round(invert_at(g, 0.25), 12)
        1.25
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    y_arr = np.asarray(y, dtype=float)
    x, _, _ = _solve(m, np.atleast_1d(y_arr).astype(float), tol)
    return float(x[0]) if y_arr.ndim == 0 else x.reshape(y_arr.shape)


def bracket_at(m: MonotoneFn, y, tol: float = DEFAULT_TOL):
    """Like `invert_at` but also returns the terminal bracket ``(x, a, b)``."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    return _solve(m, y_arr, tol)


def build_inverse(m: MonotoneFn, tol: float = DEFAULT_TOL, label=None) -> ScalarFn:
    """The inverse of ``m`` as a `ScalarFn` on its value interval.

    Each evaluation runs `invert_at`. The derivative is ``1/f'(x(y))``
    where ``f'`` is analytic and not below ``SLOPE_FLOOR``; elsewhere it is
    a central difference of the inverse itself.
    """
    lo_val, hi_val = m.value_range
    domain = Interval.closed(lo_val, hi_val)
    name = label or f"inverse({m.f.label})"

    def inv(y):
        return invert_at(m, y, tol)

    def dinv(y):
        y = np.asarray(y, dtype=float)
        x = np.asarray(invert_at(m, y, tol), dtype=float)
        if m.f.derivative is not None:
            slope = np.asarray(m.f.derivative(x), dtype=float)
        else:
            slope = np.zeros_like(x)
        flat = np.abs(slope) < SLOPE_FLOOR
        with np.errstate(divide="ignore"):
            out = np.where(flat, 0.0, 1.0 / np.where(flat, 1.0, slope))
        if flat.any():
            yf = np.clip(y[flat], lo_val, hi_val)
            out[flat] = _inverse_difference(inv, yf, lo_val, hi_val)
        return out

    return ScalarFn(inv, domain, dinv, name)


def _inverse_difference(inv, y, lo, hi, eta=1e-6):
    h = eta * (1.0 + np.abs(y))
    left = np.maximum(y - h, lo)
    right = np.minimum(y + h, hi)
    return (np.asarray(inv(right)) - np.asarray(inv(left))) / (right - left)


def monotone(f: ScalarFn, lo=None, hi=None, increasing=None) -> MonotoneFn:
    """Shorthand: a checked `MonotoneFn` over ``f``'s (finite) domain."""
    lo = f.domain.lo if lo is None else lo
    hi = f.domain.hi if hi is None else hi
    return MonotoneFn.checked(f, lo, hi, increasing)


__all__ = [
    "MonotoneFn", "invert_at", "bracket_at", "build_inverse", "monotone",
    "numeric_derivative",
]
