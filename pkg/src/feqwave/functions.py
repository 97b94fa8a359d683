"""Intervals and real functions of one variable.

`ScalarFn` is the single carrier for every function the library handles
(solutions F, involutions, freezing times, velocity profiles, inverses).
Evaluators are expected to accept numpy arrays and broadcast elementwise;
scalar input gives a Python float back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import OutOfDomain

DEFAULT_SPAN = 10.0


@dataclass(frozen=True)
class Interval:
    """A real interval, possibly unbounded, with open or closed ends."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")
        # infinite ends are never attained
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def closed(cls, lo, hi):
        return cls(float(lo), float(hi), True, True)

    @classmethod
    def open(cls, lo, hi):
        return cls(float(lo), float(hi), False, False)

    @classmethod
    def real_line(cls):
        return cls()

    @property
    def is_finite(self):
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        left = x >= self.lo if self.lo_closed else x > self.lo
        right = x <= self.hi if self.hi_closed else x < self.hi
        out = left & right
        return bool(out) if out.ndim == 0 else out

    def intersects(self, other: "Interval") -> bool:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return True
        if lo > hi:
            return False
        return bool(self.contains(lo) and other.contains(lo))

    def hull(self, other: "Interval") -> "Interval":
        lo_src = self if (self.lo, not self.lo_closed) <= (other.lo, not other.lo_closed) else other
        hi_src = self if (self.hi, self.hi_closed) >= (other.hi, other.hi_closed) else other
        return Interval(lo_src.lo, hi_src.hi, lo_src.lo_closed, hi_src.hi_closed)

    def scaled(self, a: float) -> "Interval":
        """The set ``{y : a*y in self}``."""
        lo, hi = self.lo / a, self.hi / a
        if a > 0:
            return Interval(lo, hi, self.lo_closed, self.hi_closed)
        return Interval(hi, lo, self.hi_closed, self.lo_closed)

    def shifted(self, a: float) -> "Interval":
        """The set ``self - a``."""
        return Interval(self.lo - a, self.hi - a, self.lo_closed, self.hi_closed)

    def reflected(self) -> "Interval":
        return Interval(-self.hi, -self.lo, self.hi_closed, self.lo_closed)

    def clipped(self, span: float = DEFAULT_SPAN) -> "Interval":
        """Replace infinite ends by finite stand-ins for sampling."""
        lo, hi = self.lo, self.hi
        if math.isinf(lo) and math.isinf(hi):
            return Interval(-span, span)
        if math.isinf(lo):
            return Interval(min(hi, 0.0) - span, hi, True, self.hi_closed)
        if math.isinf(hi):
            return Interval(lo, max(lo, 0.0) + span, self.lo_closed, True)
        return self

    def grid(self, n: int, span: float = DEFAULT_SPAN) -> np.ndarray:
        """``n`` uniform points inside the interval.

        Open ends are pulled inward by a millionth of the width; infinite
        ends are clipped to ``span``.
        """
        box = self.clipped(span)
        inset = 1e-6 * max(1.0, box.width)
        lo = box.lo if box.lo_closed else box.lo + inset
        hi = box.hi if box.hi_closed else box.hi - inset
        if n == 1:
            return np.array([0.5 * (lo + hi)])
        return np.linspace(lo, hi, n)

    def to_list(self):
        return [self.lo, self.hi, self.lo_closed, self.hi_closed]

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


def _as_output(x, y):
    if np.ndim(x) == 0:
        return float(y)
    return np.asarray(y, dtype=float)


@dataclass(frozen=True)
class ScalarFn:
    """A labelled real function on an interval with an optional derivative.

    Attributes:
        func: vectorised evaluator.
        domain: where ``func`` is meaningful.
        derivative: analytic derivative, if known.
        label: role/provenance name used in error messages.
    """

    func: Callable
    domain: Interval = Interval()
    derivative: Optional[Callable] = None
    label: str = "f"

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        return _as_output(x, self.func(x_arr))

    def deriv(self, x, eta: Optional[float] = None):
        """Analytic derivative when available, else a central difference."""
        if self.derivative is not None:
            x_arr = np.asarray(x, dtype=float)
            return _as_output(x, self.derivative(x_arr))
        return numeric_derivative(self, x, eta=eta, check_domain=False)

    def relabel(self, label: str) -> "ScalarFn":
        return replace(self, label=label)

    def check_domain(self, x):
        inside = np.asarray(self.domain.contains(x))
        if not inside.all():
            bad = np.asarray(x, dtype=float)[~inside] if inside.ndim else x
            witness = float(np.ravel(bad)[0])
            raise OutOfDomain(f"{self.label}: x={witness!r} outside {self.domain}", witness)


def numeric_derivative(f: ScalarFn, x, eta: Optional[float] = None, check_domain: bool = True):
    """Central difference ``(f(x+h) - f(x-h)) / 2h`` with ``h = eta*(1+|x|)``.

    ``eta`` defaults to 1e-6. Raises `OutOfDomain` if ``x`` or either
    stencil point falls outside ``f.domain``.
    """
    eta = 1e-6 if eta is None else eta
    x_arr = np.asarray(x, dtype=float)
    step = eta * (1.0 + np.abs(x_arr))
    if check_domain:
        for pt in (x_arr, x_arr - step, x_arr + step):
            f.check_domain(pt)
    d = (f.func(x_arr + step) - f.func(x_arr - step)) / (2.0 * step)
    return _as_output(x, d)


def constant(c: float, domain: Interval = Interval(), label: str = "const") -> ScalarFn:
    return ScalarFn(lambda x: np.full(np.shape(x), float(c)),
                    domain, lambda x: np.zeros(np.shape(x)), label)


def identity(domain: Interval = Interval(), label: str = "id") -> ScalarFn:
    return ScalarFn(lambda x: np.array(x, dtype=float, copy=True),
                    domain, lambda x: np.ones(np.shape(x)), label)
