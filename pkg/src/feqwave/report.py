"""Residual reports and their JSON serialisation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class ResidualReport:
    """Pointwise residuals of some identity on a sample grid.

    ``grid`` holds the sample points (floats, or ``[x, t]`` pairs for
    space-time checks). ``components`` optionally holds sub-reports whose
    pass flags are folded into this one.
    """

    label: str
    grid: list
    residuals: list
    tolerance: float
    details: dict = field(default_factory=dict)
    components: dict = field(default_factory=dict)
    sup_norm: float = field(init=False)
    passed: bool = field(init=False)
    witness: Any = field(init=False, default=None)

    def __post_init__(self):
        res = np.abs(np.asarray(self.residuals, dtype=float))
        self.sup_norm = 0.0
        if res.size:
            bad = ~np.isfinite(res)
            worst = int(np.argmax(bad)) if bad.any() else int(np.argmax(res))
            self.sup_norm = math.inf if bad.any() else float(res[worst])
            self.witness = self.grid[worst]
        own_ok = self.sup_norm <= self.tolerance
        self.passed = own_ok and all(c.passed for c in self.components.values())

    @classmethod
    def from_arrays(cls, label, grid, residuals, tolerance, **kwargs):
        grid = np.asarray(grid, dtype=float).tolist()
        residuals = np.abs(np.asarray(residuals, dtype=float)).tolist()
        return cls(label, grid, residuals, float(tolerance), **kwargs)

    def first_failure(self):
        """``(label, sup_norm, witness)`` of the first failing check, or None."""
        if not self.sup_norm <= self.tolerance:
            return (self.label, self.sup_norm, self.witness)
        for comp in self.components.values():
            hit = comp.first_failure()
            if hit:
                return hit
        return None

    def to_dict(self, include_grid: bool = True) -> dict:
        out = {"label": self.label}
        if include_grid:
            out["grid"] = self.grid
            out["residuals"] = self.residuals
        out["sup_norm"] = self.sup_norm
        out["tolerance"] = self.tolerance
        out["pass"] = self.passed
        if self.details:
            out["details"] = self.details
        if self.components:
            out["components"] = {k: c.to_dict(include_grid) for k, c in self.components.items()}
        return out


def format_float(x: float) -> str:
    return "%.17g" % x


def dumps(obj, indent: int = 2) -> str:
    """JSON with every float written at 17 significant digits.

    Non-finite floats become ``null``.
    """
    parts: list[str] = []
    _encode(obj, parts, indent, 0)
    return "".join(parts)


def _encode(obj, out, indent, level):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad)
            _encode(str(k), out, indent, level + 1)
            out.append(": ")
            _encode(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        # numeric rows stay on one line
        if all(isinstance(v, (int, float, np.number, bool)) or v is None for v in seq):
            out.append("[")
            for i, v in enumerate(seq):
                if i:
                    out.append(", ")
                _encode(v, out, indent, level + 1)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(seq):
            out.append(("," if i else "") + pad)
            _encode(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
