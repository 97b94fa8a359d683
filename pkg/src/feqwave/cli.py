"""Command-line front end.

Subcommands::

    solve   NAME   sample F on a grid and report the functional-equation residual
    field   NAME   write the sigma/mu grid of a freezing fixture as CSV (or JSON)
    verify  NAME   run every residual check that applies and emit a JSON summary
    example NAME   compare synthesised fields (or F) with the closed forms
    report         run ``verify`` over every fixture

Exit status: 0 when every check passes, 1 on a verification failure, 2 on a
configuration error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fixtures as fx_mod
from .errors import FeqError, InadmissibleProblem
from .freezing import (
    LENIENT, STRICT, bridge_identity_check, decay_report, generator_solution,
    reflection_identity_check, residual_pde, sample_grid, verify_freezing_boundary,
)
from .funceq import (
    TOL_FEQ, TOL_INV, involution_report, residual_functional_eq, sign_structure_report,
)
from .report import ResidualReport, dumps, format_float

COMMANDS = ("solve", "field", "verify", "example", "report")
# bump added to the sigma profile by --perturb-sigma EPS
PERTURB_SHAPE = "EPS * z^2"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    target: Optional[str] = None
    grid: Optional[tuple] = None
    t_max: Optional[float] = None
    tolerances: dict = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "json"
    mode: Optional[str] = None
    params: tuple = ()
    perturb_sigma: float = 0.0

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != "report" and not self.target:
            raise ConfigError(f"{self.command} needs a fixture name")
        if self.grid is not None and any(n < 3 for n in self.grid):
            raise ConfigError(f"grid dimensions must be >= 3, got {self.grid}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError(f"tolerance {k} must be positive, got {v!r}")
        if self.t_max is not None and not self.t_max > 0:
            raise ConfigError(f"--t-max must be positive, got {self.t_max!r}")
        if self.mode not in (None, STRICT, LENIENT):
            raise ConfigError(f"--mode must be strict or lenient, got {self.mode!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"--format must be csv or json, got {self.fmt!r}")
        return self


def parse_grid(text: str) -> tuple:
    """``"101x51"`` -> ``(101, 51)``; a single ``"N"`` -> ``(N, N)``."""
    text = (text or "").strip().lower()
    if not text:
        raise ConfigError("empty grid specification")
    parts = text.split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; expected NXxNT") from None
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2:
        raise ConfigError(f"bad grid {text!r}; expected NXxNT")
    return dims


def _float(key, text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. ``param`` may repeat
    or hold a comma-separated list."""
    out: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "param":
            out.setdefault("param", []).extend(v.strip() for v in val.split(",") if v.strip())
        else:
            out[key] = val
    return out


_FILE_KEYS = {"command", "target", "grid", "t_max", "tol_feq", "tol_pde", "mode", "out",
              "format", "param", "perturb_sigma"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="feqwave", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", help="NXxNT (or N for one-dimensional checks)")
    common.add_argument("--t-max", type=float, dest="t_max")
    common.add_argument("--tol-feq", type=float, dest="tol_feq")
    common.add_argument("--tol-pde", type=float, dest="tol_pde")
    common.add_argument("--mode", choices=(STRICT, LENIENT))
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), dest="fmt")
    common.add_argument("--param", action="append", help="family parameter (repeatable)")
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--perturb-sigma", type=float, dest="perturb_sigma", metavar="EPS",
                        help=f"add {PERTURB_SHAPE} to the sigma profile only (negative control)")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS[:-1]:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("target", metavar="NAME",
                        help="fixture: " + ", ".join(fx_mod.NAMES + tuple(fx_mod.ALIASES)))
    sub.add_parser("report", parents=[common])
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if ns.config:
        merged = read_config_file(ns.config)
        unknown = set(merged) - _FILE_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    flags = {"grid": ns.grid, "t_max": ns.t_max, "tol_feq": ns.tol_feq, "tol_pde": ns.tol_pde,
             "mode": ns.mode, "out": ns.out, "format": ns.fmt, "param": ns.param,
             "perturb_sigma": ns.perturb_sigma}
    merged.update({k: v for k, v in flags.items() if v is not None})

    grid = parse_grid(merged["grid"]) if "grid" in merged else None
    tols = {k: _float(k, merged[k]) for k in ("tol_feq", "tol_pde") if k in merged}
    params = tuple(_float("param", p) for p in merged.get("param", ()))
    default_fmt = "csv" if ns.command == "field" else "json"
    return RunConfig(
        command=ns.command, target=getattr(ns, "target", None), grid=grid,
        t_max=_float("t_max", merged["t_max"]) if "t_max" in merged else None,
        tolerances=tols, out=merged.get("out"), fmt=merged.get("format", default_fmt),
        mode=merged.get("mode"), params=params,
        perturb_sigma=_float("perturb_sigma", merged.get("perturb_sigma", 0.0)),
    ).validate()


# --------------------------------------------------------------------------
# commands


def _fixture(cfg: RunConfig, name=None):
    return fx_mod.fixture(name or cfg.target, cfg.params)


def _fields(cfg: RunConfig, fx):
    fp = fx.fields(cfg.mode)
    if cfg.perturb_sigma:
        eps = cfg.perturb_sigma
        fp = fp.perturbed(lambda z: eps * np.asarray(z, dtype=float) ** 2)
    return fp


def _grid(cfg: RunConfig, default):
    return cfg.grid or default


def cmd_solve(cfg: RunConfig):
    fx = _fixture(cfg)
    mode = cfg.mode or fx.mode
    sol = fx.solution if fx.problem is None else generator_solution(fx.problem, mode)
    n = _grid(cfg, (1001, 1001))[0]
    rep = residual_functional_eq(sol, n, cfg.tolerances.get("tol_feq", TOL_FEQ))
    xs = np.asarray(rep.grid, dtype=float)
    Fx = np.asarray(sol.F(xs), dtype=float)
    if cfg.fmt == "csv":
        lines = ["x,F,residual"] + [
            f"{format_float(x)},{format_float(f)},{format_float(r)}"
            for x, f, r in zip(xs, Fx, rep.residuals)]
        return "\n".join(lines) + "\n", rep
    body = {
        "fixture": fx.name,
        "fixed_points": list(sol.fixed_points),
        "singular": list(sol.singular),
        "samples": {"x": xs.tolist(), "F": Fx.tolist()},
        "report": rep.to_dict(include_grid=False),
    }
    return dumps(body) + "\n", rep


def cmd_field(cfg: RunConfig):
    fx = _fixture(cfg)
    if fx.problem is None:
        raise ConfigError(f"fixture {fx.name} has no freezing problem; try `solve`")
    n_x, n_t = _grid(cfg, (101, 101))
    grid = sample_grid(_fields(cfg, fx), n_x, n_t, cfg.t_max)
    if cfg.fmt == "csv":
        return grid.to_csv(), None
    body = {"fixture": fx.name, "x": grid.xs.tolist(), "t": grid.ts.tolist(),
            "sigma": grid.sigma.tolist(), "mu": grid.mu.tolist(),
            "frozen": grid.frozen_mask.tolist()}
    return dumps(body) + "\n", None


def _suite(cfg: RunConfig, fx) -> dict:
    """Every applicable check for one fixture, as named reports."""
    tol_feq = cfg.tolerances.get("tol_feq", TOL_FEQ)
    checks: dict = {}
    if fx.problem is None:
        sol = fx.solution
        n = _grid(cfg, (1001, 1001))[0]
        checks["functional_equation"] = residual_functional_eq(sol, n, tol_feq)
        xs = np.asarray(checks["functional_equation"].grid)
        if sol.pieces:
            checks["involution"] = involution_report(sol.phi, xs, TOL_INV)
        checks["sign_structure"] = sign_structure_report(sol)
        return checks

    p = fx.problem
    mode = cfg.mode or fx.mode
    n_x, n_t = _grid(cfg, (101, 101))
    gen = generator_solution(p, mode)
    checks["functional_equation"] = residual_functional_eq(gen, 1001, max(tol_feq, 1e-8))
    zs = np.asarray(checks["functional_equation"].grid)
    checks["involution"] = involution_report(gen.phi, zs, max(TOL_INV, 1e-9))
    fp = _fields(cfg, fx)
    checks["pde"] = residual_pde(fp, n_x, n_t, tol=cfg.tolerances.get("tol_pde"), t_max=cfg.t_max)
    tol_mu = 1e-6 if mode == LENIENT and p.kinks else 1e-8
    checks["freezing_boundary"] = verify_freezing_boundary(fp, 51, 1001, tol_mu=tol_mu)
    checks["decay"] = decay_report(fp, strict=(mode == STRICT))
    checks["reflection"] = reflection_identity_check(p, 101, mode)
    checks["bridge"] = bridge_identity_check(p, 101, mode)
    return checks


def _summary(name, checks: dict) -> dict:
    return {
        "fixture": name,
        "pass": all(r.passed for r in checks.values()),
        "checks": {k: r.to_dict(include_grid=False) for k, r in checks.items()},
    }


class _Bundle:
    """Adapter so a dict of reports exposes ``passed``/``first_failure``."""

    def __init__(self, reports):
        self.reports = list(reports)
        self.passed = all(r.passed for r in self.reports)

    def first_failure(self):
        for r in self.reports:
            hit = r.first_failure()
            if hit:
                return hit
        return None


def cmd_verify(cfg: RunConfig):
    fx = _fixture(cfg)
    checks = _suite(cfg, fx)
    return dumps(_summary(fx.name, checks)) + "\n", _Bundle(checks.values())


def cmd_example(cfg: RunConfig):
    fx = _fixture(cfg)
    if fx.problem is None:
        n = _grid(cfg, (1001, 1001))[0]
        rep = residual_functional_eq(fx.solution, n, cfg.tolerances.get("tol_feq", TOL_FEQ))
    else:
        n_x, n_t = _grid(cfg, (101, 101))
        rep = fx_mod.oracle_compare(fx.name, n_x, n_t, cfg.mode)
    body = {"fixture": fx.name, "notes": fx.notes, "report": rep.to_dict(include_grid=False)}
    return dumps(body) + "\n", rep


def cmd_report(cfg: RunConfig):
    if cfg.perturb_sigma:
        raise ConfigError("--perturb-sigma applies to a single fixture")
    out, bundles = [], []
    for name in fx_mod.NAMES:
        fx = fx_mod.fixture(name)
        checks = _suite(cfg, fx)
        if fx.problem is not None:
            n_x, n_t = _grid(cfg, (101, 101))
            checks["oracle"] = fx_mod.oracle_compare(name, n_x, n_t, cfg.mode)
        out.append(_summary(name, checks))
        bundles.append(_Bundle(checks.values()))
    body = {"pass": all(b.passed for b in bundles), "fixtures": out}
    return dumps(body) + "\n", _Bundle(r for b in bundles for r in b.reports)


_HANDLERS = {"solve": cmd_solve, "field": cmd_field, "verify": cmd_verify,
             "example": cmd_example, "report": cmd_report}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text, result = _HANDLERS[cfg.command](cfg)
    except InadmissibleProblem as exc:
        print(f"verification failed: {exc} (witness {exc.witness!r})", file=stderr)
        return 1
    except (ConfigError, FeqError, ValueError) as exc:
        print(f"config error: {exc}", file=stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if result is not None and not result.passed:
        label, sup, witness = result.first_failure()
        print(f"verification failed: {label} sup={format_float(sup)} "
              f"witness={witness!r}", file=stderr)
        return 1
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
