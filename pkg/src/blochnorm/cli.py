"""Command-line front end.

    blochnorm constants --n 2 --alpha 0
    blochnorm eval      --n 2 --alpha 0 --t 0.7853982 --method series
    blochnorm sweep     --n 3 --alpha 0.5 --grid 51 --method series,quad2d
    blochnorm validate  --n 2 --alpha 0 --samples 1000000 --seed 42

Exit codes: 0 success, 1 usage error, 2 computation failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import __version__
from .common import ConvergenceError, DomainError, Params
from .norm_constants import compute_constants
from .quadrature_oracle import McConfig, l_from_quad, mc_l_full
from .series_repr import DOUBLE_SERIES_X_CAP, l_double_series, l_limit_zero, l_series
from .validation import run_validation

HALF_PI = math.pi / 2
METHODS = ("series", "double-series", "quad2d", "mc")
SWEEP_COLUMNS = {
    "series": "l_series",
    "double-series": "l_double_series",
    "quad2d": "l_quad2d",
    "mc": "l_mc",
}
# t printed with 15 digits can land just above pi/2; accept and snap it back
_T_SNAP = 1e-12

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VALIDATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    alpha: float
    t: float | None
    grid: int
    methods: tuple[str, ...]
    tol: float
    max_terms: int
    samples: int
    seed: int
    format: str
    out: str | None
    workers: int

    @property
    def params(self) -> Params:
        return Params(self.n, self.alpha)

    @property
    def mc_config(self) -> McConfig:
        return McConfig(samples=self.samples, seed=self.seed, workers=self.workers)


def _method_list(text: str) -> tuple[str, ...]:
    names = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in names if m not in METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown method {','.join(bad) or text!r}; choose from {', '.join(METHODS)}"
        )
    return names


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="complex dimension, n >= 2")
    common.add_argument("--alpha", type=float, required=True, help="weight exponent, alpha > -1")
    common.add_argument("--t", type=float, help="angle in radians; sweep: lower grid end (default 0)")
    common.add_argument("--grid", type=int, default=101, help="sweep grid size (default 101)")
    common.add_argument(
        "--method",
        type=_method_list,
        default=("series",),
        help="series, double-series, quad2d or mc; sweep takes a comma-separated list",
    )
    common.add_argument("--tol", type=float, default=1e-10, help="relative tolerance (default 1e-10)")
    common.add_argument("--max-terms", type=int, default=1_000_000)
    common.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--workers", type=int, default=1, help="Monte Carlo worker threads")

    parser = _Parser(prog="blochnorm", description="Bloch-norm function l(t) of the weighted Bergman projection.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("constants", parents=[common], help="normalising constants and norm values")
    sub.add_parser("eval", parents=[common], help="l(t) at one angle")
    sub.add_parser("sweep", parents=[common], help="l(t) on a uniform grid")
    sub.add_parser("validate", parents=[common], help="run the invariant suite")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse and validate; raises UsageError naming the violated invariant."""
    ns = build_parser().parse_args(argv)
    if ns.n < 2:
        raise UsageError("n must be >= 2")
    if not (math.isfinite(ns.alpha) and ns.alpha > -1):
        raise UsageError("alpha must be > -1")
    t = ns.t
    if t is not None:
        if HALF_PI < t <= HALF_PI + _T_SNAP:
            t = HALF_PI
        if not 0.0 <= t <= HALF_PI:
            raise UsageError("t must lie in [0, pi/2]")
    if ns.command == "eval":
        if t is None:
            raise UsageError("eval needs --t")
        if len(ns.method) != 1:
            raise UsageError("eval takes a single --method")
    if ns.grid < 2:
        raise UsageError("grid must be >= 2")
    if not ns.tol > 0:
        raise UsageError("tol must be > 0")
    if ns.max_terms < 1:
        raise UsageError("max-terms must be >= 1")
    if ns.samples < 2:
        raise UsageError("samples must be >= 2")
    if not 0 <= ns.seed < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    if ns.workers < 1:
        raise UsageError("workers must be >= 1")
    return RunConfig(
        command=ns.command,
        n=ns.n,
        alpha=ns.alpha,
        t=t,
        grid=ns.grid,
        methods=tuple(dict.fromkeys(ns.method)),
        tol=ns.tol,
        max_terms=ns.max_terms,
        samples=ns.samples,
        seed=ns.seed,
        format=ns.format,
        out=ns.out,
        workers=ns.workers,
    )


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Point:
    value: float
    error_bound: float
    stderr: float
    evaluations: int
    converged: bool


def evaluate(cfg: RunConfig, method: str, t: float) -> Point:
    p = cfg.params
    if method == "series":
        if t == 0.0:
            return Point(l_limit_zero(p), 0.0, 0.0, 0, True)
        r = l_series(p, t, cfg.tol, cfg.max_terms)
        return Point(r.value, r.tail_bound, 0.0, r.terms_used, r.converged)
    if method == "double-series":
        r = l_double_series(p, t, cfg.tol, cfg.max_terms)
        return Point(r.value, r.tail_bound, 0.0, r.terms_used, r.converged)
    if method == "quad2d":
        q = l_from_quad(p, t, cfg.tol)
        return Point(q.value, q.error_estimate, 0.0, q.evals, q.converged)
    q = mc_l_full(p, t, cfg.mc_config)
    return Point(q.value, q.error_estimate, q.stderr, q.evals, q.converged)


def _defined(method: str, t: float) -> bool:
    if method in ("double-series", "quad2d") and t == 0.0:
        return False
    if method == "double-series" and math.cos(t) ** 2 > DOUBLE_SERIES_X_CAP:
        return False
    return True


def _num(x: float) -> float:
    # 15 significant digits, shortest repr on output
    return float(f"{x:.15g}")


# ---------------------------------------------------------------------------
# commands; each returns (rows, field names, exit status, diagnostics)


def cmd_constants(cfg: RunConfig):
    k = compute_constants(cfg.params).as_dict()
    row = {name: (v if name == "n" else _num(v)) for name, v in k.items()}
    return [row], list(row), EXIT_OK, []


def cmd_eval(cfg: RunConfig):
    method = cfg.methods[0]
    if not _defined(method, cfg.t):
        raise DomainError(f"method {method} is not defined at t = {cfg.t:.15g}")
    pt = evaluate(cfg, method, cfg.t)
    row = {
        "t": _num(cfg.t),
        "method": method,
        "value": _num(pt.value),
        "error_bound": _num(pt.error_bound),
        "stderr": _num(pt.stderr),
        "evaluations": pt.evaluations,
        "converged": pt.converged,
    }
    notes = [] if pt.converged else [f"{method} did not reach tol {cfg.tol:g}"]
    return [row], list(row), EXIT_OK if pt.converged else EXIT_COMPUTE, notes


def cmd_sweep(cfg: RunConfig):
    lo = 0.0 if cfg.t is None else cfg.t
    ts = np.linspace(lo, HALF_PI, cfg.grid)
    ts[-1] = HALF_PI
    fields = ["t"] + [SWEEP_COLUMNS[m] for m in METHODS if m in cfg.methods]
    if "mc" in cfg.methods:
        fields.append("mc_stderr")
    rows, notes = [], []
    for t in map(float, ts):
        row: dict[str, object] = {"t": _num(t)}
        for m in METHODS:
            if m not in cfg.methods:
                continue
            col = SWEEP_COLUMNS[m]
            if not _defined(m, t):
                row[col] = None
                continue
            pt = evaluate(cfg, m, t)
            row[col] = _num(pt.value)
            if m == "mc":
                row["mc_stderr"] = _num(pt.stderr)
            if not pt.converged:
                notes.append(f"{m} did not reach tol {cfg.tol:g} at t = {t:.15g}")
        if "mc" in cfg.methods:
            row.setdefault("mc_stderr", None)
        rows.append(row)
    return rows, fields, EXIT_COMPUTE if notes else EXIT_OK, notes


def cmd_validate(cfg: RunConfig):
    checks = run_validation(cfg.params, cfg.mc_config, cfg.tol)
    rows = [{"check": c.name, "status": c.status, "detail": c.detail} for c in checks]
    failed = [c.name for c in checks if not c.passed]
    notes = [f"{len(failed)} of {len(checks)} checks failed"] if failed else []
    return rows, ["check", "status", "detail"], EXIT_VALIDATION if failed else EXIT_OK, notes


COMMANDS = {
    "constants": cmd_constants,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# output


def _cell(v: object) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


def render(rows: list[dict], fields: list[str], fmt: str) -> str:
    if fmt == "json":
        # strict JSON has no inf/nan; saturated constants become null
        clean = [
            {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in row.items()}
            for row in rows
        ]
        return json.dumps(clean, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    lines: list[str] = []

    class _Sink:
        def write(self, s: str) -> None:
            lines.append(s)

    w = csv.writer(_Sink(), lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_cell(row.get(f)) for f in fields])
    return "".join(lines)


def run_command(cfg: RunConfig) -> int:
    rows, fields, status, notes = COMMANDS[cfg.command](cfg)
    text = render(rows, fields, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for note in notes:
        print(f"blochnorm: {note}", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"blochnorm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run_command(cfg)
    except (DomainError, ConvergenceError) as exc:
        print(f"blochnorm: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
