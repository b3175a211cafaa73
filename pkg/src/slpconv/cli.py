"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 solver failure, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Sequence

import numpy as np

from . import __version__
from .galerkin import (
    DEFAULT_A2_BRACKET,
    BasicStateParams,
    NoInteriorMinimum,
    NoPositiveEigenvalue,
    ProblemParams,
    SingularReduction,
    assemble,
    basic_state_profile,
    critical_rayleigh,
    neutral_curve,
    rayleigh,
    reproducing_truncation,
    solve_rayleigh,
)
from .inner_products import write_table_csv
from .oracle import OracleError, oracle_critical, oracle_rayleigh
from .reference import load_table1
from .verification import LEVELS, run_suites

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3
DEFAULT_N = 12
TABLE_GATE = 1e-3
SIG = 10


class UsageError(Exception):
    pass


@dataclass
class RunRecord:
    command: str
    params: dict[str, Any]
    Ra: float | None
    a2_star: float | None = None
    oracle_Ra: float | None = None
    timestamps: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def data_row(self) -> dict[str, Any]:
        # timestamps live in the metadata block, never in data rows
        row = self.to_dict()
        del row["timestamps"]
        return row

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunRecord":
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{v:.{SIG}g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


class Output:
    """Collects rows and renders them as a human table, CSV or JSON."""

    def __init__(self, fmt: str, columns: Sequence[str], meta: dict[str, Any],
                 csv_columns: Sequence[str] | None = None):
        self.fmt = fmt
        self.columns = list(columns)
        self.csv_columns = list(csv_columns or columns)
        self.meta = meta
        self.rows: list[dict[str, Any]] = []
        self.json_rows: list[dict[str, Any]] | None = None
        self.notes: list[str] = []

    def add(self, **row):
        self.rows.append(row)

    def render(self) -> str:
        if self.fmt == "json":
            doc = {
                "meta": self.meta,
                "rows": self.json_rows if self.json_rows is not None
                else [{k: _jsonable(v) for k, v in r.items()} for r in self.rows],
            }
            return json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if self.fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.csv_columns)
            for r in self.rows:
                w.writerow([_fmt(r.get(c)) for c in self.csv_columns])
            return buf.getvalue()
        cells = [[_fmt(r.get(c)) for c in self.columns] for r in self.rows]
        widths = [max([len(c)] + [len(row[j]) for row in cells]) for j, c in enumerate(self.columns)]
        # text columns flush left, numbers flush right
        left = [bool(self.rows) and isinstance(self.rows[0].get(c), str) for c in self.columns]
        just = lambda v, wd, lf: v.ljust(wd) if lf else v.rjust(wd)
        lines = ["  ".join(just(c, wd, lf) for c, wd, lf in zip(self.columns, widths, left)).rstrip()]
        lines += ["  ".join(just(v, wd, lf) for v, wd, lf in zip(row, widths, left)).rstrip()
                  for row in cells]
        lines += self.notes
        return "\n".join(lines) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args, command: str, started: str) -> dict[str, Any]:
    meta = {"command": command, "version": __version__}
    if args.timestamps:
        meta["timestamps"] = {"started": started, "finished": _now()}
    return meta


def _positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def _modes(value: int) -> int:
    if value < 1:
        raise UsageError(f"--n must be >= 1, got {value}")
    return value


# -- commands ----------------------------------------------------------------------


def cmd_solve(args) -> RunRecord:
    started = _now()
    _positive("--a2", args.a2)
    params = ProblemParams(args.N, args.a2, _modes(args.n))
    sol = solve_rayleigh(assemble(params), params)
    oracle_ra = oracle_rayleigh(args.N, args.a2).Ra if args.oracle else None
    record = RunRecord("solve", {"N": args.N, "a2": args.a2, "n": args.n}, sol.Ra,
                       oracle_Ra=oracle_ra, timestamps={"started": started, "finished": _now()})
    out = Output(args.format, ["N", "a2", "n", "Ra", "oracle_Ra", "det_residual", "n_complex"],
                 _meta(args, "solve", started))
    out.add(N=args.N, a2=args.a2, n=args.n, Ra=sol.Ra, oracle_Ra=oracle_ra,
            det_residual=sol.det_residual, n_complex=sol.n_complex)
    out.json_rows = [record.data_row()]
    out.meta["diagnostics"] = {"det_residual": sol.det_residual, "n_complex": sol.n_complex}
    _write(out.render(), args.out)
    return record


def cmd_table(args) -> int:
    started = _now()
    n = _modes(args.n)
    n_conv = _modes(args.n_converged)
    out = Output(
        args.format,
        ["N", "a2", "Ra_paper", "Ra_computed", "rel_dev", "Ra_converged", "Ra_oracle",
         "conv_vs_oracle", "n_reproducing"],
        _meta(args, "table", started) | {"n": n, "n_converged": n_conv, "gate": args.gate},
        csv_columns=["N", "a2", "Ra_paper", "Ra_computed", "rel_dev"],
    )
    failures = []
    for row in load_table1():
        ra_n = rayleigh(row.N, row.a2, n)
        ra_conv = ra_n if n == n_conv else rayleigh(row.N, row.a2, n_conv)
        ref = oracle_rayleigh(row.N, row.a2).Ra
        gap = abs(ra_conv - ref) / ref
        if gap > args.gate:
            failures.append((row.N, row.a2, gap))
        out.add(N=row.N, a2=row.a2, Ra_paper=row.Ra_legendre, Ra_computed=ra_n,
                rel_dev=(ra_n - row.Ra_legendre) / row.Ra_legendre, Ra_converged=ra_conv,
                Ra_oracle=ref, conv_vs_oracle=gap,
                n_reproducing=reproducing_truncation(row.N, row.a2, row.Ra_legendre))
    out.notes.append(
        f"rel_dev: computed at n={n} vs printed column; n_reproducing: smallest n within 0.05 "
        f"of the printed value; gate: |Ra(n={n_conv}) - oracle|/oracle <= {args.gate:g}")
    for N, a2, gap in failures:
        out.notes.append(f"GATE FAILED: N={N:g} a2={a2:g} deviation {gap:.3e}")
    _write(out.render(), args.out)
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_curve(args) -> int:
    started = _now()
    lo, hi = _positive("--a2-min", args.a2_min), _positive("--a2-max", args.a2_max)
    if hi < lo or args.steps < 1 or (args.steps == 1 and hi != lo):
        raise UsageError("need a2-min <= a2-max and steps >= 1")
    grid = np.linspace(lo, hi, args.steps)
    points = neutral_curve(args.N, grid, _modes(args.n))
    out = Output(args.format, ["a2", "Ra"],
                 _meta(args, "curve", started) | {"N": args.N, "n": args.n})
    for p in points:
        out.add(a2=p.a2, Ra=p.Ra)
        if p.error:
            out.notes.append(f"a2={p.a2:g}: {p.error}")
    _write(out.render(), args.out)
    return EXIT_SOLVER if any(p.error for p in points) else EXIT_OK


def cmd_critical(args) -> RunRecord:
    started = _now()
    bracket = (_positive("--a2-min", args.a2_min), _positive("--a2-max", args.a2_max))
    if not bracket[1] > bracket[0]:
        raise UsageError("--a2-max must exceed --a2-min")
    cp = critical_rayleigh(args.N, _modes(args.n), bracket)
    oracle = oracle_critical(args.N, bracket) if args.oracle else None
    record = RunRecord("critical", {"N": args.N, "a2": None, "n": args.n}, cp.Ra, a2_star=cp.a2,
                       oracle_Ra=oracle[1] if oracle else None,
                       timestamps={"started": started, "finished": _now()})
    out = Output(args.format, ["N", "n", "a2_star", "a_star", "Ra_star", "oracle_a2_star", "oracle_Ra_star"],
                 _meta(args, "critical", started))
    out.add(N=args.N, n=args.n, a2_star=cp.a2, a_star=math.sqrt(cp.a2), Ra_star=cp.Ra,
            oracle_a2_star=oracle[0] if oracle else None, oracle_Ra_star=oracle[1] if oracle else None)
    out.json_rows = [record.data_row()]
    if oracle:
        out.meta["oracle_a2_star"] = oracle[0]
    _write(out.render(), args.out)
    return record


def cmd_verify(args) -> int:
    started = _now()
    results = run_suites(args.level)
    out = Output(args.format, ["suite", "status", "detail"],
                 _meta(args, "verify", started) | {"level": args.level})
    for r in results:
        out.add(suite=r.name, status="PASS" if r.passed else "FAIL", detail=r.detail)
    failed = [r.name for r in results if not r.passed]
    out.notes.append("all suites passed" if not failed else "FAILED: " + ", ".join(failed))
    _write(out.render(), args.out)
    if args.dump_table:
        with open(args.dump_table, "w", encoding="utf-8", newline="") as fh:
            write_table_csv(fh, LEVELS[args.level]["i_max"])
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_profile(args) -> int:
    started = _now()
    try:
        p = BasicStateParams(args.theta0, args.dtheta, args.eta, args.k, args.h)
        theta = basic_state_profile(p, args.z)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Output(args.format, ["z", "theta_B"], _meta(args, "profile", started))
    out.add(z=args.z, theta_B=theta)
    _write(out.render(), args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "csv", "json"), default="human")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--timestamps", action="store_true",
                        help="record start/finish times in the metadata block")

    parser = _Parser(prog="slpconv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="Ra for one (N, a2, n)")
    p.add_argument("--N", type=float, default=0.0)
    p.add_argument("--a2", type=float, required=True)
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--oracle", action="store_true", help="also run the finite-difference oracle")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", parents=[common], help="compare against the reference Rayleigh table")
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--n-converged", type=int, default=DEFAULT_N)
    p.add_argument("--gate", type=float, default=TABLE_GATE)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("curve", parents=[common], help="neutral curve Ra(a2)")
    p.add_argument("--N", type=float, default=0.0)
    p.add_argument("--a2-min", type=float, default=6.0)
    p.add_argument("--a2-max", type=float, default=14.0)
    p.add_argument("--steps", type=int, default=17)
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("critical", parents=[common], help="minimum of the neutral curve")
    p.add_argument("--N", type=float, default=0.0)
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--a2-min", type=float, default=DEFAULT_A2_BRACKET[0])
    p.add_argument("--a2-max", type=float, default=DEFAULT_A2_BRACKET[1])
    p.add_argument("--oracle", action="store_true", help="also minimize the oracle curve")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--level", choices=tuple(LEVELS), default="full")
    p.add_argument("--dump-table", metavar="PATH",
                   help="write the exact inner-product table (kind,i,k,numerator,denominator)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("profile", parents=[common], help="basic-state temperature")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--dtheta", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"slpconv {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoPositiveEigenvalue, SingularReduction, NoInteriorMinimum, OracleError) as exc:
        print(f"slpconv {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"slpconv {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, RunRecord):
        return EXIT_OK
    return int(result)


if __name__ == "__main__":
    sys.exit(main())
