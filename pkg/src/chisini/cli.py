"""Command-line interface.

Exit codes: 0 ok, 2 unsolvable, 3 property or certificate failure, 4 usage
or input error.  Every nonzero exit ends with one line of the form
``exit=<code> reason=<word> detail="<text>"``.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from .catalog import describe, from_spec, names
from .config import DEFAULT_CONFIG, SolverConfig
from .domain import Interval
from .errors import ChisiniError, NotIdempotizable, Unsolvable
from .solver import check_solvable, idempotize, metric_solution, q_solution
from .verify import continuity_certificate, run_property_suite, to_json_text

EXIT_OK, EXIT_UNSOLVABLE, EXIT_FAIL, EXIT_USAGE = 0, 2, 3, 4

KIND_CHOICES = ("metric", "q-mid", "q-left", "q-right")
_POLICY = {"q-mid": "midpoint", "q-left": "leftmost", "q-right": "rightmost"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class _Exit(Exception):
    code: int
    reason: str
    detail: str


def fmt(v: float) -> str:
    """Shortest decimal up to 12 significant digits."""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    s = repr(v)
    if len(re.sub(r"[^0-9]", "", s.split("e")[0]).lstrip("0")) <= 12:
        return s[:-2] if s.endswith(".0") else s
    return f"{v:.12g}"


_BOX_RE = re.compile(r"^\s*([\[(]?)\s*([^,\s]+)\s*,\s*([^,\s\])]+)\s*([\])]?)\s*$")


def parse_box(text: str) -> Interval:
    """``lo,hi`` (closed) or bracket notation such as ``(-1,1)`` or ``[0,inf)``."""
    m = _BOX_RE.match(text)
    if not m:
        raise UsageError(f"bad --box {text!r}; expected lo,hi")
    left, lo, hi, right = m.groups()
    try:
        lo_v, hi_v = float(lo), float(hi)
    except ValueError:
        raise UsageError(f"bad --box {text!r}; endpoints must be numbers") from None
    try:
        return Interval(lo_v, hi_v, left != "(", right != ")")
    except ValueError as exc:
        raise UsageError(f"bad --box {text!r}: {exc}") from None


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"bad point {text!r}; expected comma-separated numbers") from None


def _common(p):
    p.add_argument("spec", help="catalog name[:key=val,...] or @gridfile")
    p.add_argument("--box", help="interval override, e.g. 0,1 or (-1,1)")
    p.add_argument("--tol-val", type=float, default=DEFAULT_CONFIG.tol_val)
    p.add_argument("--tol-dom", type=float, default=DEFAULT_CONFIG.tol_dom)
    p.add_argument("--oracle-grid", type=int, default=DEFAULT_CONFIG.oracle_grid)
    p.add_argument("--scan", type=int, default=DEFAULT_CONFIG.levelset_scan)
    p.add_argument("--seed", type=int, default=DEFAULT_CONFIG.rng_seed)
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "text", "json-text"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chisini", description="Solutions of the Chisini equation F = delta_F o G.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("catalog", help="list built-in functions")

    p = sub.add_parser("eval", help="evaluate F, the solution and level data at points")
    _common(p)
    p.add_argument("-p", "--point", action="append", required=True, help="x1,x2,... (repeatable)")
    p.add_argument("--kind", choices=KIND_CHOICES, default="metric")

    p = sub.add_parser("grid", help="export an n=2 grid of F and/or the metric solution as CSV")
    _common(p)
    p.add_argument("-r", "--resolution", type=int, default=101)
    p.add_argument("--which", choices=("F", "MF", "both"), default="both")

    p = sub.add_parser("check", help="solvability report and continuity certificate")
    _common(p)

    p = sub.add_parser("verify", help="run the property suite")
    _common(p)
    p.add_argument("--kind", choices=KIND_CHOICES, default="metric")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("idempotize", help="evaluate delta_F^{-1} o F at points")
    _common(p)
    p.add_argument("-p", "--point", action="append", required=True)
    p.add_argument("--closed-form-check", action="store_true")
    return parser


def _config(args) -> SolverConfig:
    try:
        return SolverConfig(tol_val=args.tol_val, tol_dom=args.tol_dom, oracle_grid=args.oracle_grid,
                            levelset_scan=args.scan, rng_seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _function(args):
    box = parse_box(args.box) if args.box else None
    return from_spec(args.spec, box)


def _solution(F, kind, cfg):
    if kind == "metric":
        return metric_solution(F, cfg)
    return q_solution(F, _POLICY[kind], cfg)


def _points(F, raw):
    pts = [parse_point(t) for t in raw]
    for x in pts:
        if len(x) != F.arity:
            raise UsageError(f"point {','.join(raw)} has {len(x)} coordinates, F has arity {F.arity}")
    return np.vstack(pts)


def _emit_table(header, rows, fmt_name, out):
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
        out.write(buf.getvalue())
    elif fmt_name == "json-text":
        out.write(to_json_text([dict(zip(header, r)) for r in rows]) + "\n")
    else:
        for r in rows:
            out.write(" ".join(f"{h}={fmt(v) if isinstance(v, (float, np.floating)) else v}"
                               for h, v in zip(header, r)) + "\n")


def cmd_catalog(args, out):
    for name in names():
        out.write(f"{name}: {describe(name)}\n")
    return EXIT_OK


def cmd_eval(args, out):
    cfg = _config(args)
    F = _function(args)
    X = _points(F, args.point)
    sol = _solution(F, args.kind, cfg)
    ld = sol.level_data(X) if hasattr(sol, "level_data") else None
    G = sol.evaluate(X)
    label = "MF" if args.kind == "metric" else "G"
    header = [f"x{i + 1}" for i in range(F.arity)] + ["F", label, "a", "b", "dlt", "dgt", "omega"]
    rows = []
    for j in range(len(X)):
        rows.append(list(X[j]) + [ld.y[j], G[j], ld.a[j], ld.b[j], ld.d_lt[j], ld.d_gt[j],
                                  "true" if ld.in_omega[j] else "false"])
    _emit_table(header, rows, args.format or "text", out)
    return EXIT_OK


def cmd_grid(args, out):
    cfg = _config(args)
    F = _function(args)
    if F.arity != 2:
        raise UsageError(f"grid export needs n=2, got n={F.arity}")
    if args.resolution < 2:
        raise UsageError("resolution must be at least 2")
    lo, hi = F.box.sample_bounds(cfg.open_margin) if not F.box.interval.is_compact else F.bounds()
    axis = np.linspace(lo, hi, args.resolution)
    X = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    header = ["x1", "x2"]
    cols = [X[:, 0], X[:, 1]]
    if args.which in ("F", "both"):
        header.append("F")
        cols.append(F.evaluate(X))
    if args.which in ("MF", "both"):
        header.append("MF")
        cols.append(metric_solution(F, cfg).evaluate(X))
    rows = [list(r) for r in np.column_stack(cols)]
    _emit_table(header, rows, args.format or "csv", out)
    return EXIT_OK


def cmd_check(args, out):
    cfg = _config(args)
    F = _function(args)
    report = check_solvable(F, cfg)
    if args.format == "json-text":
        payload = {"solvability": report.to_dict()}
    else:
        out.write(report.to_text() + "\n")
    if not report.range_equal:
        if args.format == "json-text":
            out.write(to_json_text(payload) + "\n")
        raise _Exit(EXIT_UNSOLVABLE, "unsolvable",
                    f"range mismatch: F({','.join(fmt(v) for v in report.witness)})={fmt(report.witness_value)} "
                    f"is not in ran(delta_F)={report.ran_diag}")
    cert = continuity_certificate(F, cfg)
    if args.format == "json-text":
        payload["continuity"] = cert.to_dict()
        out.write(to_json_text(payload) + "\n")
    else:
        out.write(cert.to_text() + "\n")
    if not cert.passed:
        failed = cert.failed_conditions()
        w = cert.violations[0] if cert.violations else None
        where = f" witness=({','.join(fmt(v) for v in w.point)})" if w else ""
        raise _Exit(EXIT_FAIL, "certificate", f"failed condition(s) {','.join(failed)}{where}")
    return EXIT_OK


def cmd_verify(args, out):
    cfg = _config(args)
    F = _function(args)
    sol = _solution(F, args.kind, cfg)
    reports = run_property_suite(F, sol, cfg, samples=args.samples)
    if args.format == "json-text":
        out.write(to_json_text(reports) + "\n")
    else:
        for r in reports:
            out.write(r.to_text() + "\n")
    failed = [r.property_id for r in reports if not r.passed]
    if failed:
        raise _Exit(EXIT_FAIL, "property", f"failed: {','.join(failed)}")
    return EXIT_OK


def cmd_idempotize(args, out):
    cfg = _config(args)
    F = _function(args)
    X = _points(F, args.point)
    G = idempotize(F, cfg)
    vals = G.evaluate(X)
    header = [f"x{i + 1}" for i in range(F.arity)] + ["G"]
    rows = [list(X[j]) + [vals[j]] for j in range(len(X))]
    closed = F.meta.closed_form_mean
    worst = None
    if args.closed_form_check:
        if closed is None:
            raise UsageError(f"{F.name} has no closed form to check against")
        ref = closed(X)
        header.append("closed_form")
        for j in range(len(X)):
            rows[j].append(ref[j])
        worst = float(np.max(np.abs(ref - vals)))
    _emit_table(header, rows, args.format or "text", out)
    if worst is not None:
        out.write(f"closed_form_max_abs_diff={fmt(worst)}\n")
        if worst > cfg.tol_val:
            raise _Exit(EXIT_FAIL, "closed-form", f"max |difference| {fmt(worst)} exceeds tol_val")
    return EXIT_OK


COMMANDS = {
    "catalog": cmd_catalog,
    "eval": cmd_eval,
    "grid": cmd_grid,
    "check": cmd_check,
    "verify": cmd_verify,
    "idempotize": cmd_idempotize,
}


def _tail(code, reason, detail, stream):
    detail = detail.replace('"', "'").replace("\n", " ")
    stream.write(f'exit={code} reason={reason} detail="{detail}"\n')


def main(argv=None) -> int:
    parser = build_parser()
    out_handle = None
    stdout = sys.stdout
    try:
        args = parser.parse_args(argv)
        out = stdout
        if getattr(args, "out", None):
            out_handle = open(args.out, "w", encoding="utf-8", newline="")
            out = out_handle
        return COMMANDS[args.command](args, out)
    except _Exit as e:
        _tail(e.code, e.reason, e.detail, stdout)
        return e.code
    except UsageError as e:
        _tail(EXIT_USAGE, "usage", str(e), stdout)
        return EXIT_USAGE
    except Unsolvable as e:
        _tail(EXIT_UNSOLVABLE, "unsolvable", str(e), stdout)
        return EXIT_UNSOLVABLE
    except NotIdempotizable as e:
        _tail(EXIT_USAGE, "not-idempotizable", str(e), stdout)
        return EXIT_USAGE
    except (ChisiniError, OSError) as e:
        _tail(EXIT_USAGE, "input", f"{type(e).__name__}: {e}", stdout)
        return EXIT_USAGE
    finally:
        if out_handle is not None:
            out_handle.close()


if __name__ == "__main__":
    sys.exit(main())
