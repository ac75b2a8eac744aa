"""Command line front end.

Every operation in the library is reachable as a subcommand. Results are
tables: CSV (default) with the `# metriq v1` header, JSON mirroring the
column names, or an SVG line plot for grid-valued results. Outputs are
byte-identical across runs for identical flags; nothing here reads the
clock or unseeded randomness.

Exit codes: 0 success, 1 numeric failure (a JSON error object lands on
standard output), 2 usage error (argparse text on standard error). The
verify subcommand maps its suite outcome onto the same scheme: 0 only if
every case passes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import replace

from .axiomatic import (
    d_alpha,
    chain_defect,
    eigen_check,
    leibniz_defect,
    parse_series_literal,
    series_literal,
)
from .errors import MetriqError
from .exprparse import parse
from .harness import (
    HarnessConfig,
    fit_loglog,
    reports_to_json,
    reports_to_table,
    run_axiom_suite,
    scan_verdict,
)
from .localops import FractalityParams, OperatorKind, apply_closed, apply_limit
from .nonlocalops import QuadratureSpec, local_vs_caputo_gap
from .odesolve import solve_caputo, solve_local
from .plotting import LineSet, render_svg, save_figure
from .specfun import MlArgs, mittag_leffler

__all__ = ["main"]

CSV_HEADER = "# metriq v1"


class _Table:
    """Columns, rows of float/str cells, JSON-only meta, optional plot."""

    def __init__(self, columns, rows, meta=None, plot=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = dict(meta or {})
        self.plot = plot


def _num(value, precision: int) -> str:
    return f"{float(value):.{precision + 1}g}"


def _cell(value, precision: int) -> str:
    return value if isinstance(value, str) else _num(value, precision)


def _render_csv(table: _Table, precision: int) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(c, precision) for c in row])
    return buf.getvalue()


def _render_json(table: _Table, precision: int) -> str:
    def scrub(v):
        if isinstance(v, str):
            return v
        if isinstance(v, int):
            return v
        return float(_num(v, precision))

    payload = {
        "format": "metriq v1",
        "rows": [
            dict(zip(table.columns, (scrub(c) for c in row))) for row in table.rows
        ],
    }
    if table.meta:
        payload["meta"] = {k: scrub(v) for k, v in table.meta.items()}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _write_text(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(table: _Table, args) -> int:
    if args.format == "svg":
        if table.plot is None:
            args.parser.error("--format svg needs a grid-valued result")
        _write_text(render_svg(table.plot), args.out)
    elif args.format == "json":
        _write_text(_render_json(table, args.precision), args.out)
    else:
        _write_text(_render_csv(table, args.precision), args.out)
    return 0


def _add_output_flags(sp, formats=("csv", "json", "svg")) -> None:
    sp.add_argument("--format", choices=formats, default=formats[0])
    sp.add_argument("--out", default=None, help="output path (default: stdout)")
    sp.add_argument("--precision", type=int, default=12,
                    help="digits after the leading digit (default 12)")


def _check_precision(args) -> None:
    if not 1 <= args.precision <= 17:
        args.parser.error("--precision must lie in [1, 17]")


def _fractality(args) -> FractalityParams:
    return FractalityParams(
        alpha=args.alpha, zeta=args.zeta, q=args.q, l0=args.l0, c1=args.c1
    )


def _add_fractality_flags(sp) -> None:
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--zeta", type=float, default=1.0)
    sp.add_argument("--q", type=float, default=1.0)
    sp.add_argument("--l0", type=float, default=1.0)
    sp.add_argument("--c1", type=float, default=1.0)


def _parse_ladder(text: str, error) -> tuple[float, ...]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if not m:
        error(f"--ladder must look like 3..9, got {text!r}")
    k1, k2 = int(m.group(1)), int(m.group(2))
    if not 1 <= k1 < k2 <= 40:
        error(f"--ladder bounds must satisfy 1 <= k1 < k2 <= 40, got {text!r}")
    return tuple(1.0 - 2.0**-k for k in range(k1, k2 + 1))


def _cmd_mlf(args) -> int:
    _check_precision(args)
    r = mittag_leffler(MlArgs(args.alpha, args.z, args.beta))
    table = _Table(
        ("alpha", "beta", "z", "value", "error_bound"),
        [(args.alpha, args.beta, args.z, r.value, r.error_bound)],
    )
    return _emit(table, args)


def _cmd_deriv(args) -> int:
    _check_precision(args)
    kind = OperatorKind(args.op)
    p = _fractality(args)
    f = parse(args.f)
    value = apply_closed(kind, p, f, args.x)
    columns = ["op", "f", "x", "value"]
    row = [args.op, args.f, args.x, value]
    if args.limit_eps is not None:
        finite = apply_limit(kind, p, f, args.x, args.limit_eps)
        columns += ["limit_eps", "limit_value", "difference"]
        row += [args.limit_eps, finite, finite - value]
    return _emit(_Table(columns, [row]), args)


def _cmd_axiomatic(args) -> int:
    _check_precision(args)
    if args.series is not None:
        literal = args.series
    else:
        with open(args.series_file, encoding="utf-8") as fh:
            literal = fh.read().strip()
    series = parse_series_literal(literal)
    derived = d_alpha(series, args.alpha)
    meta = {"literal": series_literal(derived)}
    if args.at is None:
        columns = ("offset", "coefficient", "exponent")
        rows = [(derived.offset, c, e) for c, e in derived.terms]
    else:
        value = derived.evaluate(args.at)
        meta["value"] = value
        columns = ("offset", "coefficient", "exponent", "at", "value")
        rows = [(derived.offset, c, e, args.at, value) for c, e in derived.terms]
        if not rows:
            rows = [(derived.offset, "", "", args.at, value)]
    return _emit(_Table(columns, rows, meta=meta), args)


def _cmd_eigen(args) -> int:
    _check_precision(args)
    mismatch = eigen_check(args.alpha, args.lam, args.terms)
    table = _Table(
        ("alpha", "lambda", "terms", "mismatch"),
        [(args.alpha, args.lam, args.terms, mismatch)],
    )
    return _emit(table, args)


def _require(args, names) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        args.parser.error(
            f"defect {args.rule} requires {', '.join(missing)}"
        )


def _cmd_defect(args) -> int:
    _check_precision(args)
    ladder = _parse_ladder(args.ladder, args.parser.error)
    if args.rule == "leibniz":
        _require(args, ("mu", "nu", "x"))
        mags = [abs(leibniz_defect(args.mu, args.nu, a, args.x)) for a in ladder]
        front = {"mu": args.mu, "nu": args.nu, "x": args.x}
    elif args.rule == "chain":
        _require(args, ("f", "w", "x0"))
        f = parse(args.f)
        w = parse_series_literal(args.w)
        mags = [abs(chain_defect(f, w, a, args.x0)) for a in ladder]
        front = {"f": args.f, "w": args.w, "x0": args.x0}
    else:
        _require(args, ("nu", "x"))
        f = parse(f"x^{args.nu:g}")
        quad = QuadratureSpec(abs_tol=args.quad_tol)
        mags = [
            local_vs_caputo_gap(
                f, OperatorKind.CONFORMABLE, FractalityParams(alpha=a), a,
                args.x, quad,
            )
            for a in ladder
        ]
        front = {"nu": args.nu, "x": args.x, "quad_tol": args.quad_tol}

    one_minus = [1.0 - a for a in ladder]
    slope, intercept, r2 = fit_loglog(one_minus, mags)
    verdict = scan_verdict(args.rule, slope, r2)
    columns = (
        ["rule"] + list(front)
        + ["alpha", "magnitude", "slope", "intercept", "r2", "verdict"]
    )
    rows = [
        [args.rule] + list(front.values())
        + [a, m, slope, intercept, r2, verdict]
        for a, m in zip(ladder, mags)
    ]
    plot = LineSet(
        x=tuple(one_minus),
        curves=((f"{args.rule} defect", tuple(mags)),),
        title=f"{args.rule} defect decay",
        xlabel="1 - alpha",
        ylabel="|defect|",
        loglog=True,
    )
    return _emit(_Table(columns, rows, plot=plot), args)


def _solve_table(result) -> _Table:
    rows = list(zip(result.grid, result.y, result.reference))
    plot = LineSet(
        x=result.grid,
        curves=(("y", result.y), ("reference", result.reference)),
        title="eigen-equation solution",
        xlabel="x",
        ylabel="y",
    )
    return _Table(
        ("x", "y", "reference"), rows,
        meta={"max_rel_err": result.max_rel_err}, plot=plot,
    )


def _cmd_solve(args) -> int:
    _check_precision(args)
    if args.mode == "local":
        result = solve_local(
            OperatorKind(args.op), _fractality(args), args.lam, args.x_end, args.h
        )
    else:
        result = solve_caputo(args.alpha, args.lam, args.x_end, args.h)
    return _emit(_solve_table(result), args)


def _cmd_verify(args) -> int:
    _check_precision(args)
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            cfg = HarnessConfig.from_json(fh.read())
    else:
        cfg = HarnessConfig()
    env_seed = os.environ.get("METRIQ_SEED")
    if env_seed is not None:
        try:
            cfg = replace(cfg, seed=int(env_seed))
        except ValueError:
            args.parser.error(f"METRIQ_SEED must be an integer, got {env_seed!r}")

    reports, summary = run_axiom_suite(cfg)
    if args.format == "json":
        text = reports_to_json(reports, summary)
    elif args.format == "table":
        text = reports_to_table(reports, summary)
    else:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ("case_id", "rule", "worst", "slope", "intercept", "r2", "verdict")
        )
        p = args.precision
        for r in reports:
            writer.writerow((
                r.case_id,
                r.rule,
                _num(max(r.magnitudes), p) if r.magnitudes else "",
                _num(r.slope, p) if r.slope is not None else "",
                _num(r.intercept, p) if r.intercept is not None else "",
                _num(r.r2, p) if r.r2 is not None else "",
                r.verdict,
            ))
        text = buf.getvalue()
    _write_text(text, args.out)

    if args.out:
        scans = [r for r in reports if r.slope is not None and r.magnitudes]
        if scans:
            xs = tuple(1.0 - a for a in scans[0].ladder)
            curves = tuple(
                (r.case_id, r.magnitudes) for r in scans
                if len(r.magnitudes) == len(xs)
            )
            fig_path = os.path.splitext(args.out)[0] + "_scans.svg"
            save_figure(
                LineSet(
                    x=xs, curves=curves, title="defect decay scans",
                    xlabel="1 - alpha", ylabel="|defect|", loglog=True,
                ),
                fig_path,
            )
    return 0 if summary.all_pass else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metriq",
        description="Deformed-derivative toolkit: local operators, series "
        "calculus, fractional oracles, solvers, and a verification suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("mlf", help="Mittag-Leffler value with error bound")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--z", type=float, required=True)
    _add_output_flags(sp, ("csv", "json"))
    sp.set_defaults(func=_cmd_mlf, parser=sp)

    sp = sub.add_parser("deriv", help="apply a local deformed derivative")
    sp.add_argument("--op", required=True, choices=[k.value for k in OperatorKind])
    sp.add_argument("--f", required=True, help="expression in x, e.g. 'x^2 + sin(x)'")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--limit-eps", dest="limit_eps", type=float, default=None)
    _add_fractality_flags(sp)
    _add_output_flags(sp, ("csv", "json"))
    sp.set_defaults(func=_cmd_deriv, parser=sp)

    sp = sub.add_parser("axiomatic", help="apply the series operator")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--series", help="literal like 'a=0; 1@0, 2.5@0.9'")
    group.add_argument("--series-file", dest="series_file",
                       help="file holding one series literal")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--at", type=float, default=None,
                    help="also evaluate the result at this point")
    _add_output_flags(sp, ("csv", "json"))
    sp.set_defaults(func=_cmd_axiomatic, parser=sp)

    sp = sub.add_parser("eigen", help="Mittag-Leffler eigenfunction residual")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--terms", type=int, required=True)
    _add_output_flags(sp, ("csv", "json"))
    sp.set_defaults(func=_cmd_eigen, parser=sp)

    sp = sub.add_parser("defect", help="defect scan over an alpha ladder")
    sp.add_argument("rule", choices=("leibniz", "chain", "caputo-gap"))
    sp.add_argument("--ladder", required=True,
                    help="k1..k2 meaning alpha = 1 - 2^-k for k in k1..k2")
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--nu", type=float, default=None)
    sp.add_argument("--x", type=float, default=None)
    sp.add_argument("--f", default=None)
    sp.add_argument("--w", default=None, help="series literal for the inner map")
    sp.add_argument("--x0", type=float, default=None)
    sp.add_argument("--quad-tol", dest="quad_tol", type=float, default=1e-8)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_defect, parser=sp)

    sp = sub.add_parser("solve", help="integrate the eigen-equation")
    sp.add_argument("mode", choices=("local", "caputo"))
    sp.add_argument("--op", default="conformable",
                    choices=[k.value for k in OperatorKind])
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--x-end", dest="x_end", type=float, required=True)
    sp.add_argument("--h", type=float, required=True)
    _add_fractality_flags(sp)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_solve, parser=sp)

    sp = sub.add_parser("verify", help="run the full verification suite")
    sp.add_argument("--config", default=None, help="JSON harness config file")
    _add_output_flags(sp, ("json", "csv", "table"))
    sp.set_defaults(func=_cmd_verify, parser=sp)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MetriqError as e:
        sys.stdout.write(json.dumps(
            {"error": type(e).__name__, "message": str(e)}, sort_keys=True,
        ) + "\n")
        return 1
