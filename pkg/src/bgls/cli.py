"""Command-line front end.

Exit codes: 0 ok, 1 configuration error, 2 numerical divergence,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import __version__
from .errors import DivergenceError, InvariantError, ValidationError
from .gamma_oracle import log_core_integral
from .poincare import ScanCase, sharpness_scan, theorem1_verify
from .psi import GridSpec, bgls_norm, constant_psi, make_power_psi, make_tail_psi
from .quadrature import QuadratureConfig, core_integral_quadrature, lp_norm_weighted
from .radial import (
    DomainSpec,
    PoincareParams,
    center,
    constant_profile,
    make_u_delta,
    make_v_delta,
)
from .svg import line_plot
from .weighted import nu_search

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_INTERNAL = 0, 1, 2, 3

SHARPNESS_COLUMNS = ("p", "eps", "num_norm", "den_norm", "V")
ORACLE_TOLERANCE = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--d", type=int, default=2, help="dimension (>= 2)")
    sp.add_argument("--alpha", type=float, default=0.0, help="weight exponent alpha > -1")
    sp.add_argument("--Delta", type=float, default=2.0, help="log-power exponent of the extremal (> 1)")
    sp.add_argument("--domain", choices=("ball", "exterior"), default="ball")
    sp.add_argument("--delta-model", choices=("origin", "boundary"), default="origin")
    sp.add_argument("--rel-tol", type=float, default=1e-9)
    sp.add_argument("--abs-tol", type=float, default=1e-12)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None, help="write the table here instead of stdout")
    sp.add_argument("--plot", default=None, help="optional SVG plot path")
    sp.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bgls", description="Poincare-type norms in bilateral grand Lebesgue spaces")
    parser.add_argument("--version", action="version", version=f"bgls {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("norm", help="weighted L_p norms and the grand-space norm")
    _add_common(sp)
    sp.add_argument("--f", choices=("const", "u-delta", "v-delta"), default="const")
    sp.add_argument("--c", type=float, default=1.0, help="value of the constant function")
    sp.add_argument("--core-only", action="store_true")
    sp.add_argument("--center", action="store_true", help="subtract the mean (ball only)")
    sp.add_argument("--gradient", action="store_true", help="norm of |grad f| instead of f")
    sp.add_argument("--weight-exp", type=float, default=0.0, help="divide by delta**weight_exp")
    sp.add_argument("--p", type=float, action="append", help="exponent (repeatable)")
    sp.add_argument("--p-min", type=float, default=None)
    sp.add_argument("--p-max", type=float, default=None)
    sp.add_argument("--p-count", type=int, default=16)
    sp.add_argument("--spacing", choices=("linear", "geometric-to-p0"), default="linear")
    _add_psi(sp)

    sp = sub.add_parser("sharpness", help="V(f,p) near the critical exponent or at large p")
    _add_common(sp)
    sp.add_argument("--case", choices=[c.value for c in ScanCase], default="bounded")
    sp.add_argument("--eps-max", type=float, default=0.3)
    sp.add_argument("--eps-min", type=float, default=1e-3)
    sp.add_argument("--p-min", type=float, default=10.0, help="infinity case only")
    sp.add_argument("--p-max", type=float, default=200.0, help="infinity case only")
    sp.add_argument("--count", type=int, default=12)
    sp.add_argument("--report", choices=("V", "numerator-slope", "denominator-slope"), default="V")

    sp = sub.add_parser("theorem1", help="empirical constant of the space-level bound")
    _add_common(sp)
    sp.add_argument("--f", choices=("const", "u-delta", "v-delta"), default="u-delta")
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0, help="negative for the exterior tail family")
    sp.add_argument("--grid-n", type=int, default=256)
    sp.add_argument("--grid-offset", type=float, default=1e-6)
    sp.add_argument("--grid-cap", type=float, default=200.0)

    sp = sub.add_parser("nu", help="the inf-transform nu(q)")
    _add_common(sp)
    _add_psi(sp)
    sp.add_argument("--q", type=float, action="append")
    sp.add_argument("--q-min", type=float, default=None)
    sp.add_argument("--q-max", type=float, default=None)
    sp.add_argument("--q-count", type=int, default=8)
    sp.add_argument("--grid-n", type=int, default=512)

    sp = sub.add_parser("oracle-check", help="quadrature versus incomplete-gamma closed form")
    _add_common(sp)
    sp.add_argument("--s-min", type=float, default=0.05)
    sp.add_argument("--s-max", type=float, default=5.0)
    sp.add_argument("--s-count", type=int, default=8)
    sp.add_argument("--m-max", type=float, default=12.0)
    sp.add_argument("--m-count", type=int, default=6)
    return parser


def _add_psi(sp):
    sp.add_argument("--psi", choices=("const", "power", "tail"), default="const")
    sp.add_argument("--psi-a", type=float, default=1.0)
    sp.add_argument("--psi-b", type=float, default=math.inf)
    sp.add_argument("--psi-c", type=float, default=1.0, help="value of the constant psi")
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--gamma", type=float, default=0.0)


# --- helpers ---------------------------------------------------------------


def _clean(x: Any) -> Any:
    # JSON has no infinities; "inf"/"-inf"/"nan" round-trip through float()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return _clean(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


# execution hints that cannot change any number in the report
_NOT_ECHOED = frozenset({"threads"})


def _config_dict(args) -> dict:
    return _clean({k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED})


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _domain(args) -> DomainSpec:
    if args.domain == "ball":
        return DomainSpec.ball(args.d, args.delta_model)
    if args.delta_model != "origin":
        raise ValidationError("the exterior domain only supports --delta-model origin")
    return DomainSpec.exterior(args.d)


def _profile(args, domain):
    if args.f == "const":
        return constant_profile(args.c, domain)
    if args.f == "u-delta":
        if not domain.bounded:
            raise ValidationError("u-delta lives on the unit ball (--domain ball)")
        return make_u_delta(args.Delta, args.d, core_only=getattr(args, "core_only", False))
    if domain.bounded:
        raise ValidationError("v-delta lives on the exterior domain (--domain exterior)")
    return make_v_delta(args.Delta, args.d, core_only=getattr(args, "core_only", False))


def _psi(args):
    if args.psi == "const":
        return constant_psi(args.psi_c, args.psi_a, args.psi_b)
    if args.psi == "power":
        return make_power_psi(args.psi_a, args.psi_b, args.beta, args.gamma)
    return make_tail_psi(args.psi_a, args.beta, args.gamma)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows, footer) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    for k, v in footer:
        w.writerow([k, _fmt(v)])
    return buf.getvalue()


def _emit(args, header, rows, footer, payload) -> None:
    if args.format == "csv":
        text = _csv(header, rows, footer)
    else:
        doc = {"command": args.command, "version": __version__, "config": _config_dict(args)}
        doc.update(payload)
        text = json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_plot(args, svg: str) -> None:
    if args.plot:
        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write(svg)


# --- commands ----------------------------------------------------------------


def _p_values(args, params):
    if args.p:
        return [float(p) for p in args.p]
    if args.p_min is None or args.p_max is None:
        raise ValidationError("give --p (repeatable) or both --p-min and --p-max")
    if args.spacing == "linear":
        return [float(p) for p in np.linspace(args.p_min, args.p_max, args.p_count)]
    p0 = params.p0
    lo, hi = args.p_min - p0, args.p_max - p0
    if lo == 0.0 or hi == 0.0 or (lo < 0) != (hi < 0):
        raise ValidationError("geometric-to-p0 spacing needs both ends on one side of p0")
    sgn = math.copysign(1.0, lo)
    return sorted(float(p0 + sgn * e) for e in np.geomspace(abs(lo), abs(hi), args.p_count))


def cmd_norm(args) -> int:
    params = PoincareParams(args.alpha, args.d)
    domain = _domain(args)
    quad = _quad(args)
    f = _profile(args, domain)
    if args.center:
        f = center(f, domain, quad)
    psi = _psi(args)
    ps = _p_values(args, params)
    results = {}
    for p in ps:
        if p < 1.0:
            raise ValidationError(f"p must be >= 1, got {p}")
        results[p] = lp_norm_weighted(f, domain, p, args.weight_exp, quad, gradient=args.gradient)
    diverged = [p for p, r in results.items() if r.diverged or not r.converged]
    rows = []
    for p in ps:
        val = results[p].value
        ps_val = psi(p)
        rows.append((p, val, ps_val, val / ps_val if math.isfinite(ps_val) else 0.0))
    inside = [r for r in rows if psi.interval.a < r[0] < psi.interval.b and math.isfinite(r[1])]
    summary = None
    if inside and not diverged:
        table = {r[0]: r[1] for r in inside}
        grid_pts = [r[0] for r in inside]
        best = bgls_norm(lambda p: table[p], psi, grid_pts)
        summary = {"bgls_norm": best.value, "argmax_p": best.argmax_p, "grid_size": best.grid_size}
    footer = []
    if summary:
        footer = [("bgls_norm", summary["bgls_norm"]), ("argmax_p", summary["argmax_p"])]
    payload = {
        "rows": [dict(zip(("p", "norm", "psi", "ratio"), r)) for r in rows],
        "summary": summary,
        "diverged_p": diverged,
    }
    _emit(args, ("p", "norm", "psi", "ratio"), rows, footer, payload)
    _write_plot(
        args,
        line_plot([("|f|_p", [r[0] for r in rows], [r[1] for r in rows])], title="weighted norm",
                  xlabel="p", ylabel="norm", logy=True),
    )
    if diverged:
        raise DivergenceError(f"norm diverged or failed to converge at p = {diverged}")
    return EXIT_OK


def cmd_sharpness(args) -> int:
    params = PoincareParams(args.alpha, args.d)
    case = ScanCase(args.case)
    if case is ScanCase.UNBOUNDED_INFINITY:
        grid = np.geomspace(args.p_min, args.p_max, args.count)
    else:
        grid = np.geomspace(args.eps_max, args.eps_min, args.count)
    res = sharpness_scan(case, args.Delta, params, _quad(args), grid, workers=args.threads)
    fit = {"V": res.fit, "numerator-slope": res.num_fit, "denominator-slope": res.den_fit}[args.report]
    rows = [(r.p, r.eps, r.num_norm, r.den_norm, r.V) for r in res.rows]
    footer = [("slope", fit.slope), ("residual", fit.residual)]
    payload = {
        "case": case.value,
        "report": args.report,
        "rows": [dict(zip(SHARPNESS_COLUMNS, r)) for r in rows],
        "fit": {"slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual},
        "v_fit": {"slope": res.fit.slope, "intercept": res.fit.intercept, "residual": res.fit.residual},
        "v_min": res.v_min,
        "v_max": res.v_max,
        "dropped_p": list(res.dropped),
        "meta": res.meta,
    }
    _emit(args, SHARPNESS_COLUMNS, rows, footer, payload)
    gaps = [params.gap(r.p) for r in res.rows]
    _write_plot(
        args,
        line_plot(
            [
                ("V", gaps, [r.V for r in res.rows]),
                ("numerator", gaps, [r.num_norm for r in res.rows]),
                ("gradient", gaps, [r.den_norm for r in res.rows]),
            ],
            title=f"sharpness scan ({case.value})",
            xlabel="|d - p(1+alpha)|",
            ylabel="value",
            logx=True,
            logy=True,
        ),
    )
    return EXIT_OK


def cmd_theorem1(args) -> int:
    params = PoincareParams(args.alpha, args.d)
    domain = _domain(args)
    f = _profile(args, domain)
    if domain.bounded:
        psi = make_power_psi(1.0, params.p0, args.beta, args.gamma)
    else:
        psi = make_tail_psi(params.p0, args.beta, args.gamma)
    grid = GridSpec(args.grid_n, args.grid_offset, args.grid_cap)
    rep = theorem1_verify(f, domain, params, psi, grid, _quad(args), workers=args.threads)
    if not all(rep.estimated_c >= r for _, r in rep.rows):
        raise InvariantError("estimated constant is below a per-exponent ratio")
    footer = [
        ("estimated_c", rep.estimated_c),
        ("argmax_p", rep.argmax_p),
        ("grid_stable", rep.grid_stable),
        ("doubled_c", rep.doubled_c),
    ]
    payload = {
        "estimatedC": rep.estimated_c,
        "argmaxP": rep.argmax_p,
        "gridStable": rep.grid_stable,
        "gridSize": rep.grid_size,
        "doubledC": rep.doubled_c,
        "rows": [{"p": p, "ratio": r} for p, r in rep.rows],
        "dropped_p": list(rep.dropped),
    }
    _emit(args, ("p", "ratio"), rep.rows, footer, payload)
    _write_plot(
        args,
        line_plot([("V", [p for p, _ in rep.rows], [r for _, r in rep.rows])], title="per-exponent ratio",
                  xlabel="p", ylabel="V"),
    )
    return EXIT_OK


def cmd_nu(args) -> int:
    psi = _psi(args)
    if args.q:
        qs = [float(q) for q in args.q]
    elif args.q_min is not None and args.q_max is not None:
        qs = [float(q) for q in np.linspace(args.q_min, args.q_max, args.q_count)]
    else:
        raise ValidationError("give --q (repeatable) or both --q-min and --q-max")
    rows = []
    for q in qs:
        if not q > 1.0 + args.alpha:
            raise ValidationError(f"need q > 1 + alpha, got q={q}")
        value, argmin = nu_search(psi, args.alpha, q, args.grid_n)
        rows.append((q, value, argmin))
    payload = {"rows": [{"q": q, "nu": v, "argmin_p": a} for q, v, a in rows]}
    _emit(args, ("q", "nu", "argmin_p"), rows, [], payload)
    _write_plot(args, line_plot([("nu", [r[0] for r in rows], [r[1] for r in rows])], title="nu(q)",
                                xlabel="q", ylabel="nu"))
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    quad = _quad(args)
    rows = []
    for s in np.geomspace(args.s_min, args.s_max, args.s_count):
        for m in np.linspace(0.0, args.m_max, args.m_count):
            q = core_integral_quadrature(float(s), float(m), quad)
            o = log_core_integral(float(s), float(m))
            rel = abs(math.expm1(q.log_abs - o))
            rows.append((float(s), float(m), q.log_abs, o, rel))
    worst = max(r[4] for r in rows)
    passed = worst <= ORACLE_TOLERANCE
    payload = {
        "rows": [dict(zip(("s", "m", "log_quadrature", "log_oracle", "rel_err"), r)) for r in rows],
        "max_rel_err": worst,
        "tolerance": ORACLE_TOLERANCE,
        "passed": passed,
    }
    _emit(args, ("s", "m", "log_quadrature", "log_oracle", "rel_err"), rows,
          [("max_rel_err", worst), ("passed", passed)], payload)
    if not passed:
        raise InvariantError(f"quadrature and oracle differ by {worst:.3e}")
    return EXIT_OK


COMMANDS = {
    "norm": cmd_norm,
    "sharpness": cmd_sharpness,
    "theorem1": cmd_theorem1,
    "nu": cmd_nu,
    "oracle-check": cmd_oracle_check,
}


def _fail(code: int, exc: Exception, as_json: bool) -> int:
    if as_json:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}, "exit_code": code}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"bgls: error: {exc}\n")
    return code


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    as_json = any(
        a == "--format=json" or (a == "--format" and i + 1 < len(argv) and argv[i + 1] == "json")
        for i, a in enumerate(argv)
    )
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        return _fail(EXIT_CONFIG, exc, as_json)
    except DivergenceError as exc:
        return _fail(EXIT_DIVERGED, exc, as_json)
    except InvariantError as exc:
        return _fail(EXIT_INTERNAL, exc, as_json)


if __name__ == "__main__":
    sys.exit(main())
