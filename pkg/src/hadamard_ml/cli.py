"""Command-line interface: ``hadamard-ml <command> [flags]``.

Exit codes: 0 success (all checks pass), 1 a verification failed or an
I/O error occurred, 2 usage error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import DomainError, NonConvergence, StepTooSmall
from .fractional_ops import (
    FrakD,
    HyperBessel,
    InvXD,
    Mixed,
    eigen_check,
    frak_d,
    hadamard_derivative,
    hadamard_integral,
    log_power_rule,
)
from .functions import ML, AlphaExp, FunctionSpec, LogPower, Power, parse_function_spec
from .lamb_bateman import lamb_lhs, lamb_lhs_power, solution_spec, solve_given_f, verify_power_solution
from .operational_solver import (
    Basis,
    CoefficientOperator,
    CoefficientVector,
    laguerre_heat,
    laguerre_heat_residual,
    polynomial_vector,
    read_operator,
    read_vector,
    residual_check,
    solve_bvp,
    solve_ivp,
)
from .series_engine import Status
from .special_functions import (
    MLParams,
    WrightParams,
    alpha_l_exponential,
    alpha_mittag_leffler,
    generalized_wright,
    l_exponential,
)
from .verify import identity_suite, laplace_alphaexp_check, laplace_ml_check, rel_error

FIGURE_ALPHAS = {
    "fig1": (0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
    "fig2": (0.0, -0.1, -0.2, -0.3),
}


class UsageError(Exception):
    """Malformed flags or inputs."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any]
    results: List[Dict[str, Any]] = field(default_factory=list)
    passed: bool = True
    nonconverged: bool = False
    notes: List[str] = field(default_factory=list)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _json_safe(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def render(report: Report, fmt: str, seconds: Optional[float]) -> str:
    if fmt == "json":
        doc = {
            "command": report.command,
            "inputs": report.inputs,
            "results": report.results,
            "pass": report.passed,
            "version": __version__,
            "seconds": seconds,
        }
        return json.dumps(_json_safe(doc), indent=2) + "\n"
    lines = []
    if fmt == "csv":
        if report.results:
            keys = list(report.results[0])
            lines.append(",".join(keys))
            lines.extend(",".join(_fmt(r.get(k)) for k in keys) for r in report.results)
    else:
        lines.extend(" ".join(f"{k}={_fmt(v)}" for k, v in r.items()) for r in report.results)
        lines.extend(report.notes)
        lines.append("pass" if report.passed else "FAIL")
    return "".join(line + "\n" for line in lines)


# parsing helpers ------------------------------------------------------------


def float_list(text: str) -> List[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def function_spec(text: str) -> FunctionSpec:
    try:
        return parse_function_spec(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def operator_arg(text: str) -> CoefficientOperator:
    """A matrix file, or ``d1:BASIS:DIM`` / ``d2:BASIS:DIM`` / ``zero:BASIS:DIM``."""
    if os.path.exists(text):
        return read_operator(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"operator must be a file or NAME:BASIS:DIM, got {text!r}")
    name, basis, dim = parts[0].lower(), Basis.parse(parts[1]), int(parts[2])
    if name == "d1":
        return CoefficientOperator.derivative(basis, dim)
    if name == "d2":
        return CoefficientOperator.second_derivative(basis, dim)
    if name == "zero":
        return CoefficientOperator(basis, np.zeros((dim, dim)))
    raise DomainError(f"unknown built-in operator {name!r}; expected d1, d2 or zero")


def vector_arg(text: str) -> CoefficientVector:
    """A coefficient file, or inline ``BASIS:c0,c1,...``."""
    if os.path.exists(text):
        return read_vector(text)
    basis, sep, body = text.partition(":")
    if not sep:
        raise DomainError(f"data must be a file or BASIS:c0,c1,..., got {text!r}")
    try:
        coeffs = [float(c) for c in body.split(",")]
    except ValueError:
        raise DomainError(f"non-numeric coefficient in {text!r}") from None
    return CoefficientVector(Basis.parse(basis), np.array(coeffs))


def wright_pairs(text: str):
    try:
        return tuple(tuple(float(v) for v in chunk.split(",", 1)) for chunk in text.split(";"))
    except ValueError:
        raise DomainError(f"Wright pairs must look like 'a,A;b,B', got {text!r}") from None


# commands ---------------------------------------------------------------------


def _series_row(x, res) -> Dict[str, Any]:
    return {
        "x": x,
        "value": res.value,
        "abs_error_est": res.abs_error_est,
        "terms_used": res.terms_used,
        "status": res.status.value,
    }


def cmd_eval(args, rep: Report):
    fam = args.family
    for x in args.x:
        if fam == "alexp":
            res = alpha_l_exponential(args.alpha, args.lam * x)
        elif fam == "ml":
            res = alpha_mittag_leffler(MLParams(args.alpha, args.nu, args.gamma), args.lam * x**args.nu)
        elif fam == "lexp":
            res = l_exponential(args.n, args.lam * x)
        elif fam == "wright":
            if not (args.upper and args.lower):
                raise UsageError("wright needs --upper and --lower, e.g. --upper 1,1 --lower 2,0.5;2,0.5")
            res = generalized_wright(WrightParams(wright_pairs(args.upper), wright_pairs(args.lower)), x)
        else:
            if args.f is None:
                raise UsageError("eval spec needs --f")
            rep.results.append({"x": x, "value": args.f(x)})
            continue
        if res.status is not Status.Converged:
            rep.nonconverged = True
        rep.results.append(_series_row(x, res))


def _hadamard_exact(f: FunctionSpec, alpha: float, a: float, x: float) -> Optional[float]:
    """Closed form of ``D^alpha f`` (alpha >= 0) or ``J^{-alpha} f`` (alpha < 0) when known."""
    if isinstance(f, Power) and a == 0:
        return f.coef * f.beta**alpha * x**f.beta
    if isinstance(f, LogPower) and a == f.a:
        return f.coef * log_power_rule(f.c, alpha) * math.log(x / a) ** (f.c - alpha)
    return None


def cmd_hadamard(args, rep: Report):
    f = args.f
    a = args.a if args.a is not None else (f.a if isinstance(f, LogPower) else 0.0)
    for x in args.x:
        row: Dict[str, Any] = {"x": x}
        if args.integral:
            res = hadamard_integral(f, args.alpha, a, x)
            row["value"], row["abs_error_est"] = res.value, res.abs_error_est
            exact = _hadamard_exact(f, -args.alpha, a, x)
        else:
            row["value"] = hadamard_derivative(f, args.alpha, a, x)
            exact = _hadamard_exact(f, args.alpha, a, x)
        row["exact"] = exact
        row["rel_error"] = None if exact is None else rel_error(row["value"], exact)
        if exact is not None and row["rel_error"] > args.tol:
            rep.passed = False
        rep.results.append(row)


def cmd_frakd(args, rep: Report):
    f = args.f
    for x in args.x:
        value = frak_d(f, args.alpha, x)
        exact = None
        if isinstance(f, Power):
            exact = f.coef * f.beta ** (args.alpha + 1.0) * x ** (f.beta - 1.0)
        elif isinstance(f, AlphaExp) and f.alpha == args.alpha:
            exact = f.lam * f(x)
        err = None if exact is None else rel_error(value, exact)
        if err is not None and err > args.tol:
            rep.passed = False
        rep.results.append({"x": x, "value": value, "exact": exact, "rel_error": err})


def cmd_laplace_check(args, rep: Report):
    for s in args.s:
        if args.family == "alexp":
            check = laplace_alphaexp_check(args.alpha, s, args.tol)
        else:
            check = laplace_ml_check(args.alpha, args.nu, args.gamma, args.lam, s, args.tol)
        rep.passed &= check.passed
        rep.results.append({"s": s, "quadrature": check.value, "closed_form": check.reference,
                            "rel_error": check.error, "pass": check.passed})


def _eigen_operator(args):
    if args.op == "frakd":
        return FrakD(args.alpha)
    if args.op == "mixed":
        return Mixed(args.r, args.alpha)
    if args.op == "invxd":
        return InvXD(args.alpha + 1.0)
    return HyperBessel(args.nu, args.n)


def cmd_eigen_check(args, rep: Report):
    op = _eigen_operator(args)
    f = args.f
    if f is None:
        if isinstance(op, HyperBessel):
            f = ML(args.n, args.nu, 1.0, args.lam if args.lam is not None else 1.0)
        else:
            f = AlphaExp(args.alpha, args.lam if args.lam is not None else 1.0)
    res = eigen_check(op, f, args.lam, args.x, args.tol)
    rep.inputs["operator"] = repr(op)
    rep.inputs["function"] = repr(f)
    rep.passed = res.passed
    rep.results.extend({"x": x, "rel_residual": r} for x, r in zip(res.grid, res.residuals))


def _solver_rows(report, rep: Report, args):
    for x, t, value, tail in report.rows():
        rep.results.append({"x": x, "t": t, "value": value, "tail_est": tail})
    if args.residual:
        summary = residual_check(report, tol=args.residual_tol)
        rep.passed = summary.passed
        rep.inputs["residual_relative"] = summary.relative
        rep.notes.append(f"residual relative={_fmt(summary.relative)} tol={_fmt(args.residual_tol)}")


def cmd_solve_ivp(args, rep: Report):
    report = solve_ivp(args.operator, args.data, args.alpha, args.t, args.x, args.series_tol, args.rmax)
    _solver_rows(report, rep, args)


def cmd_solve_bvp(args, rep: Report):
    report = solve_bvp(args.operator, args.data, args.alpha, args.x, args.t, args.series_tol, args.rmax)
    _solver_rows(report, rep, args)


def cmd_laguerre_heat(args, rep: Report):
    s = polynomial_vector(args.s)
    for x in args.x:
        for t in args.t:
            res = laguerre_heat_residual(s, x, t)
            rep.passed &= res <= args.tol
            rep.results.append({"x": x, "t": t, "value": laguerre_heat(s, x, t), "residual": res})


def cmd_lamb(args, rep: Report):
    if args.action == "verify":
        out = verify_power_solution(args.mu, args.x, args.tol, diff_tol=args.diff_tol)
        rep.passed = out.passed
        for x, ei, ed in zip(out.x_points, out.integral_errors, out.differential_errors):
            rep.results.append({"x": x, "beta": out.beta, "integral_rel_error": ei, "differential_rel_error": ed})
        return
    if args.action == "solve":
        if args.f is None:
            raise UsageError("lamb solve needs --f (power or logpow)")
        for x in args.x:
            u = solve_given_f(args.f, args.mu, x, method=args.method)
            row = {"x": x, "u": u, "f": args.f(x)}
            try:
                back = lamb_lhs(solution_spec(args.f, args.mu), x, args.mu).value
            except DomainError:
                back = None
            row["roundtrip_rel_error"] = None if back is None else rel_error(back, args.f(x))
            if back is not None and row["roundtrip_rel_error"] > args.tol:
                rep.passed = False
            rep.results.append(row)
        return
    if args.u is None:
        raise UsageError("lamb lhs needs --u")
    for x in args.x:
        res = lamb_lhs(args.u, x, args.mu)
        exact = lamb_lhs_power(args.u.beta, args.mu, args.u.coef) * x**args.u.beta if isinstance(args.u, Power) else None
        rep.results.append({"x": x, "value": res.value, "abs_error_est": res.abs_error_est, "exact": exact})


def emit_figure_data(which: str, x_max: float, points: int, out) -> List[Dict[str, float]]:
    """Write ``x,alpha,value`` rows of e_alpha for the figure's alpha family, alpha-major."""
    if which not in FIGURE_ALPHAS:
        raise DomainError(f"figure must be one of {sorted(FIGURE_ALPHAS)}, got {which!r}")
    if points < 2:
        raise DomainError(f"points must be at least 2, got {points}")
    if not x_max > 0:
        raise DomainError(f"x_max must be positive, got {x_max}")
    xs = np.linspace(0.0, x_max, points)
    rows = []
    for alpha in FIGURE_ALPHAS[which]:
        for x in xs:
            x = float(x)
            value = math.exp(x) if alpha == 0 else alpha_l_exponential(alpha, x).value
            rows.append({"x": x, "alpha": alpha, "value": value})
    if out is not None:
        out.write("x,alpha,value\n")
        for r in rows:
            out.write(f"{_fmt(r['x'])},{_fmt(r['alpha'])},{_fmt(r['value'])}\n")
    return rows


def cmd_figure(args, rep: Report):
    rows = emit_figure_data(args.which, args.x_max, args.points, None)
    rep.results.extend(rows)


def cmd_verify_all(args, rep: Report):
    for check in identity_suite():
        rep.passed &= check.passed
        rep.results.append(check.as_dict())


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "plain"), default=None,
                        help="output format (default: plain; csv for solver and figure data)")
    common.add_argument("--out", help="write the report to this path instead of standard output")
    common.add_argument("--timing", action="store_true",
                        help="record wall time in the JSON 'seconds' field (otherwise null, keeping output reproducible)")

    p = _Parser(prog="hadamard-ml", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate a special function")
    e.add_argument("family", choices=("alexp", "ml", "lexp", "wright", "spec"))
    e.add_argument("--x", type=float_list, required=True)
    e.add_argument("--alpha", type=float, default=0.0)
    e.add_argument("--nu", type=float, default=1.0)
    e.add_argument("--gamma", type=float, default=1.0)
    e.add_argument("--lambda", dest="lam", type=float, default=1.0, help="argument scale (value at lambda*x)")
    e.add_argument("--n", type=int, default=1, help="L-exponential order")
    e.add_argument("--upper", help="Wright upper pairs 'a,A;b,B'")
    e.add_argument("--lower", help="Wright lower pairs 'a,A;b,B'")
    e.add_argument("--f", type=function_spec, help="function spec for 'eval spec'")
    e.set_defaults(run=cmd_eval)

    h = sub.add_parser("hadamard", parents=[common], help="Hadamard derivative or integral of a function spec")
    h.add_argument("--f", type=function_spec, required=True)
    h.add_argument("--alpha", type=float, required=True)
    h.add_argument("--a", type=float, default=None, help="lower terminal (default 0, or the log-power base)")
    h.add_argument("--x", type=float_list, required=True)
    h.add_argument("--integral", action="store_true", help="compute J^alpha instead of D^alpha")
    h.add_argument("--tol", type=float, default=1e-6)
    h.set_defaults(run=cmd_hadamard)

    fd = sub.add_parser("frakd", parents=[common], help="the composite (d/dx) D^alpha")
    fd.add_argument("--f", type=function_spec, required=True)
    fd.add_argument("--alpha", type=float, required=True)
    fd.add_argument("--x", type=float_list, required=True)
    fd.add_argument("--tol", type=float, default=1e-5)
    fd.set_defaults(run=cmd_frakd)

    lc = sub.add_parser("laplace-check", parents=[common], help="quadrature vs closed-form Laplace image")
    lc.add_argument("--family", choices=("ml", "alexp"), default="ml")
    lc.add_argument("--alpha", type=float, required=True)
    lc.add_argument("--nu", type=float, default=1.0)
    lc.add_argument("--gamma", type=float, default=1.0)
    lc.add_argument("--lambda", dest="lam", type=float, default=1.0)
    lc.add_argument("--s", type=float_list, required=True)
    lc.add_argument("--tol", type=float, default=1e-6)
    lc.set_defaults(run=cmd_laplace_check)

    ec = sub.add_parser("eigen-check", parents=[common], help="eigenfunction residuals")
    ec.add_argument("--op", choices=("frakd", "mixed", "invxd", "hyper-bessel"), required=True)
    ec.add_argument("--alpha", type=float, default=0.5)
    ec.add_argument("--r", type=int, default=1)
    ec.add_argument("--nu", type=float, default=1.0)
    ec.add_argument("--n", type=int, default=0)
    ec.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="eigenvalue (default: the function's own parameter)")
    ec.add_argument("--f", type=function_spec, default=None,
                    help="test function (default alexp:alpha,lambda, or ml:n,nu,1,lambda for hyper-bessel)")
    ec.add_argument("--x", type=float_list, required=True)
    ec.add_argument("--tol", type=float, default=1e-5)
    ec.set_defaults(run=cmd_eigen_check)

    for name, fn, series_var in (("solve-ivp", cmd_solve_ivp, "t"), ("solve-bvp", cmd_solve_bvp, "x")):
        sp = sub.add_parser(name, parents=[common], help=f"operational solution, series in {series_var}")
        sp.add_argument("--operator", type=str, required=True,
                        help="matrix file or built-in NAME:BASIS:DIM (d1, d2, zero; basis monomial or trig)")
        sp.add_argument("--data", type=str, required=True, help="coefficient file or BASIS:c0,c1,...")
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--x", type=float_list, required=True)
        sp.add_argument("--t", type=float_list, required=True)
        sp.add_argument("--series-tol", type=float, default=1e-14)
        sp.add_argument("--rmax", type=int, default=500)
        sp.add_argument("--residual", action="store_true", help="also run the numerical residual check")
        sp.add_argument("--residual-tol", type=float, default=1e-4)
        sp.set_defaults(run=fn)

    lh = sub.add_parser("laguerre-heat", parents=[common], help="Laguerre-heat solution for polynomial data")
    lh.add_argument("--s", type=float_list, required=True, help="monomial coefficients of s(t)")
    lh.add_argument("--x", type=float_list, required=True)
    lh.add_argument("--t", type=float_list, required=True)
    lh.add_argument("--tol", type=float, default=1e-8)
    lh.set_defaults(run=cmd_laguerre_heat)

    lb = sub.add_parser("lamb", parents=[common], help="modified Lamb-Bateman equation")
    lb.add_argument("action", choices=("verify", "solve", "lhs"))
    lb.add_argument("--mu", type=float, required=True)
    lb.add_argument("--x", type=float_list, required=True)
    lb.add_argument("--tol", type=float, default=1e-8)
    lb.add_argument("--diff-tol", type=float, default=1e-4)
    lb.add_argument("--f", type=function_spec, default=None)
    lb.add_argument("--u", type=function_spec, default=None)
    lb.add_argument("--method", choices=("auto", "quadrature"), default="auto")
    lb.set_defaults(run=cmd_lamb)

    fg = sub.add_parser("figure", parents=[common], help="curve data for the e_alpha figures")
    fg.add_argument("which", choices=tuple(FIGURE_ALPHAS))
    fg.add_argument("--x-max", type=float, default=5.0)
    fg.add_argument("--points", type=int, default=101)
    fg.set_defaults(run=cmd_figure)

    va = sub.add_parser("verify-all", parents=[common], help="run the complete identity suite")
    va.set_defaults(run=cmd_verify_all)
    return p


_CSV_DEFAULT = {"solve-ivp", "solve-bvp", "figure"}
_RESOLVED_ARGS = {"operator": operator_arg, "data": vector_arg}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the command and write its report; returns the exit code."""
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"hadamard-ml: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    fmt = args.format or ("csv" if args.command in _CSV_DEFAULT else "plain")
    inputs = {k: v for k, v in vars(args).items() if k not in ("run", "format", "out", "timing", "command")}
    inputs = {k: (repr(v) if isinstance(v, FunctionSpec) else v) for k, v in inputs.items()}
    rep = Report(args.command, inputs)
    try:
        for key, resolve in _RESOLVED_ARGS.items():
            if hasattr(args, key):
                setattr(args, key, resolve(getattr(args, key)))
        args.run(args, rep)
    except (UsageError, DomainError) as exc:
        print(f"hadamard-ml: error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, StepTooSmall) as exc:
        print(f"hadamard-ml: not converged: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"hadamard-ml: I/O error: {exc}", file=sys.stderr)
        return 1
    seconds = time.perf_counter() - start if args.timing else None
    text = render(rep, fmt, seconds)
    try:
        if args.out:
            with open(args.out, "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"hadamard-ml: I/O error: {exc}", file=sys.stderr)
        return 1
    for note in rep.notes:
        if fmt != "plain":
            print(note, file=sys.stderr)
    if rep.nonconverged:
        return 3
    return 0 if rep.passed else 1


def main() -> None:
    sys.exit(run())
