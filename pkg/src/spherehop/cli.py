"""Command-line interface: ``spherehop {project,apply,check,ladder,curve,verify}``.

Exit codes: 0 ok, 1 a verify check failed, 2 usage error, 3 incompatible
operator chain, 4 PD-inconsistent report.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from .errors import ChainError, DomainError
from .gegenbauer import GegenbauerSeries, series_eval
from .models import (
    DEFAULT_COEFF_TOL,
    DEFAULT_GRAM_TOL,
    DEFAULT_LADDER_DEGREE,
    CauchySphereModel,
    GmGammaModel,
    check_pd_coefficients,
    combine_reports,
    gram_check,
    ladder_walk,
    report_notes,
    sample_sphere,
)
from .operators import OperatorKind, cd_multipliers, ci_multipliers, compose, parse_chain
from .quadrature import project
from .verify import GROUPS, run_checks, summary_dict
from .zonal import ZonalFunction

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CHAIN = 3
EXIT_INCONSISTENT = 4

log = logging.getLogger("spherehop")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs


def _poly_model(text):
    try:
        coeffs = [float(c) for c in text.split(",")]
    except ValueError:
        raise UsageError(f"poly coefficients must be numbers: {text!r}") from None
    p = np.polynomial.Polynomial(coeffs)
    dp = p.deriv()
    return ZonalFunction(lambda x: p(x), derivative=lambda x: dp(x), label=f"poly:{text}")


def parse_model(spec):
    """Turn ``cauchy:beta``, ``gm:m:gamma``, ``poly:c0,c1,...`` or a series file path into a model.

    Returns either a :class:`GegenbauerSeries` (file input) or a :class:`ZonalFunction`.
    """
    head, _, rest = spec.partition(":")
    try:
        if head == "cauchy" and rest:
            return CauchySphereModel(float(rest)).as_zonal()
        if head == "gm" and rest:
            m, _, g = rest.partition(":")
            return GmGammaModel(int(m), float(g)).as_zonal()
        if head == "poly" and rest:
            return _poly_model(rest)
    except (ValueError, DomainError) as exc:
        raise UsageError(f"bad model spec {spec!r}: {exc}") from None
    if os.path.isfile(spec):
        return read_series(spec)
    raise UsageError(f"unknown model spec {spec!r}; expected cauchy:B, gm:M:G, poly:C0,C1,... or a series file")


def read_series(path):
    try:
        with open(path) as fh:
            return GegenbauerSeries.from_json(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read series file {path!r}: {exc}") from None


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _config(args):
    return {k: v for k, v in vars(args).items() if k != "handler"}


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_project(args):
    model = parse_model(args.model)
    if args.degree < 0:
        raise UsageError("--degree must be nonnegative")
    if isinstance(model, GegenbauerSeries):
        model = ZonalFunction.from_series(model)
    series = project(model, args.lam, args.degree)
    grid = np.linspace(-1.0, 1.0, args.grid_size)
    residual = float(np.max(np.abs(series_eval(series, grid) - model(grid))))
    log.info("max projection residual on %d-point grid: %.3e", args.grid_size, residual)
    _write(series.to_json() + "\n", args.output)
    return EXIT_OK


def link_multipliers(spec, degree):
    """Multipliers a link applies to input coefficients 0..degree (for logging)."""
    kind, lam = spec.kind, spec.lam
    if kind in (OperatorKind.CIPLUS, OperatorKind.CIMINUS):
        return ci_multipliers("plus" if kind is OperatorKind.CIPLUS else "minus", lam, degree)
    if kind in (OperatorKind.CDPLUS, OperatorKind.CDMINUS):
        return cd_multipliers("plus" if kind is OperatorKind.CDPLUS else "minus", lam, degree)
    if kind in (OperatorKind.IPLUS, OperatorKind.IMINUS):
        return 0.5 * np.concatenate([ci_multipliers("plus", lam, degree), ci_multipliers("minus", lam, degree)])
    if kind in (OperatorKind.DPLUS, OperatorKind.DMINUS):
        return 0.5 * np.concatenate([cd_multipliers("plus", lam, degree), cd_multipliers("minus", lam, degree)])
    n = np.arange(degree + 1, dtype=float)
    if kind is OperatorKind.TWO_STEP_D:
        return n[1:] if lam == 0 else np.full(degree, 2 * lam)
    return 1.0 / (n + 1) if lam == 0 else np.full(degree + 1, 1.0 / (2 * lam))


def cmd_apply(args):
    series = read_series(args.input)
    try:
        chain = parse_chain(args.chain)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    value = series
    for index, spec in enumerate(chain):
        degree_in = value.degree
        try:
            value = compose([spec], value)
        except ChainError as exc:
            raise ChainError(index, str(exc.__cause__ or exc)) from exc
        mult = link_multipliers(spec, max(degree_in, 1))
        lo, hi = (float(mult.min()), float(mult.max())) if mult.size else (0.0, 0.0)
        log.info(
            "link %d: %s  lambda %g -> %g  multipliers [%.6g, %.6g]",
            index, spec, spec.source_lambda, spec.target_lambda, lo, hi,
        )
    _write(value.to_json() + "\n", args.output)
    return EXIT_OK


def _check_series_and_dimension(args):
    model = parse_model(args.model)
    if isinstance(model, GegenbauerSeries):
        dim = args.dimension if args.dimension is not None else int(round(2 * model.lam + 2))
        if abs((dim - 2) / 2 - model.lam) > 1e-12:
            raise UsageError(f"series at lambda={model.lam} does not belong to dimension {dim}")
        return model, dim
    dim = args.dimension if args.dimension is not None else 3
    if dim < 2:
        raise UsageError("--dimension must be at least 2")
    return project(model, (dim - 2) / 2, args.degree), dim


def cmd_check(args):
    series, dim = _check_series_and_dimension(args)
    coeff = check_pd_coefficients(series, args.coeff_tol)
    pts = sample_sphere(dim, args.points, args.seed)
    report = combine_reports(coeff, [gram_check(series, pts, args.gram_tol)])
    out = {"config": _config(args), "report": report.to_dict(), "notes": report_notes(report)}
    _write(_dump(out), args.output)
    return EXIT_OK if report.consistent else EXIT_INCONSISTENT


def cmd_ladder(args):
    model = parse_model(args.model)
    rungs = ladder_walk(
        model,
        args.start,
        args.end,
        degree=args.degree,
        points=args.points,
        seeds=tuple(range(args.seed, args.seed + args.seeds)),
        coeff_tol=args.coeff_tol,
        gram_tol=args.gram_tol,
    )
    out = {
        "config": _config(args),
        "rungs": [
            {"dimension": r.dimension, "series": r.series.to_dict(), "report": r.report.to_dict(),
             "notes": report_notes(r.report)}
            for r in rungs
        ],
    }
    _write(_dump(out), args.output)
    return EXIT_OK if all(r.report.consistent for r in rungs) else EXIT_INCONSISTENT


def cmd_curve(args):
    if args.grid_size < 2:
        raise UsageError("--grid-size must be at least 2")
    model = parse_model(args.model)
    x = np.linspace(-1.0, 1.0, args.grid_size)
    f = series_eval(model, x) if isinstance(model, GegenbauerSeries) else model(x)
    lines = ["x,f"] + [f"{xi:.17g},{fi:.17g}" for xi, fi in zip(x, f)]
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args):
    only = None
    if args.only:
        only = [item.strip() for item in args.only.split(",") if item.strip()]
    try:
        results = run_checks(only)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.group}/{r.name}: residual {r.max_residual:.3e} (tol {r.tolerance:.1e})",
              file=sys.stderr if args.json else sys.stdout)
    summary = summary_dict(results)
    if args.json:
        _write(_dump({"config": _config(args), **summary}), None)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(prog="spherehop", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a model onto a Gegenbauer basis")
    p.add_argument("--model", required=True, help="cauchy:B | gm:M:G | poly:C0,C1,... | series file")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--grid-size", type=int, default=201, help="verification grid size")
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_project)

    p = sub.add_parser("apply", help="apply an operator chain to a series file")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--chain", default="", help="Kind:lambda[,Kind:lambda...]")
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_apply)

    def pd_flags(p):
        p.add_argument("--points", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--degree", type=int, default=DEFAULT_LADDER_DEGREE, help="projection degree for models")
        p.add_argument("--coeff-tol", type=float, default=DEFAULT_COEFF_TOL)
        p.add_argument("--gram-tol", type=float, default=DEFAULT_GRAM_TOL)
        p.add_argument("--output", "-o")

    p = sub.add_parser("check", help="positive-definiteness report")
    p.add_argument("--model", "--input", dest="model", required=True)
    p.add_argument("--dimension", type=int)
    pd_flags(p)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("ladder", help="walk a model through sphere dimensions")
    p.add_argument("--model", "--input", dest="model", required=True)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--end", type=int, required=True)
    p.add_argument("--seeds", type=int, default=3, help="number of point sets per rung")
    pd_flags(p)
    p.set_defaults(handler=cmd_ladder)

    p = sub.add_parser("curve", help="tabulate a model or series as CSV")
    p.add_argument("--model", "--input", dest="model", required=True)
    p.add_argument("--grid-size", type=int, default=101)
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--only", help=f"comma-separated groups ({', '.join(GROUPS)}) or check names")
    p.add_argument("--json", action="store_true", help="JSON summary on stdout, text on stderr")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.handlers = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if args.verbose or args.command in ("project", "apply") else logging.WARNING)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"spherehop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChainError as exc:
        print(f"spherehop: incompatible chain, {exc}", file=sys.stderr)
        return EXIT_CHAIN
    except DomainError as exc:
        print(f"spherehop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
