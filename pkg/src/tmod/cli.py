"""``tmod`` command line: inspect, eval, log, exp, julia, roots, torsion."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .anderson import normalization_exponent, normalize, phi_of
from .errors import (
    DimensionUnsupported, NonConvergent, NotAbelian, PrecisionExhausted, TmodError,
    ValidationError,
)
from .fields import DEFAULT_PREC, format_series
from .formal import DEFAULT_TAU_ORDER, formal_data
from .julia import DEFAULT_MAX_ITER, ESCAPES, classify_orbit, escape_constant
from .modfile import parse_module_file
from .parsing import parse_point, parse_poly
from .skew import mat_format, sp_eval
from .torsion import AdditivePoly, additive_roots, torsion_module

EXIT_OK, EXIT_INVALID, EXIT_HORIZON, EXIT_PRECISION = 0, 1, 2, 3


@dataclass
class RunConfig:
    prec: int = DEFAULT_PREC
    tau_order: int = DEFAULT_TAU_ORDER
    max_iter: int = DEFAULT_MAX_ITER
    json: bool = False
    primes_override: list = None

    def __post_init__(self):
        if self.prec < 8:
            raise ValidationError(f"--prec must be >= 8 (got {self.prec})")
        if self.tau_order < 2:
            raise ValidationError(f"--tau-order must be >= 2 (got {self.tau_order})")
        if self.max_iter < 0:
            raise ValidationError("--max-iter must be >= 0")


def _default_prec():
    raw = os.environ.get("TMOD_PREC")
    if raw is None:
        return DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"TMOD_PREC={raw!r} is not an integer") from None


def _matrix_literals(A):
    return [[format_series(c) for c in row] for row in A]


def cmd_inspect(M, cfg, args, out):
    s_lam = normalization_exponent(M)
    info = {
        "name": M.name,
        "q": M.q,
        "place": M.place.pi.format(),
        "residue_degree": M.place.f_res,
        "dim": M.d,
        "tau_degree": M.s,
        "abelian_certificate": M.abelian_cert,
        "normalization_exponent": s_lam,
        "coefficients": [[[e.format() for e in row] for row in mat] for mat in M.rational],
    }
    if cfg.json:
        out.write(json.dumps(info, sort_keys=True, ensure_ascii=False) + "\n")
        return EXIT_OK
    out.write(f"module: {M.name or '-'}\n")
    out.write(f"field: F_{M.q}    place: ({info['place']}), residue degree {M.place.f_res}\n")
    out.write(f"dimension: {M.d}    tau-degree: {M.s}\n")
    for j, mat in enumerate(M.rational):
        rows = "; ".join(", ".join(e.format() for e in row) for row in mat)
        out.write(f"  M{j} = [{rows}]\n")
    out.write("eigenvalue condition: ok\n")
    out.write(f"abelian certificate: {M.abelian_cert}\n")
    out.write(f"normalization exponent s_lambda: {s_lam}\n")
    return EXIT_OK


def cmd_eval(M, cfg, args, out):
    f = parse_poly(args.f, M.field)
    x = parse_point(args.point, M.K, M.d)
    y = sp_eval(phi_of(M, f), x)
    if cfg.json:
        out.write(json.dumps({"f": f.format(), "point": [format_series(c) for c in x],
                              "image": [format_series(c) for c in y]}, ensure_ascii=False) + "\n")
    else:
        out.write(f"Phi({f.format()})(x) = ({', '.join(format_series(c) for c in y)})\n")
    return EXIT_OK


def _series_table(M, which, cfg, out):
    NM = normalize(M)
    F = formal_data(NM, cfg.tau_order)
    series = F.log if which == "log" else F.exp
    if cfg.json:
        recs = [{"n": n, "matrix": _matrix_literals(c)} for n, c in enumerate(series.coeffs)]
        out.write(json.dumps({"lambda_val": NM.lambda_val, "k1": F.k1, "k2": F.k2, "k": F.k,
                              "coefficients": recs}, ensure_ascii=False) + "\n")
        return EXIT_OK
    label = "C" if which == "log" else "E"
    out.write(f"{which} of the normalized module (lambda = u^{NM.lambda_val}), "
              f"tau-order {cfg.tau_order}\n")
    for n, c in enumerate(series.coeffs):
        body = format_series(c[0][0]) if M.d == 1 else mat_format(c)
        out.write(f"  {label}_{n} = {body}\n")
    out.write(f"radii: k1 = {F.k1}, k2 = {F.k2}, k = {F.k}\n")
    return EXIT_OK


def cmd_log(M, cfg, args, out):
    return _series_table(M, "log", cfg, out)


def cmd_exp(M, cfg, args, out):
    return _series_table(M, "exp", cfg, out)


def cmd_julia(M, cfg, args, out):
    E = escape_constant(M)
    x = parse_point(args.point, M.K, M.d)
    v = classify_orbit(M, E, x, cfg.max_iter)
    if cfg.json:
        out.write(json.dumps({"verdict": v.kind, "describe": v.describe(), "step": v.step,
                              "certificate": v.certificate, "certified": v.certified,
                              "trace": [_num(t) for t in v.trace], "C": str(E.C),
                              "theta_inv": E.theta_inv}, ensure_ascii=False) + "\n")
    else:
        out.write(f"{v.describe()}\n")
        out.write(f"valuation trace: {' '.join(str(_num(t)) for t in v.trace)}\n")
        out.write(f"C = {E.C}, escape below {-2 * E.C}, invariant ball v >= {E.theta_inv}\n")
    if v.kind == ESCAPES or v.certified:
        return EXIT_OK
    return EXIT_HORIZON


def _num(v):
    return v if isinstance(v, int) else str(v)


def cmd_roots(M, cfg, args, out):
    if M.d != 1:
        raise DimensionUnsupported("roots needs a one-dimensional module")
    f = parse_poly(args.f, M.field)
    P = AdditivePoly.from_skew(phi_of(M, f))
    R = additive_roots(P)
    if cfg.json:
        out.write(json.dumps({"f": f.format(), "count": len(R),
                              "roots": [format_series(x) for x in R.roots],
                              "basis": [format_series(x) for x in R.basis],
                              "slopes": [str(s) for s in R.polygon.root_valuations()]},
                             ensure_ascii=False) + "\n")
    else:
        out.write(f"ker Phi({f.format()}): {len(R)} roots in L_v\n")
        for x in R.roots:
            out.write(f"  {format_series(x)}\n")
    return EXIT_OK


def cmd_torsion(M, cfg, args, out):
    primes = None
    if cfg.primes_override:
        primes = [parse_poly(p, M.field) for p in cfg.primes_override]
    rep = torsion_module(M, primes=primes, n_trunc=cfg.tau_order, max_iter=min(cfg.max_iter, 50))
    if cfg.json:
        out.write(json.dumps(rep.to_json(), sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(f"C = {rep.C}, k = {rep.k}, card_bound = {rep.card_bound}\n")
        out.write("primes scanned: " + ", ".join(
            f"{t.prime.format()} {t.levels}" for t in rep.towers) + "\n")
        out.write(f"torsion ({len(rep.points)} points):\n")
        for pt in rep.points:
            coords = ", ".join(format_series(c) for c in pt.coords)
            out.write(f"  ({coords})  annihilator {pt.annihilator.format()}\n")
        out.write(f"structure: {rep.structure_string()}\n")
        out.write("status: " + ("certified complete" if rep.complete else "horizon-limited") + "\n")
        if rep.certificates["missing_primes"]:
            out.write("unscanned required primes: " +
                      ", ".join(rep.certificates["missing_primes"]) + "\n")
    return EXIT_OK if rep.complete else EXIT_HORIZON


COMMANDS = {
    "inspect": cmd_inspect, "eval": cmd_eval, "log": cmd_log, "exp": cmd_exp,
    "julia": cmd_julia, "roots": cmd_roots, "torsion": cmd_torsion,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="module definition file (.tmod)")
    common.add_argument("--prec", type=int, default=None,
                        help=f"u-adic working precision (default $TMOD_PREC or {DEFAULT_PREC})")
    common.add_argument("--tau-order", type=int, default=DEFAULT_TAU_ORDER,
                        help="truncation order in tau for log/exp")
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER,
                        help="orbit iteration horizon")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="tmod", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("inspect", parents=[common], help="validate and summarize a module")
    p = sub.add_parser("eval", parents=[common], help="evaluate Phi(f) at a point")
    p.add_argument("--point", required=True, help='comma separated series, e.g. "u^-1, 1+u"')
    p.add_argument("--f", default="t", help="element of F_q[t] (default t)")
    sub.add_parser("log", parents=[common], help="formal logarithm coefficients")
    sub.add_parser("exp", parents=[common], help="formal exponential coefficients")
    p = sub.add_parser("julia", parents=[common], help="filled-Julia orbit verdict")
    p.add_argument("--point", required=True)
    p = sub.add_parser("roots", parents=[common], help="L_v-rational kernel of Phi(f)")
    p.add_argument("--f", default="t")
    p = sub.add_parser("torsion", parents=[common], help="certified torsion enumeration")
    p.add_argument("--primes", default=None, help='restrict the prime scan, e.g. "t,t+1"')
    return parser


def run_command(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse uses 2, which is reserved for horizon-limited runs
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        prec = args.prec if args.prec is not None else _default_prec()
        primes = getattr(args, "primes", None)
        cfg = RunConfig(prec=prec, tau_order=args.tau_order, max_iter=args.max_iter,
                        json=args.json,
                        primes_override=[s.strip() for s in primes.split(",")] if primes else None)
        M = parse_module_file(args.file, prec=cfg.prec)
        return COMMANDS[args.command](M, cfg, args, out)
    except (PrecisionExhausted, NonConvergent) as exc:
        err.write(f"tmod: precision exhausted: {exc}\n")
        return EXIT_PRECISION
    except (ValidationError, NotAbelian, DimensionUnsupported) as exc:
        err.write(f"tmod: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    except TmodError as exc:
        err.write(f"tmod: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID


def main():
    sys.exit(run_command())


if __name__ == "__main__":  # pragma: no cover
    main()
