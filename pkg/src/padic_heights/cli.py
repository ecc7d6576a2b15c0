"""Command-line interface: JSON reports, exit 0 on pass, 2 on a mathematical failure, 1 on usage errors."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .padic import BUFFER, DEFAULT_PREC, LogBranch, PadicElement, PadicError

SCHEMA_VERSION = "1.0"
PREC_ENV = "PADIC_HEIGHTS_PREC"

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def default_precision():
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PREC_ENV} must be an integer, got {raw!r}") from None


@dataclass
class RunConfig:
    command: str
    p: int = None
    prec: int = DEFAULT_PREC
    branch: str = "0"
    delta: str = "1"
    seed: int = 0
    samples: int = 1
    output: str = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.prec < 10:
            raise UsageError("precision must be at least 10")
        if self.samples < 1:
            raise UsageError("sample count must be at least 1")
        if self.p is not None and (self.p < 3 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1))):
            raise UsageError(f"p must be an odd prime, got {self.p}")


# -- value parsing -----------------------------------------------------------------


def parse_value(text, p, prec):
    """A rational like -3/7 or a token like '5^2 * 3 mod 5^10'."""
    text = text.strip()
    if "mod" in text or "^" in text or "O(" in text:
        return PadicElement.from_token(text)
    try:
        return PadicElement.from_rational(Fraction(text), p, prec)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse value {text!r}") from None


def _rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational {text!r}") from None


def _rationals(text, count=None):
    vals = [_rational(t) for t in text.split(",")]
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} comma-separated values, got {len(vals)}")
    return vals


def _branch(cfg):
    return LogBranch(cfg.p, parse_value(cfg.branch, cfg.p, cfg.prec + 20))


def _report(cfg, passed, result, achieved=None):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "config": {
            "p": cfg.p,
            "prec": cfg.prec,
            "branch": cfg.branch,
            "delta": cfg.delta,
            "seed": cfg.seed,
            "samples": cfg.samples,
            **{k: v for k, v in sorted(cfg.extra.items())},
        },
        "precision": {"working": cfg.prec, "required_digits": cfg.prec - BUFFER, "achieved_digits": achieved},
        "passed": passed,
        "result": result,
    }


def _digits(x):
    """Digits of information carried by a p-adic value: its absolute precision."""
    return None if x is None else x.abs_precision


# -- commands ----------------------------------------------------------------------


def cmd_compare(cfg):
    from .heights import compare_splittings
    from .tate import TateCurve

    curve = TateCurve(parse_value(cfg.extra["q"], cfg.p, cfg.prec), cfg.prec)
    constraint = "schneider" if cfg.extra["schneider_constraint"] else "unit_root"
    delta = parse_value(cfg.delta, cfg.p, cfg.prec + 20)
    rep = compare_splittings(curve, _branch(cfg), delta, cfg.samples, cfg.seed, constraint)
    result = rep.to_json_obj()
    result["delta"] = delta.to_token()
    return _report(cfg, rep.passed, result, rep.min_diff_valuation)


def _biext_point(cfg, curve):
    from .tate import BiextPoint

    parts = cfg.extra["point"].split(",")
    if len(parts) != 3:
        raise UsageError("--point takes c,u,v")
    c, u, v = (parse_value(t, cfg.p, cfg.prec) for t in parts)
    try:
        return BiextPoint(c, u, v, curve)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_mt(cfg):
    from .heights import closed_form_oracle, mt_splitting
    from .tate import TateCurve

    curve = TateCurve(parse_value(cfg.extra["q"], cfg.p, cfg.prec), cfg.prec)
    x = _biext_point(cfg, curve)
    branch = _branch(cfg)
    info = {}
    tau = mt_splitting(x, branch, info)
    oracle = closed_form_oracle(x, branch)
    dv = (tau - oracle).valuation
    passed = dv >= cfg.prec - BUFFER - info["digits_lost"]
    result = {"tau": tau.to_token(), "closed_form": oracle.to_token(), "diff_valuation": dv, **info}
    return _report(cfg, passed, result, dv)


def cmd_unitroot(cfg):
    from .heights import mt_splitting, unit_root_coefficients, unit_root_splitting_tate
    from .tate import TateCurve

    curve = TateCurve(parse_value(cfg.extra["q"], cfg.p, cfg.prec), cfg.prec)
    x = _biext_point(cfg, curve)
    branch = _branch(cfg)
    coeffs = unit_root_coefficients(curve, branch)
    tau = unit_root_splitting_tate(x, branch, coeffs)
    mt = mt_splitting(x, branch)
    dv = (tau - mt).valuation
    result = {
        "tau": tau.to_token(),
        "tau_mt": mt.to_token(),
        "diff_valuation": dv,
        "coefficients": {k: getattr(coeffs, k).to_token() for k in ("alpha_a", "beta_a", "alpha_b", "beta_b")},
    }
    return _report(cfg, dv >= cfg.prec - BUFFER, result, dv)


def cmd_frobenius(cfg):
    from .frobenius import NotOrdinary, unit_root_subspace
    from .kedlaya import GoodCurve, expected_charpoly_holds, frobenius_matrix, frobenius_module

    a, b = _rationals(cfg.extra["curve"], 2)
    if a.denominator != 1 or b.denominator != 1:
        raise UsageError("--curve takes integers a,b for y^2 = x^3 + a x + b")
    try:
        curve = GoodCurve.short(int(a), int(b), cfg.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = frobenius_matrix(curve, cfg.prec)
    ok = expected_charpoly_holds(res, curve)
    result = {
        "matrix": [[res.matrix[i, j].to_token() for j in range(2)] for i in range(2)],
        "charpoly": [c.to_token() for c in res.charpoly.coeffs],
        "a_p": res.a_p,
        "charpoly_matches_point_count": ok,
    }
    try:
        w = unit_root_subspace(frobenius_module(curve, cfg.prec), cfg.prec)
        result["ordinary"] = True
        result["unit_root_subspace"] = [[w[i, j].to_token() for j in range(w.ncols)] for i in range(w.nrows)]
    except NotOrdinary as exc:
        result["ordinary"] = False
        result["unit_root_subspace"] = None
        result["note"] = str(exc)
    return _report(cfg, ok, result, res.matrix.min_precision())


def cmd_lift(cfg):
    from .frobenius import diagram_from_json, synthetic_diagram, verify_unit_root_lift
    from .kedlaya import GoodCurve, frobenius_module

    path = cfg.extra.get("diagram")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read diagram: {exc}") from None
        diagram = diagram_from_json(obj, cfg.prec)
    else:
        b = frobenius_module(GoodCurve.short(1, 1, 5), cfg.prec + 10)
        diagram = synthetic_diagram(b, 1, 1, seed=cfg.seed, prec=cfg.prec + 10)
    rep = verify_unit_root_lift(diagram, cfg.prec)
    result = {
        "rank_w_a": rep.rank_w_a,
        "rank_lift": rep.rank_lift,
        "subspace_digits": rep.subspace_digits,
        "digits_required": rep.digits_required,
        "diagram_residual": rep.diagram_residual,
        "source": path or "synthetic",
    }
    return _report(cfg, rep.passed, result, rep.subspace_digits)


def cmd_derham(cfg):
    from .derham import NotClosed, NotLogarithmic, format_poly, parse_form, reduce_form, residual

    path = cfg.extra.get("file")
    try:
        text = open(path, encoding="utf-8").read() if path else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read form: {exc}") from None
    try:
        form = parse_form(text, cfg.extra.get("rank"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        coeffs, prim = reduce_form(form, cfg.extra.get("at_infinity", False))
    except (NotClosed, NotLogarithmic) as exc:
        return _report(cfg, False, {"error": type(exc).__name__, "message": str(exc)})
    rest = residual(form, coeffs, prim)
    result = {
        "rank": form.t,
        "coeffs": [str(c) for c in coeffs],
        "primitive": format_poly(prim),
        "residual_is_zero": rest.is_zero(),
    }
    return _report(cfg, rest.is_zero(), result)


def _rho(cfg):
    from .global_height import RhoFamily

    value = parse_value(cfg.branch, cfg.p, cfg.prec + 20)
    if not value.is_zero():
        raise UsageError("the product formula needs the branch with λ(p) = 0 (--branch 0)")
    return RhoFamily(cfg.p, parse_value(cfg.delta, cfg.p, cfg.prec + 20), prec=cfg.prec + 20)


def cmd_global_height(cfg):
    from .global_height import RationalCurve, global_height

    coeffs = _rationals(cfg.extra["curve"], 5)
    rho = _rho(cfg)
    try:
        curve = RationalCurve(coeffs, cfg.p, cfg.prec)
        P = curve.point(*_rationals(cfg.extra["point"], 2))
        Q = curve.point(*_rationals(cfg.extra["point2"] or cfg.extra["point"], 2))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    h = global_height(curve, P, Q, rho, seed=cfg.seed)
    result = h.to_json_obj()
    result["q"] = curve.q.to_token()
    result["torsion"] = [curve.torsion_order(P), curve.torsion_order(Q)]
    return _report(cfg, True, result, _digits(h.total))


def cmd_product_formula(cfg):
    from .global_height import product_formula_check

    rho = _rho(cfg)
    values = []
    passed = True
    for a in cfg.extra["alpha"]:
        alpha = _rational(a)
        if alpha == 0:
            raise UsageError("α must be nonzero")
        v = product_formula_check(alpha, rho)
        ok = v.is_zero() or v.valuation >= cfg.prec - BUFFER
        passed = passed and ok
        values.append({"alpha": str(alpha), "sum": v.to_token(), "zero": ok})
    return _report(cfg, passed, {"values": values})


COMMANDS = {
    "compare": cmd_compare,
    "mt": cmd_mt,
    "unitroot": cmd_unitroot,
    "frobenius": cmd_frobenius,
    "lift": cmd_lift,
    "derham-reduce": cmd_derham,
    "global-height": cmd_global_height,
    "product-formula": cmd_product_formula,
}


def build_parser():
    parser = _Parser(prog="padic-heights", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, needs_p=True):
        sp.add_argument("--p", type=int, required=needs_p)
        sp.add_argument("--prec", type=int, default=None)
        sp.add_argument("--branch", default="0", help="λ(p) as a rational or p-adic token")
        sp.add_argument("--delta", default="1", help="scale δ with ρ = δ λ")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", default=None)
        return sp

    sp = common(sub.add_parser("compare"))
    sp.add_argument("--q", required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--schneider-constraint", action="store_true")

    for name in ("mt", "unitroot"):
        sp = common(sub.add_parser(name))
        sp.add_argument("--q", required=True)
        sp.add_argument("--point", required=True, help="c,u,v")

    sp = common(sub.add_parser("frobenius"))
    sp.add_argument("--curve", required=True, help="a,b for y^2 = x^3 + a x + b")

    sp = common(sub.add_parser("lift"), needs_p=False)
    sp.add_argument("--diagram", default=None, help="diagram JSON; omit for a seeded synthetic one")

    sp = common(sub.add_parser("derham-reduce"), needs_p=False)
    sp.add_argument("--file", default=None, help="term list; stdin when omitted")
    sp.add_argument("--rank", type=int, default=None)
    sp.add_argument("--at-infinity", action="store_true")

    sp = common(sub.add_parser("global-height"))
    sp.add_argument("--curve", required=True, help="a1,a2,a3,a4,a6")
    sp.add_argument("--point", required=True, help="Px,Py")
    sp.add_argument("--point2", default=None, help="Qx,Qy (defaults to P)")

    sp = common(sub.add_parser("product-formula"))
    sp.add_argument("--alpha", action="append", required=True)
    return parser


def config_from_args(args):
    known = {"command", "p", "prec", "branch", "delta", "seed", "samples", "output"}
    extra = {k: v for k, v in vars(args).items() if k not in known}
    cfg = RunConfig(
        command=args.command,
        p=args.p,
        prec=args.prec if args.prec is not None else default_precision(),
        branch=args.branch,
        delta=args.delta,
        seed=args.seed,
        samples=getattr(args, "samples", 1),
        output=args.output,
        extra=extra,
    )
    if cfg.command == "lift" and cfg.p is None:
        cfg.p = 5
    cfg.validate()
    return cfg


def run(cfg):
    """Execute a configured command; returns (exit code, report)."""
    report = COMMANDS[cfg.command](cfg)
    return (EXIT_PASS if report["passed"] else EXIT_FAIL), report


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _usage(message):
    sys.stderr.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": "usage", "message": message}) + "\n")
    return EXIT_USAGE


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        code, report = run(cfg)
    except UsageError as exc:
        return _usage(str(exc))
    except PadicError as exc:
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": getattr(locals().get("cfg"), "command", None),
            "passed": False,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        code = EXIT_FAIL
    text = dumps(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
