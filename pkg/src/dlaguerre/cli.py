"""``dlaguerre`` command line.

Exit status: 0 success, 1 a violation or negative verdict was found, 2 bad
input or an unmet precondition.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction

from . import entire, harness, laguerre, logderiv
from .polycore import EXACT, FLOAT, BackendError, Poly, PreconditionError, RootedPoly
from .realroots import mesh_size

_RATIONAL = re.compile(r"^\s*[+-]?\d+(/\d+)?\s*$")


class InputError(ValueError):
    pass


class _Finding(Exception):
    """Carries a result whose content is a violation (exit 1)."""


# -- polynomial input ----------------------------------------------------


def _read_source(src: str) -> str:
    if src == "-":
        return sys.stdin.read()
    if src.startswith("@"):
        try:
            with open(src[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {src[1:]}: {exc.strerror}") from exc
    return src


def _scalar(v, where: str):
    if isinstance(v, bool) or v is None:
        raise InputError(f"{where}: expected a number, got {json.dumps(v)}")
    if isinstance(v, int):
        return v, None
    if isinstance(v, float):
        if not math.isfinite(v):
            raise InputError(f"{where}: non-finite value")
        return v, FLOAT
    if isinstance(v, str):
        if not _RATIONAL.match(v):
            raise InputError(f"{where}: {v!r} is not an integer or 'num/den' string")
        try:
            return Fraction(v.strip()), EXACT
        except ZeroDivisionError:
            raise InputError(f"{where}: zero denominator") from None
    raise InputError(f"{where}: expected a number, got {type(v).__name__}")


def _scalars(items, where: str) -> tuple[list, str | None]:
    if not isinstance(items, list):
        raise InputError(f"{where}: expected a list")
    vals, kinds = [], {}
    for i, v in enumerate(items):
        val, kind = _scalar(v, f"{where}[{i}]")
        vals.append(val)
        if kind is not None:
            kinds.setdefault(kind, f"{where}[{i}]")
    if len(kinds) > 1:
        raise InputError(
            f"mixed backends: rational string at {kinds[EXACT]} and decimal at {kinds[FLOAT]}"
        )
    return vals, next(iter(kinds), None)


def parse_poly(text: str) -> tuple[Poly, RootedPoly | None]:
    """Parse the JSON polynomial format; return the expanded form and any root form."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise InputError("polynomial must be a JSON object")
    unknown = set(obj) - {"coeffs", "roots", "leading"}
    if unknown:
        raise InputError(f"unknown key(s): {', '.join(sorted(unknown))}")
    if ("coeffs" in obj) == ("roots" in obj):
        raise InputError("give exactly one of 'coeffs' or 'roots'")
    if "coeffs" in obj:
        if "leading" in obj:
            raise InputError("'leading' only applies to 'roots'")
        vals, kind = _scalars(obj["coeffs"], "coeffs")
        backend = kind or EXACT
        if not vals:
            raise InputError("coeffs: empty list")
        return Poly(vals, backend), None
    vals, kind = _scalars(obj["roots"], "roots")
    lead, lkind = _scalar(obj.get("leading", 1), "leading")
    if kind and lkind and kind != lkind:
        raise InputError("mixed backends between roots and leading")
    backend = kind or lkind or EXACT
    if lead == 0:
        raise InputError("leading: must be nonzero")
    rp = RootedPoly.from_list([Fraction(v) if backend == EXACT else float(v) for v in vals],
                              Fraction(lead) if backend == EXACT else float(lead))
    return rp.expand(), rp


def _apply_backend(p: Poly, rp, backend: str | None):
    if backend is None or backend == p.backend:
        return p, rp
    return (p.to_exact() if backend == EXACT else p.to_float()), None


def _number(text: str, name: str):
    val, kind = _scalar(_num_token(text), name)
    return val


def _num_token(text: str):
    try:
        v = json.loads(text)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return v
    except json.JSONDecodeError:
        pass
    return text


# -- output --------------------------------------------------------------


def jsonable(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, Poly):
        return {"coeffs": [jsonable(c) for c in v.coeffs]}
    if isinstance(v, RootedPoly):
        return {"roots": [jsonable(r) for r in v.root_list()], "leading": jsonable(v.leading)}
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if hasattr(v, "value") and hasattr(v, "name"):
        return v.value
    return v


def _human(v, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(v, dict):
        lines = []
        for k, x in v.items():
            nested = x.values() if isinstance(x, dict) else x if isinstance(x, list) else ()
            if any(isinstance(e, (dict, list)) for e in nested):
                lines.append(f"{pad}{k}:")
                lines.append(_human(x, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_flat(x)}")
        return "\n".join(lines)
    if isinstance(v, list):
        return "\n".join(f"{pad}- {_flat(x)}" for x in v)
    return pad + _flat(v)


def _flat(v) -> str:
    if isinstance(v, dict):
        return ", ".join(f"{k}={_flat(x)}" for k, x in v.items())
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    return str(v)


# -- subcommands ---------------------------------------------------------


def _load(args):
    if args.poly is None:
        raise InputError("--poly is required")
    p, rp = parse_poly(_read_source(args.poly))
    return _apply_backend(p, rp, args.backend)


def cmd_mesh(args):
    p, rp = _load(args)
    rep = mesh_size(p)
    result = {
        "mesh": rep.mesh, "gap_argmin": list(rep.gap_argmin) if rep.gap_argmin else None,
        "all_real": rep.all_real, "simple": rep.simple, "exact": rep.exact,
        "roots": list(rep.roots),
    }
    return {"poly": rp if rp is not None else p}, result, p.backend, {}


def cmd_fn(args):
    p, rp = _load(args)
    n = args.n if args.n is not None else p.degree
    h = _number(args.h, "--h")
    inputs = {"poly": rp if rp is not None else p, "n": n, "h": h}
    if args.at is not None:
        x = _number(args.at, "--at")
        inputs["at"] = x
        return inputs, {"value": laguerre.eval_fn(p, n, h, x)}, p.backend, {}
    fn = laguerre.discrete_fn(p, n, h)
    return inputs, {"coeffs": list(fn.coeffs), "text": str(fn)}, p.backend, {}


def cmd_certify(args):
    p, rp = _load(args)
    h = _number(args.h, "--h")
    cert = laguerre.certify_main_theorem(p, h)
    result = {
        "verdict": cert.verdict.value, "n": cert.n_used, "h": cert.h,
        "fn": {"coeffs": list(cert.fn_poly.coeffs), "text": str(cert.fn_poly)},
        "mesh": cert.mesh_checked.mesh,
        "witness": cert.witness, "value": cert.value,
    }
    inputs = {"poly": rp if rp is not None else p, "h": h}
    if not cert.certified:
        raise _Finding(inputs, result, p.backend, {})
    return inputs, result, p.backend, {}


def cmd_logderiv(args):
    p, rp = _load(args)
    inputs = {"poly": rp if rp is not None else p, "check": args.check}
    source = rp if rp is not None else p
    if args.check == "residues":
        rep = logderiv.check_residue_lemmas(source)
        result = {"A": list(rep.A), "B": list(rep.B), "sum_A": rep.sum_A, "sum_B": rep.sum_B,
                  "mesh_at_least_one": rep.mesh_at_least_one,
                  "sums_ok": rep.sums_ok, "signs_ok": rep.signs_ok}
        ok = rep.ok
    elif args.check == "cauchy-schwarz":
        rep = logderiv.check_cauchy_schwarz(p)
        result = {"samples": list(rep.samples), "margins_F": list(rep.margins_F),
                  "margins_R": list(rep.margins_R), "holds": rep.holds}
        ok = rep.holds
    else:
        d = _number(args.d, "--d")
        inputs["d"] = d
        rep = logderiv.check_spacing_preservation(p, d)
        result = {"g": {"coeffs": list(rep.g.coeffs), "text": str(rep.g)},
                  "real_rooted": rep.real_rooted, "simple": rep.simple,
                  "mesh_at_least_one": rep.mesh_at_least_one, "mesh_at_least_d": rep.mesh_at_least_d,
                  "mesh_estimate": rep.mesh_estimate}
        ok = rep.ok
    if not ok:
        raise _Finding(inputs, result, p.backend, {})
    return inputs, result, p.backend, {}


def cmd_measure(args):
    p, rp = _load(args)
    lam = _number(args.lam, "--lam")
    h = _number(args.h, "--h")
    rf = {"F": lambda: logderiv.build_F(p, h), "R": lambda: logderiv.build_R(p, h),
          "logderiv": lambda: logderiv.log_derivative(p)}[args.target]()
    mode = logderiv.MeasureMode.NUMERIC_SCAN if args.mode == "scan" else logderiv.MeasureMode.EXACT_ROOT_PAIRING
    res = logderiv.superlevel_measure(rf, lam, mode)
    result = {
        "method": res.method.value, "total": res.total, "total_error": res.total_error,
        "vieta_total": res.vieta_total,
        "enclosure": list(res.enclosure) if res.enclosure is not None else None,
        "n_over_lambda": Fraction(p.degree) / Fraction(lam)
        if p.backend == EXACT else p.degree / float(lam),
        "pairing_ok": res.pairing_ok, "failure": res.failure, "tail_bound": res.tail_bound,
        "intervals": [[a, b] for a, b in res.intervals],
    }
    if mode is logderiv.MeasureMode.EXACT_ROOT_PAIRING:
        result["consistent"] = res.consistent
    inputs = {"poly": rp if rp is not None else p, "lam": lam, "h": h, "target": args.target,
              "mode": args.mode}
    tol = {"scan": 1e-9} if args.mode == "scan" else {}
    if mode is logderiv.MeasureMode.EXACT_ROOT_PAIRING and not res.consistent:
        raise _Finding(inputs, result, p.backend, tol)
    return inputs, result, p.backend, tol


def _parse_phi(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("--phi must be a JSON object with a 'kind'")
    kind = obj["kind"]
    if kind == "exp_square":
        return entire.ExpOfSquare(), obj
    if kind not in ("poly_exp", "gaussian"):
        raise InputError(f"unknown phi kind {kind!r} (poly_exp, gaussian, exp_square)")
    if "poly" not in obj:
        raise InputError(f"{kind} needs 'poly'")
    p, _ = parse_poly(json.dumps(obj["poly"]))
    if kind == "poly_exp":
        b, _ = _scalar(obj.get("b", 0), "b")
        return entire.PolyTimesExp(p, Fraction(b) if isinstance(b, int) else b), obj
    a, _ = _scalar(obj.get("a", 1), "a")
    return entire.GaussianTimesPoly(p, Fraction(a) if isinstance(a, int) else a), obj


def cmd_entire(args):
    phi, obj = _parse_phi(_read_source(args.phi))
    h = _number(args.h, "--h")
    inputs = {"phi": obj, "h": h}
    if args.at is not None:
        x = _number(args.at, "--at")
        inputs["at"] = x
        return inputs, {"value": entire.f_infinity(phi, x, h), "phi": phi.describe()}, "float", {}
    lo, hi = (_number(v, "--window") for v in args.window)
    inputs.update(window=[lo, hi], grid=args.grid, tol=args.tol)
    rep = entire.check_theorem34(phi, (lo, hi), args.grid, h, args.tol)
    result = {
        "phi": rep.subject, "in_hypothesis": rep.in_hypothesis,
        "min_normalized": rep.min_normalized, "argmin": rep.argmin,
        "candidates": len(rep.candidates),
        "confirmed": [[x, v] for x, v in rep.confirmed],
        "artifacts": [[x, v] for x, v in rep.artifacts],
    }
    tol = {"theorem34": args.tol, "recheck_dps": 60}
    if rep.confirmed:
        raise _Finding(inputs, result, "float", tol)
    return inputs, result, "float", tol


def cmd_sumlem(args):
    a = float(_number(args.a, "--a"))
    s = entire.sumlem_partial(args.n, a)
    lo, hi = entire.sumlem_bounds(args.n, a)
    result = {"partial": s, "lo": lo, "hi": hi, "bracketed": lo < s < hi}
    inputs = {"n": args.n, "a": a}
    if not result["bracketed"]:
        raise _Finding(inputs, result, "float", {})
    return inputs, result, "float", {}


def cmd_qn(args):
    if args.x is not None:
        x = float(_number(args.x, "--x"))
        return {"n": args.n, "x": x}, {"value": entire.qn_eval(args.n, x), "exp": math.exp(x)}, "float", {}
    n_list = args.n_list or ([args.n] if args.n else [3, 4, 5, 6])
    lo, hi = (float(_number(v, "--interval")) for v in args.interval)
    rep = entire.qn_convergence_report(n_list, (lo, hi), args.grid)
    result = {"n_list": list(rep.n_list), "max_errors": list(rep.max_errors),
              "strictly_decreasing": rep.strictly_decreasing}
    return {"n_list": n_list, "interval": [lo, hi], "grid": args.grid}, result, "float", {}


def cmd_campaign(args):
    if args.seed is None:
        raise InputError("--seed is required for campaign")
    gap = (harness.UniformExtra(Fraction(_number(args.gap_param, "--gap-param")))
           if args.gap_dist == "uniform" else
           harness.FixedPlusExponential(Fraction(_number(args.gap_param, "--gap-param")))
           if args.gap_param is not None else None)
    min_gap = Fraction(_number(args.min_gap, "--min-gap"))
    params = {}
    if args.conjecture == "Zspc":
        if args.d is None:
            raise InputError("Zspc needs --d")
        params["d"] = Fraction(_number(args.d, "--d"))
    if args.conjecture == "LPEntire":
        params.update(grid=args.grid, tol=args.tol)
    if args.target:
        params["target"] = args.target
    spec = harness.GeneratorSpec(
        degree_range=(args.degree_min, args.degree_max), min_gap=min_gap,
        gap_distribution=gap, seed=args.seed,
    )
    res = harness.run_campaign(args.conjecture, spec, args.trials, params, args.workers)
    result = res.to_dict()
    inputs = {"conjecture": args.conjecture, "trials": args.trials, "spec": spec.to_dict(),
              "params": params}
    tol = {"theorem34": args.tol} if args.conjecture == "LPEntire" else {}
    if res.violations:
        raise _Finding(inputs, result, EXACT, tol, args.seed)
    return inputs, result, EXACT, tol, args.seed


def cmd_reproduce(args):
    rep = harness.reproduce_paper_examples()
    result = {"ok": rep.ok, "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in rep.checks],
              "failures": [n for n, ok, _ in rep.checks if not ok]}
    tol = {"f_inf_relative": 1e-12}
    if not rep.ok:
        raise _Finding({}, result, EXACT, tol)
    return {}, result, EXACT, tol


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlaguerre", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--poly", help="JSON inline, @file, or - for stdin")
    poly.add_argument("--backend", choices=(EXACT, FLOAT), help="convert the input to this backend")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("mesh", parents=[common, poly], help="mesh size and root data")

    s = sub.add_parser("fn", parents=[common, poly], help="discrete functional f_n(x,h,p)")
    s.add_argument("--n", type=int, help="weight index (default deg p)")
    s.add_argument("--h", default="1")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--expand", action="store_true", help="print the coefficients (default)")
    g.add_argument("--at", help="evaluate at this point")

    s = sub.add_parser("certify", parents=[common, poly], help="certify f_n >= 0 on R")
    s.add_argument("--h", default="1")

    s = sub.add_parser("logderiv", parents=[common, poly], help="residue, inequality and spacing checks")
    s.add_argument("--check", choices=("residues", "cauchy-schwarz", "spacing"), default="residues")
    s.add_argument("--d", default="1")

    s = sub.add_parser("measure", parents=[common, poly], help="superlevel-set measure")
    s.add_argument("--lam", required=True)
    s.add_argument("--h", default="1")
    s.add_argument("--target", choices=("F", "R", "logderiv"), default="F")
    s.add_argument("--mode", choices=("exact", "scan"), default="exact")

    s = sub.add_parser("entire", parents=[common], help="f_inf for entire functions")
    s.add_argument("--phi", required=True, help="JSON: {kind: poly_exp|gaussian|exp_square, ...}")
    s.add_argument("--h", default="1")
    s.add_argument("--at", help="evaluate f_inf at this point (otherwise run the grid check)")
    s.add_argument("--window", nargs=2, default=["-5", "5"])
    s.add_argument("--grid", type=int, default=1001)
    s.add_argument("--tol", type=float, default=1e-9)

    s = sub.add_parser("sumlem", parents=[common], help="harmonic-type sum and its bounds")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", default="0")

    s = sub.add_parser("qn", parents=[common], help="exponential approximants q_n")
    s.add_argument("--n", type=int)
    s.add_argument("--x")
    s.add_argument("--n-list", type=int, nargs="+")
    s.add_argument("--interval", nargs=2, default=["-1", "1"])
    s.add_argument("--grid", type=int, default=101)

    s = sub.add_parser("campaign", parents=[common], help="run an evidence campaign")
    s.add_argument("--conjecture", required=True, choices=harness.CONJECTURES)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--d")
    s.add_argument("--degree-min", type=int, default=2)
    s.add_argument("--degree-max", type=int, default=8)
    s.add_argument("--min-gap", default="1")
    s.add_argument("--gap-dist", choices=("exp", "uniform"), default="exp")
    s.add_argument("--gap-param")
    s.add_argument("--target", choices=("F", "log_derivative"))
    s.add_argument("--grid", type=int, default=1001)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--workers", type=int, help=f"default from ${harness.WORKERS_ENV} or 1")

    sub.add_parser("reproduce", parents=[common], help="replay the worked examples")
    return ap


_COMMANDS = {
    "mesh": cmd_mesh, "fn": cmd_fn, "certify": cmd_certify, "logderiv": cmd_logderiv,
    "measure": cmd_measure, "entire": cmd_entire, "sumlem": cmd_sumlem, "qn": cmd_qn,
    "campaign": cmd_campaign, "reproduce": cmd_reproduce,
}


def _emit(args, inputs, result, backend, tol, seed=None) -> None:
    doc = {
        "command": args.command,
        "inputs": jsonable(inputs),
        "result": jsonable(result),
        "provenance": {"backend": backend, "seed": seed, "tolerances": tol},
    }
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(args.command)
        subject = inputs.get("poly") if isinstance(inputs, dict) else None
        if isinstance(subject, (Poly, RootedPoly)):
            print(f"  poly: {subject}")
        print(_human(doc["result"], 1))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = _COMMANDS[args.command](args)
    except _Finding as found:
        _emit(args, *found.args)
        return 1
    except (InputError, PreconditionError, BackendError, ValueError, ZeroDivisionError) as exc:
        print(f"dlaguerre {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit(args, *out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
