"""Command line interface: JSON in, JSON plus a run manifest out.

Exit codes: 0 success, 1 malformed JSON, 2 validation failure or bad input,
3 truncation too small for a sound answer.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from . import fsig, gaction, hopf, toric
from .exact import FieldSpec

EXIT_OK, EXIT_JSON, EXIT_INVALID, EXIT_TRUNCATION = 0, 1, 2, 3
BOX_ENV = "GROUPTRACE_BOX"


class InputError(ValueError):
    pass


class MalformedJSON(Exception):
    def __init__(self, source: str, err: json.JSONDecodeError):
        super().__init__(f"malformed JSON in {source}: line {err.lineno} column {err.colno}: {err.msg}")


class _Ctx:
    def __init__(self):
        self.digests: dict[str, str] = {}
        self.config: dict = {}

    def load_json(self, path: str):
        with open(path, "rb") as fh:
            raw = fh.read()
        self.digests[path] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as err:
            raise MalformedJSON(path, err) from None


# ---------------------------------------------------------------------------
# rendering helpers
# ---------------------------------------------------------------------------


def render_element(coords, labels, field: FieldSpec) -> str:
    parts = []
    for c, lab in zip(coords, labels):
        c = field(c)
        if c == 0:
            continue
        s = str(field.fmt(c))
        if lab == "1":
            parts.append(s)
        elif c == 1:
            parts.append(lab)
        else:
            parts.append(f"{s}*{lab}")
    return " + ".join(parts) if parts else "0"


def _fmt_vec(field: FieldSpec, v) -> list:
    return [field.fmt(field(x)) for x in v]


def _field(args) -> FieldSpec:
    if getattr(args, "p", None) in (None, 0):
        return FieldSpec.rationals()
    return FieldSpec.prime(int(args.p))


def _box_default(args) -> int | None:
    if getattr(args, "box", None) is not None:
        return int(args.box)
    env = os.environ.get(BOX_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{BOX_ENV}={env!r} is not an integer") from None
    return None


def _int_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    text = text.strip().strip("[]()")
    return [int(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# hopf
# ---------------------------------------------------------------------------


def _load_hopf(args, ctx: _Ctx) -> hopf.HopfAlgebra:
    if args.input:
        return hopf.HopfAlgebra.from_json_obj(ctx.load_json(args.input))
    if not args.builtin:
        raise InputError("give --builtin or an input file")
    field = _field(args)
    return hopf.builtin(args.builtin, field, n=args.n, e=args.e, orders=_int_list(args.orders))


def cmd_hopf(args, ctx: _Ctx):
    H = _load_hopf(args, ctx)
    f = H.field
    if args.action == "validate":
        rep = hopf.validate_hopf(H, seed=args.seed)
        return rep.to_json_obj(), (EXIT_OK if rep.all_pass else EXIT_INVALID)
    hopf.require_valid(H)
    if args.action == "dual":
        return hopf.cartier_dual(H).to_json_obj(), EXIT_OK
    if args.action == "integral":
        space = hopf.left_integrals(H)
        tr = hopf.group_trace(H)
        return {
            "hopf": H.name,
            "basis": list(H.basis),
            "integrals": {
                "dim": space.dim,
                "basis": [_fmt_vec(f, v) for v in space.basis],
                "rendered": [render_element(v, H.basis, f) for v in space.basis],
            },
            "trace": tr.to_json_obj(),
            "linearly_reductive": tr.normalized,
        }, EXIT_OK
    if args.action == "trace":
        tr = hopf.group_trace(H)
        T = hopf.trace_bilinear_matrix(H, tr)
        from .exact import determinant

        return {
            "hopf": H.name,
            "trace": tr.to_json_obj(),
            "T": [_fmt_vec(f, row) for row in T.data],
            "det_T": f.fmt(determinant(T).value),
            "diagram_commutes": hopf.trace_diagram_holds(H, tr),
            "linearly_reductive": tr.normalized,
        }, EXIT_OK
    raise InputError(f"unknown hopf action {args.action}")


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------


def _load_coacted(args, ctx: _Ctx) -> gaction.CoactedAlgebra:
    if args.input:
        obj = ctx.load_json(args.input)
        return gaction.coacted_from_json_obj(obj, hopf_loader=lambda p: hopf.HopfAlgebra.from_json_obj(ctx.load_json(p)))
    if not args.family:
        raise InputError("give --family or an input file")
    from .poly import PolyRing

    ring = PolyRing(_field(args), [v for v in args.vars.split(",") if v])
    return gaction.cyclic_presentation(ring, int(args.n), args.rhs, args.family, args.scale)


def _point(args, S) -> list | None:
    if args.point is None:
        return None
    vals = [Fraction(x) for x in args.point.split(",") if x.strip()]
    return [S.field(v) for v in vals]


def cmd_action(args, ctx: _Ctx):
    S = _load_coacted(args, ctx)
    rep = gaction.coaction_validate(S)
    if not rep.all_pass:
        return {"validation": rep.to_json_obj()}, EXIT_INVALID
    f = S.field
    if args.action == "trace":
        tr = gaction.trace_map(S)
        out = tr.to_json_obj()
        out["traces"] = {lab: str(v) for lab, v in zip(S.basis, tr.trace_values)}
        return out, EXIT_OK
    if args.action == "disc":
        d = gaction.discriminant_divisor(S)
        return d.to_json_obj(f), EXIT_OK
    if args.action == "torsor":
        return gaction.torsor_test(S, _point(args, S)).to_json_obj(), EXIT_OK
    if args.action == "tame":
        out = gaction.is_tame(S).to_json_obj(f)
        ok, bad = gaction.check_maximal_into_maximal(S)
        out["maximal_into_maximal"] = ok
        return out, EXIT_OK
    raise InputError(f"unknown action {args.action}")


# ---------------------------------------------------------------------------
# toric
# ---------------------------------------------------------------------------


def _load_semigroup(args, ctx: _Ctx, path_attr: str = "input") -> tuple[toric.AffineSemigroup, list[int] | None]:
    path = getattr(args, path_attr, None)
    if path:
        obj = ctx.load_json(path)
        return toric.AffineSemigroup.from_json_obj(obj), obj.get("divisor")
    name = getattr(args, "builtin", None) or "veronese"
    if name == "veronese":
        if args.n is None:
            raise InputError("--builtin veronese needs --n")
        return toric.plane_veronese(int(args.n)), None
    if name in ("plane", "orthant"):
        return toric.orthant(int(args.d or 2)), None
    raise InputError(f"unknown semigroup builtin {name!r}")


def _divisor(args, R, file_div) -> toric.ToricDivisor:
    coeffs = _int_list(getattr(args, "divisor", None)) or file_div
    if coeffs is None:
        coeffs = [1] + [0] * (len(R.rays) - 1)
    return toric.ToricDivisor(R, tuple(coeffs))


def cmd_toric(args, ctx: _Ctx):
    R, file_div = _load_semigroup(args, ctx)
    ctx.config["box"] = _box_default(args)
    if args.action == "classgroup":
        return {"semigroup": R.to_json_obj(), **toric.class_group(R).to_json_obj()}, EXIT_OK
    if args.action == "veronese":
        grading = _int_list(args.grading)
        sub, B = toric.veronese(R, int(args.order), grading)
        return {
            "semigroup": sub.to_json_obj(),
            "basis_matrix": B,
            "generators_in_parent": [list(toric.to_parent(B, g)) for g in sub.generators],
        }, EXIT_OK
    D = _divisor(args, R, file_div)
    if args.action == "index":
        n, m0 = toric.divisor_index(R, D, int(args.max_n))
        return {"divisor": list(D.coeffs), "index": n, "principal_witness": list(m0)}, EXIT_OK
    if args.action == "sections":
        box = ctx.config["box"] or toric.default_section_box(R, D, abs(int(args.i)))
        ctx.config["box"] = box
        pts = toric.sections(R, D, int(args.i), box)
        gens = toric.section_generators(R, D, int(args.i), box)
        return {"i": int(args.i), "box": box, "count": len(pts), "points": [list(m) for m in pts],
                "generators": [list(m) for m in gens]}, EXIT_OK
    if args.action == "cover":
        n = int(args.cover_n) if args.cover_n else toric.divisor_index(R, D, int(args.max_n))[0]
        spec = toric.cyclic_cover(R, D, n)
        out = spec.to_json_obj()
        out["class_group"] = toric.class_group(spec.cover_semigroup).to_json_obj()
        ok, wit = toric.check_local_graded(R, D, n)
        out["local_graded"] = ok
        return out, EXIT_OK
    raise InputError(f"unknown toric action {args.action}")


# ---------------------------------------------------------------------------
# fsig
# ---------------------------------------------------------------------------


def cmd_fsig(args, ctx: _Ctx):
    R, file_div = _load_semigroup(args, ctx, "semigroup")
    p = int(args.p)
    box = _box_default(args)
    ctx.config.update({"box": box, "e_max": args.emax, "threads": args.threads})
    if args.action == "estimate":
        if args.emax == 1:
            rep = fsig.splitting_number(R, p, 1, box, args.threads, witnesses=args.witnesses)
            return {"reports": [rep.to_json_obj()], "estimate": fsig._frac(rep.ratio),
                    "estimate_float": float(rep.ratio), "uncertainty": None}, EXIT_OK
        return fsig.fsig_estimate(R, p, int(args.emax), box, args.threads).to_json_obj(), EXIT_OK
    if args.action == "verify-rule":
        D = _divisor(args, R, file_div)
        n = None if args.divisor_index in (None, "auto") else int(args.divisor_index)
        tol = Fraction(args.tolerance)
        ctx.config["tolerance"] = str(tol)
        v = fsig.verify_transformation_rule(R, D, n, p, int(args.emax), tol, args.threads)
        return v.to_json_obj(), EXIT_OK
    if args.action == "torsion-check":
        return fsig.torsion_bound_check(R, p, int(args.emax), args.threads).to_json_obj(), EXIT_OK
    raise InputError(f"unknown fsig action {args.action}")


# ---------------------------------------------------------------------------
# repro
# ---------------------------------------------------------------------------


def _repro_integrals(kind: str) -> Callable:
    def run(args):
        f = FieldSpec.prime(args.p or 3)
        e = args.e or 1
        n = args.n or 3
        H = {"alpha": lambda: hopf.alpha_pe(e, f), "mu": lambda: hopf.mu_n(n, f),
             "constant": lambda: hopf.constant_group(hopf.cyclic_table(n), f)}[kind]()
        space = hopf.left_integrals(H)
        tr = hopf.group_trace(H)
        return {
            "hopf": H.name,
            "integral": render_element(space.basis[0], H.basis, f),
            "trace": render_element(tr.functional, [b + "*" for b in H.basis], f),
            "trace_functional": _fmt_vec(f, tr.functional),
            "trace_of_1": f.fmt(tr(H.unit)),
            "normalized": tr.normalized,
        }

    return run


def _repro_bad_trace(args):
    from .poly import PolyRing

    p = args.p or 3
    f = FieldSpec.prime(p)
    ring = PolyRing(f, ["x", "y"])
    S = gaction.cyclic_presentation(ring, p, "x*y", "additive")
    rep = gaction.trace_map(S)
    return {
        "presentation": f"R[t]/(t^{p} - x*y) over F_{p}[x,y], t -> t(x)1 + 1(x)xi",
        "traces": {lab: str(v) for lab, v in zip(S.basis, rep.trace_values)},
        "disc": str(rep.disc),
        "torsor": gaction.torsor_test(S).verdict,
        "tame": gaction.is_tame(S).verdict,
    }


def _repro_mu_cover(args):
    from .poly import PolyRing

    p = args.p or 3
    f = FieldSpec.prime(p)
    ring = PolyRing(f, ["x", "y"])
    S = gaction.cyclic_presentation(ring, p, "x", "kummer")
    rep = gaction.trace_map(S)
    unit = gaction.cyclic_presentation(ring, p, "1", "kummer")
    return {
        "traces": {lab: str(v) for lab, v in zip(S.basis, rep.trace_values)},
        "disc": str(rep.disc),
        "at_origin": gaction.torsor_test(S, [0, 0]).verdict,
        "at_(1,1)": gaction.torsor_test(S, [1, 1]).verdict,
        "unit_modulus": gaction.torsor_test(unit).verdict,
        "tame": gaction.is_tame(S).verdict,
    }


def _repro_thm_c(args):
    n = args.n or 2
    p = args.p or 3
    e = args.e or 4
    V = toric.plane_veronese(n)
    D = toric.ToricDivisor(V, (1, 0))
    cover = toric.cyclic_cover(V, D, n)
    v = fsig.verify_transformation_rule(V, D, n, p, e)
    return {
        "n": n,
        "p": p,
        "cover_generators": [list(g) for g in cover.cover_semigroup.generators],
        "cover_is_regular": toric.is_isomorphic(cover.cover_semigroup, toric.orthant(2)),
        "local_graded": toric.check_local_graded(V, D, n)[0],
        "s_cover": fsig._frac(v.lhs),
        "n_times_s_base": fsig._frac(v.rhs),
        "verdict": v.verdict,
    }


def _repro_torsion(args):
    out = {}
    for n, p, e in [(2, 3, 4), (3, 2, 5), (5, 2, 5)]:
        rep = fsig.torsion_bound_check(toric.plane_veronese(n), p, e)
        out[f"V_{n}"] = {"p": p, "e_max": e, "torsion": rep.torsion_orders,
                         "estimate": fsig._frac(rep.estimate.estimate), "bound_holds": rep.bound_holds,
                         "tight": rep.tight}
    return out


def _repro_class_groups(args):
    out = {f"V_{n}": toric.class_group(toric.plane_veronese(n)).torsion_orders for n in range(1, 7)}
    sub, _ = toric.veronese(toric.plane_veronese(2), 2, (1, 0))
    out["V_2^(2)"] = toric.class_group(sub).torsion_orders
    return out


REPRO: dict[str, Callable] = {
    "ex-traces-alpha": _repro_integrals("alpha"),
    "ex-traces-mu": _repro_integrals("mu"),
    "ex-traces-constant": _repro_integrals("constant"),
    "ex-bad-trace-alpha-p": _repro_bad_trace,
    "ex-bad-trace-mu-p": _repro_mu_cover,
    "thm-c-veronese": _repro_thm_c,
    "cor-torsion-picard": _repro_torsion,
    "cor-divisor-class-group": _repro_class_groups,
}


def cmd_repro(args, ctx: _Ctx):
    if args.example not in REPRO:
        raise InputError(f"unknown example {args.example!r}; choose from {sorted(REPRO)}")
    return REPRO[args.example](args), EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the JSON document to this file")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--p", type=int, help="characteristic (omit for the rationals)")

    ap = argparse.ArgumentParser(prog="grouptrace", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"grouptrace {__version__}")
    sub = ap.add_subparsers(dest="group", required=True)

    h = sub.add_parser("hopf", parents=[common], help="Hopf algebra tools")
    h.add_argument("action", choices=["validate", "integral", "dual", "trace"])
    h.add_argument("input", nargs="?", help="HopfAlgebra JSON file")
    h.add_argument("--builtin", choices=["mu_n", "alpha_pe", "constant_cyclic", "constant_s3", "diagonalizable",
                                         "group_algebra_cyclic"])
    h.add_argument("--n", type=int)
    h.add_argument("--e", type=int)
    h.add_argument("--orders", help="comma separated cyclic orders for diagonalizable")
    h.add_argument("--seed", type=int, default=0)
    h.set_defaults(func=cmd_hopf)

    a = sub.add_parser("action", parents=[common], help="coacted algebras over a polynomial base")
    a.add_argument("action", choices=["trace", "disc", "torsor", "tame"])
    a.add_argument("input", nargs="?", help="CoactedAlgebra JSON file")
    a.add_argument("--family", choices=["kummer", "additive"])
    a.add_argument("--n", type=int, help="modulus exponent")
    a.add_argument("--rhs", default="1", help="modulus right-hand side, e.g. x^2*y")
    a.add_argument("--scale", default=None, help="additive coaction coefficient (default 1)")
    a.add_argument("--vars", default="x,y")
    a.add_argument("--point", help="comma separated evaluation point")
    a.set_defaults(func=cmd_action)

    t = sub.add_parser("toric", parents=[common], help="semigroups, divisors, covers")
    t.add_argument("action", choices=["index", "sections", "cover", "classgroup", "veronese"])
    t.add_argument("input", nargs="?", help="semigroup JSON file")
    t.add_argument("--builtin", choices=["veronese", "plane"])
    t.add_argument("--n", type=int, help="Veronese order of the builtin")
    t.add_argument("--d", type=int, help="rank of the builtin plane/orthant")
    t.add_argument("--divisor", help="comma separated ray coefficients")
    t.add_argument("--i", type=int, default=1)
    t.add_argument("--box", type=int)
    t.add_argument("--max-n", type=int, default=1000)
    t.add_argument("--cover-n", type=int)
    t.add_argument("--order", type=int, default=2, help="Veronese order for the veronese action")
    t.add_argument("--grading", help="comma separated grading functional")
    t.set_defaults(func=cmd_toric)

    fs = sub.add_parser("fsig", parents=[common], help="splitting numbers and F-signature")
    fs.add_argument("action", choices=["estimate", "verify-rule", "torsion-check"])
    fs.add_argument("--semigroup", help="semigroup JSON file")
    fs.add_argument("--builtin", choices=["veronese", "plane"])
    fs.add_argument("--n", type=int)
    fs.add_argument("--d", type=int)
    fs.add_argument("--emax", type=int, default=2)
    fs.add_argument("--box", type=int)
    fs.add_argument("--divisor", help="comma separated ray coefficients")
    fs.add_argument("--divisor-index", default="auto")
    fs.add_argument("--tolerance", default="3/100")
    fs.add_argument("--witnesses", action="store_true", help="emit per-class witnesses (e_max = 1)")
    fs.set_defaults(func=cmd_fsig)

    r = sub.add_parser("repro", parents=[common], help="reproduce a worked example")
    r.add_argument("example", choices=sorted(REPRO))
    r.add_argument("--n", type=int)
    r.add_argument("--e", type=int)
    r.set_defaults(func=cmd_repro)
    return ap


def _manifest(argv: list[str], ctx: _Ctx, args, wall: float) -> dict:
    config = {k: v for k, v in ctx.config.items() if v is not None}
    config.setdefault("threads", getattr(args, "threads", None) or (os.cpu_count() or 1))
    for k in ("p", "n", "e", "emax", "tolerance", "box", "seed"):
        v = getattr(args, k, None)
        if v is not None:
            config.setdefault(k, v)
    return {
        "command": ["grouptrace", *argv],
        "input_digests": dict(sorted(ctx.digests.items())),
        "config": config,
        "versions": {"grouptrace": __version__, "python": platform.python_version(), "numpy": np.__version__},
        "wall_time": round(wall, 6),
    }


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = _Ctx()
    t0 = time.perf_counter()
    try:
        result, code = args.func(args, ctx)
    except MalformedJSON as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_JSON
    except fsig.TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, ArithmeticError, KeyError, TypeError, AssertionError) as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    doc = {"result": result, "manifest": _manifest(argv, ctx, args, time.perf_counter() - t0)}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
