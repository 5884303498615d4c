"""Command line front end: term calculator and derivation tools.

    ordkernel ord cmp "0" "I"
    ordkernel ord psi-check "W(0+1)" "I"
    ordkernel deriv check t.json
    ordkernel deriv transform --op predce --in d.json --out e.json --params a=0 c=I+1
    ordkernel deriv gen --seed 1 --size 20 --out corpus/

Exit codes: 0 ok, 1 usage, 2 check or transformation failure, 3 cannot verify,
4 a size or height cap was exceeded.
"""

from __future__ import annotations

import argparse
import functools
import json
import sys

from . import arith
from .config import Config
from .corpus import write_corpus
from .derivation import MalformedDerivation, Operator, check, dump, load
from .order import cmp, cmp_int, in_hull, psi_admissible
from .parsing import ParseError, parse_constant, parse_formula, parse_reg, parse_term
from .stages import hull_stages
from .terms import CapExceeded, TermError, render_term
from .transform import (
    TransformError,
    boundedness,
    build_tautology,
    collapse,
    invert,
    pipeline_complete_ce,
    pred_cut_elim,
    reduce_cut,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_UNSURE, EXIT_CAP = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine output")
    p.add_argument("--n", type=int, default=argparse.SUPPRESS, help="level n (>= 2)")
    return p


ORD_VERBS = {
    "cmp": ("compare two terms", ["s", "t"]),
    "add": ("ordinal sum", ["s", "t"]),
    "pow": ("w^t", ["t"]),
    "phi": ("Veblen phi(a, b)", ["a", "b"]),
    "tower": ("w_m(t)", ["m", "t"]),
    "hull": ("t in H_gamma(beta)?", ["t", "gamma", "beta"]),
    "stages": ("brute-force hull stages", ["gamma", "beta"]),
    "psi-check": ("is psi(kappa; alpha) a normal term?", ["kappa", "alpha"]),
    "normalize": ("normal form of a term", ["t"]),
}

TRANSFORMS = ("tautology", "invert", "reduce", "predce", "bound", "collapse", "pipeline")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = _Parser(prog="ordkernel", description="ordinal notations and derivation checking",
                  parents=[common])
    groups = top.add_subparsers(dest="group", required=True, parser_class=_Parser)

    ord_p = groups.add_parser("ord", help="term calculator", parents=[common])
    verbs = ord_p.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb, (text, args) in ORD_VERBS.items():
        vp = verbs.add_parser(verb, help=text, parents=[common])
        for a in args:
            vp.add_argument(a)
        if verb == "stages":
            vp.add_argument("--size", type=int, default=None, help="term size cap")
            vp.add_argument("--depth", type=int, default=None, help="number of rounds")

    der = groups.add_parser("deriv", help="derivation tools", parents=[common])
    dverbs = der.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    cp = dverbs.add_parser("check", help="check a derivation file", parents=[common])
    cp.add_argument("file")
    tp = dverbs.add_parser("transform", help="apply a transformation", parents=[common])
    tp.add_argument("--op", required=True, choices=TRANSFORMS)
    tp.add_argument("--in", dest="inputs", action="append", default=[], help="input derivation(s)")
    tp.add_argument("--out", required=True)
    tp.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    gp = dverbs.add_parser("gen", help="write a reproducible corpus", parents=[common])
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--size", type=int, default=10)
    gp.add_argument("--out", required=True)
    return top


# ---------------------------------------------------------------- ord verbs


def _term(src: str):
    return arith.normalize(parse_term(src))


def _ord(ns, cfg: Config) -> tuple:
    v = ns.verb
    if v == "cmp":
        return cmp(parse_term(ns.s), parse_term(ns.t)).name, EXIT_OK
    if v == "add":
        return render_term(arith.add(_term(ns.s), _term(ns.t))), EXIT_OK
    if v == "pow":
        return render_term(arith.omega_pow(_term(ns.t))), EXIT_OK
    if v == "phi":
        return render_term(arith.veblen(_term(ns.a), _term(ns.b))), EXIT_OK
    if v == "tower":
        try:
            m = int(ns.m)
        except ValueError:
            raise UsageError(f"tower: m must be a natural number, got {ns.m!r}")
        return render_term(arith.omega_tower(m, _term(ns.t))), EXIT_OK
    if v == "hull":
        t, g, b = (_term(x) for x in (ns.t, ns.gamma, ns.beta))
        ok = in_hull(t, g, b)
        return ("true" if ok else "false"), EXIT_OK
    if v == "stages":
        size = ns.size if ns.size is not None else min(cfg.size_cap, 5)
        depth = ns.depth if ns.depth is not None else cfg.depth_cap
        g, b = _term(ns.gamma), _term(ns.beta)
        r = hull_stages(g, b, size, depth)
        ts = sorted(r.terms, key=functools.cmp_to_key(cmp_int))
        out = {
            "terms": [render_term(t) for t in ts],
            "rounds": r.depth,
            "saturated": r.saturated,
            "overflow": r.overflow,
        }
        return out, EXIT_OK
    if v == "psi-check":
        ok = psi_admissible(arith.normalize_reg(parse_reg(ns.kappa)), _term(ns.alpha))
        return ("admissible" if ok else "not admissible"), EXIT_OK
    if v == "normalize":
        return render_term(_term(ns.t)), EXIT_OK
    raise UsageError(f"unknown verb {v}")


# ---------------------------------------------------------------- deriv verbs


def _params(items: list) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--params: expected KEY=VALUE, got {item!r}")
        out[key] = value
    return out


def _need(params: dict, key: str, op: str) -> str:
    if key not in params:
        raise UsageError(f"--params: {op} needs {key}=...")
    return params[key]


def _inputs(ns, count: int) -> list:
    if len(ns.inputs) != count:
        raise UsageError(f"--in: {ns.op} needs {count} input file(s), got {len(ns.inputs)}")
    return [load(p) for p in ns.inputs]


def _transform(ns, cfg: Config):
    op, n = ns.op, cfg.n
    p = _params(ns.params)
    before = None
    if op == "tautology":
        f = parse_formula(_need(p, "formula", op))
        gamma = _term(p.get("gamma", "0"))
        out = build_tautology((), f, Operator(gamma), n=n)
        extra = {}
    elif op == "invert":
        (d,) = _inputs(ns, 1)
        before = d
        iota = parse_constant(p["iota"]) if "iota" in p else None
        if iota is not None and not hasattr(iota, "elems"):
            iota = arith.normalize(iota)
        out = invert(d, parse_formula(_need(p, "target", op)), iota, n)
        extra = {}
    elif op == "reduce":
        dl, dr = _inputs(ns, 2)
        before = dr
        C = parse_formula(_need(p, "formula", op))
        c = parse_term(_need(p, "c", op))
        out = reduce_cut(dl, dr, C, arith.normalize(c), n)
        extra = {}
    elif op == "predce":
        (d,) = _inputs(ns, 1)
        before = d
        a = _term(_need(p, "a", op))
        c = _term(_need(p, "c", op))
        part = int(p.get("part", "1"))
        out = pred_cut_elim(d, a, c, n, part=part)
        extra = {"part": part}
    elif op == "bound":
        (d,) = _inputs(ns, 1)
        before = d
        C = parse_formula(_need(p, "formula", op))
        b = _term(_need(p, "b", op))
        out = boundedness(d, C, b, p.get("side", "exists"), n)
        extra = {}
    elif op == "collapse":
        (d,) = _inputs(ns, 1)
        before = d
        lam = arith.normalize_reg(parse_reg(_need(p, "lam", op)))
        sigma = _term(_need(p, "sigma", op))
        out = collapse(d, lam, sigma, None, n)
        extra = {}
    else:
        (d,) = _inputs(ns, 1)
        before = d
        m, k = int(_need(p, "m", op)), int(_need(p, "k", op))
        out, wb = pipeline_complete_ce(d, m, k, n)
        extra = {"witness_bound": render_term(wb)}
    dump(out, ns.out)
    report = {"op": op, "out": ns.out}
    if before is not None:
        report["bound_before"] = render_term(before.bound)
        report["cutrank_before"] = render_term(before.cutrank)
    report["bound_after"] = render_term(out.bound)
    report["cutrank_after"] = render_term(out.cutrank)
    report.update(extra)
    return report


def _deriv(ns, cfg: Config) -> tuple:
    if ns.verb == "check":
        try:
            d = load(ns.file)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"check: cannot read {ns.file}: {e}")
        rep = check(d, cfg.n)
        return {"status": rep.status, "text": str(rep), "path": list(rep.path)}, rep.exit_code
    if ns.verb == "transform":
        return _transform(ns, cfg), EXIT_OK
    path = write_corpus(ns.out, ns.seed, ns.size)
    return {"manifest": str(path)}, EXIT_OK


def _emit(result, as_json: bool) -> None:
    if as_json:
        print(json.dumps(result, sort_keys=True))
    elif isinstance(result, str):
        print(result)
    elif "text" in result:
        print(result["text"])
    elif "terms" in result:
        for t in result["terms"]:
            print(t)
    else:
        for k, v in result.items():
            print(f"{k}: {v}")


def main(argv: list | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        ns = build_parser().parse_args(argv)
        cfg = Config.load(getattr(ns, "config", None), n=getattr(ns, "n", None))
        handler = _ord if ns.group == "ord" else _deriv
        result, code = handler(ns, cfg)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except MalformedDerivation as e:
        print(f"malformed derivation: {e}", file=sys.stderr)
        return EXIT_FAIL
    except TransformError as e:
        code = EXIT_CAP if "cap" in e.msg else EXIT_FAIL
        print(f"transform failed: {e}", file=sys.stderr)
        return code
    except (TermError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    _emit(result, getattr(ns, "json", False))
    return code


if __name__ == "__main__":
    sys.exit(main())
