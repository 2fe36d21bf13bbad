"""Command-line front end.

Exit status: 0 on success, 1 when a computation precondition fails (constant
f, negative m, zero module, timeout), 2 on parse errors.  Results go to
stdout, diagnostics and ``--trace`` records (JSON lines) to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from . import __version__
from .annfs import ann_fs, bfct
from .groebner import Cancelled
from .holonomy import ZeroModuleError, hilbert_data
from .logann import ann_fs_log, ann_lambda_log, module_quotient_syz, module_quotient_tag
from .logmodel import annihilates
from .opalgebra import AlgebraError, ModVector, Operator, VarTable
from .orders import OrderError, TermOrder, grevlex, parse_order
from .scalars import BPoly
from .syntax import ParseError, infer_vars, load_generators, parse_operator, parse_polynomial, parse_rational, render

EXIT_OK, EXIT_COMPUTE, EXIT_PARSE = 0, 1, 2


class _Session:
    def __init__(self, args):
        self.args = args
        self.order: TermOrder = parse_order(args.order) if args.order else grevlex()
        self.deadline = None if not args.timeout else time.monotonic() + args.timeout
        self.records: list[dict] = []

    def trace(self, rec: dict) -> None:
        self.records.append(rec)
        if self.args.trace:
            print(json.dumps(rec, sort_keys=True), file=sys.stderr, flush=True)

    def cancel(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    @property
    def hooks(self) -> dict:
        return {"trace": self.trace, "cancel": self.cancel}

    def render(self, P: Operator) -> str:
        return render(P, self.order)

    def render_vec(self, v: ModVector) -> list[str]:
        return [self.render(c) for c in v.components]


def _vars(args, texts: Sequence[str]) -> list[str]:
    if args.vars:
        return [v.strip() for v in args.vars.split(",") if v.strip()]
    found = infer_vars(texts)
    if not found:
        raise ParseError("cannot infer variables; pass --vars")
    return found


def _poly(args, extra: Sequence[str] = ()) -> Operator:
    xv = _vars(args, [args.f, *extra])
    return parse_polynomial(args.f, VarTable(xv))


def _bpoly_json(b: BPoly) -> dict:
    return {"text": b.to_str(), "coefficients": [str(c) for c in b.coeffs]}


def _emit(sess: _Session, doc: dict, lines: list[str]) -> None:
    if sess.args.format == "json":
        print(json.dumps(doc, ensure_ascii=False))
    else:
        for line in lines:
            print(line)


# --- subcommands --------------------------------------------------------------

def cmd_ann_fs(sess: _Session) -> int:
    f = _poly(sess.args)
    G = ann_fs(f, **sess.hooks)
    gens = [sess.render(g) for g in G]
    _emit(sess, {"command": "ann-fs", "vars": list(f.ring.xvars), "params": ["s"], "generators": gens}, gens)
    return EXIT_OK


def cmd_bfct(sess: _Session) -> int:
    f = _poly(sess.args)
    b = bfct(f, **sess.hooks)
    _emit(sess, {"command": "bfct", "vars": list(f.ring.xvars), "b": _bpoly_json(b)}, [b.to_str()])
    return EXIT_OK


def cmd_ann_log(sess: _Session) -> int:
    args = sess.args
    f = _poly(args)
    literal = args.audit_paper_extraction
    extract = args.emit != "module"
    if args.lam is None:
        res = ann_fs_log(f, args.m, literal=literal, extract=extract, **sess.hooks)
        lam_text = None
        params = ["s"]
    else:
        lam = parse_rational(args.lam)
        res = ann_lambda_log(f, lam, args.m, quotient=args.quotient, literal=literal, extract=extract,
                             **sess.hooks)
        lam_text = str(lam)
        params = []
    module = [sess.render_vec(v) for v in res.module_gens]
    ideal = [sess.render(g) for g in res.ideal_gens]
    doc = {"command": "ann-log", "vars": list(f.ring.xvars), "params": params, "lambda": lam_text, "m": res.m,
           "nu0": res.nu0_used, "b": _bpoly_json(res.b)}
    lines = []
    if args.emit in ("module", "both"):
        doc["module"] = module
        if args.emit == "both":
            lines.append("# module")
        lines.extend("(" + ", ".join(v) + ")" for v in module)
    if args.emit in ("ideal", "both"):
        doc["ideal"] = ideal
        if args.emit == "both":
            lines.append("# ideal")
        lines.extend(ideal)
    _emit(sess, doc, lines)
    return EXIT_OK


def cmd_check(sess: _Session) -> int:
    args = sess.args
    xv = _vars(args, [args.f, args.op])
    ring = VarTable(xv, ("s",) if args.lam is None else ())
    f = parse_polynomial(args.f, VarTable(xv))
    P = parse_operator(args.op, ring)
    lam = None if args.lam is None else parse_rational(args.lam)
    if args.m < 0:
        raise AlgebraError("m must be nonnegative")
    ok = annihilates(P, f, args.m, lam)
    _emit(sess, {"command": "check", "vars": xv, "annihilates": ok}, [f"annihilates: {'true' if ok else 'false'}"])
    return EXIT_OK


def _load(sess: _Session):
    args = sess.args
    xv = [v.strip() for v in args.vars.split(",")] if args.vars else None
    return load_generators(args.input, xv)


def cmd_dim(sess: _Session, full: bool = False) -> int:
    gf = _load(sess)
    h = hilbert_data(gf.generators)
    if h.hilbert_polynomial.is_zero():
        raise ZeroModuleError("the quotient module is zero; dimension is undefined")
    n = gf.ring.n
    doc = {"command": "hilbert" if full else "dim", "vars": list(gf.ring.xvars), "dimension": h.dimension,
           "holonomic": h.dimension <= n}
    lines = [f"dimension: {h.dimension}", f"holonomic: {'true' if h.dimension <= n else 'false'}"]
    if full:
        doc["hilbert_polynomial"] = h.hilbert_polynomial.to_str()
        doc["stable_from"] = h.stable_from
        lines = [h.hilbert_polynomial.to_str()] + lines + [f"stable_from: {h.stable_from}"]
    _emit(sess, doc, lines)
    return EXIT_OK


def cmd_quotient(sess: _Session) -> int:
    args = sess.args
    gf = _load(sess)
    ring = gf.ring
    g = parse_polynomial(args.by, VarTable(ring.xvars, ring.params, ring.has_shift))
    P = ModVector([g] * gf.rank)
    out = module_quotient_tag(gf.generators, P, **sess.hooks)
    if args.verify:
        from .groebner import submodules_equal

        other = module_quotient_syz(gf.generators, P, **sess.hooks)
        if not submodules_equal(out, other):
            raise AlgebraError("tag-variable and syzygy quotients differ")
    rows = [sess.render_vec(v) for v in out]
    lines = [r[0] if len(r) == 1 else "(" + ", ".join(r) + ")" for r in rows]
    gens = [r[0] if len(r) == 1 else r for r in rows]
    _emit(sess, {"command": "quotient", "vars": list(ring.xvars), "params": list(ring.params), "generators": gens}, lines)
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------

def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--format", choices=("text", "json"), default=d if suppress else "text")
    p.add_argument("--order", default=d, help="grevlex, posfirst or elim:a,b/c (printing order)")
    p.add_argument("--trace", action="store_true", default=d if suppress else False,
                   help="stream Gröbner statistics as JSON lines to stderr")
    p.add_argument("--audit-paper-extraction", action="store_true", default=d if suppress else False,
                   help="take the last component of every basis element (unfiltered extraction)")
    p.add_argument("--timeout", type=float, default=d, help="seconds before giving up")
    p.add_argument("--vars", default=d, help="comma separated variable names (default: inferred, sorted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylann", description="Annihilators of f^lambda (log f)^m.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _common(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("ann-fs", cmd_ann_fs, "generators of Ann f^s in D_n[s]")
    p.add_argument("--f", required=True)
    p = add("bfct", cmd_bfct, "Bernstein-Sato polynomial")
    p.add_argument("--f", required=True)
    p = add("ann-log", cmd_ann_log, "annihilators of f^lambda (log f)^m")
    p.add_argument("--f", required=True)
    p.add_argument("--lambda", dest="lam", help="rational exponent (omit for symbolic s)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--emit", choices=("module", "ideal", "both"), default="ideal")
    p.add_argument("--quotient", choices=("tag", "syz"), default="tag")
    p = add("check", cmd_check, "test whether an operator kills f^lambda (log f)^m")
    p.add_argument("--f", required=True)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--op", required=True)
    p = add("dim", cmd_dim, "Bernstein dimension of D_n^r / <generators>")
    p.add_argument("--input", required=True)
    p = add("hilbert", lambda s: cmd_dim(s, full=True), "Hilbert polynomial of D_n^r / <generators>")
    p.add_argument("--input", required=True)
    p = add("quotient", cmd_quotient, "module quotient N : (g, ..., g)")
    p.add_argument("--input", required=True)
    p.add_argument("--by", required=True)
    p.add_argument("--no-verify", dest="verify", action="store_false")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_PARSE
    try:
        sess = _Session(args)
        return args.func(sess)
    except (ParseError, OrderError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Cancelled:
        print("timeout: computation cancelled", file=sys.stderr)
        if not args.trace:
            for rec in sess.records:
                print(json.dumps(rec, sort_keys=True), file=sys.stderr)
        return EXIT_COMPUTE
    except (AlgebraError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
