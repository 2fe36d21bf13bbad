"""Parsing and printing of polynomials, operators and generator files.

Grammar (whitespace ignored)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'|'/'] factor)*      # juxtaposition means '*'
    factor := atom ['^' integer]
    atom   := integer | identifier | '(' expr ')'

Identifiers are the ring's names: x variables, ``d<var>`` derivations
(``∂<var>`` and ``∂_<var>`` are accepted too), parameters and ``Dt``.
Products are ring products, so ``dx*x`` reads as ``x*dx + 1``.  An unknown
identifier that splits into known names (``xdx``) is read as their product.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .opalgebra import SHIFT, ModVector, Operator, VarTable
from .orders import TermOrder

DEFAULT_PARAMS = ("s", "t")


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>(?:∂_?)?[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),\[\]]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


def _canonical_ident(name: str) -> str:
    if name.startswith("∂"):
        name = name[1:]
        if name.startswith("_"):
            name = name[1:]
        return "d" + name
    return name


class _Parser:
    def __init__(self, text: str, ring: VarTable):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str) -> None:
        t = self.take()
        if t.text != op:
            raise ParseError(f"expected {op!r}", t.pos)

    def parse(self) -> Operator:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0)
        val = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected token {t.text!r}", t.pos)
        return val

    def expr(self) -> Operator:
        sign = 1
        t = self.peek()
        if t.text in "+-" and t.kind == "op":
            self.take()
            sign = -1 if t.text == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t.kind == "op" and t.text in ("+", "-"):
                self.take()
                rhs = self.term()
                acc = acc + rhs if t.text == "+" else acc - rhs
            else:
                return acc

    def _starts_factor(self, t: _Tok) -> bool:
        return t.kind in ("num", "ident") or (t.kind == "op" and t.text == "(")

    def term(self) -> Operator:
        acc = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text == "*":
                self.take()
                acc = acc * self.factor()
            elif t.kind == "op" and t.text == "/":
                self.take()
                d = self.factor()
                c = _as_constant(d)
                if c is None:
                    raise ParseError("division is only allowed by a nonzero number", t.pos)
                acc = acc.scale(1 / c)
            elif self._starts_factor(t):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Operator:
        base = self.atom()
        t = self.peek()
        if t.kind == "op" and t.text == "^":
            self.take()
            e = self.take()
            if e.kind != "num":
                raise ParseError("exponent must be a nonnegative integer", e.pos)
            base = base ** int(e.text)
        return base

    def atom(self) -> Operator:
        t = self.take()
        if t.kind == "num":
            return Operator.constant(self.ring, int(t.text))
        if t.kind == "ident":
            return self.identifier(t)
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.pos)
        raise ParseError(f"unexpected token {t.text!r}", t.pos)

    def identifier(self, t: _Tok) -> Operator:
        name = _canonical_ident(t.text)
        names = self.ring.names
        if name in names:
            return Operator.gen(self.ring, name)
        parts = _split_known(name, names)
        if parts is None:
            raise ParseError(f"unknown identifier {t.text!r}", t.pos)
        acc = Operator.constant(self.ring, 1)
        for p in parts:
            acc = acc * Operator.gen(self.ring, p)
        return acc


def _split_known(name: str, names: Sequence[str]) -> list[str] | None:
    """Greedy longest-match segmentation of ``name`` into known names."""
    out: list[str] = []
    i = 0
    by_len = sorted(names, key=len, reverse=True)
    while i < len(name):
        for cand in by_len:
            if name.startswith(cand, i):
                out.append(cand)
                i += len(cand)
                break
        else:
            return None
    return out


def _as_constant(op: Operator) -> Fraction | None:
    if not op.terms:
        return None
    if len(op.terms) == 1:
        (m, c), = op.terms.items()
        if not any(m):
            return c
    return None


def parse_operator(text: str, ring: VarTable) -> Operator:
    return _Parser(text, ring).parse()


def parse_polynomial(text: str, ring: VarTable) -> Operator:
    """Parse an element of ``Q[x]`` (no derivations or parameters)."""
    op = parse_operator(text, ring)
    if not op.is_polynomial():
        raise ParseError("expected a polynomial in the x variables only")
    return op


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


def split_top_level(text: str, sep: str = ",") -> list[str]:
    depth = 0
    parts, cur = [], []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_vector(text: str, ring: VarTable) -> ModVector:
    """``(P0, P1, ...)`` or ``[P0, P1, ...]``; a bare operator is rank 1."""
    body = text.strip()
    if body[:1] in "([" and body[-1:] in ")]":
        inner = body[1:-1]
        parts = split_top_level(inner)
        if len(parts) > 1:
            return ModVector([parse_operator(p, ring) for p in parts])
    return ModVector([parse_operator(body, ring)])


# --- rendering ----------------------------------------------------------------

def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_monomial(ring: VarTable, mono: tuple) -> str:
    parts = []
    for name, e in zip(ring.names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render(P: Operator, order: TermOrder | None = None) -> str:
    """Canonical text, terms in descending order; ``parse(render(P)) == P``."""
    if P.is_zero():
        return "0"
    out = []
    for i, (mono, c) in enumerate(P.sorted_terms(order)):
        body = render_monomial(P.ring, mono)
        mag = abs(c)
        if not body:
            piece = _coeff_str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{_coeff_str(mag)}*{body}"
        if i == 0:
            out.append(("-" if c < 0 else "") + piece)
        else:
            out.append(("-" if c < 0 else "+") + piece)
    return "".join(out)


def render_vector(v: ModVector, order: TermOrder | None = None) -> str:
    if v.rank == 1:
        return render(v[0], order)
    return "(" + ", ".join(render(c, order) for c in v.components) + ")"


# --- variable inference and files -------------------------------------------

def identifiers(text: str) -> list[str]:
    return [_canonical_ident(t.text) for t in _tokenize(text) if t.kind == "ident"]


def infer_vars(texts: Sequence[str], params: Sequence[str] = DEFAULT_PARAMS) -> list[str]:
    """x variables mentioned in the texts, sorted lexicographically."""
    found: set[str] = set()
    for text in texts:
        for ident in identifiers(text):
            if ident in params or ident == SHIFT:
                continue
            if ident.startswith("d") and len(ident) > 1:
                found.add(ident[1:])
            else:
                found.add(ident)
    return sorted(found)


def infer_params(texts: Sequence[str], candidates: Sequence[str] = DEFAULT_PARAMS) -> list[str]:
    found = set()
    for text in texts:
        found |= {i for i in identifiers(text) if i in candidates}
    return [p for p in candidates if p in found]


@dataclass
class GeneratorFile:
    ring: VarTable
    generators: list[ModVector]

    @property
    def rank(self) -> int:
        return self.generators[0].rank if self.generators else 1


def _entries_to_vectors(entries, ring: VarTable) -> list[ModVector]:
    out = []
    for e in entries:
        if isinstance(e, str):
            out.append(parse_vector(e, ring))
        elif isinstance(e, list) and e and all(isinstance(c, str) for c in e):
            out.append(ModVector([parse_operator(c, ring) for c in e]))
        else:
            raise ParseError(f"generator entry must be a string or list of strings: {e!r}")
    ranks = {v.rank for v in out}
    if len(ranks) > 1:
        raise ParseError("generators of different ranks")
    return out


def parse_generator_text(text: str, xvars: Sequence[str] | None = None, params: Sequence[str] | None = None) -> GeneratorFile:
    """JSON document or plain text with one generator per line and ``#`` comments."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        if not isinstance(doc, dict) or "generators" not in doc:
            raise ParseError("JSON generator file needs a 'generators' field")
        entries = doc["generators"]
        flat = [c for e in entries for c in ([e] if isinstance(e, str) else e)]
        xv = list(doc.get("vars") or xvars or infer_vars(flat))
        ps = list(doc.get("params", params if params is not None else infer_params(flat)))
        ring = VarTable(xv, ps, SHIFT in {i for t in flat for i in identifiers(t)})
        return GeneratorFile(ring, _entries_to_vectors(entries, ring))
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("no generators found")
    xv = list(xvars or infer_vars(lines))
    ps = list(params if params is not None else infer_params(lines))
    ring = VarTable(xv, ps, SHIFT in {i for t in lines for i in identifiers(t)})
    return GeneratorFile(ring, _entries_to_vectors(lines, ring))


def load_generators(path: str | Path, xvars: Sequence[str] | None = None, params: Sequence[str] | None = None) -> GeneratorFile:
    return parse_generator_text(Path(path).read_text(encoding="utf-8"), xvars, params)


def dump_generators_json(gf: GeneratorFile, order: TermOrder | None = None) -> str:
    gens = [render(v[0], order) if v.rank == 1 else [render(c, order) for c in v] for v in gf.generators]
    doc = {"vars": list(gf.ring.xvars), "params": list(gf.ring.params), "generators": gens}
    return json.dumps(doc, ensure_ascii=False)
