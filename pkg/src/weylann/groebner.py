"""Left Gröbner bases for ideals and submodules over operator rings.

Elements are handled internally as ``{(position, monomial): int}`` with
fraction-free reduction; public results are :class:`ModVector` objects with
monic leading coefficients.  Pairs are chosen by sugar degree (ties broken
by the normal strategy) and pruned with the Gebauer–Möller update.  When
coefficients grow past ``BIG_COEFF_BITS`` the active basis is tail-reduced.  The product criterion is only used
when the two elements live in a single position and their variables commute,
which is where it remains valid in a Weyl algebra.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .opalgebra import AlgebraError, ModVector, Operator, VarTable
from .orders import ELIM, POT, TOP, BoundOrder, TermOrder, grevlex

Term = tuple  # (position, monomial)


class Cancelled(RuntimeError):
    """Raised when a cooperative cancellation check fires."""


class EliminationOrderError(AlgebraError):
    pass


@dataclass
class GBStats:
    pairs: int = 0
    zero_reductions: int = 0
    product_skipped: int = 0
    chain_skipped: int = 0
    max_degree: int = 0
    basis_size: int = 0

    def record(self) -> dict:
        return {
            "pairs": self.pairs,
            "zero_reductions": self.zero_reductions,
            "product_skipped": self.product_skipped,
            "chain_skipped": self.chain_skipped,
            "max_degree": self.max_degree,
            "basis_size": self.basis_size,
        }


# coefficient size (bits) above which the active basis is tail-reduced
BIG_COEFF_BITS = 64

TraceFn = Callable[[dict], None]
CancelFn = Callable[[], bool]


# --- internal representation ---------------------------------------------------

class _Elem:
    __slots__ = ("terms", "lead", "lc", "single_pos", "uses", "sugar")

    def __init__(self, terms: dict, bound: BoundOrder, sugar: int | None = None):
        self.terms = terms
        deg = max(sum(m) for _, m in terms)
        self.sugar = deg if sugar is None else max(sugar, deg)
        self.lead = max(terms, key=bound.term_key)
        self.lc = terms[self.lead]
        positions = {p for p, _ in terms}
        self.single_pos = len(positions) == 1
        nslots = len(self.lead[1])
        used = [False] * nslots
        for _, m in terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        self.uses = tuple(used)


def _to_terms(v: ModVector) -> dict:
    den = 1
    for comp in v.components:
        for c in comp.terms.values():
            q = c.denominator
            if q != 1:
                den = den * q // math.gcd(den, q)
    out = {}
    for k, comp in enumerate(v.components):
        for m, c in comp.terms.items():
            out[(k, m)] = int(c * den)
    return _primitive(out)


def _primitive(terms: dict) -> dict:
    g = 0
    for c in terms.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    if g > 1:
        return {t: c // g for t, c in terms.items()}
    return terms


def _to_vector(terms: dict, ring: VarTable, rank: int, lead: Term | None = None) -> ModVector:
    comps: list[dict] = [{} for _ in range(rank)]
    scale = Fraction(1)
    if lead is not None:
        scale = Fraction(1, terms[lead])
    for (p, m), c in terms.items():
        comps[p][m] = c * scale
    return ModVector([Operator._raw(ring, {m: Fraction(c) for m, c in d.items()}) for d in comps])


def _left_mul_add(acc: dict, coef: int, q: tuple, terms: dict, ring: VarTable, skip: Term | None = None, heap=None, nkey=None):
    """``acc += coef * q * terms`` (q a monomial multiplied on the left)."""
    mono_mul = ring.mono_mul
    for (p, m), c in terms.items():
        cc = coef * c
        for mm, k in mono_mul(q, m):
            t = (p, mm)
            if t == skip:
                continue
            old = acc.get(t)
            if old is None:
                acc[t] = cc * k
                if heap is not None:
                    heapq.heappush(heap, (nkey(t), t))
            else:
                v = old + cc * k
                if v:
                    acc[t] = v
                else:
                    del acc[t]


class _Reducer:
    """Lookup of reducers by position and lead-monomial divisibility."""

    def __init__(self, elems: Iterable[_Elem] = ()):
        self.by_pos: dict[int, list[_Elem]] = {}
        for e in elems:
            self.add(e)

    def add(self, e: _Elem) -> None:
        self.by_pos.setdefault(e.lead[0], []).append(e)

    def find(self, t: Term) -> _Elem | None:
        cands = self.by_pos.get(t[0])
        if not cands:
            return None
        mono = t[1]
        for e in cands:
            lm = e.lead[1]
            for a, b in zip(lm, mono):
                if a > b:
                    break
            else:
                return e
        return None


class _NegKeys:
    def __init__(self, bound: BoundOrder):
        self.bound = bound
        self.cache: dict = {}

    def __call__(self, t: Term) -> tuple:
        k = self.cache.get(t)
        if k is None:
            k = self.cache[t] = tuple(-x for x in self.bound.key(t[0], t[1]))
        return k


def _reduce(terms: dict, red: _Reducer, ring: VarTable, nkey: _NegKeys, full: bool = True, skip_elem: _Elem | None = None,
            cancel: CancelFn | None = None) -> dict:
    """Fraction-free normal form (up to a nonzero rational factor)."""
    h = dict(terms)
    heap = [(nkey(t), t) for t in h]
    heapq.heapify(heap)
    rem: dict = {}
    steps = 0
    while heap:
        _, t = heapq.heappop(heap)
        c = h.pop(t, 0)
        if not c:
            continue
        g = red.find(t)
        if g is skip_elem and g is not None:
            g = _find_other(red, t, skip_elem)
        if g is None:
            if not full:
                h[t] = c
                break
            rem[t] = c
            continue
        a = g.lc
        d = math.gcd(a, c)
        a //= d
        c //= d
        if a < 0:
            a, c = -a, -c
        if a != 1:
            for k in h:
                h[k] *= a
            for k in rem:
                rem[k] *= a
        q = tuple(x - y for x, y in zip(t[1], g.lead[1]))
        _left_mul_add(h, -c, q, g.terms, ring, skip=t, heap=heap, nkey=nkey)
        steps += 1
        if cancel is not None and steps % 64 == 0 and cancel():
            raise Cancelled("Gröbner basis computation cancelled")
        if steps % 4 == 0:
            # keep coefficients small: strip the common content of h and rem
            cont = 0
            for v in h.values():
                cont = math.gcd(cont, v)
                if cont == 1:
                    break
            if cont != 1:
                for v in rem.values():
                    cont = math.gcd(cont, v)
                    if cont == 1:
                        break
            if cont > 1:
                for k in h:
                    h[k] //= cont
                for k in rem:
                    rem[k] //= cont
    if not full:
        # top-reduction only: the irreducible leading term and everything below it
        h = {t: c for t, c in h.items() if c}
        return _primitive(h) if h else h
    rem = {t: c for t, c in rem.items() if c}
    return _primitive(rem) if rem else rem


def _find_other(red: _Reducer, t: Term, skip: _Elem) -> _Elem | None:
    mono = t[1]
    for e in red.by_pos.get(t[0], ()):
        if e is skip:
            continue
        if all(a <= b for a, b in zip(e.lead[1], mono)):
            return e
    return None


# --- Buchberger -------------------------------------------------------------------

def _commute(a: _Elem, b: _Elem, ring: VarTable) -> bool:
    n = ring.n
    ua, ub = a.uses, b.uses
    for i in range(n):
        if (ua[n + i] and ub[i]) or (ua[i] and ub[n + i]):
            return False
    if ring.has_shift:
        s = 2 * n
        if (ua[-1] and ub[s]) or (ua[s] and ub[-1]):
            return False
    return True


def _lcm(a: Term, b: Term) -> Term:
    return (a[0], tuple(x if x > y else y for x, y in zip(a[1], b[1])))


def _divides(a: Term, b: Term) -> bool:
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1], b[1]))


def _spoly(f: _Elem, g: _Elem, ring: VarTable) -> dict:
    L = _lcm(f.lead, g.lead)
    qf = tuple(x - y for x, y in zip(L[1], f.lead[1]))
    qg = tuple(x - y for x, y in zip(L[1], g.lead[1]))
    d = math.gcd(f.lc, g.lc)
    cf, cg = g.lc // d, f.lc // d
    acc: dict = {}
    _left_mul_add(acc, cf, qf, f.terms, ring)
    _left_mul_add(acc, -cg, qg, g.terms, ring)
    acc.pop(L, None)
    return {t: c for t, c in acc.items() if c}


def _buchberger(inputs: list[dict], ring: VarTable, bound: BoundOrder, criteria: bool = True,
                stats: GBStats | None = None, cancel: CancelFn | None = None) -> list[_Elem]:
    stats = stats if stats is not None else GBStats()
    nkey = _NegKeys(bound)
    polys: list[_Elem] = []
    active: list[int] = []
    pairs: dict[tuple[int, int], Term] = {}
    heap: list = []

    def product_ok(i: int, j: int) -> bool:
        if not criteria:
            return False
        a, b = polys[i], polys[j]
        if not (a.single_pos and b.single_pos):
            return False
        if any(x and y for x, y in zip(a.lead[1], b.lead[1])):
            return False
        return _commute(a, b, ring)

    def push_pair(i: int, j: int) -> None:
        a, b = polys[i], polys[j]
        L = _lcm(a.lead, b.lead)
        key = (i, j) if i < j else (j, i)
        pairs[key] = L
        # sugar strategy: lowest degree bound first, then smallest lcm
        dl = sum(L[1])
        sugar = max(a.sugar + dl - sum(a.lead[1]), b.sugar + dl - sum(b.lead[1]))
        heapq.heappush(heap, (sugar, bound.key(L[0], L[1]), key))

    def update(hi: int) -> None:
        h = polys[hi]
        same = [g for g in active if polys[g].lead[0] == h.lead[0]]
        if not criteria:
            for g in same:
                push_pair(hi, g)
            active.append(hi)
            return
        lcms = {g: _lcm(h.lead, polys[g].lead) for g in same}
        C = list(same)
        D: list[int] = []
        while C:
            g1 = C.pop(0)
            if product_ok(hi, g1):
                D.append(g1)
                continue
            l1 = lcms[g1]
            if any(_divides(lcms[g2], l1) for g2 in C) or any(_divides(lcms[g2], l1) for g2 in D):
                stats.chain_skipped += 1
                continue
            D.append(g1)
        for (i, j), L in list(pairs.items()):
            if _divides(h.lead, L):
                if _lcm(polys[i].lead, h.lead) != L and _lcm(polys[j].lead, h.lead) != L:
                    del pairs[(i, j)]
                    stats.chain_skipped += 1
        for g in D:
            if product_ok(hi, g):
                stats.product_skipped += 1
                continue
            push_pair(hi, g)
        keep = [g for g in active if not _divides(h.lead, polys[g].lead)]
        active[:] = keep + [hi]

    def add(terms: dict, sugar: int | None = None) -> None:
        e = _Elem(terms, bound, sugar)
        polys.append(e)
        stats.max_degree = max(stats.max_degree, sum(e.lead[1]))
        update(len(polys) - 1)

    def interreduce() -> None:
        # tail-reduce the active elements; leading terms stay put, so pairs remain valid
        for i in active:
            e = polys[i]
            r = _reduce(e.terms, _Reducer(polys[j] for j in active), ring, nkey, skip_elem=e)
            if r and max(r, key=bound.term_key) == e.lead:
                polys[i] = _Elem(r, bound, e.sugar)

    def current_reducer() -> _Reducer:
        return _Reducer(polys[i] for i in active)

    red = _Reducer()
    ordered = sorted((t for t in inputs if t), key=lambda t: (max(sum(m) for _, m in t), bound.key(*max(t, key=bound.term_key))))
    for t in ordered:
        r = _reduce(t, red, ring, nkey)
        if r:
            add(r)
            red = current_reducer()
    while heap:
        if cancel is not None and cancel():
            raise Cancelled("Gröbner basis computation cancelled")
        sugar, _, key = heapq.heappop(heap)
        if key not in pairs:
            continue
        del pairs[key]
        stats.pairs += 1
        s = _spoly(polys[key[0]], polys[key[1]], ring)
        r = _reduce(s, red, ring, nkey, cancel=cancel) if s else s
        if not r:
            stats.zero_reductions += 1
            continue
        add(r, sugar)
        if max(abs(c) for c in r.values()).bit_length() > BIG_COEFF_BITS:
            interreduce()
        red = current_reducer()
    # minimal + reduced
    elems = [polys[i] for i in active]
    minimal = []
    for e in elems:
        if not any(o is not e and _divides(o.lead, e.lead) and (o.lead != e.lead or id(o) < id(e)) for o in elems):
            minimal.append(e)
    red = _Reducer(minimal)
    out = []
    for e in minimal:
        r = _reduce(e.terms, red, ring, nkey, skip_elem=e)
        ne = _Elem(r, bound)
        if ne.lc < 0:
            ne = _Elem({t: -c for t, c in r.items()}, bound)
        out.append(ne)
    out.sort(key=lambda e: bound.key(*e.lead))
    stats.basis_size = len(out)
    return out


# --- public API ---------------------------------------------------------------

@dataclass
class GBasis:
    elements: list[ModVector]
    order: TermOrder
    ring: VarTable
    rank: int
    reduced: bool = True
    stats: GBStats = field(default_factory=GBStats)
    _internal: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def _reducer(self) -> _Reducer:
        return _Reducer(self._internal)

    def reduce(self, v: ModVector | Operator) -> ModVector:
        """Normal form up to a nonzero scalar (fast path, no cofactors)."""
        if isinstance(v, Operator):
            v = ModVector([v])
        if v.rank != self.rank or v.ring != self.ring:
            raise AlgebraError("vector does not match the basis ring or rank")
        terms = _to_terms(v)
        if not terms:
            return v
        bound = self.order.bind(self.ring)
        r = _reduce(terms, self._reducer(), self.ring, _NegKeys(bound))
        return _to_vector(r, self.ring, self.rank)

    def contains(self, v: ModVector | Operator) -> bool:
        return self.reduce(v).is_zero()

    def leading_terms(self) -> list[Term]:
        return [e.lead for e in self._internal]

    def ideal_elements(self) -> list[Operator]:
        if self.rank != 1:
            raise AlgebraError("not an ideal basis")
        return [v[0] for v in self.elements]


def _as_vectors(gens: Sequence) -> list[ModVector]:
    out = []
    for g in gens:
        out.append(g if isinstance(g, ModVector) else ModVector([g]))
    if not out:
        raise AlgebraError("empty generator list")
    ring, rank = out[0].ring, out[0].rank
    if any(v.ring != ring or v.rank != rank for v in out):
        raise AlgebraError("generators disagree on ring or rank")
    return out


def buchberger_reduced(gens: Sequence, order: TermOrder | None = None, *, criteria: bool = True,
                       trace: TraceFn | None = None, cancel: CancelFn | None = None, label: str = "gb") -> GBasis:
    """Reduced left Gröbner basis of the submodule generated by ``gens``."""
    vecs = _as_vectors(gens)
    order = order or grevlex()
    ring, rank = vecs[0].ring, vecs[0].rank
    bound = order.bind(ring)
    stats = GBStats()
    internal = _buchberger([_to_terms(v) for v in vecs], ring, bound, criteria, stats, cancel)
    if trace is not None:
        rec = {"event": label, "order": order.describe(), "rank": rank}
        rec.update(stats.record())
        trace(rec)
    elements = [_to_vector(e.terms, ring, rank, e.lead) for e in internal]
    return GBasis(elements, order, ring, rank, True, stats, internal)


def normal_form(v, G: GBasis | Sequence, order: TermOrder | None = None) -> tuple[ModVector, list[Operator]]:
    """Division with remainder: ``v = sum cof_i * G_i + rem``.

    Reducers are tried in list order; no remainder term is divisible by a
    leading term of ``G``.
    """
    if isinstance(G, GBasis):
        gens = G.elements
        order = G.order
    else:
        gens = _as_vectors(G)
    if not isinstance(v, ModVector):
        v = ModVector([v])
    order = order or grevlex()
    ring, rank = v.ring, v.rank
    bound = order.bind(ring)
    nkey = _NegKeys(bound)
    leads = []
    for g in gens:
        if g.rank != rank or g.ring != ring:
            raise AlgebraError("reducer does not match the vector ring or rank")
        terms = {(k, m): c for k, comp in enumerate(g.components) for m, c in comp.terms.items()}
        if not terms:
            leads.append(None)
            continue
        lt = max(terms, key=bound.term_key)
        leads.append((lt, terms[lt], terms))
    h: dict = {(k, m): c for k, comp in enumerate(v.components) for m, c in comp.terms.items()}
    heap = [(nkey(t), t) for t in h]
    heapq.heapify(heap)
    rem: dict = {}
    cof: list[dict] = [{} for _ in gens]
    while heap:
        _, t = heapq.heappop(heap)
        c = h.pop(t, 0)
        if not c:
            continue
        for i, ld in enumerate(leads):
            if ld is None:
                continue
            lt, lc, terms = ld
            if _divides(lt, t):
                break
        else:
            rem[t] = c
            continue
        q = tuple(x - y for x, y in zip(t[1], lt[1]))
        f = c / lc
        cof[i][q] = cof[i].get(q, 0) + f
        for (p, m), gc in terms.items():
            for mm, k in ring.mono_mul(q, m):
                tt = (p, mm)
                if tt == t:
                    continue
                old = h.get(tt)
                if old is None:
                    h[tt] = -f * gc * k
                    heapq.heappush(heap, (nkey(tt), tt))
                else:
                    nv = old - f * gc * k
                    if nv:
                        h[tt] = nv
                    else:
                        del h[tt]
    comps = [dict() for _ in range(rank)]
    for (p, m), c in rem.items():
        comps[p][m] = c
    remainder = ModVector([Operator._raw(ring, d) for d in comps])
    cofactors = [Operator._raw(ring, {m: c for m, c in d.items() if c}) for d in cof]
    return remainder, cofactors


def syzygy_basis(gens: Sequence, order: TermOrder | None = None, *, trace: TraceFn | None = None,
                 cancel: CancelFn | None = None) -> list[ModVector]:
    """Generators of the left syzygy module of ``gens``.

    Each generator ``g_i`` is extended to ``(g_i, e_i)`` in a free module of
    rank ``r + k``; a basis under an order eliminating the first ``r``
    positions meets ``0 + R^k`` exactly in the syzygy module.
    """
    vecs = _as_vectors(gens)
    ring, r, k = vecs[0].ring, vecs[0].rank, len(vecs)
    base = order or grevlex()
    big_order = base.with_position(ELIM, r)
    zero = Operator.constant(ring, 0)
    one = Operator.constant(ring, 1)
    ext = [ModVector(list(v.components) + [one if j == i else zero for j in range(k)]) for i, v in enumerate(vecs)]
    G = buchberger_reduced(ext, big_order, trace=trace, cancel=cancel, label="syzygy")
    rows = []
    for v in G.elements:
        if all(c.is_zero() for c in v.components[:r]):
            rows.append(ModVector(v.components[r:]))
    return rows


def eliminate(G: GBasis, drop_vars: Sequence[str] = (), drop_positions: int = 0) -> list[ModVector]:
    """Basis elements free of ``drop_vars`` and zero in positions ``< drop_positions``.

    The order of ``G`` must have the matching elimination property.
    """
    if drop_vars and not G.order.eliminates_vars(G.ring, drop_vars):
        raise EliminationOrderError(f"order {G.order.describe()} does not eliminate {list(drop_vars)}")
    if drop_positions and not G.order.eliminates_positions(drop_positions):
        raise EliminationOrderError(f"order {G.order.describe()} does not eliminate positions < {drop_positions}")
    out = []
    for v in G.elements:
        if any(not v[k].is_zero() for k in range(drop_positions)):
            continue
        if any(c.involves(name) for c in v.components for name in drop_vars):
            continue
        out.append(v)
    return out


def submodules_equal(A: Sequence, B: Sequence, order: TermOrder | None = None) -> bool:
    """Mutual membership of generators (both directions)."""
    va, vb = _as_vectors(A), _as_vectors(B)
    if va[0].rank != vb[0].rank:
        raise AlgebraError("rank mismatch")
    ga = buchberger_reduced(va, order)
    gb = buchberger_reduced(vb, order)
    return all(ga.contains(v) for v in vb) and all(gb.contains(v) for v in va)


def spairs_reduce_to_zero(G: GBasis) -> bool:
    """Post-hoc Buchberger criterion on every same-position pair."""
    ring = G.ring
    bound = G.order.bind(ring)
    nkey = _NegKeys(bound)
    red = G._reducer()
    els = G._internal
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            if els[i].lead[0] != els[j].lead[0]:
                continue
            s = _spoly(els[i], els[j], ring)
            if s and _reduce(s, red, ring, nkey):
                return False
    return True
