"""Annihilator of f^s in D_n[s] and the Bernstein–Sato polynomial.

``Ann f^s`` comes from the Briançon–Maisonobe ideal
``{f Dt + s} ∪ {dx_i + f_i Dt}`` in ``D_n<s, Dt>`` (``Dt s = (s - 1) Dt``)
by eliminating ``Dt``.  The b-function is the monic generator of
``(Ann f^s + D_n[s] f) ∩ Q[s]``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .groebner import CancelFn, TraceFn, buchberger_reduced, eliminate
from .opalgebra import SHIFT, AlgebraError, Operator, VarTable, poly_derivative
from .orders import TermOrder, elimination
from .scalars import BPoly, RationalLike, as_rational, cauchy_root_bound, make_monic, poly_eval, poly_gcd


class PreconditionError(AlgebraError):
    """Input violates a computational precondition (constant f, negative m, ...)."""


def _check_nonconstant(f: Operator) -> None:
    if not f.is_polynomial():
        raise PreconditionError("f must be a polynomial in the x variables")
    if f.is_zero() or all(not any(m) for m in f.terms):
        raise PreconditionError("f must be a non-constant polynomial")


def s_ring(xvars: Sequence[str]) -> VarTable:
    return VarTable(xvars, ("s",))


def bm_ring(xvars: Sequence[str]) -> VarTable:
    return VarTable(xvars, ("s",), shift=True)


def bm_ideal(f: Operator) -> list[Operator]:
    _check_nonconstant(f)
    R = bm_ring(f.ring.xvars)
    F = f.to_ring(R)
    Dt = Operator.gen(R, SHIFT)
    s = Operator.gen(R, "s")
    gens = [F * Dt + s]
    for i, v in enumerate(R.xvars):
        gens.append(Operator.gen(R, "d" + v) + poly_derivative(F, i) * Dt)
    return gens


DT_ELIM = elimination([SHIFT])


def ann_fs(f: Operator, *, trace: TraceFn | None = None, cancel: CancelFn | None = None) -> list[Operator]:
    """Generators of ``Ann_{D_n[s]} f^s`` (a reduced basis, graded order on x, dx, s)."""
    return list(_ann_fs_cached(_key(f), trace, cancel))


def _key(f: Operator) -> tuple:
    return (f.ring.xvars, tuple(sorted(f.terms.items())))


def _from_key(key: tuple) -> Operator:
    xvars, items = key
    return Operator(VarTable(xvars), dict(items))


@lru_cache(maxsize=64)
def _ann_fs_cached(key: tuple, trace=None, cancel=None) -> tuple[Operator, ...]:
    f = _from_key(key)
    gens = bm_ideal(f)
    G = buchberger_reduced(gens, DT_ELIM, trace=trace, cancel=cancel, label="ann_fs")
    S = s_ring(f.ring.xvars)
    out = [v[0].to_ring(S) for v in eliminate(G, drop_vars=[SHIFT])]
    # reduced basis of the ideal under the default graded order
    H = buchberger_reduced(out, trace=trace, cancel=cancel, label="ann_fs_regrade")
    return tuple(v[0].primitive() for v in H.elements)


def bfct_order(xvars: Sequence[str]) -> TermOrder:
    names = list(xvars) + ["d" + v for v in xvars]
    return elimination(names)


def bfct(f: Operator, *, ann: Sequence[Operator] | None = None, trace: TraceFn | None = None,
         cancel: CancelFn | None = None) -> BPoly:
    """Monic Bernstein–Sato polynomial of ``f``."""
    _check_nonconstant(f)
    key = _key(f)
    if ann is None:
        return _bfct_cached(key, trace, cancel)
    return _bfct_compute(f, list(ann), trace, cancel)


@lru_cache(maxsize=64)
def _bfct_cached(key: tuple, trace=None, cancel=None) -> BPoly:
    f = _from_key(key)
    return _bfct_compute(f, ann_fs(f, trace=trace, cancel=cancel), trace, cancel)


def _bfct_compute(f: Operator, ann: list[Operator], trace, cancel) -> BPoly:
    S = s_ring(f.ring.xvars)
    gens = [g.to_ring(S) for g in ann] + [f.to_ring(S)]
    order = bfct_order(S.xvars)
    G = buchberger_reduced(gens, order, trace=trace, cancel=cancel, label="bfct")
    drop = list(S.xvars) + ["d" + v for v in S.xvars]
    s_only = eliminate(G, drop_vars=drop)
    if not s_only:
        raise AlgebraError("elimination produced no polynomial in s")
    slot = S.param_slot("s")
    b = BPoly([])
    for v in s_only:
        p = v[0]
        coeffs = [Fraction(0)] * (max(m[slot] for m in p.terms) + 1)
        for m, c in p.terms.items():
            coeffs[m[slot]] += c
        b = poly_gcd(b, BPoly(coeffs))
    b = make_monic(b)
    _sanity_check_b(b)
    return b


def _sanity_check_b(b: BPoly) -> None:
    # roots are negative rationals, so b has no root in [0, bound] and b(-1) = 0
    if poly_eval(b, Fraction(-1)) != 0:
        raise AlgebraError(f"b-function {b} does not vanish at -1")
    if poly_eval(b, Fraction(0)) == 0:
        raise AlgebraError(f"b-function {b} vanishes at 0")
    if any(c <= 0 for c in b.coeffs):
        # monic with only negative real roots forces positive coefficients
        raise AlgebraError(f"b-function {b} has a nonpositive coefficient")


def nu0(b: BPoly, lam: RationalLike) -> int:
    """Largest positive integer ``nu`` with ``b(lam - nu) = 0``, else 0."""
    lam = as_rational(lam)
    if b.is_zero():
        raise AlgebraError("zero b-function")
    if b.degree < 1:
        return 0
    top = math.ceil(lam + cauchy_root_bound(b))
    best = 0
    for v in range(1, max(top, 0) + 1):
        if poly_eval(b, lam - v) == 0:
            best = v
    return best
