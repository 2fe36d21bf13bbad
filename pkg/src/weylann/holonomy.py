"""Bernstein dimension and Hilbert polynomial of D_n-modules.

``F_k`` is the Bernstein filtration (total degree in x and dx).  For a
module ``D_n^r / N`` the dimension of ``F_k`` equals the number of standard
monomials of degree ``<= k`` for a degree-compatible order, i.e. monomials
in the ``2n`` commuting symbols that lie outside the initial module.  That
count is read off the Hilbert series numerator of the monomial ideal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .groebner import _as_vectors, buchberger_reduced
from .opalgebra import AlgebraError, ModVector
from .orders import grevlex
from .scalars import BPoly


class ZeroModuleError(AlgebraError):
    """The module is zero (unit ideal), so its dimension is undefined."""


@dataclass(frozen=True)
class InitialModule:
    """Leading exponents (length ``2n``) of a reduced basis, grouped by position."""

    nvars: int
    rank: int
    monomials: tuple[tuple[tuple[int, ...], ...], ...]

    def standard(self, pos: int, mono: Sequence[int]) -> bool:
        return not any(all(a <= b for a, b in zip(g, mono)) for g in self.monomials[pos])


@dataclass(frozen=True)
class HilbertData:
    hilbert_polynomial: BPoly
    dimension: int
    stable_from: int

    def __call__(self, k: int) -> Fraction:
        return self.hilbert_polynomial(k)


def _minimal(gens) -> tuple:
    gens = sorted(set(gens), key=lambda g: (sum(g), g))
    out: list = []
    for g in gens:
        if not any(all(a <= b for a, b in zip(h, g)) for h in out):
            out.append(g)
    return tuple(out)


def initial_module(gens, *, cancel=None) -> InitialModule:
    vecs = _as_vectors(gens)
    if not vecs:
        raise AlgebraError("no generators")
    ring = vecs[0].ring
    if ring.params or ring.has_shift:
        raise AlgebraError("the Bernstein filtration needs generators in D_n (no parameters or Dt)")
    G = buchberger_reduced(vecs, grevlex(), label="initial", cancel=cancel)
    n2 = 2 * ring.n
    per = [[] for _ in range(G.rank)]
    for pos, mono in G.leading_terms():
        per[pos].append(tuple(mono[:n2]))
    return InitialModule(n2, G.rank, tuple(_minimal(p) for p in per))


# --- Hilbert series numerators (integer polynomials as coefficient tuples) -----

def _padd(a, b):
    n = max(len(a), len(b))
    return tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _pshift_neg(a, d):
    return (0,) * d + tuple(-c for c in a)


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(a)


@lru_cache(maxsize=None)
def _numerator(gens: tuple) -> tuple:
    """``N(t)`` with ``HS(S/I) = N(t) / (1 - t)^N``."""
    if not gens:
        return (1,)
    if any(sum(g) == 0 for g in gens):
        return (0,)
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in gens]
    coprime = all(not (supports[i] & supports[j]) for i in range(len(gens)) for j in range(i))
    if coprime:
        out = (1,)
        for g in gens:
            d = sum(g)
            out = _pmul(out, (1,) + (0,) * (d - 1) + (-1,))
        return _trim(out)
    m = gens[-1]
    rest = gens[:-1]
    colon = _minimal(tuple(max(a - b, 0) for a, b in zip(g, m)) for g in rest)
    return _trim(_padd(_numerator(rest), _pshift_neg(_numerator(colon), sum(m))))


def hilbert_numerator(init: InitialModule) -> tuple:
    total = (0,)
    for gens in init.monomials:
        total = _padd(total, _numerator(gens))
    return _trim(total)


def _binomial_poly(shift: int, N: int) -> BPoly:
    """``C(k - shift + N, N)`` as a polynomial in ``k``."""
    p = BPoly([1], var="k")
    for j in range(N):
        p = p * BPoly([N - shift - j, 1], var="k")
    return p * BPoly([Fraction(1, math.factorial(N))], var="k")


def hilbert_polynomial(init: InitialModule, rank: int | None = None, nvars: int | None = None) -> HilbertData:
    """Polynomial ``p`` with ``p(k) = dim F_k`` for ``k >= stable_from``."""
    if rank is not None and rank != init.rank:
        raise AlgebraError("rank mismatch")
    N = init.nvars if nvars is None else nvars
    num = hilbert_numerator(init)
    # cumulative filtration: one more factor 1/(1 - t)
    p = BPoly([], var="k")
    for i, a in enumerate(num):
        if a:
            p = p + _binomial_poly(i, N) * BPoly([a], var="k")
    deg_num = len(num) - 1 if any(num) else 0
    stable = max(0, deg_num - N)
    return HilbertData(p, p.degree if not p.is_zero() else -1, stable)


def count_standard(init: InitialModule, k: int) -> int:
    """Direct count of standard monomials of degree ``<= k`` (slow; for checks)."""
    from itertools import product

    total = 0
    for pos in range(init.rank):
        for mono in product(range(k + 1), repeat=init.nvars):
            if sum(mono) <= k and init.standard(pos, mono):
                total += 1
    return total


def hilbert_data(gens, *, cancel=None) -> HilbertData:
    return hilbert_polynomial(initial_module(gens, cancel=cancel))


def bernstein_dimension(gens) -> int:
    h = hilbert_data(gens)
    if h.hilbert_polynomial.is_zero():
        raise ZeroModuleError("the quotient module is zero")
    return h.dimension


def is_holonomic(gens) -> bool:
    vecs = _as_vectors(gens)
    return bernstein_dimension(vecs) <= vecs[0].ring.n
