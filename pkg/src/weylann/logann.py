"""Annihilators of f^lam (log f)^m.

Pipeline for ``(f, lam, m)``:

1. ``Ann_{D_n[s]} f^s`` and its s-derivative vectors, which generate the
   annihilator of the tuple ``(f^s, f^s log f, ..., f^s (log f)^m)``;
2. the b-function and the shift ``nu0`` (largest positive integer with
   ``b(lam - nu0) = 0``);
3. specialization at ``lam0 = lam - nu0`` followed, when ``nu0 > 0``, by the
   module quotient by ``(f^nu0, ..., f^nu0)``;
4. a position-first basis whose elements supported in the last position give
   the annihilator of ``f^lam (log f)^m`` alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .annfs import PreconditionError, ann_fs, bfct, nu0, s_ring
from .groebner import (
    CancelFn,
    TraceFn,
    buchberger_reduced,
    eliminate,
    submodules_equal,
    syzygy_basis,
)
from .opalgebra import AlgebraError, ModVector, Operator, VarTable, right_divide_by_poly, s_derivative, substitute_s
from .orders import TermOrder, elimination, grevlex, posfirst
from .scalars import BPoly, RationalLike, as_rational, solve_min_norm

TAG = "t"


class QuotientMismatch(AlgebraError):
    """The two module-quotient algorithms disagree."""


@dataclass
class AnnLogResult:
    module_gens: list[ModVector]
    ideal_gens: list[Operator]
    lam: Fraction | None
    m: int
    nu0_used: int
    b: BPoly
    quotient_checked: bool = False
    log: list[dict] = field(default_factory=list)


def derive_vectors(G: Sequence[Operator], m: int) -> list[ModVector]:
    """``P^(j) = sum_nu C(j, nu) d^(j-nu)P/ds^(j-nu) e_nu`` for ``j = 0..m``."""
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    out = []
    for P in G:
        if P.involves_shift():
            raise AlgebraError("derivation vectors need operators free of Dt")
        derivs = [P]
        for _ in range(m):
            derivs.append(s_derivative(derivs[-1]))
        zero = Operator.constant(P.ring, 0)
        for j in range(m + 1):
            comps = [zero] * (m + 1)
            for nu in range(j + 1):
                comps[nu] = derivs[j - nu].scale(math.comb(j, nu))
            out.append(ModVector(comps))
    return out


def _sort_key(P: Operator):
    bound = grevlex().bind(P.ring)
    return (P.total_degree(), bound.mono_key(P.lead()), str(P))


def _vector_sort_key(v: ModVector):
    bound = posfirst().bind(v.ring)
    terms = [(k, m) for k, c in enumerate(v.components) for m in c.terms]
    lead = max(terms, key=bound.term_key) if terms else (0, ())
    return (bound.key(*lead), str(v))


def extract_top_annihilator(gens: Sequence[ModVector], m: int | None = None, *, literal: bool = False,
                            trace: TraceFn | None = None, cancel: CancelFn | None = None) -> list[Operator]:
    """Generators of ``{P : (0, ..., 0, P) in <gens>}``.

    The basis is taken under the position-first order (position 0 largest).
    With ``literal=True`` the last component of every basis element is
    returned instead, as the unfiltered recipe prescribes; that set can contain
    non-annihilators and exists for auditing only.
    """
    gens = list(gens)
    rank = gens[0].rank
    if m is None:
        m = rank - 1
    if rank != m + 1:
        raise AlgebraError("rank does not match m + 1")
    G = buchberger_reduced(gens, posfirst(), trace=trace, cancel=cancel, label="extract")
    if literal:
        chosen = [v[m] for v in G.elements if not v[m].is_zero()]
    else:
        chosen = [v[m] for v in eliminate(G, drop_positions=m)]
    return sorted((P.primitive() for P in chosen), key=_sort_key)


def _check_divisor(P: ModVector) -> None:
    for c in P.components:
        if c.is_zero():
            raise PreconditionError("quotient divisor has a zero component")
        if not c.is_polynomial():
            raise PreconditionError("quotient divisor components must be polynomials")


def module_quotient_tag(N: Sequence[ModVector], P: ModVector, *, trace: TraceFn | None = None,
                        cancel: CancelFn | None = None) -> list[ModVector]:
    """``N : P`` via a tag variable ``t`` and elimination."""
    _check_divisor(P)
    N = [v for v in N if not v.is_zero()]
    ring = P.ring
    rank = P.rank
    if not N:
        return []
    if TAG in ring.params:
        raise AlgebraError("ring already uses the tag variable name")
    T = VarTable(ring.xvars, ring.params + (TAG,), ring.has_shift)
    t = Operator.gen(T, TAG)
    one_minus_t = Operator.constant(T, 1) - t
    zero = Operator.constant(T, 0)
    gens = []
    for k, Pk in enumerate(P.components):
        comps = [zero] * rank
        comps[k] = one_minus_t * Pk.to_ring(T)
        gens.append(ModVector(comps))
    for Q in N:
        gens.append(ModVector([t * c.to_ring(T) for c in Q.components]))
    order = elimination([TAG])
    G = buchberger_reduced(gens, order, trace=trace, cancel=cancel, label="quotient_tag")
    out = []
    for v in eliminate(G, drop_vars=[TAG]):
        comps = [c.to_ring(ring) for c in v.components]
        out.append(ModVector([right_divide_by_poly(c, Pk) if not c.is_zero() else c
                              for c, Pk in zip(comps, P.components)]))
    return out


def module_quotient_syz(N: Sequence[ModVector], P: ModVector, *, trace: TraceFn | None = None,
                        cancel: CancelFn | None = None) -> list[ModVector]:
    """``N : P`` as the first ``m + 1`` components of the syzygies of ``{P_j e_j} ∪ N``."""
    _check_divisor(P)
    N = [v for v in N if not v.is_zero()]
    ring, rank = P.ring, P.rank
    if not N:
        return []
    zero = Operator.constant(ring, 0)
    gens = []
    for k, Pk in enumerate(P.components):
        comps = [zero] * rank
        comps[k] = Pk
        gens.append(ModVector(comps))
    gens.extend(N)
    rows = syzygy_basis(gens, trace=trace, cancel=cancel)
    out = []
    for r in rows:
        head = ModVector(r.components[:rank])
        if not head.is_zero():
            out.append(head)
    return out


def quotients_agree(N: Sequence[ModVector], P: ModVector, *, cancel: CancelFn | None = None) -> bool:
    a = module_quotient_tag(N, P, cancel=cancel)
    b = module_quotient_syz(N, P, cancel=cancel)
    if not a and not b:
        return True
    if not a or not b:
        return False
    return submodules_equal(a, b)


def specialize_vectors(vectors: Sequence[ModVector], lam: RationalLike, target: VarTable) -> list[ModVector]:
    out = []
    for v in vectors:
        w = ModVector([substitute_s(c, lam, target=target) for c in v.components])
        if not w.is_zero():
            out.append(w)
    return out


def ann_fs_log(f: Operator, m: int, *, trace: TraceFn | None = None, cancel: CancelFn | None = None,
               literal: bool = False, extract: bool = True) -> AnnLogResult:
    """Symbolic-``s`` version: annihilators in ``D_n[s]``.

    With ``extract=False`` the derivation vectors are returned as module
    generators and no ideal is computed.
    """
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    G = ann_fs(f, trace=trace, cancel=cancel)
    vecs = derive_vectors(G, m)
    b = bfct(f, trace=trace, cancel=cancel)
    if not extract:
        return AnnLogResult(vecs, [], None, m, 0, b)
    B = buchberger_reduced(vecs, posfirst(), trace=trace, cancel=cancel, label="module_basis")
    if literal:
        ideal = [v[m] for v in B.elements if not v[m].is_zero()]
    else:
        ideal = [v[m] for v in eliminate(B, drop_positions=m)]
    ideal = sorted((P.primitive() for P in ideal), key=_sort_key)
    module = sorted((v for v in B.elements), key=_vector_sort_key)
    return AnnLogResult(module, ideal, None, m, 0, b)


def ann_lambda_log(f: Operator, lam: RationalLike, m: int, *, quotient: str = "tag", verify_quotient: bool = True,
                   literal: bool = False, extract: bool = True, trace: TraceFn | None = None,
                   cancel: CancelFn | None = None) -> AnnLogResult:
    """Generators of ``Ann_{D_n}(f^lam, ..., f^lam (log f)^m)`` and ``Ann_{D_n} f^lam (log f)^m``.

    ``extract=False`` stops after the quotient step: ``module_gens`` are then
    the quotient generators as computed and ``ideal_gens`` is empty.  The
    position-first basis needed for the ideal grows quickly with ``m``.
    """
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    if quotient not in ("tag", "syz"):
        raise ValueError("quotient must be 'tag' or 'syz'")
    lam = as_rational(lam)
    log: list[dict] = []
    G = ann_fs(f, trace=trace, cancel=cancel)
    G1 = derive_vectors(G, m)
    b = bfct(f, trace=trace, cancel=cancel)
    shift = nu0(b, lam)
    lam0 = lam - shift
    D = VarTable(f.ring.xvars)
    G2 = specialize_vectors(G1, lam0, D)
    log.append({"step": "specialize", "lambda0": str(lam0), "nu0": shift, "generators": len(G2)})
    checked = False
    if shift > 0:
        F = f.to_ring(D) ** shift
        P = ModVector([F] * (m + 1))
        primary = module_quotient_tag if quotient == "tag" else module_quotient_syz
        G3 = primary(G2, P, trace=trace, cancel=cancel)
        if verify_quotient:
            other = module_quotient_syz if quotient == "tag" else module_quotient_tag
            G3b = other(G2, P, trace=trace, cancel=cancel)
            if not submodules_equal(G3, G3b):
                raise QuotientMismatch("tag-variable and syzygy quotients differ")
            checked = True
        log.append({"step": "quotient", "method": quotient, "generators": len(G3), "verified": checked})
    else:
        G3 = G2
    if not extract:
        return AnnLogResult(list(G3), [], lam, m, shift, b, checked, log)
    B = buchberger_reduced(G3, posfirst(), trace=trace, cancel=cancel, label="extract")
    if literal:
        ideal = [v[m] for v in B.elements if not v[m].is_zero()]
    else:
        ideal = [v[m] for v in eliminate(B, drop_positions=m)]
    ideal = sorted((P.primitive() for P in ideal), key=_sort_key)
    module = sorted((ModVector([c.primitive() for c in v.components]) if v.rank == 1 else v for v in B.elements),
                    key=_vector_sort_key)
    log.append({"step": "extract", "module_basis": len(module), "ideal_generators": len(ideal)})
    return AnnLogResult(module, ideal, lam, m, shift, b, checked, log)


def euler_operator(f: Operator) -> Operator | None:
    """``sum w_i x_i dx_i`` with ``E(f) = f`` (minimum-norm weights) or ``None``."""
    if not f.is_polynomial() or all(not any(mm) for mm in f.terms):
        raise PreconditionError("f must be a non-constant polynomial")
    n = f.ring.n
    rows = [[Fraction(e) for e in mono[:n]] for mono in sorted(f.terms)]
    w = solve_min_norm(rows, [Fraction(1)] * len(rows))
    if w is None:
        return None
    D = VarTable(f.ring.xvars)
    E = Operator.constant(D, 0)
    for i, v in enumerate(D.xvars):
        if w[i]:
            E = E + Operator.gen(D, v) * Operator.gen(D, "d" + v) * w[i]
    return E
