import random
import time

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from conftest import random_operator
from weylann.groebner import (
    Cancelled,
    EliminationOrderError,
    buchberger_reduced,
    eliminate,
    normal_form,
    spairs_reduce_to_zero,
    submodules_equal,
    syzygy_basis,
)
from weylann.opalgebra import ModVector, Operator, VarTable, contract
from weylann.orders import elimination, grevlex, posfirst
from weylann.syntax import parse_operator as P, parse_vector as V

S1 = VarTable(["x"], ("s",))
BM1 = VarTable(["x"], ("s",), shift=True)
D1 = VarTable(["x"])


def test_normal_form_examples():
    g = P("x*dx-s", S1)
    rem, cof = normal_form(g, [g])
    assert rem.is_zero() and cof == [Operator.constant(S1, 1)]
    rem, _ = normal_form(g * g, [g])
    assert rem.is_zero()
    rem, cof = normal_form(P("dx", D1), [P("x*dx", D1)])
    assert rem == ModVector([P("dx", D1)]) and cof[0].is_zero()


def test_commutative_subcase():
    G = buchberger_reduced([P("x^2", D1), P("x^3", D1)])
    assert [str(v[0]) for v in G] == [str(P("x^2", D1))]


def test_position_first_example():
    gens = [V("(x*dx-s, 0)", S1), V("(-1, x*dx-s)", S1)]
    G = buchberger_reduced(gens, posfirst())
    expected = [V("(-1, x*dx-s)", S1), V("(0, (x*dx-s)^2)", S1)]
    assert len(G) == 2
    assert submodules_equal(G.elements, expected, posfirst())
    assert sorted(G.leading_terms()) == sorted([(0, (0, 0, 0)), (1, (2, 2, 0))])
    last = eliminate(G, drop_positions=1)
    assert len(last) == 1 and last[0][1] == (P("x*dx-s", S1) ** 2).monic(posfirst())


def test_bm_elimination_for_x():
    G = buchberger_reduced([P("x*Dt+s", BM1), P("dx+Dt", BM1)], elimination(["Dt"]))
    kept = eliminate(G, drop_vars=["Dt"])
    assert [v[0].to_ring(S1) for v in kept] == [P("x*dx-s", S1)]
    with pytest.raises(EliminationOrderError):
        eliminate(buchberger_reduced([P("x*Dt+s", BM1)]), drop_vars=["Dt"])


def test_syzygy_examples():
    x = P("x", D1)
    rows = syzygy_basis([x, x])
    assert submodules_equal(rows, [ModVector([Operator.constant(D1, 1), Operator.constant(D1, -1)])])
    gens = [P("dx", D1), P("x*dx", D1)]
    rows = syzygy_basis(gens)
    assert rows and all(contract(list(r), [ModVector([g]) for g in gens]).is_zero() for r in rows)
    assert any(r == ModVector([x, Operator.constant(D1, -1)]) or r == ModVector([-x, Operator.constant(D1, 1)]) for r in rows)
    gens = [P("x*dx-s", S1), P("x", S1)]
    rows = syzygy_basis(gens)
    assert rows and all(contract(list(r), [ModVector([g]) for g in gens]).is_zero() for r in rows)


def test_submodules_equal_examples():
    g = P("x*dx-s", S1)
    assert submodules_equal([g], [g.scale(2)])
    assert not submodules_equal([g], [g * g])


def test_trace_records_statistics():
    recs = []
    buchberger_reduced([P("x*Dt+s", BM1), P("dx+Dt", BM1)], elimination(["Dt"]), trace=recs.append)
    assert recs and {"pairs", "zero_reductions", "max_degree"} <= set(recs[0])


R2 = VarTable(["x", "y"])
seeds = st.integers(min_value=0, max_value=10 ** 9)


def random_gens(seed, ring=R2, count=(1, 3), rank=1):
    rng = random.Random(seed)
    gens = []
    for _ in range(rng.randint(*count)):
        gens.append(ModVector([random_operator(rng, ring, max_deg=2, max_terms=3) for _ in range(rank)]))
    if all(v.is_zero() for v in gens):
        gens.append(ModVector([Operator.gen(ring, "x")] * rank))
    return gens


def budget(seconds=5.0):
    """Cancel hook; a few random draws that generate a whole free module
    need very large intermediate coefficients and are discarded."""
    deadline = time.monotonic() + seconds
    return lambda: time.monotonic() > deadline


def gb_or_discard(gens, order=None, **kw):
    try:
        return buchberger_reduced(gens, order, cancel=budget(), **kw)
    except Cancelled:
        assume(False)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_basis_properties(seed, rank):
    gens = random_gens(seed, rank=rank, count=(1, 3) if rank == 1 else (1, 2))
    order = posfirst() if rank == 2 else grevlex()
    G = gb_or_discard(gens, order)
    assert spairs_reduce_to_zero(G)
    assert all(G.contains(v) for v in gens)
    # reduced: monic, pairwise non-divisible leading terms, inter-reduced tails
    bound = order.bind(R2)
    for i, v in enumerate(G):
        lead = max(((p, m) for p, c in enumerate(v) for m in c.terms), key=bound.term_key)
        assert v[lead[0]].terms[lead[1]] == 1
        others = [e for j, e in enumerate(G.leading_terms()) if j != i]
        for p, c in enumerate(v):
            for m in c.terms:
                assert not any(o[0] == p and all(a <= b for a, b in zip(o[1], m)) for o in others)
    shuffled = list(gens)
    random.Random(seed).shuffle(shuffled)
    assert buchberger_reduced(shuffled, order).elements == G.elements
    plain = gb_or_discard(gens, order, criteria=False)
    assert plain.elements == G.elements


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_normal_form_identity_and_idempotence(seed):
    rng = random.Random(seed)
    G = gb_or_discard(random_gens(seed))
    v = ModVector([random_operator(rng, R2, max_deg=3, max_terms=4)])
    rem, cof = normal_form(v, G)
    total = rem
    for c, g in zip(cof, G.elements):
        total = total + c * g
    assert total == v
    again, _ = normal_form(rem, G)
    assert again == rem


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_syzygies_contract_to_zero(seed):
    gens = random_gens(seed, count=(2, 3))
    try:
        rows = syzygy_basis(gens, cancel=budget())
    except Cancelled:
        assume(False)
    for r in rows:
        assert contract(list(r), gens).is_zero()


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_commutative_inputs_match_sympy(seed):
    rng = random.Random(seed)
    xs = sympy.symbols("x y")
    gens, sym = [], []
    for _ in range(rng.randint(1, 3)):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            e = (rng.randint(0, 2), rng.randint(0, 2))
            terms[e] = terms.get(e, 0) + (rng.randint(-3, 3) or 1)
        gens.append(Operator(R2, {(a, b, 0, 0): c for (a, b), c in terms.items() if c}))
        sym.append(sum(c * xs[0] ** a * xs[1] ** b for (a, b), c in terms.items()))
    if all(g.is_zero() for g in gens):
        return
    G = buchberger_reduced([g for g in gens if not g.is_zero()])
    ref = sympy.groebner([s for s in sym if s != 0], *xs, order="grevlex")
    theirs = sorted(str(sympy.expand(p / sympy.Poly(p, *xs).LC(order="grevlex"))) for p in ref.exprs)
    mine = sorted(str(sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * xs[0] ** m[0] * xs[1] ** m[1]
                                       for m, c in v[0].terms.items()))) for v in G)
    assert theirs == mine
