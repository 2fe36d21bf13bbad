"""End-to-end acceptance checks; one summary line per criterion is printed at the end of the run."""
import random
import time
from fractions import Fraction

import pytest
import mpmath
import sympy

from conftest import CORPUS, LAMBDAS, MS, ops, pipeline, poly, random_operator, random_poly
from weylann import annfs
from weylann.annfs import ann_fs, bfct, s_ring
from weylann.groebner import Cancelled, buchberger_reduced, normal_form, spairs_reduce_to_zero, submodules_equal
from weylann.holonomy import count_standard, hilbert_data, initial_module, is_holonomic
from weylann.logann import (
    ann_fs_log,
    ann_lambda_log,
    quotients_agree,
)
from weylann.logmodel import annihilates, finite_difference_residual, numeric_residual, vector_annihilates
from weylann.opalgebra import ModVector, Operator, VarTable, poly_derivative, substitute_s
from weylann.orders import posfirst
from weylann.scalars import BPoly
from weylann.syntax import parse_operator, render

XYZ = VarTable(["x", "y", "z"])
QUOTIENT_BUDGET = 10.0
F3 = poly("x^2*y^2+z^2")

ANN_FS_LISTED = [
    "-x*dx+y*dy",
    "y*dy+z*dz-2*s",
    "z*dx-y^2*x*dz",
    "z*dy-y*x^2*dz",
    "-z*dx^2+y^3*dz*dy+y^2*dz",
]

ANN_LOG_LISTED = [
    "-x*dx+y*dy",
    "-z*dx+y^2*x*dz",
    "dy^2+x^2*dz^2",
    "dx^2+y^2*dz^2",
    "-z*dy+y*x^2*dz",
    "dy*dx^2-z*y*dz^3",
    "-dy^2*dx+z*x*dz^3",
    "y*dy*dx+z*dz*dx",
    "y*dz*dy+z*dz^2+dz",
    "y*dy^2+z*dz*dy+dy",
    "z*dy*dx+z*y*x*dz^2-y*x*dz",
    "dy^2*dx^2+z^2*dz^4+2*z*dz^3",
]

LOG_CUBIC_LISTED = [
    "(3*x^5-4*x^3+x)*dx^2+(3*x^4+1)*dx",
    "(x^3-x)*dx^3+(-3*x^4+9*x^2-2)*dx^2+(-3*x^3+3*x)*dx",
]


def ideal_equal(A, B):
    return submodules_equal([ModVector([a]) for a in A], [ModVector([b]) for b in B])


def random_points(rng, n, count=10):
    return [[Fraction(rng.randint(1, 40), rng.randint(1, 20)) for _ in range(n)] for _ in range(count)]


@pytest.mark.criterion(1, "Ann f^s of x^2y^2+z^2 equals the five listed generators, under 60 s")
def test_criterion_1_ann_fs_listed():
    annfs._ann_fs_cached.cache_clear()
    t0 = time.perf_counter()
    G = ann_fs(F3)
    elapsed = time.perf_counter() - t0
    listed = ops(ANN_FS_LISTED, s_ring(["x", "y", "z"]))
    assert ideal_equal(G, listed)
    assert elapsed < 60
    print(f"\nann_fs(x^2*y^2+z^2): {len(G)} basis elements in {elapsed:.2f}s")


@pytest.mark.criterion(2, "b-functions of x^2y^2+z^2, x^3-x and x")
def test_criterion_2_bfunctions():
    assert bfct(F3) == BPoly.from_roots([-1, -1, -1, Fraction(-3, 2)])
    # (s+1)^3 (2s+3) made monic
    expanded = (BPoly([1, 1]) ** 3) * BPoly([Fraction(3, 2), 1])
    assert bfct(F3) == expanded
    assert bfct(poly("x^3-x")) == BPoly([1, 1])
    assert bfct(poly("x")) == BPoly([1, 1])


@pytest.mark.criterion(3, "Ann log(x^3-x) equals the two listed operators")
def test_criterion_3_cubic_log():
    res = pipeline("x^3-x", "0", 1)
    listed = ops(LOG_CUBIC_LISTED, VarTable(["x"]))
    f = poly("x^3-x")
    assert all(annihilates(P, f, 1, 0) for P in listed)
    assert ideal_equal(res.ideal_gens, listed)
    assert len(res.ideal_gens) >= 2


@pytest.mark.criterion(4, "Ann log(x^2y^2+z^2) equals the twelve listed operators; each passes both oracles")
def test_criterion_4_twelve_generators():
    res = pipeline("x^2*y^2+z^2", "0", 1)
    listed = ops(ANN_LOG_LISTED, XYZ)
    assert ideal_equal(res.ideal_gens, listed)
    rng = random.Random(20261015)
    points = random_points(rng, 3)
    worst = 0
    for P in listed:
        assert annihilates(P, F3, 1, 0)
        for pt in points:
            r1 = numeric_residual(P, F3, 0, 1, pt, precision_digits=60)
            r2 = finite_difference_residual(P, F3, 0, 1, pt, digits=60)
            worst = max(worst, r1, r2)
    assert worst < mpmath.mpf("1e-25")
    print(f"\nworst numeric residual over 12 operators x 10 points: {float(worst):.3g}")


def _banded(ring, f, m, first, diag, sub):
    zero = Operator.constant(ring, 0)
    rows = []
    for k in range(m + 1):
        comps = [zero] * (m + 1)
        comps[k] = first if k == 0 else diag
        if k > 0:
            comps[k - 1] = sub.scale(-k)
        rows.append(ModVector(comps))
    return rows


@pytest.mark.criterion(5, "univariate banded patterns for Ann(f^s..), lambda=-1 and lambda=0")
@pytest.mark.parametrize("ftext", ["x", "x^2-1", "x^3-x"])
@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_criterion_5_univariate_pattern(ftext, m):
    f = poly(ftext)
    fp = poly_derivative(f, 0)
    S = s_ring(["x"])
    D = VarTable(["x"])
    fS, fpS = f.to_ring(S), fp.to_ring(S)
    dS, s = Operator.gen(S, "dx"), Operator.gen(S, "s")
    P = fS * dS - s * fpS
    symbolic = ann_fs_log(f, m, extract=False).module_gens
    assert submodules_equal(symbolic, _banded(S, fS, m, P, P, fpS))

    d = Operator.gen(D, "dx")
    at_minus_one = ann_lambda_log(f, -1, m, extract=False).module_gens
    assert submodules_equal(at_minus_one, _banded(D, f, m, d * f, d * f, fp))

    at_zero = pipeline(ftext, "0", m) if m <= 2 else ann_lambda_log(f, 0, m, extract=False)
    assert submodules_equal(at_zero.module_gens, _banded(D, f, m, d, f * d, fp))


J_TEXT = [
    "(x^2*y^2+z^2)*dx+2*x*y^2",
    "(x^2*y^2+z^2)*dy+2*x^2*y",
    "(x^2*y^2+z^2)*dz+2*z",
]


@pytest.mark.criterion(6, "dimensions and Hilbert polynomials of the reference modules")
def test_criterion_6_holonomy():
    J = ops(J_TEXT, XYZ)
    hJ = hilbert_data(J)
    assert hJ.dimension == 5
    assert not is_holonomic(J)
    k5 = BPoly([0, Fraction(43, 10), Fraction(5, 4), Fraction(7, 6), Fraction(1, 4), Fraction(1, 30)], var="k")
    assert hJ.hilbert_polynomial == k5
    init = initial_module(J)
    for k in range(hJ.stable_from, hJ.stable_from + 4):
        assert count_standard(init, k) == hJ(k)

    I = [substitute_s(g, -1, target=XYZ) for g in ann_fs(F3)]
    hI = hilbert_data(I)
    assert hI.dimension == 3 and is_holonomic(I)
    assert hI.hilbert_polynomial == BPoly([-1, Fraction(43, 6), Fraction(-3, 2), Fraction(7, 3)], var="k")

    L = pipeline("x^2*y^2+z^2", "0", 1).ideal_gens
    hL = hilbert_data(L)
    assert hL.hilbert_polynomial == BPoly([-1, Fraction(5, 2), Fraction(3, 2), 2], var="k")


CASES = [(f, lam, m) for f in CORPUS for lam in LAMBDAS for m in MS]


@pytest.mark.criterion("7a", "every pipeline generator annihilates its target exactly (72 cases)")
@pytest.mark.parametrize("ftext,lam,m", CASES)
def test_criterion_7a_corpus_annihilates(ftext, lam, m):
    res = pipeline(ftext, lam, m)
    f = poly(ftext)
    assert res.ideal_gens
    for P in res.ideal_gens:
        assert annihilates(P, f, m, Fraction(lam))
    for v in res.module_gens:
        assert vector_annihilates(v, f, Fraction(lam))


@pytest.mark.criterion("7b", "tag and syzygy quotients agree on pipeline calls and 50 random instances")
def test_criterion_7b_quotients_agree():
    for ftext, lam, m in CASES:
        res = pipeline(ftext, lam, m)
        if res.nu0_used > 0:
            assert res.quotient_checked
    # A draw that generates the whole free module can send the tag route
    # through huge intermediate coefficients.  Such draws get a time budget
    # and are reported as inconclusive; 50 conclusive draws are still required.
    rng = random.Random(7)
    done = inconclusive = 0
    while done < 50:
        n = rng.choice([1, 2])
        ring = VarTable(["x", "y"][:n])
        rank = rng.choice([1, 2])
        gens = [ModVector([random_operator(rng, ring, max_deg=3 if n == 1 else 2, max_terms=3) for _ in range(rank)])
                for _ in range(rng.randint(1, 3))]
        g = random_poly(rng, ring, max_deg=2)
        if all(v.is_zero() for v in gens):
            continue
        deadline = time.monotonic() + QUOTIENT_BUDGET
        try:
            ok = quotients_agree(gens, ModVector([g] * rank), cancel=lambda: time.monotonic() > deadline)
        except Cancelled:
            inconclusive += 1
            continue
        assert ok
        done += 1
    print(f"random quotient instances: {done} agree, {inconclusive} over the {QUOTIENT_BUDGET:.0f}s budget")
    assert inconclusive <= 5


@pytest.mark.criterion("7c", "Gröbner engine: S-pairs, cofactors, commutative degeneration")
def test_criterion_7c_groebner():
    res = pipeline("x^2*y^2+z^2", "0", 1)
    bases = [
        buchberger_reduced(ann_fs(F3)),
        buchberger_reduced(res.module_gens, posfirst()),
        buchberger_reduced(res.ideal_gens),
    ]
    for G in bases:
        assert spairs_reduce_to_zero(G)
    rng = random.Random(3)
    G = bases[2]
    for _ in range(20):
        v = ModVector([random_operator(rng, XYZ, max_deg=4, max_terms=5)])
        rem, cof = normal_form(v, G)
        total = rem
        for c, g in zip(cof, G.elements):
            total = total + c * g
        assert total == v
    # commutative case against sympy
    xs = sympy.symbols("x y z")
    comm = VarTable(["x", "y", "z"])
    for _ in range(10):
        gens = [random_operator(rng, VarTable(["x", "y", "z"]), max_deg=3, max_terms=3) for _ in range(3)]
        gens = [g for g in gens if g.is_polynomial() and not g.is_zero()] or [Operator.gen(comm, "x")]
        ours = buchberger_reduced([ModVector([g]) for g in gens]).ideal_elements()
        theirs = sympy.groebner([sympy.sympify(str(g).replace("^", "**")) for g in gens], *xs, order="grevlex")
        ours_sym = {sympy.expand(sympy.sympify(render(g.monic()).replace("^", "**"))) for g in ours}
        theirs_sym = {sympy.expand(p / sympy.Poly(p, *xs).LC(order="grevlex")) for p in theirs.exprs}
        assert ours_sym == theirs_sym


@pytest.mark.criterion("7d", "multiplication associative and distributive on 500 random triples")
def test_criterion_7d_ring_axioms():
    rng = random.Random(11)
    ring = VarTable(["x", "y"], ("s",), shift=True)
    for _ in range(500):
        P, Q, R = (random_operator(rng, ring, max_deg=3, max_terms=3) for _ in range(3))
        assert (P * Q) * R == P * (Q * R)
        assert P * (Q + R) == P * Q + P * R
        assert (P + Q) * R == P * R + Q * R


@pytest.mark.criterion("7e", "parse/render round trip on 100 random operators")
def test_criterion_7e_round_trip():
    rng = random.Random(5)
    ring = VarTable(["x", "y", "z"], ("s",), shift=True)
    for _ in range(100):
        P = random_operator(rng, ring, max_deg=4, max_terms=5).scale(Fraction(rng.randint(1, 5), rng.randint(1, 5)))
        assert parse_operator(render(P), ring) == P


@pytest.mark.criterion(8, "D_n / Ann f^lambda (log f)^m is holonomic across the corpus")
@pytest.mark.parametrize("ftext,lam,m", CASES)
def test_criterion_8_holonomic(ftext, lam, m):
    res = pipeline(ftext, lam, m)
    assert is_holonomic(res.ideal_gens)
