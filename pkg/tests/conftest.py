import random
from functools import lru_cache

import pytest

from weylann.logann import ann_lambda_log
from weylann.opalgebra import Operator, VarTable
from weylann.syntax import infer_vars, parse_operator, parse_polynomial

CORPUS = ["x", "x^2-1", "x^3-x", "x^2*y^2+z^2", "x*y", "x^2+y^2"]
LAMBDAS = ["0", "-1", "-2", "1/2"]
MS = [0, 1, 2]


def ring_for(text, params=()):
    return VarTable(infer_vars([text]), params)


def poly(text, xvars=None):
    return parse_polynomial(text, VarTable(xvars or infer_vars([text])))


def ops(texts, ring):
    return [parse_operator(t, ring) for t in texts]


@lru_cache(maxsize=None)
def pipeline(ftext, lam, m):
    """Shared cache: the expensive pipelines run once per session."""
    return ann_lambda_log(poly(ftext), lam, m)


def random_operator(rng: random.Random, ring: VarTable, max_deg=2, max_terms=4, coeff=3):
    names = list(ring.names)
    P = Operator.constant(ring, 0)
    for _ in range(rng.randint(1, max_terms)):
        c = rng.randint(-coeff, coeff) or 1
        term = Operator.constant(ring, c)
        for _ in range(rng.randint(0, max_deg)):
            term = term * Operator.gen(ring, rng.choice(names))
        P = P + term
    return P


def random_poly(rng: random.Random, ring: VarTable, max_deg=2, max_terms=3, coeff=3):
    """Nonzero polynomial in the x variables only."""
    P = Operator.constant(ring, 0)
    while P.is_zero():
        for _ in range(rng.randint(1, max_terms)):
            term = Operator.constant(ring, rng.randint(-coeff, coeff))
            for _ in range(rng.randint(0, max_deg)):
                term = term * Operator.gen(ring, rng.choice(ring.xvars))
            P = P + term
    return P


# --- acceptance reporting -----------------------------------------------------

_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = mark.args
        ok = rep.outcome == "passed"
        prev = _RESULTS.get(number, (True, title))
        _RESULTS[number] = (prev[0] and ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS, key=lambda k: (int(str(k).rstrip("abcde")), str(k))):
        ok, title = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
