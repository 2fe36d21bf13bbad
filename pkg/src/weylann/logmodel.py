"""Exact model of the modules ``L(f, m)`` and ``L(f, m, lam)``.

An element is ``sum_k a_k * f^(-l) * f^s * (log f)^k`` with polynomial
numerators ``a_k`` in ``Q[x, s]`` (symbolic mode) or ``Q[x]`` (specialized
mode, where ``f^s`` stands for ``f^lam``).  Because the ``f^s (log f)^k``
are free over ``Q[x, 1/f, s]`` an element is zero iff every numerator is.

Arithmetic on numerators uses sympy's sparse polynomial rings, so this
module shares no code with :mod:`weylann.opalgebra` and can serve as an
independent check of everything computed there.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing, ring as sympy_ring

from .opalgebra import ModVector, Operator, VarTable
from .scalars import RationalLike, as_rational


class ModelError(ValueError):
    pass


def _qq(c: Fraction):
    return QQ(c.numerator, c.denominator)


@dataclass(frozen=True)
class LogContext:
    """The polynomial ``f`` together with the numerator ring."""

    xvars: tuple[str, ...]
    f: PolyElement
    R: PolyRing
    lam: Fraction | None  # None: symbolic s

    @property
    def symbolic(self) -> bool:
        return self.lam is None

    @property
    def s(self) -> PolyElement:
        if self.lam is None:
            return self.R.gens[-1]
        return self.R(_qq(self.lam))


_CONTEXTS: dict = {}


def context(f: Operator, lam: RationalLike | None = None) -> LogContext:
    if not f.is_polynomial():
        raise ModelError("f must be a polynomial in x")
    lam_q = None if lam is None else as_rational(lam)
    key = (f.ring.xvars, tuple(sorted(f.terms.items())), lam_q)
    ctx = _CONTEXTS.get(key)
    if ctx is None:
        names = list(f.ring.xvars) + (["s"] if lam_q is None else [])
        R, *_ = sympy_ring(",".join(names), QQ)
        n = f.ring.n
        fp = R.zero
        for m, c in f.terms.items():
            fp += R({tuple(m[:n]) + ((0,) if lam_q is None else ()): _qq(c)})
        ctx = _CONTEXTS[key] = LogContext(tuple(f.ring.xvars), fp, R, lam_q)
    return ctx


@dataclass(frozen=True)
class LogElement:
    ctx: LogContext
    l: int
    nums: tuple[PolyElement, ...]

    @property
    def m(self) -> int:
        return len(self.nums) - 1

    def lift(self, l: int) -> "LogElement":
        if l < self.l:
            raise ModelError("cannot lower the denominator exponent")
        if l == self.l:
            return self
        fp = self.ctx.f ** (l - self.l)
        return LogElement(self.ctx, l, tuple(a * fp for a in self.nums))

    def pad(self, m: int) -> "LogElement":
        if m <= self.m:
            return self
        return LogElement(self.ctx, self.l, self.nums + (self.ctx.R.zero,) * (m - self.m))

    def __add__(self, other: "LogElement") -> "LogElement":
        if other.ctx is not self.ctx:
            raise ModelError("elements from different contexts")
        l = max(self.l, other.l)
        m = max(self.m, other.m)
        a, b = self.lift(l).pad(m), other.lift(l).pad(m)
        return LogElement(self.ctx, l, tuple(x + y for x, y in zip(a.nums, b.nums)))

    def scale_poly(self, p: PolyElement) -> "LogElement":
        return LogElement(self.ctx, self.l, tuple(a * p for a in self.nums))

    def log_coefficient(self, k: int) -> PolyElement:
        return self.nums[k] if k <= self.m else self.ctx.R.zero


def power_log(ctx: LogContext, k: int, m: int | None = None) -> LogElement:
    """The element ``f^s (log f)^k`` (rank ``m + 1``)."""
    m = k if m is None else m
    nums = tuple(ctx.R.one if j == k else ctx.R.zero for j in range(m + 1))
    return LogElement(ctx, 0, nums)


def zero_element(ctx: LogContext, m: int = 0) -> LogElement:
    return LogElement(ctx, 0, (ctx.R.zero,) * (m + 1))


def is_zero(e: LogElement) -> bool:
    return all(not a for a in e.nums)


def _d(e: LogElement, j: int) -> LogElement:
    ctx = e.ctx
    x = ctx.R.gens[j]
    f = ctx.f
    fj = f.diff(x)
    coef = ctx.s - e.l
    out = []
    m = e.m
    for k, a in enumerate(e.nums):
        v = a.diff(x) * f + coef * a * fj
        if k < m and e.nums[k + 1]:
            v += (k + 1) * e.nums[k + 1] * fj
        out.append(v)
    return LogElement(ctx, e.l + 1, tuple(out))


def _shift(e: LogElement) -> LogElement:
    """``Dt (a(s) f^-l f^s) = -s a(s-1) f^-l-1 f^s`` (log-free, symbolic s only)."""
    ctx = e.ctx
    if not ctx.symbolic:
        raise ModelError("Dt acts only in symbolic mode")
    if e.m != 0 and any(e.nums[1:]):
        raise ModelError("Dt action is modelled on log-free elements only")
    s = ctx.R.gens[-1]
    a = e.nums[0]
    shifted = a.compose(s, s - 1) if a else a
    return LogElement(ctx, e.l + 1, (-s * shifted,) + e.nums[1:])


def apply_operator(P: Operator, e: LogElement) -> LogElement:
    """Left action of an operator (x, dx, s and Dt allowed) on a model element."""
    ctx = e.ctx
    ring = P.ring
    if ring.xvars != ctx.xvars:
        raise ModelError("variable mismatch between operator and element")
    if any(p not in ("s",) for p in ring.params):
        raise ModelError(f"cannot act with parameters {ring.params}")
    n = ring.n
    s_slot = ring.param_slot("s") if "s" in ring.params else None
    dt_slot = ring.shift_slot
    R = ctx.R
    cache: dict[tuple, LogElement] = {(): e}

    def derived(beta: tuple, dt: int) -> LogElement:
        key = (dt,) + beta
        hit = cache.get(key)
        if hit is not None:
            return hit
        if any(beta):
            j = max(i for i, b in enumerate(beta) if b)
            prev = list(beta)
            prev[j] -= 1
            val = _d(derived(tuple(prev), dt), j)
        elif dt:
            val = _shift(derived(beta, dt - 1))
        else:
            val = e
        cache[key] = val
        return val

    acc = zero_element(ctx, e.m)
    for mono, c in P.terms.items():
        alpha, beta = mono[:n], mono[n:2 * n]
        sexp = mono[s_slot] if s_slot is not None else 0
        dt = mono[dt_slot] if dt_slot is not None else 0
        base = derived(tuple(beta), dt)
        mult = R({tuple(alpha) + ((0,) if ctx.symbolic else ()): _qq(c)})
        if sexp:
            mult = mult * ctx.s ** sexp
        acc = acc + base.scale_poly(mult)
    return acc


def apply_vector(v: ModVector | Sequence[Operator], ctx: LogContext) -> LogElement:
    """``sum_k v_k (f^s (log f)^k)`` for the tuple ``(f^s, ..., f^s (log f)^m)``."""
    comps = list(v)
    m = len(comps) - 1
    acc = zero_element(ctx, m)
    for k, P in enumerate(comps):
        if not P.is_zero():
            acc = acc + apply_operator(P, power_log(ctx, k, m))
    return acc


def annihilates(P: Operator, f: Operator, m: int, lam: RationalLike | None = None) -> bool:
    ctx = context(f, lam)
    return is_zero(apply_operator(P, power_log(ctx, m)))


def vector_annihilates(v: ModVector, f: Operator, lam: RationalLike | None = None) -> bool:
    return is_zero(apply_vector(v, context(f, lam)))


# --- numerics -----------------------------------------------------------------

def _eval_poly(p: PolyElement, point: Sequence, extra: Sequence = ()):
    vals = list(point) + list(extra)
    acc = mpmath.mpf(0)
    for monom, c in p.terms():
        t = mpmath.mpf(c.numerator) / c.denominator
        for v, e in zip(vals, monom):
            if e:
                t *= v ** e
        acc += t
    return acc


def numeric_eval(e: LogElement, point: Sequence[RationalLike], lam: RationalLike, precision_digits: int = 60):
    """Evaluate ``sum_k a_k(point, lam) f(point)^(lam - l) log(f(point))^k``."""
    lam_q = as_rational(lam)
    ctx = e.ctx
    if ctx.lam is not None and ctx.lam != lam_q:
        raise ModelError("element was specialized at a different lambda")
    with mpmath.workdps(precision_digits + 10):
        pt = [mpmath.mpf(as_rational(p).numerator) / as_rational(p).denominator for p in point]
        lam_mp = mpmath.mpf(lam_q.numerator) / lam_q.denominator
        extra = (lam_mp,) if ctx.symbolic else ()
        fv = _eval_poly(ctx.f, pt, (mpmath.mpf(0),) if ctx.symbolic else ())
        if fv == 0:
            raise ModelError("evaluation at a zero of f")
        lf = mpmath.log(fv)
        base = mpmath.power(fv, lam_mp - e.l)
        total = mpmath.mpf(0)
        for k, a in enumerate(e.nums):
            if a:
                total += _eval_poly(a, pt, extra) * base * lf ** k
        return +total


def numeric_residual(P: Operator, f: Operator, lam: RationalLike, m: int, point: Sequence[RationalLike],
                     precision_digits: int = 60):
    """``|P (f^lam log^m f)|`` at ``point`` via the closed form of the symbolic image."""
    ctx = context(f, lam)
    img = apply_operator(P, power_log(ctx, m))
    with mpmath.workdps(precision_digits + 10):
        return abs(numeric_eval(img, point, lam, precision_digits))


def finite_difference_residual(P: Operator, f: Operator, lam: RationalLike, m: int, point: Sequence[RationalLike],
                               digits: int = 60, step: str | None = None):
    """``|P u|`` with ``u = f^lam (log f)^m`` differentiated numerically.

    Independent of the symbolic action: derivatives come from mpmath's
    finite differences.  With ``step=None`` mpmath picks the step and raises
    its internal precision, which keeps the error near ``10^-digits``.
    """
    lam_q = as_rational(lam)
    n = P.ring.n
    if P.ring.params or P.ring.has_shift:
        raise ModelError("numeric differentiation needs an operator in D_n")
    fterms = [(m_[:n], c) for m_, c in f.terms.items()]
    with mpmath.workdps(digits):
        lam_mp = mpmath.mpf(lam_q.numerator) / lam_q.denominator
        h = None if step is None else mpmath.mpf(step)

        def fval(*xs):
            acc = mpmath.mpf(0)
            for alpha, c in fterms:
                t = mpmath.mpf(c.numerator) / c.denominator
                for v, ex in zip(xs, alpha):
                    if ex:
                        t *= v ** ex
                acc += t
            return acc

        def u(*xs):
            fv = fval(*xs)
            return mpmath.power(fv, lam_mp) * mpmath.log(fv) ** m

        pt = [mpmath.mpf(as_rational(p).numerator) / as_rational(p).denominator for p in point]
        total = mpmath.mpf(0)
        for mono, c in P.terms.items():
            alpha, beta = mono[:n], mono[n:2 * n]
            if any(beta):
                d = mpmath.diff(u, pt, tuple(beta)) if h is None else mpmath.diff(u, pt, tuple(beta), h=h)
            else:
                d = u(*pt)
            coef = mpmath.mpf(c.numerator) / c.denominator
            for v, ex in zip(pt, alpha):
                if ex:
                    coef *= v ** ex
            total += coef * d
        return abs(total)
