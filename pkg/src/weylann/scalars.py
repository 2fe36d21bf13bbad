"""Exact rationals and dense univariate polynomials over Q.

Rationals are :class:`fractions.Fraction`; ``BPoly`` holds b-functions and
Hilbert polynomials.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


class BPoly:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[RationalLike] = (), var: str = "s"):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    @classmethod
    def from_roots(cls, roots: Iterable[RationalLike], var: str = "s") -> "BPoly":
        p = cls([1], var)
        for r in roots:
            p = p * cls([-as_rational(r), 1], var)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, q: RationalLike) -> Fraction:
        return poly_eval(self, as_rational(q))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "BPoly") -> "BPoly":
        k = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (k - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (k - len(other.coeffs))
        return BPoly([x + y for x, y in zip(a, b)], self.var)

    def __neg__(self) -> "BPoly":
        return BPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other: "BPoly") -> "BPoly":
        return self + (-other)

    def __mul__(self, other: Union["BPoly", RationalLike]) -> "BPoly":
        if not isinstance(other, BPoly):
            c = as_rational(other)
            return BPoly([c * a for a in self.coeffs], self.var)
        if self.is_zero() or other.is_zero():
            return BPoly([], self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return BPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "BPoly":
        out = BPoly([1], self.var)
        for _ in range(e):
            out = out * self
        return out

    def divmod(self, other: "BPoly") -> tuple["BPoly", "BPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.leading_coefficient
        quo = [Fraction(0)] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lc
            if c:
                quo[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return BPoly(quo, self.var), BPoly(rem[:dq], self.var)

    def derivative(self) -> "BPoly":
        return BPoly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def __repr__(self) -> str:
        return f"BPoly({self.to_str()!r})"

    def to_str(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            mono = "" if e == 0 else (self.var if e == 1 else f"{self.var}^{e}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += sign + body
        return text

    __str__ = to_str


def poly_eval(b: BPoly, q: Fraction) -> Fraction:
    """Horner evaluation, exact."""
    acc = Fraction(0)
    for c in reversed(b.coeffs):
        acc = acc * q + c
    return acc


def cauchy_root_bound(b: BPoly) -> Fraction:
    """``1 + max |c_i / c_deg|``; every complex root has modulus at most this."""
    if b.degree < 1:
        raise ValueError("root bound needs a polynomial of degree >= 1")
    lc = b.leading_coefficient
    return 1 + max(abs(c / lc) for c in b.coeffs[:-1])


def make_monic(b: BPoly) -> BPoly:
    if b.is_zero():
        raise ValueError("cannot normalize the zero polynomial")
    lc = b.leading_coefficient
    return BPoly([c / lc for c in b.coeffs], b.var)


def poly_gcd(a: BPoly, b: BPoly) -> BPoly:
    """Monic gcd (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a if a.is_zero() else make_monic(a)


def integer_content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            break
    return g


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        q = v.denominator
        if q != 1:
            d = d * q // math.gcd(d, q)
    return d


def solve_min_norm(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Minimum-norm exact solution of ``A w = rhs`` or ``None`` if inconsistent.

    Solves ``(A A^T) y = rhs`` and returns ``w = A^T y``; any solution ``y``
    gives the same ``w`` because it lies in the row space.
    """
    m = len(rows)
    if m == 0:
        return []
    ncols = len(rows[0])
    gram = [[sum((rows[i][k] * rows[j][k] for k in range(ncols)), Fraction(0)) for j in range(m)] for i in range(m)]
    aug = [list(gram[i]) + [Fraction(rhs[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                fac = aug[i][c]
                aug[i] = [v - fac * w for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(all(v == 0 for v in aug[i][:m]) and aug[i][m] != 0 for i in range(m)):
        return None
    y = [Fraction(0)] * m
    for i, c in enumerate(pivots):
        y[c] = aug[i][m]
    w = [sum((rows[i][k] * y[i] for i in range(m)), Fraction(0)) for k in range(ncols)]
    if any(sum((row[k] * w[k] for k in range(ncols)), Fraction(0)) != rhs[i] for i, row in enumerate(rows)):
        return None
    return w
