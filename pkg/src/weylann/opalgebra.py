"""Normal-ordered arithmetic in Weyl algebras with central parameters.

A ring has ``n`` Weyl pairs ``(x_i, dx_i)`` with ``dx_i x_i = x_i dx_i + 1``,
any number of central commuting parameters (``s``, the tag ``t``), and
optionally the shift generator ``Dt`` acting on the first parameter by
``Dt s = (s - 1) Dt``.  Monomials are exponent tuples laid out as

    x_1..x_n, dx_1..dx_n, params..., [Dt]

and always mean the normal-ordered word ``x^a dx^b params Dt^e``.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .orders import TermOrder, grevlex
from .scalars import RationalLike, as_rational, common_denominator

SHIFT = "Dt"


class AlgebraError(ValueError):
    pass


class DivisionError(AlgebraError):
    """Raised when an exact right division does not exist."""


class VarTable:
    """Variable layout of an operator ring (immutable, hashable)."""

    __slots__ = ("xvars", "params", "has_shift", "n", "names", "nslots", "_mul_cache", "_hash")

    def __init__(self, xvars: Sequence[str], params: Sequence[str] = (), shift: bool = False):
        xvars = tuple(xvars)
        params = tuple(params)
        if shift and not params:
            raise AlgebraError("the shift generator needs a parameter to act on")
        names = xvars + tuple("d" + v for v in xvars) + params + ((SHIFT,) if shift else ())
        if len(set(names)) != len(names):
            raise AlgebraError(f"variable names collide: {names}")
        self.xvars = xvars
        self.params = params
        self.has_shift = bool(shift)
        self.n = len(xvars)
        self.names = names
        self.nslots = len(names)
        self._mul_cache: dict[tuple, tuple] = {}
        self._hash = hash((xvars, params, self.has_shift))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VarTable):
            return NotImplemented
        return (self.xvars, self.params, self.has_shift) == (other.xvars, other.params, other.has_shift)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"VarTable(xvars={self.xvars}, params={self.params}, shift={self.has_shift})"

    # slot helpers
    def x_slot(self, i: int) -> int:
        return i

    def d_slot(self, i: int) -> int:
        return self.n + i

    def param_slot(self, name: str) -> int:
        return 2 * self.n + self.params.index(name)

    @property
    def shift_slot(self) -> int | None:
        return self.nslots - 1 if self.has_shift else None

    @property
    def shifted_param_slot(self) -> int | None:
        return 2 * self.n if self.has_shift else None

    def slot_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AlgebraError(f"unknown identifier {name!r}") from None

    def one(self) -> tuple:
        return (0,) * self.nslots

    def with_params(self, params: Sequence[str], shift: bool = False) -> "VarTable":
        return VarTable(self.xvars, params, shift)

    def mono_mul(self, a: tuple, b: tuple) -> tuple[tuple[tuple, int], ...]:
        """Normal-ordered expansion of the word ``a * b`` as ``((mono, coeff), ...)``."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        base = [x + y for x, y in zip(a, b)]
        choices: list[tuple[tuple[int, ...], list[tuple[int, int]]]] = []
        for i in range(n):
            db, xb = a[n + i], b[i]
            if db and xb:
                opts = [(k, math.factorial(k) * math.comb(db, k) * math.comb(xb, k)) for k in range(min(db, xb) + 1)]
                choices.append(((i, n + i), opts))
        if self.has_shift:
            e, c2 = a[-1], b[2 * n]
            if e and c2:
                opts = [(r, math.comb(c2, r) * (-e) ** r) for r in range(c2 + 1)]
                choices.append(((2 * n,), opts))
        if not choices:
            result = ((tuple(base), 1),)
        else:
            acc: dict[tuple, int] = {}
            for combo in itertools.product(*(opts for _, opts in choices)):
                mono = list(base)
                coeff = 1
                for (slots, _), (k, c) in zip(choices, combo):
                    coeff *= c
                    for sl in slots:
                        mono[sl] -= k
                t = tuple(mono)
                acc[t] = acc.get(t, 0) + coeff
            result = tuple((m, c) for m, c in acc.items() if c)
        if len(self._mul_cache) > 400_000:
            self._mul_cache.clear()
        self._mul_cache[key] = result
        return result


Scalar = Union[int, Fraction]


class Operator:
    """Element of the operator ring: ``{monomial: Fraction}`` without zeros."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: VarTable, terms: Mapping[tuple, Scalar] | None = None):
        self.ring = ring
        if terms:
            self.terms = {m: Fraction(c) for m, c in terms.items() if c}
        else:
            self.terms = {}

    @classmethod
    def _raw(cls, ring: VarTable, terms: dict) -> "Operator":
        op = cls.__new__(cls)
        op.ring = ring
        op.terms = terms
        return op

    @classmethod
    def constant(cls, ring: VarTable, c: RationalLike) -> "Operator":
        c = as_rational(c)
        return cls._raw(ring, {ring.one(): c} if c else {})

    @classmethod
    def gen(cls, ring: VarTable, name: str, power: int = 1) -> "Operator":
        mono = [0] * ring.nslots
        mono[ring.slot_of(name)] = power
        return cls._raw(ring, {tuple(mono): Fraction(1)})

    @classmethod
    def monomial(cls, ring: VarTable, mono: tuple, coeff: RationalLike = 1) -> "Operator":
        return cls(ring, {tuple(mono): as_rational(coeff)})

    # --- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_polynomial(self) -> bool:
        """No derivations, parameters or shift: an element of Q[x]."""
        n = self.ring.n
        return all(not any(m[n:]) for m in self.terms)

    def involves_shift(self) -> bool:
        return self.ring.has_shift and any(m[-1] for m in self.terms)

    def involves(self, name: str) -> bool:
        if name not in self.ring.names:
            return False
        sl = self.ring.slot_of(name)
        return any(m[sl] for m in self.terms)

    def total_degree(self, slots: Iterable[int] | None = None) -> int:
        if not self.terms:
            return -1
        if slots is None:
            return max(sum(m) for m in self.terms)
        slots = list(slots)
        return max(sum(m[i] for i in slots) for m in self.terms)

    def weyl_degree(self) -> int:
        """Total degree in x and dx only (Bernstein filtration order)."""
        return self.total_degree(range(2 * self.ring.n))

    # --- arithmetic --------------------------------------------------------
    def _check(self, other: "Operator") -> None:
        if self.ring != other.ring:
            raise AlgebraError("operands live in different rings")

    def __add__(self, other):
        if not isinstance(other, Operator):
            other = Operator.constant(self.ring, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Operator._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Operator._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Operator):
            other = Operator.constant(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: RationalLike) -> "Operator":
        c = as_rational(c)
        if not c:
            return Operator._raw(self.ring, {})
        return Operator._raw(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Operator):
            return multiply(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int) -> "Operator":
        if e < 0:
            raise AlgebraError("negative power")
        out = Operator.constant(self.ring, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Operator.constant(self.ring, other)
        if not isinstance(other, Operator):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Operator({self})"

    def __str__(self) -> str:
        from .syntax import render

        return render(self)

    # --- structure ---------------------------------------------------------
    def lead(self, order: TermOrder | None = None) -> tuple:
        if not self.terms:
            raise AlgebraError("zero operator has no leading term")
        bound = (order or grevlex()).bind(self.ring)
        return max(self.terms, key=bound.mono_key)

    def sorted_terms(self, order: TermOrder | None = None) -> list[tuple[tuple, Fraction]]:
        bound = (order or grevlex()).bind(self.ring)
        return sorted(self.terms.items(), key=lambda mc: bound.mono_key(mc[0]), reverse=True)

    def primitive(self) -> "Operator":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = common_denominator(self.terms.values())
        ints = {m: int(c * den) for m, c in self.terms.items()}
        g = 0
        for v in ints.values():
            g = math.gcd(g, v)
        lc = ints[self.lead()]
        if lc < 0:
            g = -g
        return Operator._raw(self.ring, {m: Fraction(v // g) for m, v in ints.items()})

    def monic(self, order: TermOrder | None = None) -> "Operator":
        if not self.terms:
            return self
        return self.scale(1 / self.terms[self.lead(order)])

    def to_ring(self, ring: VarTable) -> "Operator":
        """Re-embed into a ring with the same x variables; vanished slots must be zero."""
        if ring.xvars != self.ring.xvars:
            raise AlgebraError("x variables differ")
        src = self.ring.names
        index = {nm: i for i, nm in enumerate(ring.names)}
        out = {}
        for m, c in self.terms.items():
            t = [0] * ring.nslots
            for i, e in enumerate(m):
                if e:
                    j = index.get(src[i])
                    if j is None:
                        raise AlgebraError(f"{src[i]} does not exist in the target ring")
                    t[j] = e
            out[tuple(t)] = c
        return Operator._raw(ring, out)

    def coefficient_poly_terms(self) -> Iterator[tuple[tuple, tuple, Fraction]]:
        """Yield ``(alpha, rest, coeff)`` splitting each monomial at the x block."""
        n = self.ring.n
        for m, c in self.terms.items():
            yield m[:n], m[n:], c


def multiply(P: Operator, Q: Operator) -> Operator:
    """Normal-ordered product ``P * Q``."""
    P._check(Q)
    ring = P.ring
    out: dict[tuple, Fraction] = {}
    for a, ca in P.terms.items():
        for b, cb in Q.terms.items():
            cab = ca * cb
            for m, k in ring.mono_mul(a, b):
                v = out.get(m, 0) + cab * k
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
    return Operator._raw(ring, out)


def _param_name(ring: VarTable, name: str | None) -> str:
    if name is None:
        if not ring.params:
            raise AlgebraError("ring has no parameter")
        return ring.params[0]
    if name not in ring.params:
        raise AlgebraError(f"{name!r} is not a parameter of the ring")
    return name


def s_derivative(P: Operator, name: str | None = None) -> Operator:
    """Formal derivative in a central parameter (``s`` by default)."""
    if P.involves_shift():
        raise AlgebraError("parameter derivative is undefined in the presence of Dt")
    sl = P.ring.param_slot(_param_name(P.ring, name))
    out = {}
    for m, c in P.terms.items():
        e = m[sl]
        if e:
            t = list(m)
            t[sl] = e - 1
            out[tuple(t)] = c * e
    return Operator._raw(P.ring, out)


def substitute_s(P: Operator, lam: RationalLike, name: str | None = None, target: VarTable | None = None) -> Operator:
    """Replace a central parameter by a rational number.

    With ``target`` the result is moved to that ring, which must lack the
    parameter.
    """
    if P.involves_shift():
        raise AlgebraError("cannot specialize a parameter in the presence of Dt")
    lam = as_rational(lam)
    ring = P.ring
    pname = _param_name(ring, name)
    sl = ring.param_slot(pname)
    out: dict[tuple, Fraction] = {}
    for m, c in P.terms.items():
        t = list(m)
        e = t[sl]
        t[sl] = 0
        t = tuple(t)
        v = out.get(t, 0) + c * lam**e
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    res = Operator._raw(ring, out)
    if target is not None:
        res = res.to_ring(target)
    return res


def right_divide_by_poly(W: Operator, g: Operator, order: TermOrder | None = None) -> Operator:
    """Return ``W'`` with ``W' * g == W`` for a polynomial ``g``."""
    W._check(g)
    if g.is_zero() or not g.is_polynomial():
        raise AlgebraError("right divisor must be a nonzero polynomial in x")
    bound = (order or grevlex()).bind(W.ring)
    ring = W.ring
    glead = max(g.terms, key=bound.mono_key)
    gc = g.terms[glead]
    rem = dict(W.terms)
    quo: dict[tuple, Fraction] = {}
    while rem:
        lead = max(rem, key=bound.mono_key)
        q = tuple(x - y for x, y in zip(lead, glead))
        if min(q) < 0:
            raise DivisionError("operator is not right-divisible by the polynomial")
        c = rem[lead] / gc
        quo[q] = c
        for b, cb in g.terms.items():
            for m, k in ring.mono_mul(q, b):
                v = rem.get(m, 0) - c * cb * k
                if v:
                    rem[m] = v
                else:
                    rem.pop(m, None)
    return Operator._raw(ring, quo)


def poly_derivative(P: Operator, i: int) -> Operator:
    """Derivative of a polynomial (in x and parameters) with respect to ``x_i``."""
    out = {}
    for m, c in P.terms.items():
        e = m[i]
        if e:
            t = list(m)
            t[i] = e - 1
            out[tuple(t)] = c * e
    return Operator._raw(P.ring, out)


class ModVector:
    """Element of a free module ``R^(m+1)`` over an operator ring."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Operator]):
        comps = tuple(components)
        if not comps:
            raise AlgebraError("module vectors have rank at least 1")
        ring = comps[0].ring
        if any(c.ring != ring for c in comps):
            raise AlgebraError("components live in different rings")
        self.components = comps

    @classmethod
    def unit(cls, ring: VarTable, rank: int, j: int) -> "ModVector":
        return cls([Operator.constant(ring, 1 if k == j else 0) for k in range(rank)])

    @classmethod
    def zero(cls, ring: VarTable, rank: int) -> "ModVector":
        return cls([Operator.constant(ring, 0) for _ in range(rank)])

    @property
    def ring(self) -> VarTable:
        return self.components[0].ring

    @property
    def rank(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, k: int) -> Operator:
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "ModVector") -> "ModVector":
        return ModVector([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "ModVector") -> "ModVector":
        return ModVector([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "ModVector":
        return ModVector([-a for a in self.components])

    def __rmul__(self, left) -> "ModVector":
        """Left scalar multiplication by an operator or number."""
        return ModVector([left * c if isinstance(left, Operator) else c.scale(left) for c in self.components])

    def componentwise(self, right: "ModVector") -> "ModVector":
        """``(P_0 Q_0, ..., P_m Q_m)``."""
        return ModVector([a * b for a, b in zip(self.components, right.components)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModVector):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return "ModVector(" + ", ".join(str(c) for c in self.components) + ")"

    def map(self, fn) -> "ModVector":
        return ModVector([fn(c) for c in self.components])

    def support(self) -> list[int]:
        return [k for k, c in enumerate(self.components) if not c.is_zero()]


def contract(row: Sequence[Operator], gens: Sequence[ModVector]) -> ModVector:
    """``sum_i row[i] * gens[i]``."""
    if len(row) != len(gens):
        raise AlgebraError("row length differs from the number of generators")
    acc = ModVector.zero(gens[0].ring, gens[0].rank)
    for r, g in zip(row, gens):
        if not r.is_zero():
            acc = acc + r * g
    return acc
