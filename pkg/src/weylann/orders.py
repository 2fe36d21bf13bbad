"""Term orders on operator monomials and free-module terms.

An order is declared by name blocks (compared left to right, each block by
total degree and then reverse lexicographically) plus a position policy:

* ``"top"``  term over position; ties go to the smaller position index.
* ``"pot"``  position first, position 0 largest.
* ``"elim"`` any term in a position ``< elim_k`` beats any term in a position
  ``>= elim_k``; term over position inside each group.

Orders are bound to a :class:`~weylann.opalgebra.VarTable` before use; bound
orders turn monomials into tuple keys whose natural ordering is the term
order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .opalgebra import VarTable

TOP = "top"
POT = "pot"
ELIM = "elim"
REST = "*"

LT, EQ, GT = -1, 0, 1


class OrderError(ValueError):
    pass


@dataclass(frozen=True)
class TermOrder:
    blocks: tuple[tuple[str, ...], ...] | None = None
    position: str = TOP
    elim_k: int = 0

    def __post_init__(self):
        if self.position not in (TOP, POT, ELIM):
            raise OrderError(f"unknown position policy {self.position!r}")
        if self.position == ELIM and self.elim_k < 0:
            raise OrderError("elimination position must be nonnegative")

    def bind(self, ring: "VarTable") -> "BoundOrder":
        key = (self, ring)
        bound = _BOUND.get(key)
        if bound is None:
            bound = _BOUND[key] = BoundOrder(self, ring)
        return bound

    def with_position(self, position: str, elim_k: int = 0) -> "TermOrder":
        return TermOrder(self.blocks, position, elim_k)

    def block_slots(self, ring: "VarTable") -> list[list[int]]:
        names = list(ring.names)
        if self.blocks is None:
            return [list(range(len(names)))]
        seen: set[str] = set()
        out: list[list[int] | None] = []
        rest_at = None
        for block in self.blocks:
            if block == (REST,):
                rest_at = len(out)
                out.append(None)
                continue
            slots = []
            for name in block:
                if name not in names:
                    # names absent from this ring are tolerated so one order
                    # can serve rings with and without a parameter
                    continue
                if name in seen:
                    raise OrderError(f"variable {name!r} appears in two blocks")
                seen.add(name)
                slots.append(names.index(name))
            out.append(sorted(slots))
        leftover = [i for i, nm in enumerate(names) if nm not in seen]
        if rest_at is not None:
            out[rest_at] = leftover
        elif leftover:
            raise OrderError(f"blocks do not cover variables {[names[i] for i in leftover]}")
        return [b for b in out if b]

    def eliminates_vars(self, ring: "VarTable", names: Sequence[str]) -> bool:
        """True when the leading blocks are exactly ``names`` and terms dominate positions."""
        if self.position != TOP:
            return False
        target = {ring.names.index(nm) for nm in names if nm in ring.names}
        if not target:
            return True
        acc: set[int] = set()
        for block in self.block_slots(ring):
            acc |= set(block)
            if acc == target:
                return True
            if not acc <= target:
                return False
        return False

    def eliminates_positions(self, k: int) -> bool:
        if k == 0:
            return True
        return self.position == POT or (self.position == ELIM and self.elim_k == k)

    def describe(self) -> str:
        blocks = "all" if self.blocks is None else "/".join(",".join(b) for b in self.blocks)
        pos = self.position if self.position != ELIM else f"elim({self.elim_k})"
        return f"blocks={blocks};position={pos}"


_BOUND: dict[tuple[TermOrder, "VarTable"], "BoundOrder"] = {}


class BoundOrder:
    """A term order specialised to one ring; keys are cached."""

    def __init__(self, order: TermOrder, ring: "VarTable"):
        self.order = order
        self.ring = ring
        self.blocks = order.block_slots(ring)
        self._mono_keys: dict[tuple, tuple] = {}
        self._keys: dict[tuple, tuple] = {}

    def mono_key(self, mono: tuple) -> tuple:
        k = self._mono_keys.get(mono)
        if k is None:
            parts: list[int] = []
            for block in self.blocks:
                parts.append(sum(mono[i] for i in block))
                parts.extend(-mono[i] for i in reversed(block))
            k = self._mono_keys[mono] = tuple(parts)
        return k

    def key(self, pos: int, mono: tuple) -> tuple:
        t = (pos, mono)
        k = self._keys.get(t)
        if k is None:
            mk = self.mono_key(mono)
            policy = self.order.position
            if policy == TOP:
                k = mk + (-pos,)
            elif policy == POT:
                k = (-pos,) + mk
            else:
                k = (1 if pos < self.order.elim_k else 0,) + mk + (-pos,)
            self._keys[t] = k
        return k

    def term_key(self, term: tuple[int, tuple]) -> tuple:
        return self.key(term[0], term[1])


def compare_monomials(order: TermOrder, ring: "VarTable", a: tuple, b: tuple) -> int:
    bound = order.bind(ring)
    ka, kb = bound.mono_key(a), bound.mono_key(b)
    return (ka > kb) - (ka < kb)


def compare_module_terms(order: TermOrder, ring: "VarTable", a: tuple[tuple, int], b: tuple[tuple, int]) -> int:
    """Compare ``(monomial, position)`` pairs."""
    bound = order.bind(ring)
    ka, kb = bound.key(a[1], a[0]), bound.key(b[1], b[0])
    return (ka > kb) - (ka < kb)


def grevlex(position: str = TOP, elim_k: int = 0) -> TermOrder:
    return TermOrder(None, position, elim_k)


def elimination(first: Sequence[str], *more: Sequence[str], position: str = TOP) -> TermOrder:
    """Block order ``first > more... > everything else``."""
    blocks = [tuple(first)] + [tuple(b) for b in more] + [(REST,)]
    return TermOrder(tuple(blocks), position)


def posfirst() -> TermOrder:
    return TermOrder(None, POT)


def parse_order(text: str) -> TermOrder:
    """CLI names: ``grevlex``, ``posfirst`` or ``elim:a,b/c,d`` (blocks split by ``/``)."""
    text = text.strip()
    if text == "grevlex":
        return grevlex()
    if text == "posfirst":
        return posfirst()
    if text.startswith("elim:"):
        body = text[len("elim:"):]
        blocks = [tuple(v.strip() for v in blk.split(",") if v.strip()) for blk in body.split("/")]
        blocks = [b for b in blocks if b]
        if not blocks:
            raise OrderError("empty elimination block list")
        return TermOrder(tuple(blocks) + ((REST,),))
    raise OrderError(f"unknown order name {text!r}")
