"""Ideals of tabulated rings.

An :class:`IdealHandle` stores its full element set, so membership is a set
lookup and equality of ideals is equality of sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import DEFAULT
from .errors import InputError, PreconditionFailed, RingMismatch, SizeCap
from .linalg import additive_closure, additive_generators, frame
from .ring import RingTable, quotient_ring

SIDES = ("left", "right", "two_sided")


@dataclass(frozen=True, eq=False)
class IdealHandle:
    ring: RingTable = field(repr=False)
    side: str
    generators: tuple
    elements: frozenset

    def __post_init__(self):
        if self.side not in SIDES:
            raise InputError(f"unknown side {self.side!r}")

    def __eq__(self, other):
        if not isinstance(other, IdealHandle):
            return NotImplemented
        return self.side == other.side and self.elements == other.elements and self.ring == other.ring

    def __hash__(self):
        return hash((self.side, self.elements))

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def __le__(self, other):
        return self.elements <= other.elements

    def __lt__(self, other):
        return self.elements < other.elements

    @property
    def members(self) -> tuple:
        return tuple(sorted(self.elements))

    @property
    def is_zero(self):
        return len(self.elements) == 1

    @property
    def is_whole(self):
        return len(self.elements) == self.ring.size

    def as_side(self, side):
        """The same element set viewed with another side (caller vouches)."""
        return IdealHandle(self.ring, side, self.generators, self.elements)

    def to_json(self):
        return {"side": self.side, "gens": list(self.generators), "elements": list(self.members)}

    def __repr__(self):
        return f"IdealHandle({self.side}, gens={list(self.generators)}, size={len(self.elements)})"


def _span_left(ring, xs):
    basis = frame(ring).basis or (ring.one,)
    mul = ring.mul
    return additive_closure(ring, [mul[s][x] for x in xs for s in basis])


def _span_right(ring, xs):
    basis = frame(ring).basis or (ring.one,)
    mul = ring.mul
    return additive_closure(ring, [mul[x][s] for x in xs for s in basis])


def _closure_elements(ring, gens, side):
    gens = list(gens)
    if side == "left":
        return _span_left(ring, gens)
    if side == "right":
        return _span_right(ring, gens)
    left = _span_left(ring, gens)
    return _span_right(ring, additive_generators(ring, left))


def close(ring: RingTable, gens, side="two_sided") -> IdealHandle:
    if side not in SIDES:
        raise InputError(f"unknown side {side!r}")
    gens = tuple(dict.fromkeys(int(g) for g in gens))
    for g in gens:
        if not 0 <= g < ring.size:
            raise InputError(f"{g} is not an element of {ring.name}")
    return IdealHandle(ring, side, gens, _closure_elements(ring, gens, side))


def minimal_generators(ring, elements, side) -> tuple:
    """Greedy generating set: take the lowest element not yet generated, then
    drop any generator whose removal keeps the closure."""
    elements = frozenset(elements)
    gens = []
    cur = frozenset({ring.zero})
    for x in sorted(elements):
        if x not in cur:
            gens.append(x)
            cur = _closure_elements(ring, gens, side)
            if cur == elements:
                break
    for g in list(gens):
        trial = [h for h in gens if h != g]
        if _closure_elements(ring, trial, side) == elements:
            gens = trial
    return tuple(gens)


def from_elements(ring, elements, side) -> IdealHandle:
    elements = frozenset(elements)
    return IdealHandle(ring, side, minimal_generators(ring, elements, side), elements)


def zero_ideal(ring, side="two_sided"):
    return IdealHandle(ring, side, (), frozenset({ring.zero}))


def unit_ideal(ring, side="two_sided"):
    return IdealHandle(ring, side, (ring.one,), frozenset(ring.elements))


def _check_same_ring(I, J):
    if I.ring is not J.ring and I.ring != J.ring:
        raise RingMismatch(f"{I.ring.name} vs {J.ring.name}")


def _meet_side(a, b):
    if a == b:
        return a
    if "two_sided" in (a, b):
        return b if a == "two_sided" else a
    return None


def product_elements(ring, A, B):
    mul = ring.mul
    ga = additive_generators(ring, A)
    gb = additive_generators(ring, B)
    return additive_closure(ring, [mul[a][b] for a in ga for b in gb])


def ideal_op(op, I: IdealHandle, J: IdealHandle) -> IdealHandle:
    """``sum``, ``product`` or ``intersection``.  The product ``IJ`` is the
    additive span of all ``ab``; it is left-closed when ``I`` is and
    right-closed when ``J`` is, which fixes the side of the result."""
    _check_same_ring(I, J)
    ring = I.ring
    if op == "sum":
        side = _meet_side(I.side, J.side)
        if side is None:
            raise PreconditionFailed("sum of a left and a right ideal is not an ideal")
        gens = tuple(dict.fromkeys(I.generators + J.generators))
        return IdealHandle(ring, side, gens, additive_closure(ring, I.elements | J.elements))
    if op == "intersection":
        side = _meet_side(I.side, J.side)
        if side is None:
            raise PreconditionFailed("intersection of a left and a right ideal is not an ideal")
        return from_elements(ring, I.elements & J.elements, side)
    if op == "product":
        left = I.side in ("left", "two_sided")
        right = J.side in ("right", "two_sided")
        if left and right:
            side = "two_sided"
        elif left:
            side = "left"
        elif right:
            side = "right"
        else:
            raise PreconditionFailed("product of a right ideal by a left ideal is not one-sided closed")
        return from_elements(ring, product_elements(ring, I.elements, J.elements), side)
    raise InputError(f"unknown ideal op {op!r}")


def is_idempotent(I: IdealHandle) -> bool:
    return product_elements(I.ring, I.elements, I.elements) == I.elements


def two_sided_closure(I: IdealHandle) -> IdealHandle:
    if I.side == "two_sided":
        return I
    ring = I.ring
    gens = I.generators or tuple(additive_generators(ring, I.elements))
    return from_elements(ring, _closure_elements(ring, gens, "two_sided"), "two_sided")


def power_omega(I: IdealHandle) -> IdealHandle:
    """Intersection of all powers; over a finite ring the powers stabilise."""
    cur = I.elements
    while True:
        nxt = product_elements(I.ring, cur, I.elements)
        if nxt == cur:
            return from_elements(I.ring, cur, I.side)
        cur = nxt


# ----------------------------------------------------------------- radical

def jacobson_elements(ring: RingTable) -> frozenset:
    is_unit = np.zeros(ring.size, dtype=bool)
    is_unit[list(ring.unit_set)] = True
    neg = np.asarray(ring.neg)
    one_minus = ring.np_add[ring.one][neg[ring.np_mul]]   # [r, x] -> 1 - r x
    ok = is_unit[one_minus].all(axis=0)
    return frozenset(int(x) for x in np.flatnonzero(ok))


def jacobson_radical(ring: RingTable) -> IdealHandle:
    return from_elements(ring, jacobson_elements(ring), "two_sided")


def is_semisimple_quotient(ring: RingTable, I: IdealHandle) -> bool:
    if I.side != "two_sided":
        raise PreconditionFailed("quotients need a two-sided ideal")
    q = quotient_ring(ring, I.elements).ring
    return len(jacobson_elements(q)) == 1


# ------------------------------------------------------------------ census

def _census_key(elements):
    return (len(elements), tuple(sorted(elements)))


@lru_cache(maxsize=32)
def _census(ring: RingTable, side: str, cap: int):
    if ring.size > cap:
        raise SizeCap(f"ideal census needs size <= {cap}, got {ring.size}")
    zero = frozenset({ring.zero})
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for E in frontier:
            gens = additive_generators(ring, E)
            for x in ring.elements:
                if x in E:
                    continue
                F = _closure_elements(ring, gens + [x], side)
                if F not in seen:
                    seen.add(F)
                    nxt.append(F)
        frontier = nxt
    return tuple(sorted(seen, key=_census_key))


def enumerate_ideals(ring: RingTable, side="two_sided", limits=DEFAULT):
    if side not in SIDES:
        raise InputError(f"unknown side {side!r}")
    return [from_elements(ring, E, side) for E in _census(ring, side, limits.oracle_size)]


def maximal_two_sided_ideals(ring: RingTable, limits=DEFAULT):
    proper = [I for I in enumerate_ideals(ring, "two_sided", limits) if not I.is_whole]
    return [I for I in proper if not any(I.elements < K.elements for K in proper)]


def census_index(I: IdealHandle, limits=DEFAULT):
    for k, K in enumerate(enumerate_ideals(I.ring, I.side, limits)):
        if K.elements == I.elements:
            return k
    raise InputError("ideal not found in census")


# ------------------------------------------------------------------ purity

def is_left_pure(K: IdealHandle) -> bool:
    """Every ``x`` in ``K`` has a local right unit ``x e = x`` inside ``K``."""
    mul = K.ring.mul
    return all(any(mul[x][e] == x for e in K.elements) for x in K.elements)


def is_right_pure(K: IdealHandle) -> bool:
    """Every ``x`` in ``K`` has a local left unit ``e x = x`` inside ``K``."""
    mul = K.ring.mul
    return all(any(mul[e][x] == x for e in K.elements) for x in K.elements)
