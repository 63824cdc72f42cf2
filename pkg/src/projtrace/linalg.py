"""Additive structure of tabulated rings and spans of vectors over them.

When the characteristic is a prime ``p`` the additive group of the ring is
an F_p vector space, so a right submodule of ``R^m`` spanned by vectors
``v_1..v_n`` is the F_p span of ``{v_j * s}`` as ``s`` runs over an F_p
basis of ``R`` (and symmetrically for left spans).  That turns every span,
membership and solve question into Gaussian elimination.  For other
characteristics the span is enumerated, subject to ``Limits.span``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .config import DEFAULT
from .errors import NotFound, SizeCap
from .ring import RingMatrix, RingTable


def additive_closure(ring: RingTable, gens, start=None) -> frozenset:
    """Smallest additive subgroup containing ``gens`` (and ``start``)."""
    add = ring.add
    group = set(start) if start is not None else {ring.zero}
    for g in gens:
        if g in group:
            continue
        base = list(group)
        cur = base
        while True:
            cur = [add[x][g] for x in cur]
            if cur[0] in group:
                break
            group.update(cur)
    return frozenset(group)


def additive_generators(ring: RingTable, elements) -> list:
    """Greedy lowest-index generating set of an additive subgroup."""
    gens, group = [], frozenset({ring.zero})
    for x in sorted(elements):
        if x not in group:
            gens.append(x)
            group = additive_closure(ring, [x], group)
    return gens


def int_multiple(ring: RingTable, n: int, x: int) -> int:
    out, add = ring.zero, ring.add
    for _ in range(n):
        out = add[out][x]
    return out


def _prime_power(n):
    for p in range(2, n + 1):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            return (p, e) if n == 1 else None
    return None


@dataclass(frozen=True)
class Frame:
    """F_p coordinates for the additive group of a ring (``p`` prime), or a
    plain additive generating set when the characteristic is composite."""
    ring: RingTable
    p: int                 # 0 when no F_p structure
    basis: tuple           # additive generators; an F_p basis when p > 0
    coords: tuple          # element -> tuple of e coordinates (p > 0 only)
    bits: tuple            # element -> packed int (p == 2 only)

    @property
    def e(self):
        return len(self.basis)


@lru_cache(maxsize=64)
def frame(ring: RingTable) -> Frame:
    char = ring.characteristic
    pe = _prime_power(ring.size) if ring.size > 1 else None
    if ring.size == 1:
        return Frame(ring, 2, (), ((),), (0,))
    if pe is None or pe[0] != char:
        return Frame(ring, 0, tuple(additive_generators(ring, ring.elements)), (), ())
    p, e = pe
    basis = tuple(additive_generators(ring, ring.elements))
    assert len(basis) == e
    coords = [None] * ring.size
    mults = [[int_multiple(ring, c, b) for c in range(p)] for b in basis]
    for cs in itertools.product(range(p), repeat=e):
        x = ring.sum(mults[i][c] for i, c in enumerate(cs))
        coords[x] = cs
    bits = ()
    if p == 2:
        bits = tuple(sum(c << i for i, c in enumerate(cs)) for cs in coords)
    return Frame(ring, p, basis, tuple(coords), bits)


class VectorSpan:
    """Additive subgroup of ``R^length`` grown one generator at a time.

    Generators may carry a label; :meth:`express` then returns a mapping
    ``label -> integer multiplicity`` whose weighted sum is the query.
    """

    def __init__(self, ring: RingTable, length: int, track=False, limits=DEFAULT):
        self.ring = ring
        self.length = length
        self.track = track
        self.limits = limits
        self.fr = frame(ring)
        self.labels = []
        if self.fr.p:
            self._pivots = {}          # pivot -> (vector, combination)
        else:
            z = (ring.zero,) * length
            self._elems = {z: ()} if track else {z: None}

    # -- encoding -----------------------------------------------------
    def _encode(self, vec):
        fr = self.fr
        if fr.p == 2:
            e, out = fr.e, 0
            for i, x in enumerate(vec):
                out |= fr.bits[x] << (i * e)
            return out
        return [c for x in vec for c in fr.coords[x]]

    # -- F_p elimination --------------------------------------------------
    def _reduce(self, v, comb):
        p = self.fr.p
        if p == 2:
            while v:
                h = v.bit_length() - 1
                row = self._pivots.get(h)
                if row is None:
                    return v, comb, h
                v ^= row[0]
                if comb is not None:
                    comb ^= row[1]
            return 0, comb, None
        v = list(v)
        for h in range(len(v)):
            if v[h] % p == 0:
                v[h] = 0
                continue
            row = self._pivots.get(h)
            if row is None:
                inv = pow(v[h], p - 2, p)
                v = [(x * inv) % p for x in v]
                if comb is not None:
                    comb = [(x * inv) % p for x in comb]
                return v, comb, h
            f = v[h]
            v = [(a - f * b) % p for a, b in zip(v, row[0])]
            if comb is not None:
                comb = [(a - f * b) % p for a, b in zip(comb, _pad(row[1], len(comb)))]
        return None, comb, None

    def add(self, vec, label=None) -> bool:
        """Add a generator; return True if the span grew."""
        idx = len(self.labels)
        self.labels.append(label)
        if self.fr.p:
            v = self._encode(vec)
            comb = None
            if self.track:
                comb = (1 << idx) if self.fr.p == 2 else [0] * idx + [1]
            if self.fr.p != 2 and comb is not None:
                comb = comb + []
            r, comb, h = self._reduce(v, comb)
            if h is None:
                return False
            self._pivots[h] = (r, comb)
            return True
        return self._add_enum(tuple(vec), idx)

    def _add_enum(self, vec, idx):
        if vec in self._elems:
            return False
        add = self.ring.add
        grown = dict(self._elems)
        cur = list(self._elems.items())
        k = 0
        while True:
            k += 1
            cur = [(tuple(add[a][b] for a, b in zip(v, vec)), c) for v, c in cur]
            if cur[0][0] in grown:
                break
            for v, c in cur:
                grown[v] = None if c is None else _bump(c, idx, k)
            if len(grown) > self.limits.span:
                raise SizeCap(f"span enumeration exceeds {self.limits.span} vectors")
        self._elems = grown
        return True

    def contains(self, vec) -> bool:
        if self.fr.p:
            r, _, h = self._reduce(self._encode(vec), None)
            return h is None
        return tuple(vec) in self._elems

    def express(self, vec):
        """``{label: multiplicity}`` summing to ``vec``, or None."""
        if not self.track:
            raise ValueError("span was built without tracking")
        if self.fr.p:
            p = self.fr.p
            zero_comb = 0 if p == 2 else [0] * len(self.labels)
            v = self._encode(vec)
            # reduce while accumulating the combination used
            r, comb, h = self._reduce(v, zero_comb)
            if h is not None:
                return None
            out = {}
            if p == 2:
                for i in range(len(self.labels)):
                    if comb >> i & 1:
                        out[i] = 1
            else:
                # reduction subtracted the combination: vec - sum(comb) = 0 so use -comb
                for i, c in enumerate(_pad(comb, len(self.labels))):
                    c = (-c) % p
                    if c:
                        out[i] = c
            return {self.labels[i]: m for i, m in out.items()}
        c = self._elems.get(tuple(vec), False)
        if c is False:
            return None
        return {self.labels[i]: m for i, m in enumerate(c) if m}

    @property
    def dim(self):
        """F_p dimension (prime characteristic only)."""
        return len(self._pivots)

    @property
    def size(self):
        if self.fr.p:
            return self.fr.p ** len(self._pivots)
        return len(self._elems)

    def signature(self):
        """Canonical, hashable description of the subgroup."""
        if self.fr.p:
            basis = _rref(self.fr.p, self._pivots)
            return (self.fr.p, basis)
        return frozenset(self._elems)


def _pad(comb, n):
    return list(comb) + [0] * (n - len(comb))


def _bump(c, idx, k):
    c = list(c) + [0] * (idx + 1 - len(c))
    c[idx] += k
    return tuple(c)


def _rref(p, pivots):
    if p == 2:
        rows = {h: v for h, (v, _) in pivots.items()}
        for h in sorted(rows):
            for h2 in rows:
                if h2 != h and rows[h2] >> h & 1:
                    rows[h2] ^= rows[h]
        return tuple(sorted(rows.values()))
    rows = {h: list(v) for h, (v, _) in pivots.items()}
    for h in sorted(rows):
        for h2 in rows:
            if h2 != h and rows[h2][h]:
                f = rows[h2][h]
                rows[h2] = [(a - f * b) % p for a, b in zip(rows[h2], rows[h])]
    return tuple(sorted(tuple(v) for v in rows.values()))


# ------------------------------------------------------------------ helpers

def left_scale(ring, s, vec):
    m = ring.mul[s]
    return tuple(m[x] for x in vec)


def right_scale(ring, vec, s):
    mul = ring.mul
    return tuple(mul[x][s] for x in vec)


def right_column_span(M: RingMatrix, limits=DEFAULT, span=None) -> VectorSpan:
    """Right submodule of ``R^rows`` spanned by the columns of ``M``."""
    ring = M.ring
    span = span or VectorSpan(ring, M.rows, limits=limits)
    gens = frame(ring).basis
    for j in range(M.cols):
        col = M.col(j)
        for s in gens:
            span.add(right_scale(ring, col, s))
    return span


def left_row_span(M: RingMatrix, limits=DEFAULT) -> VectorSpan:
    """Left submodule of row vectors ``R^cols`` spanned by the rows of ``M``."""
    ring = M.ring
    span = VectorSpan(ring, M.cols, limits=limits)
    gens = frame(ring).basis
    for i in range(M.rows):
        row = M.row(i)
        for s in gens:
            span.add(left_scale(ring, s, row))
    return span


def solve_rows(M: RingMatrix, N: RingMatrix, coeffs=None, limits=DEFAULT) -> RingMatrix:
    """Find ``C`` with ``C @ M == N``; entries of ``C`` drawn from the additive
    subgroup generated by ``coeffs`` (default: the whole ring).  Raises
    NotFound naming the first unsolvable row."""
    ring = M.ring
    if coeffs is None:
        gens = list(frame(ring).basis)
    else:
        gens = additive_generators(ring, additive_closure(ring, coeffs))
    span = VectorSpan(ring, M.cols, track=True, limits=limits)
    for t in range(M.rows):
        row = M.row(t)
        for s in gens:
            span.add(left_scale(ring, s, row), (s, t))
    out = []
    for i in range(N.rows):
        combo = span.express(N.row(i))
        if combo is None:
            raise NotFound(f"row {i} is not in the span", row=i)
        coeff = [ring.zero] * M.rows
        for (s, t), mlt in combo.items():
            coeff[t] = ring.add[coeff[t]][int_multiple(ring, mlt, s)]
        out.extend(coeff)
    C = RingMatrix(ring, N.rows, M.rows, tuple(out))
    assert C @ M == N
    return C
