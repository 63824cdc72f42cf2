"""Finite rings given by full addition and multiplication tables.

Elements are plain ``int`` indices ``0 .. size-1``. A :class:`RingTable` is
immutable; derived data (negation, unit set, numpy views) is memoised on
first use.

Canonical encodings of the presets
----------------------------------
``modular(n)``
    element ``k`` is the residue ``k``.
``full_matrix(n, q)``
    an ``n x n`` matrix over GF(q) is encoded as ``sum_p d_p * q**p`` where
    ``p`` runs over the positions in row-major order and ``d_p`` is the
    index of the entry in GF(q).
``triangular(n, q)``
    as ``full_matrix`` but only positions ``(i, j)`` with ``i <= j`` are
    counted, again in row-major order.  For ``triangular(2, 2)`` the matrix
    ``((a, b), (0, c))`` is ``a + 2b + 4c``; so ``E11 = 1``, ``E12 = 2``,
    ``E22 = 4`` and the identity is ``5``.
``product(R1, ..., Rt)``
    mixed radix, first factor least significant.
GF(q)
    for ``q = p**e`` an element is the base-``p`` digit vector of its index,
    read as a polynomial in ``x`` reduced by the lexicographically smallest
    monic irreducible of degree ``e``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from .config import DEFAULT
from .errors import AxiomViolation, DimensionMismatch, InputError, RingMismatch, SizeCap

Table = tuple  # tuple[tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class RingTable:
    size: int
    add: Table
    mul: Table
    zero: int
    one: int
    name: str = "ring"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, RingTable):
            return NotImplemented
        return (self.size == other.size and self.zero == other.zero and self.one == other.one
                and self.add == other.add and self.mul == other.mul)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.size, self.zero, self.one, self.add, self.mul))

    def __repr__(self):
        return f"RingTable({self.name!r}, size={self.size})"

    @property
    def elements(self):
        return range(self.size)

    @cached_property
    def neg(self) -> tuple:
        out = [0] * self.size
        for a in range(self.size):
            row = self.add[a]
            out[a] = row.index(self.zero)
        return tuple(out)

    def sub(self, a, b):
        return self.add[a][self.neg[b]]

    def sum(self, items):
        s = self.zero
        add = self.add
        for x in items:
            s = add[s][x]
        return s

    def prod(self, items):
        p = self.one
        for x in items:
            p = self.mul[p][x]
        return p

    @cached_property
    def is_commutative(self) -> bool:
        mul = self.mul
        return all(mul[a][b] == mul[b][a] for a in range(self.size) for b in range(a))

    @cached_property
    def is_central(self) -> tuple:
        mul = self.mul
        n = self.size
        return tuple(all(mul[a][b] == mul[b][a] for b in range(n)) for a in range(n))

    @cached_property
    def np_add(self):
        return np.asarray(self.add, dtype=np.int32)

    @cached_property
    def np_mul(self):
        return np.asarray(self.mul, dtype=np.int32)

    @cached_property
    def unit_set(self) -> frozenset:
        return frozenset(units(self))

    @cached_property
    def characteristic(self) -> int:
        k, x = 1, self.one
        while x != self.zero:
            x = self.add[x][self.one]
            k += 1
        return k if self.size > 1 else 1

    def to_json(self):
        return {"kind": "tables", "name": self.name, "size": self.size,
                "add": [list(r) for r in self.add], "mul": [list(r) for r in self.mul],
                "zero": self.zero, "one": self.one}


# ---------------------------------------------------------------- validation

def verify_axioms(ring: RingTable):
    """Raise AxiomViolation with a witness if any ring axiom fails."""
    n = ring.size
    add, mul = ring.np_add, ring.np_mul
    idx = np.arange(n)
    for t in (add, mul):
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise AxiomViolation("tables closed on 0..size-1", (t.shape[0],))
    if not (0 <= ring.zero < n and 0 <= ring.one < n):
        raise AxiomViolation("zero/one in range", (ring.zero, ring.one))
    if n > 1 and ring.zero == ring.one:
        raise AxiomViolation("zero != one", (ring.zero,))

    bad = np.argwhere(add[ring.zero] != idx)
    if bad.size:
        raise AxiomViolation("additive identity", (ring.zero, int(bad[0][0])))
    bad = np.argwhere(add != add.T)
    if bad.size:
        raise AxiomViolation("additive commutativity", tuple(int(v) for v in bad[0]))
    for a in range(n):
        if ring.zero not in ring.add[a]:
            raise AxiomViolation("additive inverse", (a,))
    bad = np.argwhere(mul[ring.one] != idx)
    if bad.size:
        raise AxiomViolation("left identity", (ring.one, int(bad[0][0])))
    bad = np.argwhere(mul[:, ring.one] != idx)
    if bad.size:
        raise AxiomViolation("right identity", (int(bad[0][0]), ring.one))

    # three-variable identities, chunked over the first variable
    for a in range(n):
        # (a+b)+c == a+(b+c)
        lhs = add[add[a]][:, :]          # [b, c] -> (a+b)+c
        rhs = add[a][add]                # [b, c] -> a+(b+c)
        _witness(lhs != rhs, "additive associativity", a)
        lhs = mul[mul[a]][:, :]          # (ab)c
        rhs = mul[a][mul]                # a(bc)
        _witness(lhs != rhs, "multiplicative associativity", a)
        lhs = mul[a][add]                # a(b+c)
        rhs = add[mul[a][:, None], mul[a][None, :]]
        _witness(lhs != rhs, "left distributivity", a)
        lhs = mul[add[a]][:, :]          # (a+b)c  indexed [b, c]
        rhs = add[mul[a][None, :], mul]  # ac + bc
        _witness(lhs != rhs, "right distributivity", a)


def _witness(mask, axiom, a):
    hit = np.argwhere(mask)
    if hit.size:
        b, c = (int(v) for v in hit[0])
        raise AxiomViolation(axiom, (a, b, c))


def make_ring_from_tables(add, mul, zero=0, one=1, name="ring", validate=True) -> RingTable:
    try:
        add_t = tuple(tuple(int(x) for x in row) for row in add)
        mul_t = tuple(tuple(int(x) for x in row) for row in mul)
    except (TypeError, ValueError) as exc:
        raise InputError(f"tables must be integer matrices: {exc}") from exc
    n = len(add_t)
    if n == 0 or len(mul_t) != n or any(len(r) != n for r in add_t + mul_t):
        raise AxiomViolation("tables are square of equal size", (n,))
    ring = RingTable(n, add_t, mul_t, int(zero), int(one), name)
    if validate:
        verify_axioms(ring)
    return ring


# ------------------------------------------------------------- finite fields

def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise InputError(f"{q} is not a prime power")
            return p, e
    raise InputError(f"{q} is not a prime power")


def _poly_mulmod(a, b, modulus, p):
    # polynomials as coefficient lists, low degree first; modulus monic
    e = len(modulus) - 1
    out = [0] * (2 * e - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for d in range(len(out) - 1, e - 1, -1):
        c = out[d]
        if c:
            for k in range(e + 1):
                out[d - e + k] = (out[d - e + k] - c * modulus[k]) % p
    return out[:e]


def _irreducible(p, e):
    if e == 1:
        return [0, 1]
    for tail in itertools.product(range(p), repeat=e):
        poly = list(tail) + [1]
        if poly[0] == 0:
            continue
        # no roots is enough for e <= 3; check all monic factors of degree <= e//2 otherwise
        if not any(_divides(f, poly, p) for d in range(1, e // 2 + 1)
                   for f in (list(t) + [1] for t in itertools.product(range(p), repeat=d))):
            return poly
    raise InputError(f"no irreducible of degree {e} over GF({p})")


def _divides(f, g, p):
    g = list(g)
    df = len(f) - 1
    inv = pow(f[-1], p - 2, p)
    while len(g) - 1 >= df and any(g):
        c = g[-1] * inv % p
        shift = len(g) - 1 - df
        for k in range(df + 1):
            g[shift + k] = (g[shift + k] - c * f[k]) % p
        while g and g[-1] == 0:
            g.pop()
    return not any(g)


def field_tables(q):
    """Addition and multiplication tables of GF(q), q a prime power."""
    p, e = _factor_prime_power(q)
    digits = [[(x // p ** i) % p for i in range(e)] for x in range(q)]
    enc = {tuple(d): x for x, d in enumerate(digits)}
    modulus = _irreducible(p, e)
    add = tuple(tuple(enc[tuple((a + b) % p for a, b in zip(digits[x], digits[y]))]
                      for y in range(q)) for x in range(q))
    mul = tuple(tuple(enc[tuple(_poly_mulmod(digits[x], digits[y], modulus, p))]
                      for y in range(q)) for x in range(q))
    return add, mul


# ------------------------------------------------------------------- presets

def galois_field(q, limits=DEFAULT):
    if q > limits.field_order ** 4 or q > limits.ring_size:
        raise SizeCap(f"field({q}) exceeds the cap")
    add, mul = field_tables(q)
    return RingTable(q, add, mul, 0, 1, f"field({q})")


def modular(n, limits=DEFAULT):
    if n < 1:
        raise InputError("modular(n) needs n >= 1")
    if n > limits.ring_size:
        raise SizeCap(f"modular({n}) exceeds ring cap {limits.ring_size}")
    add = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    mul = tuple(tuple((a * b) % n for b in range(n)) for a in range(n))
    return RingTable(n, add, mul, 0, 1 % n, f"modular({n})")


def _matrix_ring(n, q, positions, label, limits):
    if n < 1:
        raise InputError(f"{label} needs n >= 1")
    if q > limits.field_order:
        raise SizeCap(f"field order {q} exceeds cap {limits.field_order}")
    size = q ** len(positions)
    if size > limits.ring_size:
        raise SizeCap(f"{label} would have {size} elements (cap {limits.ring_size})")
    fadd, fmul = field_tables(q)
    slot = {pos: k for k, pos in enumerate(positions)}

    def decode(x):
        m = [[0] * n for _ in range(n)]
        for (i, j) in positions:
            m[i][j] = x % q
            x //= q
        return m

    def encode(m):
        return sum(m[i][j] * q ** slot[(i, j)] for (i, j) in positions)

    mats = [decode(x) for x in range(size)]
    add = tuple(tuple(encode([[fadd[a[i][j]][b[i][j]] for j in range(n)] for i in range(n)])
                      for b in mats) for a in mats)

    def mm(a, b):
        out = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                s = 0
                for k in range(n):
                    s = fadd[s][fmul[a[i][k]][b[k][j]]]
                out[i][j] = s
        return out

    mul = tuple(tuple(encode(mm(a, b)) for b in mats) for a in mats)
    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return RingTable(size, add, mul, 0, encode(ident), label)


def triangular(n, q, limits=DEFAULT):
    positions = [(i, j) for i in range(n) for j in range(i, n)]
    return _matrix_ring(n, q, positions, f"triangular({n},{q})", limits)


def full_matrix(n, q, limits=DEFAULT):
    positions = [(i, j) for i in range(n) for j in range(n)]
    return _matrix_ring(n, q, positions, f"full_matrix({n},{q})", limits)


def product(*rings, limits=DEFAULT):
    if not rings:
        raise InputError("product needs at least one factor")
    size = reduce(lambda a, r: a * r.size, rings, 1)
    if size > limits.ring_size:
        raise SizeCap(f"product would have {size} elements (cap {limits.ring_size})")
    radix = [r.size for r in rings]

    def decode(x):
        out = []
        for s in radix:
            out.append(x % s)
            x //= s
        return out

    def encode(cs):
        x, w = 0, 1
        for c, s in zip(cs, radix):
            x += c * w
            w *= s
        return x

    tup = [decode(x) for x in range(size)]
    add = tuple(tuple(encode([r.add[a][b] for r, a, b in zip(rings, u, v)]) for v in tup) for u in tup)
    mul = tuple(tuple(encode([r.mul[a][b] for r, a, b in zip(rings, u, v)]) for v in tup) for u in tup)
    name = "product(" + ",".join(r.name for r in rings) + ")"
    return RingTable(size, add, mul, encode([r.zero for r in rings]), encode([r.one for r in rings]), name)


_PRESET_RE = re.compile(r"^\s*(\w+)\s*[\(\-]?\s*(.*?)\s*\)?\s*$")


def preset_ring(kind, *args, limits=DEFAULT) -> RingTable:
    """Build a preset ring: ``preset_ring("triangular", 2, 2)``."""
    kind = kind.replace("-", "_")
    if kind == "modular":
        return modular(*args, limits=limits)
    if kind == "field":
        return galois_field(*args, limits=limits)
    if kind == "triangular":
        return triangular(*args, limits=limits)
    if kind == "full_matrix":
        return full_matrix(*args, limits=limits)
    if kind == "product":
        return product(*args, limits=limits)
    raise InputError(f"unknown preset kind {kind!r}")


def parse_preset(name, limits=DEFAULT) -> RingTable:
    """Resolve preset names such as ``triangular-2-2``, ``modular(6)`` or
    ``product(modular-2,modular-3)``."""
    name = name.strip()
    if name.startswith("product"):
        inner = name[len("product"):].strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise InputError(f"bad product preset {name!r}")
        return product(*(parse_preset(p, limits) for p in _split_top(inner[1:-1])), limits=limits)
    m = re.fullmatch(r"(modular|field|triangular|full_matrix|full-matrix)[\-\(]([0-9,\- ]+)\)?", name)
    if not m:
        raise InputError(f"unknown ring preset {name!r}")
    args = [int(a) for a in re.split(r"[,\-]", m.group(2)) if a.strip()]
    return preset_ring(m.group(1), *args, limits=limits)


def _split_top(s):
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        parts.append(cur)
    return [p.strip() for p in parts]


# ------------------------------------------------------------ derived rings

def units(ring: RingTable):
    hit = ring.np_mul == ring.one
    return [int(u) for u in np.flatnonzero((hit & hit.T).any(axis=1))]


def opposite_ring(ring: RingTable) -> RingTable:
    mul = tuple(tuple(ring.mul[b][a] for b in ring.elements) for a in ring.elements)
    name = ring.name[4:-1] if ring.name.startswith("opp(") else f"opp({ring.name})"
    return RingTable(ring.size, ring.add, mul, ring.zero, ring.one, name)


@dataclass(frozen=True)
class Quotient:
    """``ring / ideal`` with the projection.  Cosets are numbered by their
    smallest representative, in increasing order."""
    ring: RingTable
    source: RingTable
    proj: tuple          # source element -> quotient element
    reps: tuple          # quotient element -> smallest source representative

    def lift(self, x):
        return self.reps[x]


def quotient_ring(ring: RingTable, ideal_elements, name=None) -> Quotient:
    ideal = sorted(set(ideal_elements))
    proj = [-1] * ring.size
    reps = []
    for x in ring.elements:
        if proj[x] >= 0:
            continue
        q = len(reps)
        reps.append(x)
        for i in ideal:
            proj[ring.add[x][i]] = q
    n = len(reps)
    add = tuple(tuple(proj[ring.add[a][b]] for b in reps) for a in reps)
    mul = tuple(tuple(proj[ring.mul[a][b]] for b in reps) for a in reps)
    label = name or f"{ring.name}/<{len(ideal)}>"
    qring = RingTable(n, add, mul, proj[ring.zero], proj[ring.one], label)
    return Quotient(qring, ring, tuple(proj), tuple(reps))


# ------------------------------------------------------------------ matrices

@dataclass(frozen=True)
class RingMatrix:
    ring: RingTable = field(repr=False)
    rows: int
    cols: int
    entries: tuple   # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries")

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries) \
            and self.ring == other.ring

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return self.entries[j::self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self):
        return self.rows, self.cols

    def nonzero(self):
        z = self.ring.zero
        c = self.cols
        return [(k // c, k % c, x) for k, x in enumerate(self.entries) if x != z]

    def is_zero(self):
        z = self.ring.zero
        return all(x == z for x in self.entries)

    def __add__(self, other):
        return matrix_arithmetic("add", self, other)

    def __sub__(self, other):
        return matrix_arithmetic("add", self, other.neg())

    def __matmul__(self, other):
        return matrix_arithmetic("mul", self, other)

    def neg(self):
        return RingMatrix(self.ring, self.rows, self.cols, tuple(self.ring.neg[x] for x in self.entries))

    def map(self, f, ring=None):
        return RingMatrix(ring or self.ring, self.rows, self.cols, tuple(f(x) for x in self.entries))

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return RingMatrix(self.ring, len(rows), len(cols),
                          tuple(self.entries[i * self.cols + j] for i in rows for j in cols))

    def transpose(self):
        return RingMatrix(self.ring, self.cols, self.rows,
                          tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))


def matrix(ring, rows):
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        raise DimensionMismatch("matrices must be nonempty")
    c = len(rows[0])
    if any(len(r) != c for r in rows):
        raise DimensionMismatch("ragged matrix")
    for r in rows:
        for x in r:
            if not (0 <= x < ring.size):
                raise InputError(f"entry {x} is not an element of {ring.name}")
    return RingMatrix(ring, len(rows), c, tuple(int(x) for r in rows for x in r))


def column(ring, values):
    return matrix(ring, [[v] for v in values])


def zeros(ring, rows, cols):
    return RingMatrix(ring, rows, cols, (ring.zero,) * (rows * cols))


def identity(ring, n):
    z, o = ring.zero, ring.one
    return RingMatrix(ring, n, n, tuple(o if i == j else z for i in range(n) for j in range(n)))


def _check_ring(a, b):
    if a.ring is not b.ring and a.ring != b.ring:
        raise RingMismatch(f"{a.ring.name} vs {b.ring.name}")


def matrix_arithmetic(op, a: RingMatrix, b: RingMatrix) -> RingMatrix:
    _check_ring(a, b)
    ring = a.ring
    if op == "add":
        if a.shape != b.shape:
            raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
        add = ring.add
        return RingMatrix(ring, a.rows, a.cols, tuple(add[x][y] for x, y in zip(a.entries, b.entries)))
    if op == "mul":
        if a.cols != b.rows:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
        add, mul, z = ring.add, ring.mul, ring.zero
        n = b.cols
        # sparse on both sides: the telescopes are mostly block diagonal
        brows = []
        for k in range(b.rows):
            brows.append([(j, x) for j, x in enumerate(b.entries[k * n:(k + 1) * n]) if x != z])
        out = [z] * (a.rows * n)
        for i in range(a.rows):
            base = i * n
            for k, x in enumerate(a.entries[i * a.cols:(i + 1) * a.cols]):
                if x == z:
                    continue
                mx = mul[x]
                for j, y in brows[k]:
                    out[base + j] = add[out[base + j]][mx[y]]
        return RingMatrix(ring, a.rows, n, tuple(out))
    raise InputError(f"unknown matrix op {op!r}")


def chain_product(mats):
    """``mats[-1] @ ... @ mats[0]`` (composition of maps applied first to last)."""
    out = mats[0]
    for m in mats[1:]:
        out = m @ out
    return out


def block_diag(blocks):
    ring = blocks[0].ring
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [ring.zero] * (rows * cols)
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[(r0 + i) * cols + c0 + j] = b.entries[i * b.cols + j]
        r0 += b.rows
        c0 += b.cols
    return RingMatrix(ring, rows, cols, tuple(out))


def hstack(blocks):
    blocks = [b for b in blocks if b.cols]
    rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise DimensionMismatch("hstack needs equal row counts")
    out = []
    for i in range(rows):
        for b in blocks:
            out.extend(b.row(i))
    return RingMatrix(blocks[0].ring, rows, sum(b.cols for b in blocks), tuple(out))


def vstack(blocks):
    blocks = [b for b in blocks if b.rows]
    cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise DimensionMismatch("vstack needs equal column counts")
    return RingMatrix(blocks[0].ring, sum(b.rows for b in blocks), cols,
                      tuple(x for b in blocks for x in b.entries))
