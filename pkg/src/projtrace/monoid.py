"""Submonoids of ``(N0*)^k`` cut out by congruences, and dimension vectors.

``N0* = N0 ∪ {INF}`` with ``INF + x = INF``, ``INF * 0 = 0`` and
``INF * n = INF`` for ``n > 0``.  A :class:`CongruenceSystem` with rows
``a_1..a_n`` and moduli ``m_1..m_n`` defines ``M = {x : a_r . x ∈ m_r N0*}``;
a row value lies in ``m N0*`` when it is ``INF`` or divisible by ``m``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .config import DEFAULT
from .errors import DimensionMismatch, InputError, NotMember, PreconditionFailed, SearchCap, Undetermined
from .ideals import enumerate_ideals, jacobson_radical, maximal_two_sided_ideals
from .linalg import frame, right_column_span
from .ring import RingMatrix
from .telescope import Telescope, _measure, reduce_telescope, verify_certificates


class _Inf:
    __slots__ = ()

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_inf, ())


def _inf():
    return INF


INF = _Inf()


def is_inf(x):
    return x is INF


def ext_add(a, b):
    if a is INF or b is INF:
        return INF
    return a + b


def ext_mul(a, b):
    if a == 0 or b == 0:
        return 0
    if a is INF or b is INF:
        return INF
    return a * b


def extnat_arith(op, a, b):
    if op in ("+", "add"):
        return ext_add(a, b)
    if op in ("*", "mul"):
        return ext_mul(a, b)
    raise InputError(f"unknown operation {op!r}")


def parse_extnat(s):
    s = str(s).strip().lower()
    if s in ("inf", "∞", "infinity"):
        return INF
    v = int(s)
    if v < 0:
        raise InputError("extended naturals are nonnegative")
    return v


def format_extnat(x):
    return "inf" if x is INF else str(x)


def parse_vector(text) -> tuple:
    """``"1,inf"`` -> ``(1, INF)``."""
    return tuple(parse_extnat(p) for p in str(text).split(",") if p.strip())


def format_vector(x) -> str:
    return "(" + ",".join(format_extnat(c) for c in x) + ")"


def vec_add(x, y):
    return tuple(ext_add(a, b) for a, b in zip(x, y))


def _sort_key(x):
    return tuple((1, 0) if c is INF else (0, c) for c in x)


def supports(x) -> tuple:
    """1-based ``(supp, inf_supp)``."""
    supp = frozenset(i + 1 for i, c in enumerate(x) if c is INF or c != 0)
    inf = frozenset(i + 1 for i, c in enumerate(x) if c is INF)
    return supp, inf


@dataclass(frozen=True)
class CongruenceSystem:
    k: int
    rows: tuple
    moduli: tuple

    def __post_init__(self):
        if len(self.rows) != len(self.moduli):
            raise DimensionMismatch("one modulus per row")
        for r in self.rows:
            if len(r) != self.k:
                raise DimensionMismatch(f"row {r} has length {len(r)}, expected {self.k}")
            if any((not isinstance(c, int)) or c < 0 for c in r):
                raise InputError("coefficients must be finite nonnegative integers")
        if any(m < 2 for m in self.moduli):
            raise InputError("moduli must be at least 2")

    @property
    def L(self):
        return math.lcm(*self.moduli) if self.moduli else 1

    def to_json(self):
        return {"k": self.k, "rows": [list(r) for r in self.rows], "moduli": list(self.moduli)}


def congruence_system(rows, moduli, k=None) -> CongruenceSystem:
    rows = tuple(tuple(int(c) for c in r) for r in rows)
    if k is None:
        if not rows:
            raise InputError("k is required when there are no rows")
        k = len(rows[0])
    return CongruenceSystem(k, rows, tuple(int(m) for m in moduli))


def parse_system(rows_text: str, mods_text: str, k=None) -> CongruenceSystem:
    """``--rows "2,3;1,2" --mods "5,2"``."""
    rows = [[int(c) for c in r.split(",")] for r in rows_text.split(";") if r.strip()] if rows_text else []
    mods = [int(m) for m in mods_text.split(",") if m.strip()] if mods_text else []
    return congruence_system(rows, mods, k)


def _row_value(row, x):
    v = 0
    for a, c in zip(row, x):
        v = ext_add(v, ext_mul(a, c))
    return v


def member(cs: CongruenceSystem, x) -> bool:
    x = tuple(x)
    if len(x) != cs.k:
        raise DimensionMismatch(f"vector has length {len(x)}, system has k = {cs.k}")
    for row, m in zip(cs.rows, cs.moduli):
        v = _row_value(row, x)
        if v is not INF and v % m:
            return False
    return True


def _check_cap(cs, bound, limits):
    work = cs.k * bound ** cs.k
    if work > limits.search:
        raise SearchCap(f"enumeration of {bound}^{cs.k} vectors exceeds the search cap", work=work)


def finite_hilbert_basis(cs: CongruenceSystem, limits=DEFAULT) -> tuple:
    """Irreducible members of ``M ∩ N0^k``.

    ``L e_i`` lies in ``M`` for ``L = lcm(moduli)``, and subtracting it keeps
    every row value's residue.  So a member with a coordinate ``>= 2L``
    (indeed ``> L``) is reducible, and the search box ``[0, 2L)^k`` holds
    every irreducible."""
    B = 2 * cs.L
    _check_cap(cs, B, limits)
    members = [x for x in itertools.product(range(B), repeat=cs.k) if any(x) and member(cs, x)]
    members.sort(key=lambda x: (sum(x), x))
    irreducible = []
    for x in members:
        if not any(all(g <= c for g, c in zip(gen, x)) and member(cs, tuple(c - g for c, g in zip(x, gen)))
                   for gen in irreducible):
            irreducible.append(x)
    return tuple(sorted(irreducible))


def _reduced(cs: CongruenceSystem, X) -> tuple:
    """Complement coordinates and the rows that do not touch ``X``."""
    comp = [i for i in range(cs.k) if i + 1 not in X]
    rows, mods = [], []
    for r, m in zip(cs.rows, cs.moduli):
        if all(r[i - 1] == 0 for i in X):
            rows.append(tuple(r[i] for i in comp))
            mods.append(m)
    return comp, CongruenceSystem(len(comp), tuple(rows), tuple(mods))


def support_generators(cs: CongruenceSystem, X, limits=DEFAULT) -> tuple:
    """Generators of the members whose infinite support is exactly ``X``
    (1-based).  Rows touching ``X`` evaluate to ``INF`` and drop out."""
    X = frozenset(int(i) for i in X)
    if not X or not X <= set(range(1, cs.k + 1)):
        raise InputError("X must be a nonempty subset of 1..k")
    comp, red = _reduced(cs, X)
    ys = [()] if not comp else [(0,) * len(comp)] + list(finite_hilbert_basis(red, limits))
    out = []
    for y in ys:
        v = [INF] * cs.k
        for i, c in zip(comp, y):
            v[i] = c
        v = tuple(v)
        assert member(cs, v) and supports(v)[1] == X
        out.append(v)
    return tuple(sorted(out, key=_sort_key))


def realizable_supports(cs: CongruenceSystem) -> list:
    """Nonempty ``X`` for which some member has infinite support ``X``;
    ``(INF on X, 0 elsewhere)`` is the test vector."""
    out = []
    for r in range(1, cs.k + 1):
        for X in itertools.combinations(range(1, cs.k + 1), r):
            v = tuple(INF if i + 1 in X else 0 for i in range(cs.k))
            if member(cs, v):
                out.append(frozenset(X))
    return out


def _leq(g, x):
    """Can ``g`` appear as a summand of ``x``?"""
    for a, b in zip(g, x):
        if a is INF and b is not INF:
            return False
        if a is not INF and b is not INF and a > b:
            return False
    return True


def _search(gens, x, limits):
    """DFS for a multiset of ``gens`` summing to ``x``; None if impossible."""
    fin = [i for i, c in enumerate(x) if c is not INF]
    infs = frozenset(i for i, c in enumerate(x) if c is INF)
    # finite generators first, so infinite coordinates are covered last
    usable = sorted((g for g in gens if _leq(g, x)), key=lambda g: (any(c is INF for c in g), _sort_key(g)))
    budget = [limits.search]
    dead = set()

    def go(rem, uncovered, start):
        if not any(rem) and not uncovered:
            return []
        key = (rem, uncovered, start)
        if key in dead:
            return None
        budget[0] -= 1
        if budget[0] < 0:
            raise SearchCap("decomposition search exceeds the cap")
        for gi in range(start, len(usable)):
            g = usable[gi]
            if any(g[i] is INF or g[i] > r for i, r in zip(fin, rem)):
                continue
            newly = frozenset(i for i in uncovered if g[i] is INF)
            step = tuple(r - g[i] for i, r in zip(fin, rem))
            if step == rem and not newly:
                continue
            got = go(step, uncovered - newly, gi)
            if got is not None:
                return [g] + got
        dead.add(key)
        return None

    return go(tuple(x[i] for i in fin), infs, 0)


def _sum(vs, k):
    out = (0,) * k
    for v in vs:
        out = vec_add(out, v)
    return out


def vstar_generators(cs: CongruenceSystem, limits=DEFAULT) -> tuple:
    """Finite Hilbert basis plus the support generators, thinned to an
    irreducible generating set (a candidate is dropped when the others
    already produce it)."""
    cands = set(finite_hilbert_basis(cs, limits))
    for X in realizable_supports(cs):
        cands.update(v for v in support_generators(cs, X, limits) if any(c != 0 for c in v))
    gens = sorted(cands, key=_sort_key)
    for g in sorted(gens, key=_sort_key, reverse=True):
        others = [h for h in gens if h != g]
        if _search(others, g, limits) is not None:
            gens = others
    return tuple(sorted(gens, key=_sort_key))


@dataclass(frozen=True)
class SemiPerfect:
    value: bool
    witnesses: tuple       # m_i or None

    def to_json(self):
        return {"semi_semiperfect": self.value, "witnesses": list(self.witnesses)}


def is_semi_semiperfect(cs: CongruenceSystem) -> SemiPerfect:
    """Least ``m_i`` in ``1..L`` with ``m_i e_i ∈ M`` for each ``i``."""
    wit = []
    for i in range(cs.k):
        found = None
        for m in range(1, cs.L + 1):
            if member(cs, tuple(m if j == i else 0 for j in range(cs.k))):
                found = m
                break
        wit.append(found)
    return SemiPerfect(all(w is not None for w in wit), tuple(wit))


def express(cs: CongruenceSystem, x, gens=None, limits=DEFAULT) -> tuple:
    """A multiset of generators summing to ``x`` (any valid one)."""
    x = tuple(x)
    if not member(cs, x):
        raise NotMember(f"{format_vector(x)} is not in the monoid")
    if not any(c is INF or c for c in x):
        return ()
    gens = vstar_generators(cs, limits) if gens is None else tuple(gens)
    got = _search(gens, x, limits)
    if got is None:
        raise SearchCap(f"no decomposition of {format_vector(x)} found")
    assert _sum(got, cs.k) == x
    return tuple(got)


def is_irreducible(cs: CongruenceSystem, x, bound=None) -> bool:
    """No split ``x = a + b`` into nonzero members both different from ``x``
    (``INF`` absorbs, so ``x = x + a`` is always available and does not count).
    Finite parts on infinite coordinates are searched up to ``bound``
    (default ``2L``)."""
    x = tuple(x)
    bound = 2 * cs.L if bound is None else bound
    choices = []
    for c in x:
        if c is INF:
            choices.append([(a, INF) for a in range(bound + 1)] + [(INF, b) for b in range(bound + 1)]
                           + [(INF, INF)])
        else:
            choices.append([(a, c - a) for a in range(c + 1)])
    for combo in itertools.product(*choices):
        a = tuple(p[0] for p in combo)
        b = tuple(p[1] for p in combo)
        if a != x and b != x and any(c is INF or c for c in a) and any(c is INF or c for c in b):
            if member(cs, a) and member(cs, b):
                return False
    return True


# ---------------------------------------------------- dimension vectors

def _block_order(ring, S, q, blocks, limits):
    """Order blocks by the census position of the first ideal whose image
    contains the block idempotent."""
    census = enumerate_ideals(ring, "two_sided", limits)
    keyed = []
    for b in blocks:
        pos = next(i for i, I in enumerate(census) if b in {q.proj[x] for x in I.elements})
        keyed.append((pos, b))
    return [b for _, b in sorted(keyed)]


def dim_vector_of_telescope(ring, T: Telescope, depth=None, limits=DEFAULT) -> tuple:
    """Multiplicity of each simple module in ``P / P J(R)``, finite with a
    plateau certificate or ``INF`` when growth is strict over a periodic tail."""
    from .tree import central_primitive_idempotents

    depth = T.depth if depth is None else depth
    T = T.at_depth(depth)
    if not verify_certificates(T, depth).valid:
        raise PreconditionFailed("certificates fail")
    J = jacobson_radical(ring)
    Q, q = reduce_telescope(T, J)
    S = q.ring
    k = len(maximal_two_sided_ideals(ring, limits))
    blocks = _block_order(ring, S, q, central_primitive_idempotents(S), limits)
    assert len(blocks) == k
    period = T.rule.period if T.rule else 1
    tail = T.rule.tail_start if T.rule else 1
    out = []
    for b in blocks:
        bS = [S.mul[b][s] for s in S.elements]
        simple = min(_measure(right_column_span(RingMatrix(S, 1, 1, (x,)), limits))
                     for x in set(bS) if x != S.zero)
        growth = []
        for i in range(1, depth + 1):
            C = Q.composite(i, depth).map(lambda x: S.mul[x][b])
            growth.append(_measure(right_column_span(C, limits)))
        start = depth
        while start > 1 and growth[start - 2] == growth[-1]:
            start -= 1
        settled = max(start, tail) if T.periodic else start
        if depth - settled >= period:
            if frame(S).p:
                out.append(growth[-1] // simple)
            else:
                out.append(round(math.log(growth[-1]) / math.log(simple)) if growth[-1] > 1 else 0)
            continue
        lo = depth - period
        if T.periodic and lo >= tail and all(growth[i] > growth[i - 1] for i in range(lo, depth)):
            out.append(INF)
            continue
        raise Undetermined(f"simple multiplicity not settled within depth {depth}", depth=depth)
    return tuple(out)
