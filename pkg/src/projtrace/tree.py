"""Rooted-tree representations over a descending chain of idempotent ideals.

Every vertex carries a copy of ``R`` and every edge acts by left
multiplication.  A vertex remembers its *type*: the root has type 0, a
child along an identity-lift edge keeps its parent's type and a child along
a generator edge at level ``i`` has type ``i``.  The edges leaving a vertex
of type ``j`` at level ``i`` are

* basic rule: one edge ``e_{j,i+1}`` followed by the generators ``G_{i+1}``;
* sequence rule: as basic when ``j < i``; when ``j == i`` there are
  ``c_i`` copies of ``e_{i,i+1}`` before the generators.

Chains are finite, ``I_0 ⊇ ... ⊇ I_d``, and continue constantly: ``I_j = I_d``
and ``G_j = G_d`` for ``j > d``, ``e_{i,j} = e_{i,d}`` for ``i < d < j`` and
``e_{i,j} = 0`` once ``i >= d``.  Vertices are numbered breadth first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import DEFAULT
from .errors import CertificateSolveFailed, DecompositionFailed, InputError, PreconditionFailed, Undetermined
from .ideals import (IdealHandle, close, enumerate_ideals, is_idempotent, is_semisimple_quotient,
                     minimal_generators)
from .linalg import frame, right_column_span
from .ring import RingMatrix, RingTable, block_diag, column, quotient_ring
from .telescope import FG, TailRule, Telescope, tensor_quotient
from .trace import solve_block_factor, solve_left_factor


# -------------------------------------------------------------- chain data

@dataclass(frozen=True)
class ChainSpec:
    ring: RingTable = field(repr=False)
    ideals: tuple          # I_0 .. I_d, two-sided
    lifts: dict = field(hash=False)           # (i, j) -> element, 0 <= i < j <= d
    gens: tuple            # G_1 .. G_d

    @property
    def d(self):
        return len(self.ideals) - 1

    def ideal(self, j) -> IdealHandle:
        return self.ideals[min(j, self.d)]

    def G(self, j) -> tuple:
        if j < 1:
            raise InputError("generator sets start at G_1")
        return tuple(self.gens[min(j, self.d) - 1]) if self.d >= 1 else (self.ring.one,)

    def m(self, j):
        return len(self.G(j))

    def lift(self, i, j):
        d = self.d
        if i >= d:
            return self.ring.zero
        return self.lifts[(i, min(j, d))]

    def to_json(self):
        return {"ring": self.ring.name,
                "ideals": [{"side": "two_sided", "gens": list(I.generators)} for I in self.ideals],
                "lifts": {f"{i},{j}": e for (i, j), e in sorted(self.lifts.items())},
                "gens": [list(g) for g in self.gens]}


def lift_is_valid(ring, Ii: IdealHandle, Ij: IdealHandle, e) -> tuple:
    """(ok, reason): ``e + I_j`` central idempotent of ``R/I_j`` generating ``I_i/I_j``."""
    q = quotient_ring(ring, Ij.elements)
    S, x = q.ring, q.proj[e]
    if S.mul[x][x] != x:
        return False, "not idempotent modulo I_j"
    if not all(S.mul[x][y] == S.mul[y][x] for y in S.elements):
        return False, "not central modulo I_j"
    gen = close(ring, [e] + list(Ij.generators) + list(minimal_generators(ring, Ij.elements, "two_sided")),
                "two_sided")
    if gen.elements != Ii.elements:
        return False, "class does not generate I_i/I_j"
    return True, ""


def find_lift(ring, Ii, Ij):
    """Lowest-index valid lift, or None."""
    for e in ring.elements:
        if e in Ii.elements and lift_is_valid(ring, Ii, Ij, e)[0]:
            return e
    return None


@dataclass(frozen=True)
class ChainReport:
    failures: tuple

    @property
    def valid(self):
        return not self.failures

    def to_json(self):
        return {"valid": self.valid, "failures": [dict(f) for f in self.failures]}


def validate_chain_spec(cs: ChainSpec) -> ChainReport:
    ring = cs.ring
    bad = []
    for i, I in enumerate(cs.ideals):
        if I.side != "two_sided":
            bad.append({"check": "two_sided", "index": i})
            continue
        if not is_idempotent(I):
            bad.append({"check": "idempotent", "index": i})
        if not is_semisimple_quotient(ring, I):
            bad.append({"check": "semisimple_quotient", "index": i})
        if i and not I.elements <= cs.ideals[i - 1].elements:
            bad.append({"check": "descending", "index": i})
    for i in range(cs.d + 1):
        for j in range(i + 1, cs.d + 1):
            e = cs.lifts.get((i, j))
            if e is None:
                bad.append({"check": "lift_missing", "index": [i, j]})
                continue
            ok, why = lift_is_valid(ring, cs.ideals[i], cs.ideals[j], e)
            if not ok:
                bad.append({"check": "lift", "index": [i, j], "reason": why, "witness": e})
    if len(cs.gens) != cs.d:
        bad.append({"check": "gens_count", "expected": cs.d, "got": len(cs.gens)})
    for j, G in enumerate(cs.gens, start=1):
        if j <= cs.d and close(ring, G, "left").elements != cs.ideals[j].elements:
            bad.append({"check": "gens_generate", "index": j})
    return ChainReport(tuple(tuple(sorted(f.items())) for f in bad))


def chain_spec(ring, ideals, lifts=None, gens=None) -> ChainSpec:
    """Build a ChainSpec, filling missing lifts by exhaustive search and
    missing generator sets with minimal left generators."""
    ideals = tuple(ideals)
    lifts = dict(lifts or {})
    for i in range(len(ideals)):
        for j in range(i + 1, len(ideals)):
            if (i, j) not in lifts:
                e = find_lift(ring, ideals[i], ideals[j])
                if e is not None:
                    lifts[(i, j)] = e
    if gens is None:
        gens = tuple(minimal_generators(ring, I.elements, "left") for I in ideals[1:])
    return ChainSpec(ring, ideals, lifts, tuple(tuple(g) for g in gens))


def admissible_ideals(ring, limits=DEFAULT):
    """Idempotent two-sided ideals with semisimple quotient, census order."""
    return [I for I in enumerate_ideals(ring, "two_sided", limits)
            if is_idempotent(I) and is_semisimple_quotient(ring, I)]


def find_strict_chain(ring, length=3, limits=DEFAULT) -> ChainSpec:
    """First strict chain ``R = I_0 ⊋ I_1 ⊋ ...`` of admissible ideals, scanning
    later terms from the largest down."""
    cands = list(reversed(admissible_ideals(ring, limits)))
    top = [I for I in cands if I.is_whole]
    if not top:
        raise PreconditionFailed("R itself is not admissible")

    def extend(chain):
        if len(chain) == length:
            return chain
        for I in cands:
            if I.elements < chain[-1].elements:
                got = extend(chain + [I])
                if got:
                    return got
        return None

    chain = extend([top[0]])
    if chain is None:
        raise PreconditionFailed(f"no strict chain of length {length} in {ring.name}")
    cs = chain_spec(ring, chain)
    rep = validate_chain_spec(cs)
    if not rep.valid:
        raise PreconditionFailed("found chain fails validation", failures=rep.to_json()["failures"])
    return cs


# ------------------------------------------------------- certificate solving

def _two_step(ring, A: tuple, c: int, e12, G: tuple, I2: IdealHandle, child_cols) -> RingMatrix:
    """``C`` with ``C B A = A`` where ``A`` is the column ``(e12 x c; G)`` and
    ``B = diag(child_cols)``.  First ``D = (A | 0 | D')`` with ``D A = A`` and
    ``D'`` over ``I2``; then ``D = C B`` blockwise."""
    n = len(A)
    one_minus = ring.sub(ring.one, e12)
    rhs = column(ring, [ring.mul[x][one_minus] for x in A])
    try:
        Dp = solve_left_factor(rhs, G, 1, I2)                      # D' G = A (1 - e12)
    except DecompositionFailed as exc:
        raise CertificateSolveFailed(f"step one: {exc}") from exc
    rows = []
    for r in range(n):
        rows.append([A[r]] + [ring.zero] * (c - 1) + list(Dp.row(r)))
    D = RingMatrix(ring, n, n, tuple(x for row in rows for x in row))
    Acol = column(ring, A)
    assert D @ Acol == Acol
    try:
        C = solve_block_factor(D, [tuple(cc) for cc in child_cols], frozenset(ring.elements))
    except DecompositionFailed as exc:
        raise CertificateSolveFailed(f"step two: {exc}") from exc
    B = block_diag([column(ring, cc) for cc in child_cols])
    assert C @ (B @ Acol) == Acol
    return C


def solve_idempotent_certificate(ring, I1, I2, I3, e12, e13, e23, G, H, c=1, d=1,
                                 check=True) -> tuple:
    """Return ``(C, B, A)`` with ``C B A = A`` for
    ``A = (e12 x c; G)`` and ``B = diag(Y_c x c, Z_d x m)``,
    ``Y_c = (e13 x c; H)``, ``Z_d = (e23 x d; H)``.  ``c = d = 1`` is the
    plain shape."""
    G, H = tuple(G), tuple(H)
    if check:
        if not is_idempotent(I3) or not is_semisimple_quotient(ring, I3):
            raise PreconditionFailed("I3 must be idempotent with semisimple quotient")
        for (Ia, Ib, e) in ((I1, I2, e12), (I1, I3, e13), (I2, I3, e23)):
            ok, why = lift_is_valid(ring, Ia, Ib, e)
            if not ok:
                raise PreconditionFailed(f"lift {e}: {why}")
        if close(ring, G, "left").elements != I2.elements or close(ring, H, "left").elements != I3.elements:
            raise PreconditionFailed("G and H must generate I2 and I3 as left ideals")
    A = (e12,) * c + G
    Yc = (e13,) * c + H
    Zd = (e23,) * d + H
    cols = [Yc] * c + [Zd] * len(G)
    C = _two_step(ring, A, c, e12, G, I2, cols)
    return C, block_diag([column(ring, x) for x in cols]), column(ring, A)


# -------------------------------------------------------------------- trees

@dataclass(frozen=True)
class Vertex:
    parent: int            # index in the previous level, -1 for the root
    label: int             # element on the incoming edge
    tag: tuple             # ("root",), ("lift", j, i) or ("gen", i, g_index)
    type: int


@dataclass(frozen=True)
class TreeRep:
    levels: tuple          # tuple of tuples of Vertex

    @property
    def counts(self):
        return tuple(len(l) for l in self.levels)

    def to_json(self):
        return {"levels": list(self.counts),
                "edges": [[{"parent": v.parent, "label": v.label, "tag": list(v.tag), "type": v.type}
                           for v in lvl] for lvl in self.levels[1:]]}


class _Builder:
    """Grows the tree level by level and caches vertex certificates."""

    def __init__(self, cs: ChainSpec, seq=None):
        self.cs = cs
        self.seq = tuple(seq) if seq is not None else None
        self.levels = [[Vertex(-1, cs.ring.one, ("root",), 0)]]
        self.cert_cache = {}

    @property
    def tail_start(self):
        """First level map after which the construction repeats."""
        return max(self.cs.d, len(self.seq or ())) + 1

    def c(self, i):
        if self.seq is None:
            return 1
        return self.seq[i] if i < len(self.seq) else 1

    def children(self, v: Vertex, i):
        """Outgoing edges of a vertex at level ``i``: (label, tag, type)."""
        cs = self.cs
        j = v.type
        reps = self.c(i) if j == i else 1
        out = [(cs.lift(j, i + 1), ("lift", j, i + 1), j)] * reps
        for g_idx, g in enumerate(cs.G(i + 1)):
            out.append((g, ("gen", i + 1, g_idx), i + 1))
        return out

    def out_column(self, v, i):
        return tuple(lbl for lbl, _, _ in self.children(v, i))

    def grow(self, level):
        while len(self.levels) <= level:
            i = len(self.levels) - 1
            nxt = []
            for idx, v in enumerate(self.levels[i]):
                for lbl, tag, t in self.children(v, i):
                    nxt.append(Vertex(idx, lbl, tag, t))
            self.levels.append(nxt)

    def X(self, i):
        """Level map ``M_i -> M_{i+1}`` (stage ``i+1`` of the telescope)."""
        self.grow(i + 1)
        ring = self.cs.ring
        return block_diag([column(ring, self.out_column(v, i)) for v in self.levels[i]])

    def h(self, v: Vertex, i):
        """``h_v`` for a vertex at level ``i``."""
        self.grow(i + 2)
        cs, ring = self.cs, self.cs.ring
        A = self.out_column(v, i)
        kids = self.children(v, i)
        child_cols = [self.out_column(Vertex(0, lbl, tag, t), i + 1) for lbl, tag, t in kids]
        key = (A, tuple(child_cols))
        if key not in self.cert_cache:
            reps = self.c(i) if v.type == i else 1
            e12 = cs.lift(v.type, i + 1)
            try:
                self.cert_cache[key] = _two_step(ring, A, reps, e12, cs.G(i + 1), cs.ideal(i + 1), child_cols)
            except CertificateSolveFailed as exc:
                raise CertificateSolveFailed(f"vertex at level {i} of type {v.type}: {exc}",
                                             level=i, type=v.type) from exc
        return self.cert_cache[key]

    def Y(self, k):
        """Certificate ``Y_k = diag(h_v : v in V_{k-2})``."""
        i = k - 2
        return block_diag([self.h(v, i) for v in self.levels[i]])

    def telescope(self, depth, name):
        cs = self.cs

        def extend(tel, X, Y):
            k = len(X) + 1             # stage being added: X_k = f_{k-1}
            return self.X(k - 1), (self.Y(k) if k >= 2 else None)

        rule = TailRule("tree", 1, self.tail_start, True, {}, extend)
        T = Telescope(cs.ring, (), (), rule, name, m1=1)
        return T.at_depth(depth) if depth else T

    def rep(self, depth):
        self.grow(depth)
        return TreeRep(tuple(tuple(l) for l in self.levels[:depth + 1]))


def build_basic_tree(cs: ChainSpec, depth=3):
    b = _Builder(cs)
    T = b.telescope(depth, "basic_tree")
    return b.rep(depth), T


def build_sequence_tree(cs: ChainSpec, seq, depth=3):
    seq = tuple(int(c) for c in seq)
    if any(c < 1 for c in seq):
        raise InputError("sequence entries must be >= 1")
    b = _Builder(cs, seq)
    T = b.telescope(depth, "sequence_tree")
    return b.rep(depth), T


def provenance_split(cs: ChainSpec, k: int, depth: int, seq=None) -> list:
    """Split the tree from level ``k`` on by the type of each vertex's
    ancestor at level ``k``; one sub-telescope per type ``0..k``."""
    b = _Builder(cs, seq)
    b.grow(k + depth)
    ring = cs.ring
    # ancestor type at level k for every vertex of every later level
    owner = [[v.type for v in b.levels[k]]]
    for i in range(k + 1, k + depth + 1):
        owner.append([owner[-1][v.parent] for v in b.levels[i]])
    out = []
    for t in range(k + 1):
        X = []
        for i in range(k, k + depth):
            cols = [column(ring, b.out_column(v, i)) for idx, v in enumerate(b.levels[i]) if owner[i - k][idx] == t]
            if not cols:
                break
            X.append(block_diag(cols))
        if X and len(X) == depth:
            out.append((t, Telescope(ring, tuple(X), (None,) * len(X), None, f"part{t}")))
    return out


# ----------------------------------------------------------- multiplicities

def multiplicity_vector(cs: ChainSpec, variant="basic", k=0) -> tuple:
    """Counts of type-``j`` vertices at level ``k+1``, ``j = 0..k``."""
    seq = None if variant == "basic" else tuple(variant)
    b = _Builder(cs, seq)
    counts = {0: 1}
    for i in range(k + 1):
        nxt = {}
        for j, n in counts.items():
            reps = b.c(i) if j == i else 1
            nxt[j] = nxt.get(j, 0) + n * reps
            nxt[i + 1] = nxt.get(i + 1, 0) + n * cs.m(i + 1)
        counts = nxt
    return tuple(counts.get(j, 0) for j in range(k + 1))


def basic_closed_form(ms, k) -> tuple:
    """``(1, m_1, (m_1+1) m_2, ...)`` up to index ``k``."""
    out = [1]
    prod = 1
    for j in range(1, k + 1):
        out.append(prod * ms[j - 1])
        prod *= ms[j - 1] + 1
    return tuple(out)


def central_primitive_idempotents(S: RingTable) -> list:
    cent = [x for x in S.elements if S.is_central[x] and S.mul[x][x] == x and x != S.zero]
    prim = []
    for e in cent:
        if not any(f != e and S.mul[f][e] == f for f in cent):
            prim.append(e)
    return prim


@dataclass(frozen=True)
class MultiplicityReport:
    agree: bool
    alpha: tuple
    blocks: tuple          # per block: {"idempotent", "layer", "predicted", "measured"}
    stage: int | None

    def to_json(self):
        return {"agree": self.agree, "alpha": list(self.alpha), "blocks": [dict(b) for b in self.blocks],
                "stage": self.stage}


def verify_multiplicities(cs: ChainSpec, variant="basic", k=0, depth=None, alpha=None,
                          limits=DEFAULT) -> MultiplicityReport:
    """Compare predicted summand counts of ``P/P I_{k+1}`` with a direct count
    in the stabilised quotient system over the semisimple ring ``R/I_{k+1}``."""
    seq = None if variant == "basic" else tuple(variant)
    if depth is None:
        depth = max(k + 4, _Builder(cs, seq).tail_start + 2)
    if depth < k + 2:
        raise Undetermined(f"need depth >= k+2 = {k + 2}", depth=depth)
    alpha = tuple(alpha) if alpha is not None else multiplicity_vector(cs, variant, k)
    _, T = (build_basic_tree(cs, depth) if seq is None else build_sequence_tree(cs, seq, depth))
    Ik1 = cs.ideal(k + 1)
    tq = tensor_quotient(T, Ik1, depth, limits)
    if tq.decision != FG:
        raise Undetermined(f"quotient system not stable within depth {depth}", depth=depth)
    q = tq.quotient
    S = q.ring
    Q = tq.telescope
    comp = Q.composite(tq.stage, depth)
    blocks = []
    agree = True
    for b in central_primitive_idempotents(S):
        layer = max(t for t in range(k + 1) if b in {q.proj[x] for x in cs.ideal(t).elements})
        predicted = sum(alpha[: layer + 1])
        scaled = comp.map(lambda x: S.mul[x][b])
        img = right_column_span(scaled, limits)
        unit = right_column_span(RingMatrix(S, 1, 1, (b,)), limits)
        if frame(S).p:
            measured = img.dim / unit.dim
        else:
            measured = math.log(img.size) / math.log(unit.size)
        ok = abs(measured - predicted) < 1e-9
        agree &= ok
        blocks.append((("idempotent", b), ("layer", layer), ("predicted", predicted), ("measured", measured)))
    return MultiplicityReport(agree, alpha, tuple(blocks), tq.stage)


def sequence_alpha(cs, seq, k):
    return multiplicity_vector(cs, tuple(seq), k)
