"""Trace ideals via chains of left ideals and matrix factorisations."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from .config import DEFAULT
from .errors import (DecompositionFailed, NotCommutative, NotIdempotentOnWindow,
                     PreconditionFailed, RingMismatch, WindowTooSmall)
from .ideals import (IdealHandle, close, enumerate_ideals, from_elements, is_idempotent,
                     minimal_generators, product_elements, two_sided_closure)
from .linalg import additive_closure, additive_generators
from .ring import RingMatrix, RingTable, block_diag, column


# ------------------------------------------------------------------ chains

@dataclass(frozen=True)
class ChainCert:
    ring: RingTable = field(repr=False)
    ideals: tuple
    inclusions: tuple          # J_n <= J_{n+1}
    products_verified: tuple   # J_{n+1} J_n == J_n
    selected: tuple = ()       # window columns picked from a prefix, if any

    @property
    def valid(self):
        return all(self.inclusions) and all(self.products_verified)

    def union(self) -> IdealHandle:
        elems = frozenset().union(*(J.elements for J in self.ideals)) if self.ideals else frozenset({self.ring.zero})
        return from_elements(self.ring, elems, "left")

    def to_json(self):
        return {"valid": self.valid, "ideals": [J.to_json() for J in self.ideals],
                "inclusions": list(self.inclusions), "products_verified": list(self.products_verified),
                "selected": list(self.selected)}


def verify_chain(ring: RingTable, ideals: Sequence[IdealHandle], selected=()) -> ChainCert:
    for J in ideals:
        if J.ring is not ring and J.ring != ring:
            raise RingMismatch("chain ideals live over different rings")
    inc, prod = [], []
    for lo, hi in zip(ideals, ideals[1:]):
        inc.append(lo.elements <= hi.elements)
        prod.append(product_elements(ring, hi.elements, lo.elements) == lo.elements)
    return ChainCert(ring, tuple(ideals), tuple(inc), tuple(prod), tuple(selected))


def _bound_fn(col_bound):
    if callable(col_bound):
        return col_bound
    bounds = list(col_bound)
    return lambda j: bounds[j]


def check_window_idempotent(A: RingMatrix, col_bound) -> list:
    """Columns of ``A @ A`` that are fully determined inside the window, after
    checking they agree with ``A``.  ``col_bound(j)`` is the last row that may
    be nonzero in column ``j`` (``-1`` for an empty column)."""
    if A.rows != A.cols:
        raise NotIdempotentOnWindow("prefix must be square")
    bound = _bound_fn(col_bound)
    ring = A.ring
    n = A.rows
    complete = [j for j in range(n) if bound(j) < n]
    for j in complete:
        for i in range(n):
            if A[i, j] != ring.zero and i > bound(j):
                raise NotIdempotentOnWindow(f"entry ({i},{j}) lies below the stated column bound",
                                            entry=[i, j])
    for j in complete:
        for i in range(n):
            s = ring.sum(ring.mul[A[i, k]][A[k, j]] for k in range(bound(j) + 1))
            if s != A[i, j]:
                raise NotIdempotentOnWindow(f"(A^2)[{i},{j}] != A[{i},{j}]", entry=[i, j])
    return complete


def chain_from_idempotent_prefix(A: RingMatrix, col_bound) -> ChainCert:
    """Left ideals ``L_n`` generated by the entries of columns ``0..n``,
    thinned to a subchain ``n_1 < n_2 < ...`` with ``n_{t+1}`` at least the
    largest column bound among columns ``<= n_t``; then
    ``L_{n_{t+1}} L_{n_t} = L_{n_t}`` because ``A = A^2``."""
    bound = _bound_fn(col_bound)
    complete = set(check_window_idempotent(A, bound))
    ring = A.ring
    n = A.rows
    usable = 0
    while usable < n and usable in complete:
        usable += 1
    if usable == 0:
        raise WindowTooSmall("first column is not complete inside the window")
    picks = [0]
    while True:
        cur = picks[-1]
        need = max(max(bound(j) for j in range(cur + 1)), cur + 1)
        if need >= usable:
            break
        picks.append(need)
    if len(picks) < 2:
        raise WindowTooSmall("window holds fewer than two chain terms", usable=usable)
    ideals = []
    for t in picks:
        entries = [A[i, j] for j in range(t + 1) for i in range(n) if A[i, j] != ring.zero]
        ideals.append(close(ring, entries, "left"))
    return verify_chain(ring, ideals, picks)


# ------------------------------------------------------ factorisation tables

@lru_cache(maxsize=256)
def decomposition_table(ring: RingTable, a: tuple, coeffs: frozenset) -> dict:
    """Map each element of ``sum_i C a_i`` (``C`` the additive group
    ``coeffs``) to one coefficient tuple.  Breadth first from zero over the
    additive generators of ``C``, so ties go to the shortest, lowest-index
    expression."""
    gens = additive_generators(ring, coeffs)
    zero = ring.zero
    table = {zero: (zero,) * len(a)}
    frontier = [zero]
    add, mul = ring.add, ring.mul
    steps = [(t, c, mul[c][a[t]]) for t in range(len(a)) for c in gens]
    while frontier:
        nxt = []
        for x in frontier:
            cx = table[x]
            for t, c, v in steps:
                y = add[x][v]
                if y not in table:
                    co = list(cx)
                    co[t] = add[co[t]][c]
                    table[y] = tuple(co)
                    nxt.append(y)
        frontier = nxt
    return table


def _elements(J):
    return J.elements if isinstance(J, IdealHandle) else frozenset(J)


def solve_block_factor(B: RingMatrix, cols: Sequence[tuple], J2, J1=None) -> RingMatrix:
    """``C`` with entries in ``J2`` and ``C @ diag(cols) == B``, where block
    ``j`` of the block-diagonal matrix is the column ``cols[j]``."""
    ring = B.ring
    if len(cols) != B.cols:
        raise DecompositionFailed(f"{B.cols} columns but {len(cols)} blocks")
    coeffs = _elements(J2)
    offsets, off = [], 0
    for c in cols:
        offsets.append(off)
        off += len(c)
    tables = [decomposition_table(ring, tuple(c), coeffs) for c in cols]
    if J1 is not None:
        want = _elements(J1)
        for j, tab in enumerate(tables):
            if frozenset(tab) != want:
                raise DecompositionFailed(f"block {j}: sum of J2*a_i differs from J1", block=j)
    out = [ring.zero] * (B.rows * off)
    for i in range(B.rows):
        for j in range(B.cols):
            b = B[i, j]
            co = tables[j].get(b)
            if co is None:
                raise DecompositionFailed(f"entry ({i},{j}) = {b} has no decomposition", entry=[i, j], value=b)
            for t, c in enumerate(co):
                out[i * off + offsets[j] + t] = c
    C = RingMatrix(ring, B.rows, off, tuple(out))
    A = block_diag([column(ring, c) for c in cols])
    assert C @ A == B and all(x in coeffs for x in C.entries)
    return C


def solve_left_factor(B: RingMatrix, a, k: int, J2, J1=None) -> RingMatrix:
    """``C`` over ``J2`` with ``C @ diag(a, ..., a) == B`` (``k`` blocks)."""
    a = tuple(a)
    if B.cols != k:
        raise DecompositionFailed(f"B has {B.cols} columns, expected {k}")
    return solve_block_factor(B, [a] * k, J2, J1)


def stacked(ring, a, k) -> RingMatrix:
    return block_diag([column(ring, a)] * k)


# ----------------------------------------------------------- trace ideals

@dataclass(frozen=True)
class TraceDecision:
    ideal: IdealHandle
    is_trace: bool
    witness: IdealHandle | None
    scanned: tuple        # left ideals J with JR = I that were examined

    def to_json(self):
        out = {"decision": "YES" if self.is_trace else "NO", "ideal": self.ideal.to_json()}
        if self.is_trace:
            out["certificate"] = {"J": self.witness.to_json(), "J_squared_is_J": True, "JR_is_I": True}
        else:
            out["certificate"] = {"exhausted": [list(J.generators) for J in self.scanned],
                                  "idempotent_found": False}
        return out


def is_trace_ideal(ring: RingTable, I: IdealHandle, limits=DEFAULT) -> TraceDecision:
    """A finite ring has ACC, so ``I`` is a trace ideal exactly when some left
    ideal ``J`` satisfies ``J^2 = J`` and ``JR = I``."""
    if I.side != "two_sided":
        raise PreconditionFailed("trace ideals are two-sided")
    scanned = []
    for J in enumerate_ideals(ring, "left", limits):
        if not J.elements <= I.elements:
            continue
        if two_sided_closure(J).elements != I.elements:
            continue
        if is_idempotent(J):
            return TraceDecision(I, True, J, tuple(scanned))
        scanned.append(J)
    return TraceDecision(I, False, None, tuple(scanned))


# ------------------------------------------------------------ chain moves

@dataclass(frozen=True)
class AddingResult:
    J1: IdealHandle
    J2: IdealHandle
    gens: tuple     # generators of the new J2 (variant ii: B = A2 * X)
    X: tuple

    def to_json(self):
        return {"J1": self.J1.to_json(), "J2": self.J2.to_json(), "gens": list(self.gens), "X": list(self.X)}


def _left_with(ring, gens):
    return close(ring, gens, "left")


def _right_closure(ring, J):
    return two_sided_closure(J.as_side("left")).elements


def adding_transform(J1: IdealHandle, J2: IdealHandle, A1, A2, X=(1,), variant="i") -> AddingResult:
    ring = J1.ring
    A1, A2 = tuple(A1), tuple(A2)
    if not J1.elements <= J2.elements or product_elements(ring, J2.elements, J1.elements) != J1.elements:
        raise PreconditionFailed("need J1 <= J2 and J2 J1 = J1")
    if close(ring, A1, "left").elements != J1.elements or close(ring, A2, "left").elements != J2.elements:
        raise PreconditionFailed("A_i must generate J_i")
    mul = ring.mul
    if variant == "i":
        X = tuple(dict.fromkeys(X))
        if ring.one not in X:
            raise PreconditionFailed("X must contain 1")
        g1 = tuple(dict.fromkeys(mul[a][r] for r in X for a in A1))
        g2 = tuple(dict.fromkeys(mul[a][r] for r in X for a in A2))
        N1, N2 = _left_with(ring, g1), _left_with(ring, g2)
        ok = (N1.elements <= N2.elements
              and product_elements(ring, N2.elements, N1.elements) == N1.elements
              and _right_closure(ring, J1) == _right_closure(ring, N1)
              and _right_closure(ring, J2) == _right_closure(ring, N2))
        if not ok:
            raise PreconditionFailed("variant i postconditions failed")
        return AddingResult(N1, N2, g2, X)
    if variant != "ii":
        raise PreconditionFailed(f"unknown variant {variant!r}")

    # coefficients of each a in A1 over A1, taken in J2 R
    J2R = two_sided_closure(J2.as_side("left")).elements
    table = decomposition_table(ring, A1, J2R)
    needed = sorted({c for a in A1 for c in table[a]})
    # write each coefficient as a sum of s*b*r, growing X from {1}
    X = [ring.one]
    basis = additive_generators(ring, frozenset(ring.elements))

    def reach(xs):
        return additive_closure(ring, [mul[mul[s][b]][r] for s in basis for b in A2 for r in xs])

    have = reach(X)
    for y in needed:
        for r in ring.elements:
            if y in have:
                break
            if r in X:
                continue
            grown = reach(X + [r])
            if grown != have:
                X.append(r)
                have = grown
    B = tuple(dict.fromkeys(mul[a][r] for a in A2 for r in X))
    BA1 = close(ring, [mul[b][a] for b in B for a in A1], "left")
    N2 = _left_with(ring, B)
    ok = (BA1.elements == J1.elements
          and product_elements(ring, N2.elements, J1.elements) == J1.elements
          and _right_closure(ring, J2) == _right_closure(ring, N2))
    if not ok:
        raise PreconditionFailed("variant ii postconditions failed")
    return AddingResult(J1, N2, B, tuple(X))


# ------------------------------------------------------- commutative case

def _det(ring, M):
    n = len(M)
    if n == 0:
        return ring.one
    if n == 1:
        return M[0][0]
    add, mul, neg = ring.add, ring.mul, ring.neg
    total = ring.zero
    for j in range(n):
        if M[0][j] == ring.zero:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = mul[M[0][j]][_det(ring, minor)]
        total = add[total][neg[term] if j % 2 else term]
    return total


def determinant_unit(ring: RingTable, J1: IdealHandle, J2: IdealHandle) -> int:
    """``a`` in ``J2`` with ``a b = b`` for all ``b`` in ``J1``, as
    ``1 - det(Id - A)`` where ``b_i = sum_j A_ij b_j`` over ``J2``."""
    if not ring.is_commutative:
        raise NotCommutative(f"{ring.name} is not commutative")
    if product_elements(ring, J2.elements, J1.elements) != J1.elements:
        raise PreconditionFailed("need J2 J1 = J1")
    gens = J1.generators or minimal_generators(ring, J1.elements, J1.side)
    gens = tuple(g for g in gens if g != ring.zero)
    table = decomposition_table(ring, gens, J2.elements)
    A = [list(table[b]) for b in gens]
    r = len(gens)
    IdA = [[ring.sub(ring.one if i == j else ring.zero, A[i][j]) for j in range(r)] for i in range(r)]
    a = ring.sub(ring.one, _det(ring, IdA))
    if a not in J2.elements or any(ring.mul[a][b] != b for b in J1.elements):
        raise PreconditionFailed("determinant unit failed verification")
    return a


@dataclass(frozen=True)
class PureChain:
    is_trace: bool
    sequence: tuple
    idempotent: int | None
    decision: TraceDecision

    def to_json(self):
        out = {"decision": "YES" if self.is_trace else "NO"}
        if self.is_trace:
            out["sequence"] = list(self.sequence)
            out["tail"] = self.idempotent
        else:
            out["certificate"] = self.decision.to_json()["certificate"]
        return out


def pure_chain(ring: RingTable, I: IdealHandle, length=4, limits=DEFAULT) -> PureChain:
    if not ring.is_commutative:
        raise NotCommutative(f"{ring.name} is not commutative")
    dec = is_trace_ideal(ring, I, limits)
    if not dec.is_trace:
        return PureChain(False, (), None, dec)
    e = determinant_unit(ring, I, I)
    assert ring.mul[e][e] == e and close(ring, [e]).elements == I.elements
    return PureChain(True, (e,) * length, e, dec)

