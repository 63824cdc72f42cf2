"""Descending ideals of an idempotent prefix and the positive sets ``I(P0, P)``.

``I(P)`` is the set of two-sided ideals ``I`` with ``P/PI`` finitely
generated; ``I(P0, P)`` those with ``P = P0 + PI`` for a fixed finitely
generated ``P0``.  Both are decided on the reduced direct system.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT
from .errors import InputError, PreconditionFailed, Undetermined, WindowTooSmall
from .ideals import (IdealHandle, close, enumerate_ideals, from_elements, ideal_op, is_idempotent,
                     minimal_generators, power_omega, product_elements)
from .linalg import right_column_span
from .ring import RingMatrix
from .telescope import (FG, NOT_FG, UNDETERMINED, IdempotentPrefix, Telescope, idempotent_prefix,
                        tensor_quotient, verify_certificates)


@dataclass(frozen=True)
class DescendingStep:
    k: int
    right: IdealHandle         # I_k, right ideal of entries below row k
    closure: IdealHandle       # R I_k
    n_k: int | None            # first n > k with I_n I_k = I_n inside the window
    witness: tuple             # (row, col, entry) generating I_k over I_{n_k}

    def to_json(self):
        return {"k": self.k, "right": self.right.to_json(), "closure": self.closure.to_json(),
                "n_k": self.n_k, "witness": [list(w) for w in self.witness]}


def _right_ideal(ring, entries):
    return close(ring, entries, "right")


def descending_ideals(prefix: IdempotentPrefix) -> list:
    """``I_k = sum_{i>k, j} a_ij R`` over the window, its two-sided closure
    and the first ``n_k`` with ``I_{n_k} I_k = I_{n_k}``."""
    A = prefix.matrix
    ring = A.ring
    n = A.rows
    if n == 0:
        raise WindowTooSmall("empty prefix")
    rows = [[A[i, j] for j in range(n) if A[i, j] != ring.zero] for i in range(n)]
    Ik = []
    acc = []
    for k in range(n - 1, -1, -1):
        if k + 1 < n:
            acc = acc + rows[k + 1]
        Ik.append(_right_ideal(ring, acc))
    Ik.reverse()
    out = []
    for k in range(n):
        nk = None
        for m in range(k + 1, n):
            if product_elements(ring, Ik[m].elements, Ik[k].elements) == Ik[m].elements:
                nk = m
                break
        witness = ()
        if nk is not None:
            # entries in rows k+1..n_k, thinned greedily, generate I_k over I_{n_k}
            cur = Ik[nk].elements
            picked = []
            for i in range(k + 1, nk + 1):
                for j in range(n):
                    x = A[i, j]
                    if x == ring.zero or x in cur:
                        continue
                    picked.append((i, j, x))
                    cur = close(ring, list(minimal_generators(ring, cur, "right")) + [x], "right").elements
            assert cur == Ik[k].elements
            witness = tuple(picked)
        closure = from_elements(ring, close(ring, Ik[k].generators, "two_sided").elements, "two_sided")
        out.append(DescendingStep(k, Ik[k], closure, nk, witness))
    return out


@dataclass(frozen=True)
class FairSizeReport:
    minimal_ideal: IdealHandle
    status: str                # "exact" | "undetermined"
    idempotent: bool
    chain: tuple               # RI at block boundaries: (k, IdealHandle)
    census: tuple              # (IdealHandle, decision, contains_minimal)
    consistent: bool

    def to_json(self):
        return {"minimal_ideal": self.minimal_ideal.to_json(), "status": self.status,
                "idempotent": self.idempotent,
                "chain": [{"k": k, "ideal": I.to_json()} for k, I in self.chain],
                "census": [{"ideal": I.to_json(), "decision": d, "contains_minimal": c}
                           for I, d, c in self.census],
                "consistent": self.consistent}


def fair_size_analyze(T: Telescope, depth=4, limits=DEFAULT, strict=True) -> FairSizeReport:
    """Minimal member of ``I(P)`` from the descending ``RI_k`` chain, cross
    checked against the tensor decision on every two-sided census ideal."""
    if not verify_certificates(T, depth + 2).valid:
        raise PreconditionFailed("certificates fail")
    prefix = idempotent_prefix(T, depth)
    steps = descending_ideals(prefix)
    ring = T.ring
    # RI just above each stage block; the last one sees only the final block
    chain = tuple((off - 1, steps[off - 1].closure) for off in prefix.offsets if off > 0)
    if not chain:
        raise WindowTooSmall("prefix needs at least two stage blocks")
    minimal = chain[-1][1]
    period = T.rule.period if T.rule else 1
    tail = T.rule.tail_start if T.rule else 1
    stable_blocks = 1
    for _, I in reversed(chain[:-1]):
        if I.elements != minimal.elements:
            break
        stable_blocks += 1
    first_stable = len(prefix.stages) - stable_blocks + 2   # stage index of the first stable block
    exact = T.periodic and stable_blocks > period and first_stable >= tail - 1
    census = []
    consistent = True
    tq_depth = depth + 2
    for I in enumerate_ideals(ring, "two_sided", limits):
        d = tensor_quotient(T, I, tq_depth, limits).decision
        contains = minimal.elements <= I.elements
        if d == UNDETERMINED or (d == FG) != contains:
            consistent = False
        census.append((I, d, contains))
    status = "exact" if exact and consistent else "undetermined"
    if strict and status != "exact":
        raise Undetermined(f"descending chain not conclusive at depth {depth}", depth=depth)
    return FairSizeReport(minimal, status, is_idempotent(minimal), chain, tuple(census), consistent)


# ------------------------------------------------------------ I(P0, P)

def _decide(T, I, depth, P0_cols, limits):
    """True/False for ``P = P0 + P I``; raises Undetermined."""
    tq = tensor_quotient(T, I, depth, limits)
    if tq.decision == NOT_FG:
        return False
    if tq.decision != FG:
        raise Undetermined(f"quotient system undecided for ideal of size {len(I)}", depth=depth)
    Q = tq.telescope
    target = right_column_span(RingMatrix(Q.ring, Q.m(depth + 1), 0, ()), limits)
    for stage, col in P0_cols:
        if stage > depth:
            raise Undetermined(f"P0 column at stage {stage} lies beyond depth {depth}", depth=depth)
        C = Q.composite(stage, depth)
        if not 0 <= col < C.cols:
            raise InputError(f"stage {stage} has {C.cols} columns, no column {col}")
        target = right_column_span(RingMatrix(Q.ring, C.rows, 1, C.col(col)), limits, span=target)
    for i in range(1, depth + 1):
        C = Q.composite(i, depth)
        for c in range(C.cols):
            if not target.contains(C.col(c)):
                return False
    return True


@dataclass(frozen=True)
class ClosureReport:
    members: tuple             # (IdealHandle, bool) for P = P0 + PI
    products_ok: bool
    intersections_ok: bool
    omega_ok: bool
    failures: tuple

    def to_json(self):
        return {"members": [{"ideal": I.to_json(), "member": m} for I, m in self.members],
                "products_ok": self.products_ok, "intersections_ok": self.intersections_ok,
                "omega_ok": self.omega_ok, "failures": [dict(f) for f in self.failures]}


def ipop_closure_check(T: Telescope, P0_cols, ideals, depth=4, limits=DEFAULT) -> ClosureReport:
    """Membership in ``I(P0, P)`` for each ideal, closure of the member set
    under products and intersections, and ``I^omega`` for ``I`` in ``I(P)``."""
    P0_cols = tuple(tuple(c) for c in P0_cols)
    cache = {}

    def member(I, cols=P0_cols):
        key = (I.elements, cols)
        if key not in cache:
            cache[key] = _decide(T, I, depth, cols, limits)
        return cache[key]

    ideals = [I if I.side == "two_sided" else None for I in ideals]
    if any(I is None for I in ideals):
        raise PreconditionFailed("positive sets are formed from two-sided ideals")
    members = [(I, member(I)) for I in ideals]
    pos = [I for I, m in members if m]
    failures = []
    prod_ok = inter_ok = omega_ok = True
    for I in pos:
        for J in pos:
            IJ = ideal_op("product", I, J)
            if not member(IJ):
                prod_ok = False
                failures.append((("check", "product"), ("left", I.members), ("right", J.members)))
            IcJ = ideal_op("intersection", I, J)
            if not member(IcJ):
                inter_ok = False
                failures.append((("check", "intersection"), ("left", I.members), ("right", J.members)))
    for I in ideals:
        if member(I, ()):                  # I in I(P)
            W = power_omega(I)
            if not member(W, ()):
                omega_ok = False
                failures.append((("check", "omega"), ("ideal", I.members)))
    return ClosureReport(tuple(members), prod_ok, inter_ok, omega_ok, tuple(failures))
