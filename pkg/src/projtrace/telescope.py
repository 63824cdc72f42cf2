"""Direct systems ``F_1 -X_1-> F_2 -X_2-> ...`` of finite free right modules.

``F_k = R^{m_k}`` is a module of columns and ``X_k`` (shape ``m_{k+1} x m_k``)
acts by left multiplication.  A certificate ``Y_k`` (shape ``m_k x m_{k+1}``)
satisfies ``Y_k X_k X_{k-1} = X_{k-1}``; a full set of them shows the
colimit is projective.

Stages are numbered from 1 as in ``X_1, X_2, ...``; internally ``X[k-1]``
holds ``X_k``.  ``Y[0]`` is normally ``None`` because ``Y_1`` plays no role.

A telescope carries an optional :class:`TailRule` describing how it
continues past the materialised prefix.  Rules with ``periodic=True`` make
one-period stability arguments conclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from .config import DEFAULT
from .errors import (CertificateSolveFailed, ChainDataInvalid, DecompositionFailed,
                     DimensionMismatch, MembershipFailed, MissingCertificate,
                     NotFound, PreconditionFailed, WindowTooSmall)
from .ideals import IdealHandle, close, from_elements, is_idempotent, two_sided_closure
from .linalg import VectorSpan, left_row_span, right_column_span, solve_rows
from .ring import (RingMatrix, RingTable, block_diag, column, hstack, identity,
                   quotient_ring, vstack, zeros)
from .trace import solve_left_factor, stacked


@dataclass(frozen=True)
class TailRule:
    kind: str                 # cyclic | whitehead | lift | tree
    period: int = 1
    tail_start: int = 1       # first stage index from which the pattern repeats
    periodic: bool = True
    params: dict = field(default_factory=dict, compare=False, hash=False)
    extend: Callable | None = field(default=None, compare=False, hash=False, repr=False)

    def to_json(self):
        return {"kind": self.kind, "period": self.period, "tail_start": self.tail_start,
                "periodic": self.periodic}


@dataclass(frozen=True)
class Telescope:
    ring: RingTable = field(repr=False)
    X: tuple
    Y: tuple
    rule: TailRule | None = None
    name: str = "telescope"
    m1: int = 0               # rank of F_1 when no transition is materialised

    def __post_init__(self):
        if not self.X and self.m1 < 1:
            raise DimensionMismatch("a telescope needs X_1 or an explicit rank m1")
        for k in range(1, len(self.X)):
            if self.X[k].cols != self.X[k - 1].rows:
                raise DimensionMismatch(f"X_{k + 1} has {self.X[k].cols} columns, F_{k + 1} has rank {self.X[k - 1].rows}")
        if len(self.Y) > len(self.X):
            raise DimensionMismatch("more certificates than transitions")
        for k, Yk in enumerate(self.Y, start=1):
            if Yk is not None and Yk.shape != (self.X[k - 1].cols, self.X[k - 1].rows):
                raise DimensionMismatch(f"Y_{k} has shape {Yk.shape}, expected {(self.X[k - 1].cols, self.X[k - 1].rows)}")

    @property
    def depth(self):
        return len(self.X)

    @property
    def sizes(self):
        if not self.X:
            return (self.m1,)
        return (self.X[0].cols,) + tuple(x.rows for x in self.X)

    def m(self, k):
        return self.sizes[k - 1]

    def x(self, k) -> RingMatrix:
        return self.X[k - 1]

    def y(self, k):
        if k - 1 < len(self.Y):
            return self.Y[k - 1]
        return None

    @property
    def periodic(self):
        return self.rule is not None and self.rule.periodic

    def at_depth(self, depth) -> "Telescope":
        """Truncate or extend (through the tail rule) to exactly ``depth``."""
        if depth < 0 or (depth == 0 and self.m1 < 1):
            raise WindowTooSmall("depth must be at least 1")
        if depth <= self.depth:
            return replace(self, X=self.X[:depth], Y=self.Y[:depth])
        if self.rule is None or self.rule.extend is None:
            raise WindowTooSmall(f"telescope is materialised to depth {self.depth} and has no extendable tail rule",
                                 depth=self.depth)
        X, Y = list(self.X), list(self.Y) + [None] * (self.depth - len(self.Y))
        while len(X) < depth:
            nx, ny = self.rule.extend(self, X, Y)
            X.append(nx)
            Y.append(ny)
        return replace(self, X=tuple(X), Y=tuple(Y))

    def composite(self, k, l) -> RingMatrix:
        """``X_l ... X_k`` as a map ``F_k -> F_{l+1}``."""
        out = self.x(k)
        for j in range(k + 1, l + 1):
            out = self.x(j) @ out
        return out

    def to_json(self):
        out = {"ring": self.ring.name, "name": self.name, "sizes": {"prefix": list(self.sizes)},
               "X": [m.to_rows() for m in self.X],
               "Y": [None if m is None else m.to_rows() for m in self.Y]}
        if self.rule is not None:
            out["sizes"]["period"] = self.rule.period
            out["rule"] = self.rule.to_json()
        return out


# ---------------------------------------------------------------- builders

def cyclic_rule(period=1, tail_start=1):
    def extend(tel, X, Y):
        k = len(X) + 1              # stage being added
        src = k - period
        if src < tail_start:
            raise WindowTooSmall("cyclic tail has not started yet")
        return X[src - 1], (Y[src - 1] if src - 1 < len(Y) else None)
    return TailRule("cyclic", period, tail_start, True, {}, extend)


def constant_telescope(M: RingMatrix, Yc: RingMatrix | None, depth=1, name="constant") -> Telescope:
    if M.rows != M.cols:
        raise DimensionMismatch("a constant telescope needs a square transition")
    T = Telescope(M.ring, (M,), (None,), cyclic_rule(1, 1), name)
    T = replace(T, Y=(Yc,))
    return T.at_depth(depth)


def identity_telescope(ring, n=1, depth=1) -> Telescope:
    I = identity(ring, n)
    return constant_telescope(I, I, depth, "identity")


def zero_telescope(ring, depth=1) -> Telescope:
    Z = zeros(ring, 1, 1)
    return constant_telescope(Z, Z, depth, "zero")


def direct_sum(S: Telescope, T: Telescope) -> Telescope:
    """Blockwise sum; the tail rule survives when both summands extend."""
    depth = min(S.depth, T.depth)
    X = tuple(block_diag([a, b]) for a, b in zip(S.X[:depth], T.X[:depth]))
    Y = []
    for k in range(1, depth + 1):
        a, b = S.y(k), T.y(k)
        Y.append(None if a is None or b is None else block_diag([a, b]))
    rule = None
    if S.rule and T.rule and S.rule.extend and T.rule.extend:
        parts = {"S": S, "T": T}

        def extend(tel, Xs, Ys):
            k = len(Xs) + 1
            parts["S"] = parts["S"].at_depth(max(k, parts["S"].depth))
            parts["T"] = parts["T"].at_depth(max(k, parts["T"].depth))
            a, b = parts["S"], parts["T"]
            ya, yb = a.y(k), b.y(k)
            return block_diag([a.x(k), b.x(k)]), (None if ya is None or yb is None else block_diag([ya, yb]))

        rule = TailRule("sum", math.lcm(S.rule.period, T.rule.period),
                        max(S.rule.tail_start, T.rule.tail_start), S.periodic and T.periodic, {}, extend)
    return Telescope(S.ring, X, tuple(Y), rule, f"{S.name}+{T.name}")


def whitehead_build(ring: RingTable, I: IdealHandle, gens, depth=4) -> Telescope:
    """Telescope ``X_1 = a``, ``X_{n+1} = diag(a, ..., a)`` for a generating
    column ``a`` of an idempotent left ideal ``J`` with ``JR = I``."""
    a = tuple(int(g) for g in gens)
    if not a:
        raise PreconditionFailed("need at least one generator")
    J = close(ring, a, "left")
    if not is_idempotent(J):
        raise PreconditionFailed("the left ideal generated by the column is not idempotent",
                                 gens=list(a))
    if two_sided_closure(J).elements != I.elements:
        raise PreconditionFailed("the generated two-sided ideal differs from I", gens=list(a))
    ell = len(a)
    try:
        D = solve_left_factor(column(ring, a), a, 1, J, J)          # D a = a over J
        Cblk = solve_left_factor(D, a, ell, frozenset(ring.elements))  # Cblk diag(a) = D
    except DecompositionFailed as exc:
        raise CertificateSolveFailed(str(exc)) from exc

    def extend(tel, X, Y):
        k = len(X) + 1
        m_k = ell ** (k - 1)
        nx = stacked(ring, a, m_k)
        ny = block_diag([Cblk] * (m_k // ell)) if k >= 2 else None
        return nx, ny

    rule = TailRule("whitehead", 1, 1, True, {"gens": list(a), "D": D.to_rows()}, extend)
    T = Telescope(ring, (column(ring, a),), (None,), rule, "whitehead")
    return T.at_depth(depth)


# ------------------------------------------------------------ certificates

@dataclass(frozen=True)
class CertificateReport:
    links: tuple      # (k, ok)

    @property
    def valid(self):
        return all(ok for _, ok in self.links)

    def to_json(self):
        return {"valid": self.valid, "links": [{"k": k, "ok": ok} for k, ok in self.links]}


def verify_certificates(T: Telescope, depth=None) -> CertificateReport:
    depth = T.depth if depth is None else depth
    T = T.at_depth(depth)
    links = []
    for k in range(2, depth + 1):
        Yk = T.y(k)
        if Yk is None:
            raise MissingCertificate(k)
        links.append((k, Yk @ (T.x(k) @ T.x(k - 1)) == T.x(k - 1)))
    return CertificateReport(tuple(links))


# ------------------------------------------------------------------ traces

@dataclass(frozen=True)
class TraceResult:
    ideal: IdealHandle
    stabilized: bool
    stabilized_at: int | None
    exact: bool           # backed by a periodic tail rule

    def to_json(self):
        return {"ideal": self.ideal.to_json(), "stabilized": self.stabilized,
                "stabilized_at": self.stabilized_at, "exact": self.exact}


def telescope_trace(T: Telescope, depth=None) -> TraceResult:
    depth = T.depth if depth is None else depth
    T = T.at_depth(depth)
    ring = T.ring
    cur = frozenset({ring.zero})
    history = []
    seen = set()
    for k in range(1, depth + 1):
        new = [x for x in T.x(k).entries if x not in seen]
        seen.update(new)
        if new:
            cur = close(ring, sorted(seen), "two_sided").elements
        history.append(cur)
    at = None
    for k in range(depth, 0, -1):
        if history[k - 1] == history[-1]:
            at = k
        else:
            break
    period = T.rule.period if T.rule else 1
    tail = T.rule.tail_start if T.rule else 1
    stabilized = depth - at >= period and at >= tail if T.periodic else depth - at >= 1
    if T.periodic and at >= tail and depth - at >= period:
        stabilized = True
    return TraceResult(from_elements(ring, cur, "two_sided"), bool(stabilized), at, T.periodic)


# ------------------------------------------------------- stationarity

@dataclass(frozen=True)
class HomChain:
    k: int
    dims: tuple            # size measure of the row span of X_{k+l} ... X_k
    stationary_at: int | None

    def to_json(self):
        return {"k": self.k, "dims": list(self.dims), "stationary_at": self.stationary_at}


def _measure(span: VectorSpan):
    return span.dim if span.fr.p else span.size


def hom_row_chain(T: Telescope, k: int, depth=None, limits=DEFAULT) -> HomChain:
    """Row spans of ``X_{k+l} ... X_k`` for ``l = 0 .. depth-k``; these are
    the images of ``Hom(F_{k+l+1}, R)`` in ``Hom(F_k, R)``.  The chain is
    descending, so equal measure means equal modules."""
    depth = T.depth if depth is None else depth
    if k < 1 or k > depth:
        raise WindowTooSmall(f"need 1 <= k <= depth, got k={k}, depth={depth}")
    T = T.at_depth(depth)
    dims = []
    P = T.x(k)
    for l in range(0, depth - k + 1):
        if l:
            P = T.x(k + l) @ P
        dims.append(_measure(left_row_span(P, limits)))
    at = None
    if len(dims) >= 2:
        last = dims[-1]
        first = len(dims) - 1
        while first > 0 and dims[first - 1] == last:
            first -= 1
        if first < len(dims) - 1:
            at = max(first, 1)
    return HomChain(k, tuple(dims), at)


def strict_ml_check(T: Telescope, depth=None, limits=DEFAULT) -> list:
    """For each ``k = 2..depth`` a matrix ``g_k`` with
    ``g_k X_k X_{k-1} = X_{k-1}``, found by linear solving."""
    depth = T.depth if depth is None else depth
    T = T.at_depth(depth)
    out = []
    for k in range(2, depth + 1):
        try:
            out.append(solve_rows(T.x(k) @ T.x(k - 1), T.x(k - 1), limits=limits))
        except NotFound as exc:
            raise NotFound(f"no g_{k} with g X_{k} X_{k - 1} = X_{k - 1}", k=k) from exc
    return out


# ------------------------------------------------------------- quotients

FG, NOT_FG, UNDETERMINED = "FINITELY_GENERATED", "NOT_FG", "UNDETERMINED"


@dataclass(frozen=True)
class TensorResult:
    telescope: Telescope
    decision: str
    stage: int | None
    witness: dict | None
    growth: tuple           # image measure of F_i in the last stage
    quotient: object = field(repr=False, default=None)

    def to_json(self):
        return {"decision": self.decision, "stage": self.stage, "witness": self.witness,
                "growth": list(self.growth), "quotient_size": self.telescope.ring.size}


def reduce_telescope(T: Telescope, I: IdealHandle):
    q = quotient_ring(T.ring, I.elements, name=f"{T.ring.name}/I")
    proj = q.proj
    X = tuple(m.map(lambda x: proj[x], q.ring) for m in T.X)
    Y = tuple(None if m is None else m.map(lambda x: proj[x], q.ring) for m in T.Y)
    rule = None
    if T.rule is not None:
        rule = replace(T.rule, extend=None)
    return Telescope(q.ring, X, Y, rule, f"{T.name}/I"), q


def tensor_quotient(T: Telescope, I: IdealHandle | None, depth=None, limits=DEFAULT) -> TensorResult:
    """Reduce mod ``I`` and decide whether the colimit is finitely generated.

    ``growth[i-1]`` measures the image of ``F_i`` in ``F_{depth+1}``.  A
    plateau lasting at least one tail period ending at the window edge
    certifies finite generation; strict growth across every step of the
    last period of a periodic tail certifies the opposite."""
    if I is None:
        raise PreconditionFailed("tensor_quotient needs an ideal")
    if I.side != "two_sided":
        raise PreconditionFailed("tensor_quotient needs a two-sided ideal")
    depth = T.depth if depth is None else depth
    T = T.at_depth(depth)
    Q, q = reduce_telescope(T, I)
    growth = []
    spans = []
    for i in range(1, depth + 1):
        sp = right_column_span(Q.composite(i, depth), limits)
        spans.append(sp)
        growth.append(_measure(sp))
    period = T.rule.period if T.rule else 1
    tail = T.rule.tail_start if T.rule else 1
    # plateau ending at the window edge
    start = depth
    while start > 1 and growth[start - 2] == growth[-1]:
        start -= 1
    settled = max(start, tail) if T.periodic else start
    if depth - settled >= period:
        return TensorResult(Q, FG, start, None, tuple(growth), q)
    if T.periodic and depth - period >= max(tail, 1) + 0:
        lo = depth - period
        if all(growth[i] > growth[i - 1] for i in range(lo, depth)):
            # a generator of the last stage that misses the previous image
            C = Q.composite(depth, depth)
            prev = spans[depth - 2]
            for c in range(C.cols):
                if not prev.contains(C.col(c)):
                    return TensorResult(Q, NOT_FG, None, {"stage": depth, "column": c},
                                        tuple(growth), q)
    return TensorResult(Q, UNDETERMINED, None, None, tuple(growth), q)


# ---------------------------------------------------------------- lifting

@dataclass(frozen=True)
class ChainData:
    """Left ideals ``J_k`` with generating columns ``a_k`` such that
    ``J_k = sum_i J_{k+1} a^k_i``; the last entry repeats forever."""
    ideals: tuple
    gens: tuple

    def at(self, k):
        i = min(k, len(self.ideals)) - 1
        return self.ideals[i], self.gens[i]


def _extend_seq(seq, k):
    return seq[min(k, len(seq)) - 1]


def lift_build(ring: RingTable, I: IdealHandle, chain: ChainData, Xbar, Ybar, depth=4) -> Telescope:
    """Lift a direct system over ``R/I`` (matrices given by lifts over ``R``,
    last entries repeating) to a telescope over ``R`` whose reduction mod
    ``I`` is the given system padded by zeros."""
    Xbar, Ybar = list(Xbar), list(Ybar)
    if not Xbar or not Ybar:
        raise ChainDataInvalid("need at least one X and one Y")
    for M in Xbar + Ybar:
        if M.ring != ring:
            raise ChainDataInvalid("matrices must be lifts over the base ring")
    # chain checks on the window
    union = set()
    for k in range(1, depth + 3):
        Jk, ak = chain.at(k)
        Jn, _ = chain.at(k + 1)
        if close(ring, ak, "left").elements != Jk.elements:
            raise ChainDataInvalid(f"a_{k} does not generate J_{k}", k=k)
        if not Jk.elements <= Jn.elements:
            raise ChainDataInvalid(f"J_{k} is not inside J_{k + 1}", k=k)
        from .trace import decomposition_table
        if frozenset(decomposition_table(ring, tuple(ak), Jn.elements)) != Jk.elements:
            raise ChainDataInvalid(f"J_{k} != sum J_{k + 1} a_{k}", k=k)
        JR = two_sided_closure(Jk).elements
        if not JR <= I.elements:
            raise ChainDataInvalid(f"J_{k} R is not inside I", k=k)
        union |= JR
    if union != set(I.elements):
        raise ChainDataInvalid("the ideals J_k R do not exhaust I inside the window")

    def X_(k):
        return _extend_seq(Xbar, k)

    def Y_(k):
        return _extend_seq(Ybar, k)

    for k in range(1, depth + 2):
        if X_(k).rows < 1 or X_(k).cols < 1:
            raise ChainDataInvalid("ranks n_k must be positive")
        if k > 1 and X_(k).cols != X_(k - 1).rows:
            raise ChainDataInvalid(f"X_{k} does not compose with X_{k - 1}")
        Z = Y_(k) @ X_(k + 1) @ X_(k) - X_(k)
        Jk, _ = chain.at(k)
        for (i, j, x) in Z.nonzero():
            if x not in Jk.elements:
                raise MembershipFailed(f"entry ({i},{j}) of Y_{k} X_{k + 1} X_{k} - X_{k} is not in J_{k}",
                                       k=k, entry=[i, j], value=x)

    whole = frozenset(ring.elements)
    state = {"m": [None, X_(1).cols], "A": [None], "Aprime": [None]}

    def block(k):
        """A_k and its pieces."""
        m_k = state["m"][k]
        _, ak = chain.at(k)
        n_next = X_(k).rows
        Xp = hstack([X_(k), zeros(ring, n_next, m_k - X_(k).cols)]) if m_k > X_(k).cols else X_(k)
        Ap = stacked(ring, ak, m_k)
        return vstack([Xp, Ap]), Xp, Ap

    def extend(tel, X, Y):
        k = len(X) + 1              # adding A_k and the certificate for stage k
        while len(state["m"]) <= k:
            kk = len(state["m"]) - 1
            _, akk = chain.at(kk)
            state["m"].append(X_(kk).rows + state["m"][kk] * len(akk))
        A_k, _, _ = block(k)
        cert = None
        if k >= 2:
            cert = _lift_certificate(k - 1)
        return A_k, cert

    def _lift_certificate(k):
        # certificate E_k with E_k A_{k+1} A_k = A_k (telescope index k+1)
        Jn, _ = chain.at(k + 1)
        _, ak = chain.at(k)
        _, an = chain.at(k + 1)
        m_k, m_n = state["m"][k], state["m"][k + 1]
        _, Xp, Ap = block(k)
        Z = Y_(k) @ X_(k + 1) @ Xp - Xp
        try:
            C1 = solve_left_factor(Z, ak, m_k, Jn)
            C2 = solve_left_factor(Ap, ak, m_k, Jn)
            n_n = X_(k + 1).rows
            rows_c2 = C2.rows
            zero_top = zeros(ring, rows_c2, n_n)
            D2 = solve_left_factor(hstack([zero_top, C2]), an, m_n, whole)
            D1 = solve_left_factor(hstack([zeros(ring, Z.rows, n_n), C1.neg()]), an, m_n, whole)
        except DecompositionFailed as exc:
            raise CertificateSolveFailed(f"lift certificate at stage {k + 1}: {exc}") from exc
        top = hstack([Y_(k), D1])
        bottom = hstack([zeros(ring, D2.rows, Y_(k).cols), D2])
        return vstack([top, bottom])

    constant = len(Xbar) == 1 and len(Ybar) == 1 and len(chain.ideals) == 1
    rule = TailRule("lift", 1, 1, constant, {}, extend)
    A1, _, _ = block(1)
    T = Telescope(ring, (A1,), (None,), rule, "lift")
    return T.at_depth(depth)


def check_lift_reduction(T: Telescope, I: IdealHandle, Xbar, depth=None) -> bool:
    """Reduction of a lifted telescope mod ``I`` is the input system in the
    top-left corner and zero elsewhere."""
    depth = T.depth if depth is None else depth
    Q, q = reduce_telescope(T.at_depth(depth), I)
    for k in range(1, depth + 1):
        Xk = _extend_seq(list(Xbar), k).map(lambda x: q.proj[x], q.ring)
        A = Q.x(k)
        for i in range(A.rows):
            for j in range(A.cols):
                want = Xk[i, j] if i < Xk.rows and j < Xk.cols else q.ring.zero
                if A[i, j] != want:
                    return False
    return True


# --------------------------------------------------- idempotent windows

@dataclass(frozen=True)
class IdempotentPrefix:
    matrix: RingMatrix
    bounds: tuple          # per column: last possibly nonzero row (may exceed the window)
    stages: tuple          # stage index of each block, starting at 2
    offsets: tuple         # first row/column of each block

    def col_bound(self, j):
        return self.bounds[j]

    @property
    def complete(self):
        n = self.matrix.rows
        return tuple(j for j, b in enumerate(self.bounds) if b < n)

    def to_json(self):
        return {"rows": self.matrix.to_rows(), "bounds": list(self.bounds),
                "stages": list(self.stages), "offsets": list(self.offsets)}


def idempotent_prefix(T: Telescope, depth=3) -> IdempotentPrefix:
    """Window of a column-finite idempotent matrix presenting the colimit.

    With ``u_n : F_n -> P`` the canonical maps, ``rho_n : P -> F_n`` is
    ``rho_n u_j = Y_n ... Y_j X_j`` for ``j >= n`` and
    ``Y_n X_n X_{n-1} ... X_j`` for ``j < n`` (well defined by the
    certificates).  Then ``tau_2 = rho_2``, ``tau_n = rho_n - X_{n-1} rho_{n-1}``
    give ``sum_n u_n tau_n = id_P`` and the matrix of ``tau u`` on
    ``F_2 + F_3 + ...`` is idempotent.  Column block ``j`` is zero below
    block ``j + 1``.  The window covers stages ``2 .. depth+1``."""
    if depth < 1:
        raise WindowTooSmall("idempotent prefix needs depth >= 1")
    S = depth + 1
    T = T.at_depth(S + 1)
    rep = verify_certificates(T, S + 1)
    if not rep.valid:
        raise PreconditionFailed("certificates fail inside the window")
    ring = T.ring
    stages = tuple(range(2, S + 1))
    sizes = [T.m(n) for n in stages]
    offsets = []
    off = 0
    for s in sizes:
        offsets.append(off)
        off += s
    N = off

    cache = {}

    def Tmap(n, j):
        key = (n, j)
        if key in cache:
            return cache[key]
        if j >= n:
            val = T.y(j) @ T.x(j) if j == n else T.y(n) @ Tmap(n + 1, j)
        else:
            val = T.y(n) @ (T.x(n) @ T.composite(j, n - 1))
        cache[key] = val
        return val

    entries = [ring.zero] * (N * N)
    bounds = []
    for bj, j in enumerate(stages):
        for bn, n in enumerate(stages):
            if n > j + 1:
                continue      # zero by the certificates
            blk = Tmap(n, j)
            if n > 2:
                blk = blk - T.x(n - 1) @ Tmap(n - 1, j)
            r0, c0 = offsets[bn], offsets[bj]
            for i in range(blk.rows):
                for c in range(blk.cols):
                    entries[(r0 + i) * N + c0 + c] = blk[i, c]
        for c in range(sizes[bj]):
            col = offsets[bj] + c
            if j + 1 <= S:
                last = -1
                for i in range(N):
                    if entries[i * N + col] != ring.zero:
                        last = i
                bounds.append(last)
            else:
                bounds.append(N + T.m(j + 1) - 1)
    A = RingMatrix(ring, N, N, tuple(entries))
    return IdempotentPrefix(A, tuple(bounds), stages, tuple(offsets))
