import random

import pytest
from hypothesis import given, settings, strategies as st

from projtrace.config import Limits
from projtrace.errors import NotFound, SizeCap
from projtrace.linalg import (VectorSpan, additive_closure, additive_generators, frame, left_row_span,
                              right_column_span, solve_rows)
from projtrace.ring import RingMatrix, matrix, modular, parse_preset


def test_frame_prime_characteristic(T22):
    fr = frame(T22)
    assert fr.p == 2 and fr.e == 3
    assert len(set(fr.coords)) == 8


def test_frame_composite():
    fr = frame(modular(6))
    assert fr.p == 0
    assert additive_closure(modular(6), fr.basis) == frozenset(range(6))


def test_additive_generators(Z6):
    assert additive_closure(Z6, additive_generators(Z6, {0, 2, 4})) == {0, 2, 4}


def test_span_membership_and_express(T22):
    sp = VectorSpan(T22, 2, track=True)
    sp.add((1, 2), "a")
    sp.add((4, 0), "b")
    assert sp.contains((5, 2))
    combo = sp.express((5, 2))
    assert combo == {"a": 1, "b": 1}
    assert not sp.contains((2, 1))


def test_span_composite_characteristic():
    Z6 = modular(6)
    sp = VectorSpan(Z6, 1, track=True)
    sp.add((2,), "g")
    assert sp.size == 3
    assert sp.express((4,)) == {"g": 2}
    assert sp.express((3,)) is None


def test_span_cap():
    Z = modular(30)
    sp = VectorSpan(Z, 3, limits=Limits(span=100))
    with pytest.raises(SizeCap):
        for v in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
            sp.add(v)


def test_column_and_row_spans(T22):
    M = matrix(T22, [[1], [0]])
    assert right_column_span(M).size == 4         # (E11 R, 0) = {0, E11, E12, E11+E12}
    assert left_row_span(M).size == 2             # R E11 = {0, E11}


def test_solve_rows(T22):
    M = matrix(T22, [[1, 2]])
    N = matrix(T22, [[2, 0]])
    with pytest.raises(NotFound):
        solve_rows(M, N)
    C = solve_rows(M, matrix(T22, [[1, 2], [0, 0]]))
    assert C.to_rows() == [[5], [0]] or C @ M == matrix(T22, [[1, 2], [0, 0]])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["triangular-2-2", "modular(6)", "field-3"]), st.integers(0, 10 ** 6))
def test_solve_rows_random(preset, seed):
    R = parse_preset(preset)
    rng = random.Random(seed)
    M = RingMatrix(R, 2, 3, tuple(rng.randrange(R.size) for _ in range(6)))
    C0 = RingMatrix(R, 2, 2, tuple(rng.randrange(R.size) for _ in range(4)))
    N = C0 @ M
    C = solve_rows(M, N)
    assert C @ M == N
