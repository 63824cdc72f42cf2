import random

import pytest

from projtrace.errors import AxiomViolation, DimensionMismatch, InputError, SizeCap
from projtrace.config import Limits
from projtrace.ring import (RingMatrix, block_diag, field_tables, identity, make_ring_from_tables, matrix,
                            matrix_arithmetic, modular, opposite_ring, parse_preset, preset_ring, product,
                            quotient_ring, units, verify_axioms, zeros)
from projtrace.ideals import close, enumerate_ideals

from conftest import E11, E12, E22, ONE


def rand_matrix(ring, r, c, rng):
    return RingMatrix(ring, r, c, tuple(rng.randrange(ring.size) for _ in range(r * c)))


def test_two_element_field_from_tables():
    R = make_ring_from_tables([[0, 1], [1, 0]], [[0, 0], [0, 1]], 0, 1, "F2")
    assert R.size == 2 and R.is_commutative


def test_non_associative_tables_rejected():
    add = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    mul = [[(a * b) % 3 for b in range(3)] for a in range(3)]
    mul[2][2] = 2          # breaks the multiplication
    with pytest.raises(AxiomViolation) as exc:
        make_ring_from_tables(add, mul, 0, 1)
    assert exc.value.witness


def test_modular_six():
    R = modular(6)
    assert R.size == 6 and R.is_commutative
    assert units(R) == [1, 5]


def test_triangular_encoding(T22):
    assert T22.size == 8 and T22.one == ONE
    assert T22.mul[E12][E11] == 0
    assert T22.mul[E11][E12] == E12
    assert T22.mul[E12][E22] == E12
    assert units(T22) == [5, 7]


def test_triangular_three(T32):
    assert T32.size == 64
    verify_axioms(T32)


def test_field_presets_units():
    for q in (2, 3, 4):
        R = parse_preset(f"field-{q}")
        verify_axioms(R)
        assert units(R) == list(range(1, q))


def test_field_tables_gf4_has_order_three_element():
    add, mul = field_tables(4)
    x = 2
    assert mul[mul[x][x]][x] == 1


@pytest.mark.parametrize("name,size", [("triangular-2-2", 8), ("modular(6)", 6), ("full_matrix-2-2", 16),
                                       ("product(modular-2,modular-3)", 6)])
def test_presets_verify(name, size):
    R = parse_preset(name)
    assert R.size == size
    verify_axioms(R)
    assert parse_preset(R.name) == R


def test_preset_ring_kinds():
    assert preset_ring("modular", 5).size == 5
    assert preset_ring("product", modular(2), modular(2)).size == 4
    with pytest.raises(InputError):
        preset_ring("octonions", 2)
    with pytest.raises(InputError):
        parse_preset("nonsense")


def test_size_cap():
    with pytest.raises(SizeCap):
        modular(50, limits=Limits(ring_size=10))


def test_matrix_identity_and_distributivity(T22):
    rng = random.Random(1)
    I = identity(T22, 3)
    for _ in range(50):
        A, B, C = (rand_matrix(T22, 3, 3, rng) for _ in range(3))
        assert I @ A == A
        assert (A + B) @ C == A @ C + B @ C
        assert matrix_arithmetic("mul", matrix_arithmetic("add", A, B), C) == (A @ C) + (B @ C)


@pytest.mark.parametrize("preset", ["triangular-2-2", "triangular-3-2", "modular(6)"])
def test_matrix_associativity(preset):
    R = parse_preset(preset)
    rng = random.Random(7)
    for _ in range(100):
        a, b, c, d = (rng.randint(1, 3) for _ in range(4))
        A, B, C = rand_matrix(R, a, b, rng), rand_matrix(R, b, c, rng), rand_matrix(R, c, d, rng)
        assert (A @ B) @ C == A @ (B @ C)


def test_matrix_shape_errors(T22):
    with pytest.raises(DimensionMismatch):
        matrix(T22, [[1, 2], [3]])
    with pytest.raises(DimensionMismatch):
        matrix_arithmetic("mul", zeros(T22, 2, 3), zeros(T22, 2, 3))


def test_units_closed(T32):
    U = set(units(T32))
    assert T32.one in U
    assert all(T32.mul[a][b] in U for a in U for b in U)


def test_opposite(T22, Z6):
    assert opposite_ring(Z6) == Z6
    assert opposite_ring(opposite_ring(T22)) == T22
    op = opposite_ring(T22)
    # right ideals of R are left ideals of the opposite ring
    left_op = {I.elements for I in enumerate_ideals(op, "left")}
    right = {I.elements for I in enumerate_ideals(T22, "right")}
    assert left_op == right
    assert close(op, [E11], "left").elements == close(T22, [E11], "right").elements


def test_quotient_by_P1_is_field(T22):
    q = quotient_ring(T22, close(T22, [E11]).elements)
    assert q.ring.size == 2
    verify_axioms(q.ring)
    assert all(q.proj[q.reps[x]] == x for x in q.ring.elements)


def test_block_diag_shape(T22):
    M = block_diag([matrix(T22, [[1], [2]]), matrix(T22, [[4]])])
    assert M.shape == (3, 2)
    assert M.to_rows() == [[1, 0], [2, 0], [0, 4]]


def test_product_ring_identity():
    R = product(modular(2), modular(3))
    verify_axioms(R)
    assert R.is_commutative and len(units(R)) == 2


def test_ring_json_round_trip(T32):
    spec = T32.to_json()
    back = make_ring_from_tables(spec["add"], spec["mul"], spec["zero"], spec["one"], spec["name"])
    assert back == T32 and back.to_json() == spec
