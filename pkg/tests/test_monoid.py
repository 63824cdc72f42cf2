import pytest
from hypothesis import given, settings, strategies as st

from projtrace.errors import DimensionMismatch, InputError, NotMember
from projtrace.monoid import (INF, congruence_system, express, ext_add, ext_mul, finite_hilbert_basis, format_vector,
                              is_irreducible, is_semi_semiperfect, member, parse_extnat, parse_system, parse_vector,
                              realizable_supports, support_generators, supports, vec_add, vstar_generators,
                              dim_vector_of_telescope)
from projtrace.telescope import direct_sum, identity_telescope, whitehead_build, zero_telescope

from conftest import E11, E12


@pytest.fixture(scope="module")
def M():
    return parse_system("2,3;1,2", "5,2")


def test_extended_arithmetic():
    assert ext_add(3, INF) is INF and ext_add(2, 3) == 5
    assert ext_mul(0, INF) == 0 and ext_mul(2, INF) is INF
    assert parse_extnat("inf") is INF and parse_extnat("7") == 7
    with pytest.raises(InputError):
        parse_extnat("-1")
    assert format_vector(parse_vector("2,inf")) == "(2,inf)"
    assert supports((0, 3, INF)) == (frozenset({2, 3}), frozenset({3}))


def test_membership(M):
    assert member(M, (0, 5)) and member(M, (2, 2)) and member(M, (INF, 0))
    assert not member(M, (1, 0)) and not member(M, (0, 1))
    assert member(M, (1, INF))
    with pytest.raises(DimensionMismatch):
        member(M, (1,))


def test_finite_basis(M):
    assert finite_hilbert_basis(M) == ((0, 5), (2, 2), (6, 1), (10, 0))


def test_vstar_generators(M):
    gens = vstar_generators(M)
    assert [format_vector(g) for g in gens] == ["(0,5)", "(0,inf)", "(1,inf)", "(2,2)", "(6,1)", "(10,0)", "(inf,0)"]
    assert all(member(M, g) for g in gens)
    assert all(is_irreducible(M, g) for g in gens)


def test_reducible_elements(M):
    assert not is_irreducible(M, (2, 7))
    assert not is_irreducible(M, (INF, INF))


def test_support_generators(M):
    g = support_generators(M, frozenset({1}))
    assert g == ((INF, 0), (INF, 1))
    assert all(member(M, x) for x in g)
    assert realizable_supports(M) == [frozenset({1}), frozenset({2}), frozenset({1, 2})]


def test_semiperfect(M):
    rep = is_semi_semiperfect(M)
    assert rep.value and rep.witnesses == (10, 5)
    bad = congruence_system([[1, 0]], [2])
    assert is_semi_semiperfect(bad).value


def test_express(M):
    parts = express(M, (2, INF))
    assert parts == ((2, 2), (0, INF))
    assert express(M, (0, 0)) == ()
    with pytest.raises(NotMember):
        express(M, (1, 0))
    for x in [(8, 3), (INF, 7), (4, 4)]:
        p = express(M, x)
        total = (0, 0)
        for v in p:
            total = vec_add(total, v)
        assert total == x


def test_trivial_systems():
    assert vstar_generators(congruence_system([], [], k=1)) == ((1,), (INF,))
    assert vstar_generators(congruence_system([[1]], [2])) == ((2,), (INF,))


def test_bad_systems():
    with pytest.raises(InputError):
        congruence_system([[1, 2]], [1])
    with pytest.raises(DimensionMismatch):
        congruence_system([[1, 2], [1]], [2, 2])


_coord = st.one_of(st.integers(0, 30), st.just(INF))


@settings(max_examples=150, deadline=None)
@given(st.tuples(_coord, _coord), st.tuples(_coord, _coord))
def test_member_closed_under_addition(x, y):
    M = parse_system("2,3;1,2", "5,2")
    if member(M, x) and member(M, y):
        assert member(M, vec_add(x, y))


@settings(max_examples=150, deadline=None)
@given(st.tuples(_coord, _coord, _coord), st.tuples(_coord, _coord, _coord))
def test_supports_additive(x, y):
    sx, ix = supports(x)
    sy, iy = supports(y)
    s, i = supports(vec_add(x, y))
    assert s == sx | sy and i == ix | iy


def test_dim_vectors(T22, lattice):
    W = whitehead_build(T22, lattice["P1"], [E11, E12], 6)
    assert dim_vector_of_telescope(T22, W) == (INF, 0)
    assert dim_vector_of_telescope(T22, identity_telescope(T22, 1, 6)) == (1, 1)
    assert dim_vector_of_telescope(T22, zero_telescope(T22, 6)) == (0, 0)
    S = direct_sum(W, identity_telescope(T22, 1, 6))
    assert dim_vector_of_telescope(T22, S) == (INF, 1)
