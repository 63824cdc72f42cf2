from dataclasses import replace

import pytest

from projtrace.errors import (ChainDataInvalid, MembershipFailed, NotFound, PreconditionFailed, WindowTooSmall)
from projtrace.ideals import close, two_sided_closure, unit_ideal
from projtrace.ring import RingMatrix, identity, matrix
from projtrace.telescope import (FG, NOT_FG, ChainData, Telescope, check_lift_reduction, constant_telescope,
                                 direct_sum, hom_row_chain, identity_telescope, idempotent_prefix, lift_build,
                                 strict_ml_check, telescope_trace, tensor_quotient, verify_certificates,
                                 whitehead_build, zero_telescope)
from projtrace.trace import chain_from_idempotent_prefix

from conftest import E11, E12


@pytest.fixture(scope="module")
def W(T22, lattice):
    return whitehead_build(T22, lattice["P1"], [E11, E12], 8)


def _lift_inputs(T22):
    J = close(T22, [E11], "left")
    one = identity(T22, 1)
    return ChainData((J,), ((E11,),)), [one], [one]


def test_whitehead_shape_and_certificates(W):
    assert W.sizes == tuple(2 ** i for i in range(9))
    assert verify_certificates(W, 8).valid


def test_whitehead_trace(W, lattice):
    tr = telescope_trace(W, 8)
    assert tr.ideal.elements == lattice["P1"].elements
    assert tr.stabilized and tr.stabilized_at == 1 and tr.exact


def test_whitehead_unit_ideal(T22):
    T = whitehead_build(T22, unit_ideal(T22), [T22.one], 4)
    assert all(x.to_rows() == [[T22.one]] for x in T.X)
    assert verify_certificates(T).valid


def test_whitehead_rejects_nilpotent(T22, lattice):
    with pytest.raises(PreconditionFailed):
        whitehead_build(T22, lattice["N"], [E12], 3)


def test_corrupt_certificate_fails(W):
    T = W.at_depth(4)
    Y2 = T.y(2)
    bad = RingMatrix(Y2.ring, Y2.rows, Y2.cols, tuple((x + 1) % 8 if i == 0 else x for i, x in enumerate(Y2.entries)))
    T = replace(T, rule=None, Y=(None, bad) + T.Y[2:])
    rep = verify_certificates(T, 4)
    assert dict(rep.links)[2] is False and dict(rep.links)[3] is True


def test_identity_and_zero(T22):
    I = identity_telescope(T22, 1, 4)
    assert verify_certificates(I).valid
    assert telescope_trace(I).ideal.is_whole
    Z = zero_telescope(T22, 4)
    assert telescope_trace(Z).ideal.is_zero


def test_hom_chain_stationary(W):
    for k in range(1, 7):
        assert hom_row_chain(W, k, 8).stationary_at == 1
    I = identity_telescope(W.ring, 1, 4)
    assert hom_row_chain(I, 1).stationary_at == 1


def test_strict_ml(W, T22):
    gs = strict_ml_check(W, 6)
    for k, g in enumerate(gs, start=2):
        assert g @ W.x(k) @ W.x(k - 1) == W.x(k - 1)
    nil = Telescope(T22, (matrix(T22, [[E12]]), matrix(T22, [[E12]])), (None, None))
    with pytest.raises(NotFound):
        strict_ml_check(nil, 2)
    gi = strict_ml_check(identity_telescope(T22, 1, 3))
    assert all(g == identity(T22, 1) for g in gi)


def test_tensor_quotients(W, lattice):
    t = tensor_quotient(W, lattice["P1"], 8)
    assert t.decision == FG and all(x.is_zero for x in t.telescope.X)
    q = tensor_quotient(W, lattice["Q2"], 8)
    assert q.decision == NOT_FG and q.witness["stage"] == 8
    assert tensor_quotient(W, lattice["R"], 6).decision == FG
    with pytest.raises(PreconditionFailed):
        tensor_quotient(W, None)
    with pytest.raises(PreconditionFailed):
        tensor_quotient(W, close(W.ring, [E11], "left"))


def test_prefix_chain(W, lattice, T22):
    p = idempotent_prefix(W, 3)
    assert p.matrix.shape == (14, 14)
    cert = chain_from_idempotent_prefix(p.matrix, p.bounds)
    assert cert.valid
    assert two_sided_closure(cert.union()).elements == lattice["P1"].elements
    pi = idempotent_prefix(identity_telescope(T22, 1, 5), 3)
    assert pi.matrix.to_rows()[0][0] == T22.one
    pz = idempotent_prefix(zero_telescope(T22, 5), 3)
    assert pz.matrix.is_zero


def test_trace_matches_prefix_chain(W, T22):
    for T in (W, identity_telescope(T22, 1, 6)):
        p = idempotent_prefix(T, 3)
        cert = chain_from_idempotent_prefix(p.matrix, p.bounds)
        assert two_sided_closure(cert.union()).elements == telescope_trace(T, 6).ideal.elements


def test_lift_round_trip(T22, lattice):
    chain, X, Y = _lift_inputs(T22)
    T = lift_build(T22, lattice["P1"], chain, X, Y, 6)
    assert T.sizes == (1, 2, 3, 4, 5, 6, 7)
    assert verify_certificates(T).valid
    assert check_lift_reduction(T, lattice["P1"], X)
    assert lattice["P1"].elements <= telescope_trace(T).ideal.elements
    t = tensor_quotient(T, lattice["P1"], 6)
    assert t.decision == FG


def test_lift_zero_module(T22, lattice):
    chain, _, _ = _lift_inputs(T22)
    z = matrix(T22, [[0]])
    T = lift_build(T22, lattice["P1"], chain, [z], [z], 5)
    assert verify_certificates(T).valid
    assert tensor_quotient(T, lattice["P1"], 5).growth[-1] == 0


def test_lift_membership_failure(T22, lattice):
    chain, X, _ = _lift_inputs(T22)
    with pytest.raises(MembershipFailed):
        lift_build(T22, lattice["P1"], chain, X, [matrix(T22, [[0]])], 4)


def test_lift_bad_chain(T22, lattice):
    N = lattice["N"].as_side("left")
    with pytest.raises(ChainDataInvalid):
        lift_build(T22, lattice["P1"], ChainData((N,), ((E12,),)), [identity(T22, 1)], [identity(T22, 1)], 3)


def test_window_errors(T22):
    T = Telescope(T22, (identity(T22, 1),), (None,))
    with pytest.raises(WindowTooSmall):
        T.at_depth(3)


def test_direct_sum_keeps_rule(W, T22):
    S = direct_sum(W.at_depth(3), identity_telescope(T22, 1, 3))
    S6 = S.at_depth(6)
    assert S6.sizes == tuple(2 ** i + 1 for i in range(7))
    assert verify_certificates(S6).valid


def test_constant_telescope_needs_square(T22):
    with pytest.raises(Exception):
        constant_telescope(matrix(T22, [[1, 2]]), None)
