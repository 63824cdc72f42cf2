import pytest

from projtrace.errors import InputError, PreconditionFailed
from projtrace.telescope import telescope_trace, verify_certificates
from projtrace.tree import (basic_closed_form, build_basic_tree, build_sequence_tree, central_primitive_idempotents,
                            chain_spec, find_lift, find_strict_chain, lift_is_valid, multiplicity_vector,
                            provenance_split, sequence_alpha, solve_idempotent_certificate, validate_chain_spec,
                            verify_multiplicities)


@pytest.fixture(scope="module")
def cs(T32):
    return find_strict_chain(T32, 3)


def test_strict_chain_shape(cs):
    assert [len(I) for I in cs.ideals] == [64, 32, 16]
    assert validate_chain_spec(cs).valid
    assert cs.m(1) == cs.m(2) == 2
    assert cs.lift(2, 5) == 0
    assert cs.ideal(7) is cs.ideals[-1]


def test_validation_reports_failures(cs, T32):
    broken = chain_spec(T32, cs.ideals, {**cs.lifts, (0, 1): 0}, cs.gens)
    checks = {dict(f)["check"] for f in validate_chain_spec(broken).failures}
    assert "lift" in checks
    short = chain_spec(T32, cs.ideals, cs.lifts, cs.gens[:1])
    assert "gens_count" in {dict(f)["check"] for f in validate_chain_spec(short).failures}
    upside = chain_spec(T32, cs.ideals[::-1], None, None)
    assert "descending" in {dict(f)["check"] for f in validate_chain_spec(upside).failures}


def test_lift_search(cs, T32):
    e = find_lift(T32, cs.ideals[0], cs.ideals[1])
    assert lift_is_valid(T32, cs.ideals[0], cs.ideals[1], e)[0]
    assert not lift_is_valid(T32, cs.ideals[0], cs.ideals[1], 0)[0]


def test_certificate_solver(cs, T32):
    I1, I2, I3 = cs.ideals
    e12, e13, e23 = cs.lift(0, 1), cs.lift(0, 2), cs.lift(1, 2)
    for c, d in ((1, 1), (2, 1), (1, 3), (3, 2)):
        C, B, A = solve_idempotent_certificate(T32, I1, I2, I3, e12, e13, e23, cs.G(1), cs.G(2), c, d)
        assert C @ B @ A == A


def test_certificate_solver_preconditions(cs, T32):
    I1, I2, I3 = cs.ideals
    with pytest.raises(PreconditionFailed):
        solve_idempotent_certificate(T32, I1, I2, I3, 0, cs.lift(0, 2), cs.lift(1, 2), cs.G(1), cs.G(2))


def test_basic_tree_certificates_and_trace(cs):
    rep, T = build_basic_tree(cs, 4)
    assert rep.counts[:3] == (1, 3, 9)
    assert verify_certificates(T, 4).valid
    assert telescope_trace(T, 4).ideal.is_whole
    assert verify_certificates(T.at_depth(7), 7).valid


def test_sequence_tree(cs):
    rep, T = build_sequence_tree(cs, (2, 1, 3), 4)
    assert verify_certificates(T, 4).valid
    assert rep.counts[1] == 4
    with pytest.raises(InputError):
        build_sequence_tree(cs, (0,), 2)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_basic_multiplicities(cs, k):
    alpha = multiplicity_vector(cs, "basic", k)
    assert alpha == basic_closed_form([cs.m(j) for j in range(1, k + 1)], k)
    assert verify_multiplicities(cs, "basic", k).agree


def test_perturbed_alpha_disagrees(cs):
    assert not verify_multiplicities(cs, "basic", 1, alpha=(1, 3)).agree


def test_sequence_alphas_distinct(cs):
    seqs = [(a, b, c) for a in (1, 2) for b in (1, 2) for c in (1, 2)]
    alphas = {sequence_alpha(cs, s, 3) for s in seqs}
    assert len(alphas) == len(seqs)
    for s in seqs[:3]:
        assert verify_multiplicities(cs, s, 1).agree


def test_provenance(cs):
    parts = provenance_split(cs, 2, 3)
    assert [t for t, _ in parts] == [0, 1, 2]
    sizes = [len(telescope_trace(P, 3).ideal) for _, P in parts]
    assert sizes == [len(I) for I in cs.ideals]


def test_central_idempotents(T22):
    assert central_primitive_idempotents(T22) == [T22.one]


def test_no_strict_chain_in_field():
    from projtrace.ring import galois_field
    with pytest.raises(PreconditionFailed):
        find_strict_chain(galois_field(4), 3)
