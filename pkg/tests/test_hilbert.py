import random

import pytest
from hypothesis import given, settings, strategies as st

from pts_arith.experiments import corpus, random_derivation
from pts_arith.hilbert import (
    BoundExceeded, Proof, ProofBuilder, ProofError, annotate, check_proof, eval_delta0_truth,
    format_proof, load_proof, logical_axiom, parse_proof, prefix, prove_numeral_atom, pure_logic,
    q_axioms, theory_by_name,
)
from pts_arith.syntax import Atom, Forall, Imp, eq, neg, numeral, parse_formula

from conftest import DATA

Q = q_axioms()


def f(text):
    return parse_formula(text)


@pytest.mark.parametrize("text, label", [
    ("0 = 0 -> (S(0) = 0 -> 0 = 0)", "K"),
    ("(forall x. x = x) -> 0 = 0", "ALL-INST"),
    ("(P -> (Q -> R)) -> ((P -> Q) -> (P -> R))", "S"),
    ("((P -> _|_) -> _|_) -> P", "DNE"),
    ("P & Q -> P", "AND-E1"),
    ("P & Q -> Q", "AND-E2"),
    ("P -> (Q -> P & Q)", "AND-I"),
    ("(forall x. (x = 0 -> x = x)) -> ((forall x. x = 0) -> forall x. x = x)", "ALL-DIST"),
    ("0 = 0 -> forall x. 0 = 0", "ALL-VAC"),
    ("x = x", "EQ-REFL"),
    ("x = 0 -> (S(x) = x -> S(0) = x)", "EQ-CONG"),
])
def test_logical_axioms(text, label):
    assert logical_axiom(f(text)) == label


@pytest.mark.parametrize("text", [
    "S(0) = 0",
    "x = 0 -> forall x. x = 0",
    "(forall x. forall y. x = y) -> forall y. y = y",
    "P -> Q",
    # reflexivity is only the variable form; closed instances are derived
    "0 = 0",
    "S(x) = S(x)",
])
def test_not_logical_axioms(text):
    assert logical_axiom(f(text)) is None


def test_instantiation_respects_capture():
    # y is not free for x here
    assert logical_axiom(f("(forall x. forall y. x = y) -> forall y. y = y")) is None
    assert logical_axiom(f("(forall x. forall y. x = y) -> forall y. 0 = y")) == "ALL-INST"


def test_q_axioms():
    assert len(Q.axioms) == 7
    assert f("forall x. ~(S(x) = 0)") in Q.axioms
    assert f("forall x. forall y. (S(x) = S(y) -> x = y)") in Q.axioms
    assert Q.is_axiom(f("forall x. x + 0 = x")) == "Q4"
    assert theory_by_name("Q") == Q and theory_by_name("logic") == pure_logic()
    with pytest.raises(ValueError):
        theory_by_name("pa")


def test_identity_proof():
    p = load_proof(DATA / "proofs" / "identity.proof")
    assert len(p) == 5
    assert check_proof(p, pure_logic()) == f("0 = 0 -> 0 = 0")
    assert [j.kind for j in annotate(p, pure_logic())] == ["axiom", "axiom", "mp", "axiom", "mp"]


def test_single_axiom_proof():
    ax = Q.axioms[0]
    assert check_proof(Proof((ax,)), Q) == ax


def test_forward_reference_rejected():
    p = load_proof(DATA / "bad" / "mp_forward.proof")
    with pytest.raises(ProofError) as err:
        check_proof(p, Q)
    assert err.value.line == 2 and err.value.reason == "bad-mp"


def test_rejection_reasons():
    with pytest.raises(ProofError) as err:
        check_proof(Proof((f("S(0) = 0"),)), Q)
    assert err.value.reason == "not-axiom" and err.value.line == 1
    bad_gen = parse_proof("1: x = x  # axiom\n2: forall x. S(0) = 0  # gen 1\n")
    with pytest.raises(ProofError) as err:
        check_proof(bad_gen, Q)
    assert err.value.reason == "bad-gen"


def test_wrong_hint_is_only_a_warning():
    p = parse_proof("1: x = x  # gen 1\n2: forall y. x = x  # axiom\n")
    just = annotate(p, Q)
    assert just[0].warning and just[1].warning
    assert just[1].kind == "gen"


def test_unrestricted_generalization():
    p = parse_proof("1: x = x\n2: forall y. x = x\n")
    assert [j.kind for j in annotate(p, Q)] == ["axiom", "gen"]


def test_proof_file_errors():
    with pytest.raises(ValueError):
        parse_proof("2: 0 = 0\n")
    with pytest.raises(ValueError):
        parse_proof("1: 0 = 0  # banana\n")
    with pytest.raises(ValueError):
        Proof(())


def test_proof_file_round_trip():
    for _, p in corpus():
        assert parse_proof(format_proof(p)) == p


def test_prefix():
    p = load_proof(DATA / "proofs" / "times_zero.proof")
    assert prefix(p, len(p)) == p
    for k in range(1, len(p) + 1):
        pk = prefix(p, k)
        assert len(pk) == k
        assert check_proof(pk, Q) == p.lines[k - 1]
    for k in (0, len(p) + 1):
        with pytest.raises(ValueError):
            prefix(p, k)


def test_corpus_prefixes_all_check():
    for _, p in corpus():
        check_proof(p, Q)
        for k in range(1, len(p) + 1):
            assert check_proof(prefix(p, k), Q) == p.lines[k - 1]


def test_monotone_in_theory():
    extra = Q.extend([f("S(0) = 0")])
    for _, p in corpus():
        assert check_proof(p, extra) == check_proof(p, Q)
    assert check_proof(Proof((f("S(0) = 0"),)), extra)


@pytest.mark.parametrize("m, n, target", [
    (2, 2, "S(S(0)) = S(S(0))"),
    (0, 1, "~(0 = S(0))"),
    (3, 5, "~(3 = 5)"),
    (4, 0, "~(4 = 0)"),
])
def test_numeral_atoms(m, n, target):
    p = prove_numeral_atom(m, n)
    assert check_proof(p, Q) == f(target)


def test_numeral_bound():
    with pytest.raises(BoundExceeded):
        prove_numeral_atom(5, 3, bound=4)
    with pytest.raises(ValueError):
        prove_numeral_atom(-1, 0)


def test_numeral_decision_grid():
    for m in range(21):
        for n in range(21):
            concl = check_proof(prove_numeral_atom(m, n), Q)
            target = eq(numeral(m), numeral(n))
            assert concl == (target if m == n else neg(target))


@pytest.mark.parametrize("text, value", [
    ("forall x < 2. exists y < 3. x + y = 3", True),
    ("forall x < 3. exists y < 4. x + y = 3", True),
    # bounds are inclusive
    ("exists x < 3. x = 3", True),
    ("forall x < 3. ~(x = 3)", False),
    ("0 = S(0)", False),
    ("exists p < 2. p * p = 2", False),
    ("~(0 = S(0))", True),
])
def test_eval_delta0_truth(text, value):
    assert eval_delta0_truth(f(text)) is value


def test_builder_refuses_non_axioms():
    b = ProofBuilder(Q)
    with pytest.raises(ValueError):
        b.axiom(f("S(0) = 0"))
    with pytest.raises(ValueError):
        b.axiom(f("0 = 0"))
    i = b.axiom(f("x = x"))
    with pytest.raises(ValueError):
        b.mp(i, i)
    assert b.lines[b.gen(i, "y")] == Forall("y", f("x = x"))


def test_closed_reflexivity_is_derived():
    b = ProofBuilder(Q)
    i = b.refl(f("S(0) + 0 = 0").args[0])
    assert b.lines[i] == f("S(0) + 0 = S(0) + 0")
    assert len(b.lines) == 4
    assert check_proof(b.proof(), Q) == b.lines[i]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_random_derivations_check(seed):
    rng = random.Random(seed)
    gamma, phi, proof, theory = random_derivation(rng, [Atom("p"), Atom("q")])
    assert check_proof(proof, theory) == phi
    for g in gamma:
        assert theory.is_axiom(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 30), st.integers(0, 30))
def test_generated_numeral_proofs_are_sound(m, n):
    p = prove_numeral_atom(m, n)
    concl = check_proof(p, Q)
    assert isinstance(concl, Atom) == (m == n)
    assert eval_delta0_truth(concl)


def test_imp_refl_builder():
    b = ProofBuilder(pure_logic())
    a = f("P & Q")
    i = b.imp_refl(a)
    assert b.lines[i] == Imp(a, a)
    assert check_proof(b.proof(), pure_logic()) == Imp(a, a)
