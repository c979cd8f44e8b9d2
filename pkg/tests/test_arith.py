import random

import pytest
from hypothesis import given, settings, strategies as st

from pts_arith.arith import (
    build_ax, build_con, build_elt, build_form, build_gen, build_line, build_mp, build_prf,
    build_prov, build_seq, crosscheck, eval_delta0, expand_pure, proof_code, shape_report,
)
from pts_arith.coding import code_formula, code_sequence, decode_formula
from pts_arith.delta0 import Budget, BudgetExceeded, NotDelta0, classify, evaluate, is_delta0
from pts_arith.experiments import corpus
from pts_arith.hilbert import Proof, load_proof, q_axioms
from pts_arith.syntax import BOT, Var, compact_numeral, print_formula, is_closed, parse_formula

from conftest import DATA
from oracles import naive_truth, random_delta0, render

Q = q_axioms()
PRIMS = ("Form", "Seq", "Elt", "Ax", "MP", "Gen")
p, x, i = Var("p"), Var("x"), Var("i")


def n(k):
    return compact_numeral(k)


def c(text):
    return code_formula(parse_formula(text))


def test_shapes():
    assert shape_report() == {"line": "delta0", "prf": "delta0", "prov": "sigma1", "con_closed": True}
    assert classify(build_prov(x), PRIMS) == "sigma1"
    assert classify(build_prf(p, x), ("Form", "Ax")) == "other"
    assert classify(expand_pure(build_prf(p, x)), ("Form", "Ax")) == "delta0"


def test_prov_shape_survives_printing():
    prov = build_prov(x)
    again = parse_formula(print_formula(prov))
    assert again == prov and classify(again, PRIMS) == "sigma1"


def test_con_is_form_true():
    con = build_con(Q)
    assert is_closed(con)
    assert decode_formula(code_formula(con)) == con
    assert eval_delta0(build_form(n(code_formula(con))))


def test_is_delta0_basics():
    assert is_delta0(parse_formula("forall x < 3. exists y < x. x = y"))
    assert not is_delta0(parse_formula("forall x. x = x"))
    assert not is_delta0(build_ax(x))
    assert is_delta0(build_ax(x), ("Ax",))


def test_primitive_atoms():
    zero_eq = c("0 = 0")
    q1 = code_formula(Q.axioms[0])
    assert eval_delta0(build_form(n(zero_eq)))
    assert not eval_delta0(build_form(n(7)))
    assert eval_delta0(build_ax(n(q1)))
    assert not eval_delta0(build_ax(n(zero_eq)))
    s = code_sequence([4, 9, 2])
    assert eval_delta0(build_seq(n(s), n(3)))
    assert not eval_delta0(build_seq(n(s), n(2)))
    assert eval_delta0(build_elt(n(s), n(1), n(9)))
    assert not eval_delta0(build_elt(n(s), n(1), n(4)))


def test_mp_and_gen_atoms():
    a, imp, b = c("0 = 0"), c("0 = 0 -> S(0) = S(0)"), c("S(0) = S(0)")
    assert eval_delta0(build_mp(n(a), n(imp), n(b)))
    assert not eval_delta0(build_mp(n(imp), n(a), n(b)))
    assert not eval_delta0(build_mp(n(b), n(imp), n(a)))
    assert eval_delta0(build_gen(n(a), n(c("forall x. 0 = 0"))))
    assert not eval_delta0(build_gen(n(a), n(c("forall x. S(0) = 0"))))


def _prf(proof, last=None):
    codes = [code_formula(phi) for phi in proof.lines]
    env = {"p": code_sequence(codes), "x": codes[-1] if last is None else last}
    return eval_delta0(build_prf(p, x), env=env)


def test_prf_on_one_line_proof():
    one = Proof((Q.axioms[0],))
    assert _prf(one)
    assert not _prf(Proof((parse_formula("S(0) = 0"),)))
    assert not _prf(one, last=c("0 = 0"))


def test_prf_on_six_line_proof():
    proof = load_proof(DATA / "proofs" / "times_zero.proof")
    six = Proof(proof.lines[:6])
    assert _prf(six)
    # the MP on line 6 cites line 5, so moving it earlier breaks the proof
    swapped = Proof(six.lines[:4] + (six.lines[5], six.lines[4]))
    assert not _prf(swapped)


def test_line_predicate():
    proof = load_proof(DATA / "proofs" / "identity.proof")
    code = proof_code(proof)
    line = build_line(p, i)
    assert all(eval_delta0(line, env={"p": code, "i": k}) for k in range(len(proof)))
    broken = code_sequence([code_formula(proof.lines[0]), c("S(0) = 0")])
    assert not eval_delta0(line, env={"p": broken, "i": 1})


def test_crosscheck_corpus():
    for name, proof in corpus():
        rep = crosscheck(proof, Q)
        assert rep["agree"] and rep["accepted_meta"] and rep["accepted_arith"], name
        assert len(rep["prefixes"]) == len(proof)


def test_crosscheck_agrees_on_rejection():
    proof = load_proof(DATA / "bad" / "mp_forward.proof")
    rep = crosscheck(proof, Q)
    assert not rep["accepted_meta"] and not rep["accepted_arith"]
    assert "checker and Prf disagree on the whole proof" not in rep["divergences"]


def test_pure_mode_agrees_with_oracle():
    s = code_sequence([1, 2])
    cases = [
        build_seq(n(s), n(2)), build_seq(n(s), n(1)),
        build_elt(n(s), n(0), n(1)), build_elt(n(s), n(1), n(1)),
        build_seq(n(code_sequence([])), n(0)),
    ]
    for phi in cases:
        assert eval_delta0(phi, "pure") == eval_delta0(phi, "oracle"), phi


def test_pure_prf_on_tiny_proof():
    one = Proof((BOT,))
    extended = Q.extend([BOT])
    env = {"p": proof_code(one), "x": code_formula(BOT)}
    phi = build_prf(p, x)
    assert eval_delta0(phi, "oracle", theory=extended, env=env)
    assert eval_delta0(phi, "pure", theory=extended, env=env)
    assert not eval_delta0(phi, "pure", theory=Q, env=env)


def test_unknown_mode():
    with pytest.raises(ValueError):
        eval_delta0(parse_formula("0 = 0"), "fast")


def test_budget():
    phi = parse_formula("forall x < 5000. forall y < 5000. x + y = y + x")
    with pytest.raises(BudgetExceeded):
        evaluate(phi, budget=Budget(max_steps=1000))
    assert evaluate(parse_formula("forall x < 30. x + 0 = x"), budget=Budget(max_steps=1000))


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("PTS_ARITH_BUDGET", "50")
    with pytest.raises(BudgetExceeded):
        evaluate(parse_formula("forall x < 500. x = x"))
    monkeypatch.setenv("PTS_ARITH_BUDGET", "lots")
    with pytest.raises(ValueError):
        Budget()


def test_evaluate_rejects_open_and_unbounded():
    with pytest.raises(NotDelta0):
        evaluate(parse_formula("x = 0"))
    with pytest.raises(NotDelta0):
        evaluate(parse_formula("forall x. x = x"))
    assert evaluate(parse_formula("x = 0"), env={"x": 0})


def test_large_values_via_environment():
    big = 10 ** 30
    assert evaluate(parse_formula("exists y < x. y + 1 = x"), env={"x": big})
    assert evaluate(parse_formula("S(x) = y"), env={"x": big, "y": big + 1})


def test_compact_numerals_evaluate_to_their_value():
    for k in (0, 1, 2, 255, 256, 257, 1000, 123456):
        assert evaluate(parse_formula(f"{k} = x"), env={"x": k})
        assert evaluate(parse_formula(f"x = {k}"), env={"x": k})
    assert evaluate(parse_formula("S(S(S(0))) = 3"))


@pytest.mark.parametrize("seed", range(5))
def test_evaluator_matches_naive_enumeration(seed):
    rng = random.Random(seed)
    for _ in range(100):
        f = random_delta0(rng, max_bound=50)
        assert evaluate(parse_formula(render(f))) == naive_truth(f), render(f)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_evaluator_matches_naive_property(seed):
    f = random_delta0(random.Random(seed), max_bound=12)
    assert evaluate(parse_formula(render(f))) == naive_truth(f)
