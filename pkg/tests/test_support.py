import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from pts_arith.base import AtomicRule, Base
from pts_arith.support import (
    MAX_ATOMS, OutOfVocabularyError, SizeGuardError, Vocabulary, engine_for,
    enumerate_maxiconsistent, extend_to_maxiconsistent, is_consistent, is_maxiconsistent, lattice,
    refute, supports, supports_under, valid,
)
from pts_arith.syntax import And, Atom, Bot, Const, Forall, Imp, Var, disj, exists, neg, parse_formula

from oracles import NaiveSupport, core_formulas, is_tautology, random_prop

A, B = Atom("A"), Atom("B")
BOT = Bot()
AB = Vocabulary(atoms=(A, B))


def rule(prem, concl):
    return AtomicRule(frozenset(prem), concl)


def test_moore_family_counts():
    assert [lattice(n).size for n in range(4)] == [1, 2, 7, 61]


def test_size_guard():
    with pytest.raises(SizeGuardError):
        lattice(MAX_ATOMS + 1)


def test_atomic_clause_and_falsum():
    va = Vocabulary(atoms=(A,))
    assert supports(Base({rule([], A)}), A, va)
    assert not supports(Base(), BOT, va)
    assert supports(Base(), Imp(A, A), va)


def test_supports_under_examples():
    assert supports_under(Base(), [And(A, B)], A, AB)
    assert not supports_under(Base(), [A], B, AB)
    witness = Base({rule([], A)})
    assert supports(witness, A, AB) and not supports(witness, B, AB)
    for b in (Base(), Base({rule([], B)}), Base({rule([A], B)})):
        assert supports_under(b, [A], A, AB)


def test_validity_examples():
    p = Atom("p")
    v1 = Vocabulary(atoms=(p,), reserve=1)
    assert valid([], disj(p, neg(p)), v1)
    assert valid([p], p, v1)
    assert not valid([], p, v1)


def test_consistency():
    va = Vocabulary(atoms=(A,))
    assert is_consistent(Base(), va)
    assert not is_consistent(Base({rule([], A)}), va)
    hs, ms = Atom("H", (Const("s"),)), Atom("M", (Const("s"),))
    soc = Base({rule([], hs), rule([hs], ms)}, (("H", 1), ("M", 1)), (Const("s"),))
    # it derives both atoms of its own vocabulary; one fresh atom is left underivable
    assert not is_consistent(soc)
    assert is_consistent(soc, Vocabulary.from_base(soc, reserve=1))


def test_maxiconsistency_examples():
    assert not is_maxiconsistent(Base(), AB)
    assert is_maxiconsistent(Base({rule([], A)}), AB)
    assert not is_maxiconsistent(Base({rule([], A), rule([], B)}), AB)
    # one atom: only the empty base is consistent, and nothing consistent lies above it
    assert is_maxiconsistent(Base(), Vocabulary(atoms=(A,)))


def test_extend_to_maxiconsistent_examples():
    m = extend_to_maxiconsistent(Base(), A, AB)
    assert is_maxiconsistent(m, AB) and not supports(m, A, AB) and supports(m, B, AB)
    fixed = Base({rule([], B)})
    assert extend_to_maxiconsistent(fixed, A, AB) == fixed
    with pytest.raises(ValueError):
        extend_to_maxiconsistent(Base({rule([], A)}), A, AB)


def test_no_atoms_means_everything_is_supported():
    # with no atoms the falsum clause holds vacuously
    assert supports(Base(), BOT, Vocabulary())
    with pytest.raises(ValueError):
        extend_to_maxiconsistent(Base(), BOT, Vocabulary())


def test_enumerate_maxiconsistent_counts():
    # classes correspond to the proper subsets of the atoms: everything
    # derivable is inconsistent, so the full set has no class
    assert len(enumerate_maxiconsistent(Vocabulary(atoms=(A,)))) == 1
    assert len(enumerate_maxiconsistent(AB)) == 3
    assert len(enumerate_maxiconsistent(Vocabulary(atoms=(A, B, Atom("C"))))) == 7
    assert enumerate_maxiconsistent(Vocabulary()) == []


def test_refute_returns_failing_extension():
    b = Base()
    phi = Imp(A, B)
    c = refute(b, phi, AB)
    assert c.rules >= b.rules and supports(c, A, AB) and not supports(c, B, AB)
    assert refute(b, Imp(A, A), AB) is None
    assert refute(b, A, AB) == b


def test_query_errors():
    with pytest.raises(ValueError):
        supports(Base(), parse_formula("P(x)"), Vocabulary(predicates=(("P", 1),), terms=(Const("c"),)))
    with pytest.raises(OutOfVocabularyError):
        supports(Base(), Atom("Z"), AB)
    with pytest.raises(OutOfVocabularyError):
        supports(Base(), Atom("R0"), Vocabulary(atoms=(A,), reserve=1))


def test_universal_ranges_over_terms():
    v = Vocabulary(predicates=(("P", 1),), terms=(Const("a"), Const("b")))
    pa, pb = Atom("P", (Const("a"),)), Atom("P", (Const("b"),))
    all_p = Forall("x", Atom("P", (Var("x"),)))
    assert supports(Base({rule([], pa), rule([], pb)}), all_p, v)
    assert not supports(Base({rule([], pa)}), all_p, v)
    ex_p = exists("x", Atom("P", (Var("x"),)))
    assert supports(Base({rule([], pa)}), ex_p, v)


def test_reserve_constants_join_universals_unless_excluded():
    pa = Atom("P", (Const("a"),))
    all_p = Forall("x", Atom("P", (Var("x"),)))
    base = Base({rule([], pa)})
    v_in = Vocabulary(predicates=(("P", 1),), terms=(Const("a"),), reserve_constants=1)
    v_out = Vocabulary(predicates=(("P", 1),), terms=(Const("a"),), reserve_constants=1,
                       forall_excludes_reserve=True)
    assert not supports(base, all_p, v_in)
    assert supports(base, all_p, v_out)


# --------------------------------------------------------------------------
# against the literal-base oracle

@pytest.fixture(scope="module")
def two_atom_oracle():
    return NaiveSupport([A, B])


def _literal_bases(oracle):
    for m in range(oracle.count):
        yield m, Base(frozenset(rule([oracle.atoms[i] for i in prem], oracle.atoms[c])
                                for j, (prem, c) in enumerate(oracle.rules) if m >> j & 1))


def test_engine_matches_oracle_on_all_bases(two_atom_oracle):
    e = engine_for(AB)
    bases = list(_literal_bases(two_atom_oracle))
    fams = [e.family(b) for _, b in bases]
    for phi in core_formulas([A, B, BOT], 2):
        vec = two_atom_oracle.vector(phi)
        s = e.support_set(phi)
        for (m, _), f in zip(bases, fams):
            assert bool(vec >> m & 1) == bool(s >> f & 1), phi


def test_engine_matches_oracle_with_reserve_atom():
    p = Atom("p")
    oracle = NaiveSupport([p, Atom("R0")])
    e = engine_for(Vocabulary(atoms=(p,), reserve=1))
    empty = e.lat.empty_base
    for phi in core_formulas([p, BOT], 3)[:4000]:
        assert bool(oracle.vector(phi) & 1) == bool(e.support_set(phi) >> empty & 1)


def test_persistence_exhaustive_two_atoms(two_atom_oracle):
    o = two_atom_oracle
    for phi in core_formulas([A, B, BOT], 2):
        vec = o.vector(phi)
        for m in range(o.count):
            if vec >> m & 1:
                assert o.supersets[m] & ~vec == 0


def test_classical_agreement_small_exhaustive():
    p, q = Atom("p"), Atom("q")
    e = engine_for(Vocabulary(atoms=(p, q), reserve=2))
    for phi in core_formulas([p, q, BOT], 2):
        assert e.supports(Base(), phi) == is_tautology(phi, [p, q])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_classical_agreement_random(seed):
    p, q = Atom("p"), Atom("q")
    phi = random_prop(random.Random(seed), [p, q], 5)
    assert valid([], phi, Vocabulary(atoms=(p, q), reserve=2)) == is_tautology(phi, [p, q])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_persistence_random(seed):
    rng = random.Random(seed)
    p, q, r = Atom("p"), Atom("q"), Atom("r")
    v = Vocabulary(atoms=(p, q, r))
    e = engine_for(v)
    phi = random_prop(rng, [p, q, r], 4)
    s = e.support_set(phi)
    for i in range(e.lat.size):
        if s >> i & 1:
            assert e.lat.down[i] & ~s == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_inf_clause_matches_definition(seed):
    rng = random.Random(seed)
    atoms = [A, B]
    e = engine_for(AB)
    delta = [random_prop(rng, atoms, 2)]
    phi = random_prop(rng, atoms, 2)
    for i in range(e.lat.size):
        expected = all(not e.supports_family(c, delta[0]) or e.supports_family(c, phi)
                       for c in range(e.lat.size) if e.lat.down[i] >> c & 1)
        assert e.supports_family(i, Imp(delta[0], phi)) == expected


def test_maxiconsistent_classical_small():
    e = engine_for(AB)
    maxi = e.maxiconsistent_families()
    for phi, psi in itertools.product(core_formulas([A, B, BOT], 1), repeat=2):
        for m in maxi:
            assert e.supports_family(m, neg(phi)) != e.supports_family(m, phi)
            assert e.supports_family(m, disj(phi, psi)) == (
                e.supports_family(m, phi) or e.supports_family(m, psi))
