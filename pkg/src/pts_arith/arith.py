"""Arithmetized syntax: Form, Seq, Elt, Ax, MP, Gen, Line, Prf, Prov and Con.

The syntactic predicates appear in formulas as atoms over the extended
signature.  They can be evaluated two ways:

``oracle``  each atom is decided by the coding and proof-checking code.
``pure``    Seq, Elt, MP and Gen atoms are first replaced by formulas over
            ``0, S, +, *, =`` and only Form and Ax are left to the oracle.

Pure formulas quantify up to the code values, so they are only usable on
tiny codes; they exist to check that the expansion means what the oracle
computes.

Every element, index and length of a coded sequence is at most the code
itself, so all quantifiers in Line and Prf are bounded by ``p``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from .coding import (
    BASE, code_formula, code_sequence, decode_formula, decode_sequence,
    pref_code,
)
from .delta0 import Budget, PredicateSpec, classify, evaluate
from .hilbert import Proof, ProofError, Theory, check_proof, prefix, q_axioms
from .syntax import (
    BOT, And, Atom, Forall, Imp, Plus, Succ, Times, Var, Zero,
    bounded_exists, bounded_forall, compact_numeral, disj, eq, exists,
    fresh_var, is_closed, less, neg, term_vars,
)

__all__ = [
    "build_form", "build_seq", "build_elt", "build_ax", "build_mp", "build_gen",
    "build_line", "build_prf", "build_prov", "build_con", "oracle_predicates",
    "expand_pure", "eval_delta0", "crosscheck", "MODES",
]

MODES = ("oracle", "pure")


# --------------------------------------------------------------------------
# Oracle semantics

@lru_cache(maxsize=8192)
def _formula(c: int):
    return decode_formula(c)


@lru_cache(maxsize=1024)
def _sequence(p: int):
    xs = decode_sequence(p)
    return None if xs is None else tuple(xs)


def _elt(p, i):
    xs = _sequence(p)
    return xs[i] if xs is not None and i < len(xs) else None


def _seq_len(p):
    xs = _sequence(p)
    return None if xs is None else len(xs)


def _mp_code(a, c):
    fa, fc = _formula(a), _formula(c)
    if fa is None or fc is None:
        return None
    return code_formula(Imp(fa, fc))


def _gen_holds(a, c):
    fa, fc = _formula(a), _formula(c)
    return fa is not None and isinstance(fc, Forall) and fc.body == fa


def oracle_predicates(theory: Theory, only=None) -> dict:
    """Predicate specs deciding the syntactic atoms for ``theory``."""

    @lru_cache(maxsize=8192)
    def is_ax(x):
        phi = _formula(x)
        return phi is not None and theory.is_axiom(phi) is not None

    specs = {
        "Form": PredicateSpec(1, lambda x: _formula(x) is not None),
        "Seq": PredicateSpec(2, lambda p, n: _seq_len(p) == n, {1: _seq_len}),
        "Elt": PredicateSpec(3, lambda p, i, y: _elt(p, i) == y, {2: _elt}),
        "Ax": PredicateSpec(1, is_ax),
        "MP": PredicateSpec(3, lambda a, b, c: _mp_code(a, c) == b, {1: _mp_code}),
        "Gen": PredicateSpec(2, _gen_holds),
    }
    if only is not None:
        specs = {k: v for k, v in specs.items() if k in only}
    return specs


# --------------------------------------------------------------------------
# Atom builders

def build_form(x) -> Atom:
    return Atom("Form", (x,))


def build_seq(p, n) -> Atom:
    return Atom("Seq", (p, n))


def build_elt(p, i, y) -> Atom:
    return Atom("Elt", (p, i, y))


def build_ax(x) -> Atom:
    return Atom("Ax", (x,))


def build_mp(a, b, c) -> Atom:
    return Atom("MP", (a, b, c))


def build_gen(a, c) -> Atom:
    return Atom("Gen", (a, c))


class _Fresh:
    def __init__(self, *terms):
        self.used = set()
        for t in terms:
            self.used |= term_vars(t)

    def __call__(self) -> str:
        x = fresh_var(self.used)
        self.used.add(x)
        return x


def _conj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _disj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = disj(out, p)
    return out


def _neq(s, t):
    return neg(eq(s, t))


def build_line(p, i):
    """Line ``i`` of the sequence ``p`` is an axiom or follows by MP or Gen from earlier lines."""
    fresh = _Fresh(p, i)
    y, j, k, a, b = (fresh() for _ in range(5))
    Y, J, K, A, B = map(Var, (y, j, k, a, b))
    mp_case = bounded_exists(j, i, bounded_exists(k, i, _conj(
        _neq(J, i), _neq(K, i),
        bounded_exists(a, p, And(build_elt(p, J, A),
                                 bounded_exists(b, p, And(build_elt(p, K, B), build_mp(A, B, Y))))),
    )))
    gen_case = bounded_exists(j, i, And(
        _neq(J, i),
        bounded_exists(a, p, And(build_elt(p, J, A), build_gen(A, Y))),
    ))
    return bounded_exists(y, p, _conj(
        build_elt(p, i, Y), build_form(Y), _disj(build_ax(Y), mp_case, gen_case),
    ))


def build_prf(p, x):
    """``p`` codes a proof whose last line is ``x``; the length is bounded by ``p``."""
    fresh = _Fresh(p, x)
    n, m, i = fresh(), fresh(), fresh()
    N, M = Var(n), Var(m)
    return And(build_form(x), bounded_exists(n, p, And(
        build_seq(p, N),
        bounded_exists(m, N, _conj(
            eq(N, Succ(M)), build_elt(p, M, x),
            bounded_forall(i, M, build_line(p, Var(i))),
        )),
    )))


def build_prov(x):
    p = _Fresh(x)()
    return exists(p, build_prf(Var(p), x))


def build_con(theory: Optional[Theory] = None):
    """``~Prov(code of _|_)``.

    The theory enters only through how ``Ax`` is decided, so the formula
    is the same for every theory.
    """
    return neg(build_prov(compact_numeral(code_formula(BOT))))


# --------------------------------------------------------------------------
# Pure expansion

def _n(k):
    return compact_numeral(k)


def _lt(a, b, avoid=()):
    return less(Succ(a), b, avoid)


def _divides(d, z, fresh):
    q = fresh()
    return bounded_exists(q, z, eq(Times(d, Var(q)), z))


def _prime(w, fresh):
    d = fresh()
    D = Var(d)
    return _conj(_neq(w, Zero()), _neq(w, _n(1)),
                 bounded_forall(d, w, Imp(_divides(D, w, fresh), disj(eq(D, _n(1)), eq(D, w)))))


def _power_of(z, w, fresh):
    """``z`` is a power of the prime ``w``: every divisor other than 1 is a multiple of ``w``."""
    d = fresh()
    D = Var(d)
    return And(_neq(z, Zero()),
               bounded_forall(d, z, Imp(_divides(D, z, fresh), disj(eq(D, _n(1)), _divides(w, D, fresh)))))


def _entry_at(s, w, z, fresh, then):
    """The base-``w`` digit of ``s`` at position ``z`` is ``pair(i, c) + 1`` and ``then(i, c)`` holds."""
    l, r, h, q, t, c, i = (fresh() for _ in range(7))
    L, R, H, Q, T, C, I = map(Var, (l, r, h, q, t, c, i))
    unpair = bounded_exists(t, Q, bounded_exists(c, Q, _conj(
        eq(Times(_n(2), Q), Plus(Times(T, Succ(T)), Times(_n(2), C))),
        less(C, T),
        bounded_exists(i, T, And(eq(T, Plus(I, C)), then(I, C))),
    )))
    digit = bounded_exists(h, R, bounded_exists(q, R, _conj(
        eq(R, Plus(Succ(Q), Times(w, H))), _lt(Succ(Q), w), unpair,
    )))
    return bounded_exists(l, z, _conj(
        _lt(L, z),
        bounded_exists(r, s, And(eq(s, Plus(L, Times(z, R))), digit)),
    ))


def _well_indexed(w, s, fresh):
    z, z0 = fresh(), fresh()
    Z, Z0 = Var(z), Var(z0)

    def step(i, _c):
        prev = bounded_exists(z0, Z, And(eq(Z, Times(Z0, w)),
                                          _entry_at(s, w, Z0, fresh, lambda i0, _c0: eq(i, Succ(i0)))))
        return And(Imp(eq(Z, _n(1)), eq(i, Zero())), Imp(_neq(Z, _n(1)), prev))

    return bounded_forall(z, s, Imp(_power_of(Z, w, fresh), _entry_at(s, w, Z, fresh, step)))


def _sequence_code(p, fresh, body):
    """``p = pair(W, s)`` with ``W`` prime and ``s`` well indexed, and ``body(W, s)``.

    The pair is split through its diagonal ``t = W + s`` so that ``s`` and
    ``W`` are both determined by ``t``.
    """
    t, s, w = fresh(), fresh(), fresh()
    T, S, W = Var(t), Var(s), Var(w)
    return bounded_exists(t, p, bounded_exists(s, T, And(
        eq(Times(_n(2), p), Plus(Times(T, Succ(T)), Times(_n(2), S))),
        bounded_exists(w, T, _conj(
            eq(T, Plus(W, S)), _prime(W, fresh), _well_indexed(W, S, fresh), body(W, S),
        )),
    )))


def pure_seq(p, n):
    fresh = _Fresh(p, n)

    def body(W, S):
        z = fresh()
        Z = Var(z)
        top = bounded_exists(z, S, _conj(
            _power_of(Z, W, fresh), _lt(S, Times(Z, W)),
            _entry_at(S, W, Z, fresh, lambda i, _c: eq(n, Succ(i))),
        ))
        return disj(And(eq(S, Zero()), eq(n, Zero())), top)

    return _sequence_code(p, fresh, body)


def pure_elt(p, j, y):
    fresh = _Fresh(p, j, y)

    def body(W, S):
        z = fresh()
        Z = Var(z)
        return bounded_exists(z, S, And(
            _power_of(Z, W, fresh),
            _entry_at(S, W, Z, fresh, lambda i, c: And(eq(i, j), eq(c, y))),
        ))

    return _sequence_code(p, fresh, body)


def pure_mp(a, b, c):
    """``b = 2 + B*a + B*z*c`` with ``z`` the least power of ``B`` above ``a``."""
    fresh = _Fresh(a, b, c)
    z = fresh()
    Z = Var(z)
    B = _n(BASE)
    shape = bounded_exists(z, Times(B, a), _conj(
        eq(b, Plus(Plus(_n(2), Times(B, a)), Times(Times(B, Z), c))),
        _power_of(Z, B, fresh), _lt(a, Z),
    ))
    return _conj(build_form(a), build_form(c), shape)


def pure_gen(a, c):
    """``c = 4 + B*v + B*B**len(v)*a`` for some variable code ``v``.

    A variable code is ``10 + 11*B*r`` with ``r = (B**k - 1)/(B - 1)``, so
    ``B**len(v) = B*((B-1)*r + 1)`` and ``c`` is linear in ``r``.
    """
    fresh = _Fresh(a, c)
    r = fresh()
    R = Var(r)
    B = BASE
    const = 4 + B * 10
    lin = Plus(Plus(_n(const), Times(_n(B * B), a)),
               Times(R, Plus(_n(11 * B * B), Times(_n(B * B * (B - 1)), a))))
    return _conj(build_form(a), bounded_exists(r, c, And(
        eq(c, lin), _power_of(Succ(Times(_n(B - 1), R)), _n(B), fresh),
    )))


_PURE = {"Seq": pure_seq, "Elt": pure_elt, "MP": pure_mp, "Gen": pure_gen}


def expand_pure(phi):
    """Replace Seq, Elt, MP and Gen atoms by their arithmetic definitions."""
    if isinstance(phi, Atom):
        f = _PURE.get(phi.pred)
        return f(*phi.args) if f else phi
    if isinstance(phi, (Imp, And)):
        return type(phi)(expand_pure(phi.left), expand_pure(phi.right))
    if isinstance(phi, Forall):
        return Forall(phi.var, expand_pure(phi.body))
    return phi


# --------------------------------------------------------------------------
# Evaluation and cross-checking

def eval_delta0(phi, mode: str = "oracle", budget: Optional[Budget] = None,
                theory: Optional[Theory] = None, env=None) -> bool:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    theory = theory or q_axioms()
    if mode == "pure":
        return evaluate(expand_pure(phi), oracle_predicates(theory, only=("Form", "Ax")), budget, env)
    return evaluate(phi, oracle_predicates(theory), budget, env)


def _prf_holds(p_code, x_code, theory, budget):
    phi = build_prf(Var("p"), Var("x"))
    return eval_delta0(phi, "oracle", budget, theory, {"p": p_code, "x": x_code})


def _seq_holds(p_code, n, theory, budget):
    return eval_delta0(build_seq(Var("p"), Var("n")), "oracle", budget, theory, {"p": p_code, "n": n})


def proof_code(p: Proof) -> int:
    return code_sequence([code_formula(phi) for phi in p.lines])


def crosscheck(p: Proof, theory: Theory, budget: Optional[Budget] = None) -> dict:
    """Compare the proof checker with the arithmetized Prf on ``p`` and all its prefixes."""
    budget = budget or Budget()
    try:
        check_proof(p, theory)
        meta_ok, meta_error = True, None
    except ProofError as exc:
        meta_ok, meta_error = False, str(exc)
    code = proof_code(p)
    arith_ok = _prf_holds(code, code_formula(p.conclusion), theory, budget)

    prefixes = []
    divergences = []
    for k in range(1, len(p) + 1):
        pk = prefix(p, k)
        try:
            check_proof(pk, theory)
            pref_meta = True
        except ProofError:
            pref_meta = False
        ck = pref_code(code, k)
        row = {
            "k": k,
            "len_meta": len(pk) == k,
            "len_arith": _seq_holds(ck, k, theory, budget),
            "code_matches": ck == proof_code(pk),
            "pref_meta": pref_meta,
            "pref_arith": _prf_holds(ck, code_formula(p.lines[k - 1]), theory, budget),
        }
        if meta_ok and not (pref_meta and row["pref_arith"]):
            divergences.append(f"prefix {k}: a checking proof has a rejected prefix")
        if not (row["len_meta"] and row["len_arith"] and row["code_matches"]):
            divergences.append(f"prefix {k}: length or prefix code mismatch")
        if row["pref_meta"] != row["pref_arith"]:
            divergences.append(f"prefix {k}: checker and Prf disagree")
        prefixes.append(row)
    if meta_ok != arith_ok:
        divergences.append("checker and Prf disagree on the whole proof")
    return {
        "lines": len(p),
        "accepted_meta": meta_ok,
        "accepted_arith": arith_ok,
        "meta_error": meta_error,
        "agree": not divergences,
        "prefixes": prefixes,
        "divergences": divergences,
        "steps": budget.steps,
    }


def prf_sentence(p: Proof):
    """``Prf`` applied to the numerals of a proof and its conclusion (closed)."""
    return build_prf(compact_numeral(proof_code(p)), compact_numeral(code_formula(p.conclusion)))


def shape_report() -> dict:
    x, p, i = Var("x"), Var("p"), Var("i")
    prims = ("Form", "Seq", "Elt", "Ax", "MP", "Gen")
    con = build_con(q_axioms())
    return {
        "line": classify(build_line(p, i), prims),
        "prf": classify(build_prf(p, x), prims),
        "prov": classify(build_prov(x), prims),
        "con_closed": is_closed(con),
    }
