"""Batch experiments producing deterministic JSON reports.

Exhaustive checks over all formulas up to a depth run on values rather than
formulas: a closed propositional formula is characterised, for support, by
its support set and, classically, by its truth table, and both are computed
compositionally.  Each distinct value is carried with the number of formulas
that produce it, so a report can state how many formulas were covered
without listing them.
"""

from __future__ import annotations

import importlib.resources
import random
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional

from . import __version__
from .arith import build_prf, crosscheck, eval_delta0
from .base import AtomicRule, Base
from .classical import tautology
from .coding import CODING_VERSION, code_formula, code_sequence, decode_formula
from .delta0 import Budget
from .hilbert import (
    ProofBuilder, ProofError, Proof, annotate, check_proof,
    parse_proof, prove_numeral_atom, pure_logic, q_axioms, theory_by_name,
)
from .support import SupportEngine, Vocabulary, engine_for, extend_to_maxiconsistent, is_maxiconsistent, supports
from .syntax import (
    And, Atom, Bot, Imp, Var, Const, BOT, disj, eq, formula_depth, neg,
    numeral, print_formula,
)

__all__ = [
    "ExperimentConfig", "EXPERIMENTS", "run_experiment", "random_formula",
    "corpus", "value_levels", "random_derivation",
]

ATOM_NAMES = "pqrst"


@dataclass
class ExperimentConfig:
    atoms: Optional[int] = None
    reserve: int = 2
    depth: int = 3
    samples: Optional[int] = None
    sample_depth: int = 6
    seed: int = 0
    budget: Optional[int] = None
    theory: str = "q"
    mutations: int = 40
    max_numeral: int = 20
    forall_excludes_reserve: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name, passed, detail=""):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _report(name, cfg, results, checks):
    return {
        "experiment": name,
        "tool_version": __version__,
        "coding_version": CODING_VERSION,
        "config": cfg.to_dict(),
        "results": results,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


# --------------------------------------------------------------------------
# Formula generation

def random_formula(rng: random.Random, atoms, depth: int):
    """A random core formula of depth at most ``depth``; ``~`` and ``v`` appear expanded."""
    if depth == 0 or rng.random() < 0.15:
        return BOT if rng.random() < 0.1 else rng.choice(atoms)
    op = rng.choice(("imp", "imp", "and", "neg", "or"))
    if op == "neg":
        return neg(random_formula(rng, atoms, depth - 1))
    if op == "or" and depth >= 3:
        return disj(random_formula(rng, atoms, depth - 3), random_formula(rng, atoms, depth - 3))
    left, right = random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1)
    return And(left, right) if op == "and" else Imp(left, right)


def _combine(a: dict, b: dict, op) -> Counter:
    out = Counter()
    for va, ca in a.items():
        for vb, cb in b.items():
            out[op(va, vb)] += ca * cb
    return out


def value_levels(leaves: dict, imp, conj, depth: int) -> list:
    """Per depth ``d`` the multiset of values of formulas of depth exactly ``d``.

    ``leaves`` maps the values of depth-0 formulas to their counts; ``imp``
    and ``conj`` combine values.
    """
    levels = [Counter(leaves)]
    upto = [Counter(leaves)]
    for d in range(1, depth + 1):
        new = Counter()
        below = upto[d - 2] if d >= 2 else Counter()
        for op in (imp, conj):
            new.update(_combine(upto[d - 1], upto[d - 1], op))
            if below:
                new.subtract(_combine(below, below, op))
        new = Counter({k: v for k, v in new.items() if v})
        levels.append(new)
        total = Counter(upto[d - 1])
        total.update(new)
        upto.append(total)
    return levels


def _prop_vocab(k, reserve, forall_excludes_reserve=False):
    return Vocabulary(atoms=tuple(Atom(ATOM_NAMES[i]) for i in range(k)), reserve=reserve,
                      forall_excludes_reserve=forall_excludes_reserve)


def _support_tt_leaves(e: SupportEngine, k: int):
    full = (1 << (1 << k)) - 1
    leaves = Counter()
    for i in range(k):
        a = Atom(ATOM_NAMES[i])
        tt = sum(1 << j for j in range(1 << k) if j >> i & 1)
        leaves[(e.support_set(a), tt)] += 1
    leaves[(e.support_set(BOT), 0)] += 1
    lat = e.lat

    def imp(x, y):
        return lat.implication(x[0], y[0]), (~x[1] | y[1]) & full

    def conj(x, y):
        return x[0] & y[0], x[1] & y[1]

    return leaves, imp, conj, full


# --------------------------------------------------------------------------
# classical-agreement

def classical_agreement(cfg: ExperimentConfig) -> dict:
    k_max = 2 if cfg.atoms is None else cfg.atoms
    samples = 500 if cfg.samples is None else cfg.samples
    rows = []
    disagreements = 0
    examples = []
    for k in range(k_max + 1):
        v = _prop_vocab(k, cfg.reserve, cfg.forall_excludes_reserve)
        e = engine_for(v)
        empty = e.lat.empty_base
        leaves, imp, conj, full = _support_tt_leaves(e, k)
        for d, level in enumerate(value_levels(leaves, imp, conj, cfg.depth)):
            bad = sum(c for (s, tt), c in level.items() if bool(s >> empty & 1) != (tt == full))
            valid = sum(c for (s, tt), c in level.items() if s >> empty & 1)
            rows.append({"atoms": k, "depth": d, "formulas": sum(level.values()),
                         "valid": valid, "values": len(level), "disagreements": bad})
            disagreements += bad

    rng = random.Random(cfg.seed)
    v = _prop_vocab(k_max, cfg.reserve, cfg.forall_excludes_reserve)
    e = engine_for(v)
    atoms = [Atom(ATOM_NAMES[i]) for i in range(k_max)] or [BOT]
    sampled = {"formulas": samples, "valid": 0, "disagreements": 0, "max_depth": 0}
    for _ in range(samples):
        phi = random_formula(rng, atoms, cfg.sample_depth)
        sv = e.supports(Base(), phi)
        tv = tautology(phi, [a for a in atoms if isinstance(a, Atom)])
        sampled["valid"] += sv
        sampled["max_depth"] = max(sampled["max_depth"], formula_depth(phi))
        if sv != tv:
            sampled["disagreements"] += 1
            if len(examples) < 5:
                examples.append({"formula": print_formula(phi), "support": sv, "classical": tv})
    results = {"exhaustive": rows, "sampled": sampled, "examples": examples,
               "exhaustive_formulas": sum(r["formulas"] for r in rows)}
    checks = [
        _check("exhaustive agreement", disagreements == 0,
               f"{disagreements} disagreements over {results['exhaustive_formulas']} formulas"),
        _check("sampled agreement", sampled["disagreements"] == 0,
               f"{sampled['disagreements']} disagreements over {samples} formulas"),
    ]
    return _report("classical-agreement", cfg, results, checks)


# --------------------------------------------------------------------------
# maxiconsistent

def _first_order_vocab(k):
    return Vocabulary(predicates=(("P", 1),), terms=tuple(Const(ATOM_NAMES[i]) for i in range(k)))


def _support_values(e, depth, atoms):
    leaves = Counter(e.support_set(a) for a in atoms)
    leaves[e.support_set(BOT)] += 1
    lat = e.lat
    levels = value_levels(leaves, lat.implication, lambda x, y: x & y, depth)
    out = Counter()
    for lv in levels:
        out.update(lv)
    return out


def _template_values(e, depth, terms):
    """Values of formulas with one free variable, as tuples of instance support sets."""
    lat = e.lat
    leaves = Counter()
    leaves[tuple(e.support_set(Atom("P", (t,))) for t in terms)] += 1
    for s in terms:
        leaves[tuple(e.support_set(Atom("P", (s,))) for _ in terms)] += 1
    leaves[tuple(e.support_set(BOT) for _ in terms)] += 1
    levels = value_levels(
        leaves,
        lambda x, y: tuple(lat.implication(a, b) for a, b in zip(x, y)),
        lambda x, y: tuple(a & b for a, b in zip(x, y)),
        depth,
    )
    out = Counter()
    for lv in levels:
        out.update(lv)
    return out


def _classicality(e, maxi, depth, existential_depth):
    lat = e.lat
    bot = e.support_set(BOT)
    values = _support_values(e, depth, sorted(e.query_atoms, key=print_formula))
    neg_bad = disj_bad = ex_bad = 0
    for s in values:
        ns = lat.implication(s, bot)
        neg_bad += sum(1 for m in maxi if bool(ns >> m & 1) == bool(s >> m & 1))
    keys = list(values)
    for s1 in keys:
        n1 = lat.implication(s1, bot)
        for s2 in keys:
            d = lat.implication(n1 & lat.implication(s2, bot), bot)
            disj_bad += sum(1 for m in maxi if bool(d >> m & 1) != bool((s1 | s2) >> m & 1))
    templates = 0
    if e.instance_terms:
        tvals = _template_values(e, existential_depth, e.instance_terms)
        templates = sum(tvals.values())
        for tup in tvals:
            all_neg = lat.all
            for s in tup:
                all_neg &= lat.implication(s, bot)
            ex = lat.implication(all_neg, bot)
            any_inst = 0
            for s in tup:
                any_inst |= s
            ex_bad += sum(1 for m in maxi if bool(ex >> m & 1) != bool(any_inst >> m & 1))
    return {
        "formulas": sum(values.values()), "values": len(values),
        "negation_violations": neg_bad, "disjunction_violations": disj_bad,
        "existential_templates": templates, "existential_violations": ex_bad,
    }


def _literal_bases(e: SupportEngine):
    atoms = sorted(e.query_atoms, key=print_formula)
    n = len(atoms)
    rules = [AtomicRule(frozenset(atoms[i] for i in range(n) if x >> i & 1), c)
             for x in range(1 << n) for c in atoms]
    for mask in range(1 << len(rules)):
        yield Base(frozenset(r for j, r in enumerate(rules) if mask >> j & 1))


def maxiconsistent(cfg: ExperimentConfig) -> dict:
    k_max = 3 if cfg.atoms is None else cfg.atoms
    ex_depth = cfg.depth
    rows = []
    checks = []
    for kind in ("propositional", "first-order"):
        for k in range(1, k_max + 1):
            v = _prop_vocab(k, 0) if kind == "propositional" else _first_order_vocab(k)
            e = engine_for(v)
            maxi = e.maxiconsistent_families()
            row = {"vocabulary": kind, "atoms": k, "families": e.lat.size,
                   "classes": len(maxi), "proper_subsets": (1 << k) - 1}
            row.update(_classicality(e, maxi, cfg.depth, ex_depth))
            rows.append(row)
    for key, label in (("negation_violations", "negation"), ("disjunction_violations", "disjunction"),
                       ("existential_violations", "existential")):
        bad = sum(r[key] for r in rows)
        checks.append(_check(f"{label} classicality", bad == 0, f"{bad} violations"))
    checks.append(_check("existential bullet exercised",
                         all(r["existential_templates"] > 0 for r in rows if r["vocabulary"] == "first-order"),
                         "every first-order vocabulary has quantified templates"))

    # extension property on two atoms, over every literal base
    e = engine_for(_prop_vocab(2, 0))
    maxi = e.maxiconsistent_families()
    values = _support_values(e, cfg.depth, sorted(e.query_atoms, key=print_formula))
    pairs = witnessed = bases = 0
    by_family = {}
    for b in _literal_bases(e):
        bases += 1
        i = e.family(b)
        if i not in by_family:
            ok = tot = 0
            for s, c in values.items():
                if s >> i & 1:
                    continue
                tot += c
                if any(e.lat.down[i] >> g & 1 and not s >> g & 1 for g in maxi):
                    ok += c
            by_family[i] = (ok, tot)
        ok, tot = by_family[i]
        pairs += tot
        witnessed += ok
    checks.append(_check("extension property", pairs == witnessed,
                         f"{witnessed}/{pairs} (base, formula) pairs have a refuting maxiconsistent extension"))

    rng = random.Random(cfg.seed)
    atoms = [Atom("p"), Atom("q")]
    literal = list(_literal_bases(e))
    built = built_ok = 0
    v2 = _prop_vocab(2, 0)
    while built < 200:
        b = rng.choice(literal)
        phi = random_formula(rng, atoms, cfg.depth)
        if supports(b, phi, v2):
            continue
        m = extend_to_maxiconsistent(b, phi, v2)
        built += 1
        built_ok += m.rules >= b.rules and is_maxiconsistent(m, v2) and not supports(m, phi, v2)
    checks.append(_check("constructed extensions", built == built_ok,
                         f"{built_ok}/{built} sampled extensions are maxiconsistent, contain the base and refute the formula"))
    results = {"vocabularies": rows, "literal_bases": bases, "extension_pairs": pairs,
               "extension_witnessed": witnessed, "existential_body_depth": ex_depth}
    return _report("maxiconsistent", cfg, results, checks)


# --------------------------------------------------------------------------
# persistence

def persistence(cfg: ExperimentConfig) -> dict:
    """Every base pair ``b <= c`` over the rule universe of the query atoms.

    Support of a formula only depends on the family of closed sets of a
    base, so each distinct family pair is checked against every distinct
    support set once and weighted by how many base pairs and formulas it
    stands for.
    """
    k = 2 if cfg.atoms is None else cfg.atoms
    e = engine_for(_prop_vocab(k, 0))
    values = _support_values(e, cfg.depth, sorted(e.query_atoms, key=print_formula))
    bases = list(_literal_bases(e))
    fam = [e.family(b) for b in bases]
    masks = [frozenset(b.rules) for b in bases]
    pair_counts = Counter()
    for i, b in enumerate(masks):
        for j, c in enumerate(masks):
            if b <= c:
                pair_counts[fam[i], fam[j]] += 1
    violations = 0
    examples = []
    for (fb, fc), n in sorted(pair_counts.items()):
        for s, count in values.items():
            if s >> fb & 1 and not s >> fc & 1:
                violations += n * count
                if len(examples) < 5:
                    examples.append({"base_family": fb, "extension_family": fc})
    results = {
        "atoms": k, "bases": len(bases), "base_pairs": sum(pair_counts.values()),
        "family_pairs": len(pair_counts), "formulas": sum(values.values()),
        "support_values": len(values), "violations": violations, "examples": examples,
    }
    checks = [_check("persistence", violations == 0,
                     f"{violations} violations over {results['base_pairs']} base pairs "
                     f"and {results['formulas']} formulas")]
    return _report("persistence", cfg, results, checks)


# --------------------------------------------------------------------------
# local-soundness

def _is_neg(phi):
    return isinstance(phi, Imp) and isinstance(phi.right, Bot)


def random_derivation(rng: random.Random, atoms, steps: int = 6):
    """Hypotheses, a conclusion and a Hilbert proof of it from them.

    The proof is grown forward by random inference moves from the
    hypotheses; the conclusion is the last line produced.
    """
    gamma = [random_formula(rng, atoms, 2) for _ in range(rng.randint(1, 2))]
    theory = pure_logic().extend(gamma, name="hyp")
    b = ProofBuilder(theory)
    last = 0
    for g in gamma:
        last = b.axiom(g)
    for _ in range(steps):
        i = rng.randrange(len(b.lines))
        phi = b.lines[i]
        move = rng.randrange(7)
        if move == 1:
            j = rng.randrange(len(b.lines))
            psi = b.lines[j]
            last = b.mp(j, b.mp(i, b.axiom(Imp(phi, Imp(psi, And(phi, psi))))))
        elif move == 2 and isinstance(phi, And):
            part = phi.left if rng.random() < 0.5 else phi.right
            last = b.mp(i, b.axiom(Imp(phi, part)))
        elif move == 3 and isinstance(phi, Imp) and phi.left in b.where:
            last = b.mp(b.where[phi.left], i)
        elif move == 4 and isinstance(phi, Imp) and any(
                isinstance(psi, Imp) and psi.left == phi.right for psi in b.lines):
            j = next(j for j, psi in enumerate(b.lines) if isinstance(psi, Imp) and psi.left == phi.right)
            last = b.syllogism(i, j)
        elif move == 5 and _is_neg(phi) and _is_neg(phi.left):
            last = b.mp(i, b.axiom(Imp(phi, phi.left.left)))
        elif move == 6:
            last = b.imp_refl(random_formula(rng, atoms, 1))
        else:
            last = b.weaken(i, random_formula(rng, atoms, 1))
    proof = b.proof()
    cut = last + 1
    return gamma, b.lines[last], Proof(proof.lines[:cut], proof.hints[:cut]), theory


def local_soundness(cfg: ExperimentConfig) -> dict:
    k = 3 if cfg.atoms is None else cfg.atoms
    samples = 200 if cfg.samples is None else cfg.samples
    rng = random.Random(cfg.seed)
    atoms = [Atom(ATOM_NAMES[i]) for i in range(k)]
    v = _prop_vocab(k, 0)
    e = engine_for(v)
    lat = e.lat
    violations = rejected = 0
    lengths, rule_counts = [], Counter()
    examples = []
    for _ in range(samples):
        gamma, phi, proof, theory = random_derivation(rng, atoms)
        try:
            just = annotate(proof, theory)
            check_proof(proof, theory)
        except ProofError:
            rejected += 1
            continue
        if proof.conclusion != phi:
            rejected += 1
            continue
        lengths.append(len(proof))
        rule_counts.update(j.kind for j in just)
        prem = lat.all
        for g in gamma:
            prem &= e.support_set(g)
        bad = prem & ~e.support_set(phi)
        if bad:
            violations += 1
            if len(examples) < 5:
                examples.append({"gamma": [print_formula(g) for g in gamma], "phi": print_formula(phi)})
    results = {
        "pairs": samples, "bases_per_pair": lat.size, "proof_lengths": lengths,
        "rule_counts": dict(sorted(rule_counts.items())), "violations": violations,
        "rejected_proofs": rejected, "examples": examples,
    }
    checks = [
        _check("proofs machine-checked", rejected == 0, f"{samples - rejected}/{samples} proofs accepted"),
        _check("local soundness", violations == 0,
               f"{violations} violations over {samples} pairs and {lat.size} base classes"),
    ]
    return _report("local-soundness", cfg, results, checks)


# --------------------------------------------------------------------------
# prf-crosscheck

def corpus() -> list:
    """The bundled proof files as ``(name, Proof)`` pairs in name order."""
    root = importlib.resources.files("pts_arith") / "data" / "proofs"
    out = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".proof"):
            out.append((entry.name[:-len(".proof")], parse_proof(entry.read_text(encoding="utf-8"))))
    return out


def _false_atom(rng):
    a = rng.randrange(0, 4)
    b = rng.choice([x for x in range(0, 4) if x != a])
    return eq(numeral(a), numeral(b))


def _mutations(rng, proofs, theory, count):
    """Single-line corruptions as sequences of codes the checker must reject."""
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        name, p = proofs[rng.randrange(len(proofs))]
        i = rng.randrange(len(p))
        codes = [code_formula(phi) for phi in p.lines]
        kind = rng.choice(("false-atom", "negate", "bump-code"))
        if kind == "false-atom":
            codes[i] = code_formula(_false_atom(rng))
        elif kind == "negate":
            codes[i] = code_formula(neg(p.lines[i]))
        else:
            codes[i] += 1 + rng.randrange(3)
        lines = [decode_formula(c) for c in codes]
        if all(x is not None for x in lines):
            try:
                check_proof(Proof(tuple(lines)), theory)
                continue
            except ProofError:
                pass
        out.append({"proof": name, "line": i + 1, "kind": kind, "codes": codes})
    return out


def prf_crosscheck(cfg: ExperimentConfig) -> dict:
    theory = theory_by_name(cfg.theory)
    budget = Budget(cfg.budget) if cfg.budget else Budget()
    proofs = corpus()
    rows = []
    kinds = Counter()
    for name, p in proofs:
        rep = crosscheck(p, theory, budget)
        used = Counter(j.kind for j in annotate(p, theory)) if rep["accepted_meta"] else Counter()
        kinds.update(used)
        rows.append({
            "proof": name, "lines": len(p), "accepted_meta": rep["accepted_meta"],
            "accepted_arith": rep["accepted_arith"], "agree": rep["agree"],
            "prefixes_ok": all(r["len_meta"] and r["len_arith"] and r["pref_meta"] and r["pref_arith"]
                               for r in rep["prefixes"]),
            "rules": dict(sorted(used.items())), "divergences": rep["divergences"],
        })
    rng = random.Random(cfg.seed)
    muts = _mutations(rng, proofs, theory, cfg.mutations)
    prf = build_prf(Var("p"), Var("x"))
    mut_rows = []
    for m in muts:
        value = eval_delta0(prf, "oracle", budget, theory, {"p": code_sequence(m["codes"]), "x": m["codes"][-1]})
        mut_rows.append({"proof": m["proof"], "line": m["line"], "kind": m["kind"], "prf": value})
    lengths = [r["lines"] for r in rows]
    checks = [
        _check("corpus size", len(rows) >= 10, f"{len(rows)} proofs"),
        _check("corpus lengths", lengths and min(lengths) >= 1 and max(lengths) <= 8,
               f"lengths {min(lengths, default=0)}..{max(lengths, default=0)}"),
        _check("corpus covers axiom, MP and Gen", all(kinds[k] for k in ("axiom", "mp", "gen")),
               ", ".join(f"{k}={kinds[k]}" for k in ("axiom", "mp", "gen"))),
        _check("Prf true on corpus", all(r["accepted_meta"] and r["accepted_arith"] for r in rows),
               f"{sum(r['accepted_arith'] for r in rows)}/{len(rows)}"),
        _check("Prf false on mutations", len(mut_rows) >= 30 and not any(r["prf"] for r in mut_rows),
               f"{sum(not r['prf'] for r in mut_rows)}/{len(mut_rows)} rejected"),
        _check("Len and Pref at every prefix", all(r["prefixes_ok"] and r["agree"] for r in rows),
               f"{sum(r['lines'] for r in rows)} prefixes checked on both levels"),
    ]
    results = {"proofs": rows, "mutations": mut_rows, "theory": theory.name}
    return _report("prf-crosscheck", cfg, results, checks)


# --------------------------------------------------------------------------
# numeral-decision

def numeral_decision(cfg: ExperimentConfig) -> dict:
    q = q_axioms()
    n_max = cfg.max_numeral
    lengths = []
    passed = 0
    failures = []
    for m in range(n_max + 1):
        row = []
        for n in range(n_max + 1):
            p = prove_numeral_atom(m, n, bound=max(n_max, 200))
            target = eq(numeral(m), numeral(n))
            if m != n:
                target = neg(target)
            try:
                ok = check_proof(p, q) == target
            except ProofError:
                ok = False
            # the proved sentence must also be true
            ok = ok and eval_delta0(target)
            passed += ok
            if not ok:
                failures.append([m, n])
            row.append(len(p))
        lengths.append(row)
    total = (n_max + 1) ** 2
    results = {"pairs": total, "passed": passed, "proof_lengths": lengths, "failures": failures,
               "longest_proof": max(max(r) for r in lengths)}
    checks = [_check("numeral decision", passed == total, f"{passed}/{total}")]
    return _report("numeral-decision", cfg, results, checks)


EXPERIMENTS = {
    "classical-agreement": classical_agreement,
    "persistence": persistence,
    "maxiconsistent": maxiconsistent,
    "local-soundness": local_soundness,
    "prf-crosscheck": prf_crosscheck,
    "numeral-decision": numeral_decision,
}


def run_experiment(name: str, cfg: Optional[ExperimentConfig] = None) -> dict:
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}") from None
    return fn(cfg or ExperimentConfig())
