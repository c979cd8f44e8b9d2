"""Atomic-rule bases and derivability in a base.

A base is a finite set of ground rules ``P1, ..., Pn => C`` over closed
atoms.  Derivability is the least fixpoint of rule application; the fixpoint
is computed by a worklist so that derivation trees come out in a fixed order.

Base files are line oriented::

    # Socrates
    vocab: H/1, M/1
    terms: s
    rule: => H(s)
    rule: H(x) => M(x)

Rules mentioning variables are schemas and are expanded over ``terms`` when
the file is loaded.  Without a ``terms:`` line the closed terms occurring in
the file are used.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
    Atom, Const, ParseError, Var, parse_formula, parse_term,
    print_formula, print_term, substitute_term, term_vars,
)

__all__ = [
    "AtomicRule", "RuleSchema", "Base", "Derivation", "OutOfVocabularyError",
    "instantiate", "closure", "derives", "derivation_tree", "check_derivation",
    "parse_base", "load_base", "serialize_base", "parse_atom",
]


class OutOfVocabularyError(ValueError):
    pass


def _is_ground_atom(a) -> bool:
    return isinstance(a, Atom) and a.pred != "" and not any(term_vars(t) for t in a.args)


@dataclass(frozen=True)
class AtomicRule:
    premises: frozenset
    conclusion: Atom

    def __post_init__(self):
        for a in (*self.premises, self.conclusion):
            if not _is_ground_atom(a):
                raise ValueError(f"atomic rules take closed atoms only, got {a!r}")

    def __str__(self):
        prem = ", ".join(sorted(print_formula(p) for p in self.premises))
        return f"{prem} => {print_formula(self.conclusion)}".lstrip()


@dataclass(frozen=True)
class RuleSchema:
    premises: tuple
    conclusion: Atom

    def variables(self) -> list:
        names = set()
        for a in (*self.premises, self.conclusion):
            for t in a.args:
                names |= term_vars(t)
        return sorted(names)


def _inst_atom(a: Atom, env: dict) -> Atom:
    args = []
    for t in a.args:
        for x, s in env.items():
            t = substitute_term(t, x, s)
        args.append(t)
    return Atom(a.pred, tuple(args))


def instantiate(schema: RuleSchema, terms: Iterable) -> set:
    """All ground instances of ``schema`` over the given closed terms."""
    terms = list(terms)
    names = schema.variables()
    out = set()
    for combo in itertools.product(terms, repeat=len(names)):
        env = dict(zip(names, combo))
        out.add(AtomicRule(
            frozenset(_inst_atom(p, env) for p in schema.premises),
            _inst_atom(schema.conclusion, env),
        ))
    return out


@dataclass(frozen=True)
class Base:
    """A finite set of ground atomic rules, optionally with a declared vocabulary.

    ``predicates`` maps predicate names to arities and ``terms`` lists the
    closed terms; together they fix the atom universe used by
    :mod:`pts_arith.support`.  When they are empty the universe is the set
    of atoms mentioned by the rules.
    """
    rules: frozenset = frozenset()
    predicates: tuple = ()
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", frozenset(self.rules))
        object.__setattr__(self, "predicates", tuple(self.predicates))
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.predicates:
            arity = dict(self.predicates)
            termset = set(self.terms)
            for a in self.mentioned_atoms():
                if arity.get(a.pred) != len(a.args) or not set(a.args) <= termset:
                    raise OutOfVocabularyError(f"atom {print_formula(a)} is outside the declared vocabulary")

    def mentioned_atoms(self) -> set:
        out = set()
        for r in self.rules:
            out |= r.premises
            out.add(r.conclusion)
        return out

    def atoms(self) -> list:
        """The atom universe in a fixed order."""
        if not self.predicates:
            return sorted(self.mentioned_atoms(), key=_atom_key)
        out = []
        for pred, k in self.predicates:
            for args in itertools.product(self.terms, repeat=k):
                out.append(Atom(pred, tuple(args)))
        return out

    def with_rules(self, rules) -> "Base":
        return Base(frozenset(self.rules) | frozenset(rules), self.predicates, self.terms)

    def __le__(self, other):
        return self.rules <= other.rules


def _atom_key(a):
    return print_formula(a)


def _ordered_rules(b: Base):
    return sorted(b.rules, key=lambda r: (sorted(map(_atom_key, r.premises)), _atom_key(r.conclusion)))


def _fixpoint(b: Base):
    """Worklist closure; returns the derived atoms with the rule that first produced each."""
    rules = _ordered_rules(b)
    waiting = {}
    for idx, r in enumerate(rules):
        for p in r.premises:
            waiting.setdefault(p, []).append(idx)
    missing = [len(r.premises) for r in rules]
    reason = {}
    queue = deque()
    for idx, r in enumerate(rules):
        if not r.premises and r.conclusion not in reason:
            reason[r.conclusion] = r
            queue.append(r.conclusion)
    while queue:
        a = queue.popleft()
        for idx in waiting.get(a, ()):
            missing[idx] -= 1
            if missing[idx] == 0:
                c = rules[idx].conclusion
                if c not in reason:
                    reason[c] = rules[idx]
                    queue.append(c)
    return reason


def closure(b: Base) -> frozenset:
    return frozenset(_fixpoint(b))


def derives(b: Base, a: Atom, strict: bool = False) -> bool:
    if strict and b.predicates and a not in set(b.atoms()):
        raise OutOfVocabularyError(f"atom {print_formula(a)} is outside the vocabulary")
    return a in _fixpoint(b)


@dataclass(frozen=True)
class Derivation:
    conclusion: Atom
    rule: AtomicRule
    children: tuple = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def pretty(self, indent: int = 0) -> str:
        tag = "Ref" if not self.children else "App"
        lines = [" " * indent + f"{print_formula(self.conclusion)}   [{tag}: {self.rule}]"]
        for c in self.children:
            lines.append(c.pretty(indent + 2))
        return "\n".join(lines)


def derivation_tree(b: Base, a: Atom) -> Optional[Derivation]:
    reason = _fixpoint(b)
    if a not in reason:
        return None
    memo = {}

    def build(atom):
        if atom not in memo:
            rule = reason[atom]
            premises = sorted(rule.premises, key=_atom_key)
            memo[atom] = Derivation(atom, rule, tuple(build(p) for p in premises))
        return memo[atom]

    return build(a)


def check_derivation(b: Base, d: Derivation) -> bool:
    """Independent check of a Ref/App tree against the base."""
    if d.rule not in b.rules or d.rule.conclusion != d.conclusion:
        return False
    if {c.conclusion for c in d.children} != set(d.rule.premises):
        return False
    if len(d.children) != len(d.rule.premises):
        return False
    return all(check_derivation(b, c) for c in d.children)


# --------------------------------------------------------------------------
# Base files

def parse_atom(text: str, constants=None) -> Atom:
    phi = parse_formula(text, constants=constants)
    if not isinstance(phi, Atom):
        raise ParseError(f"not an atom: {text!r}")
    return phi


def _split_atoms(text: str) -> list:
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            items.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    items.append("".join(cur))
    return [s.strip() for s in items if s.strip()]


def parse_base(text: str) -> Base:
    predicates, term_texts, rule_texts = [], None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError(f"line {lineno}: expected 'key: value'")
        if key == "vocab":
            for item in _split_atoms(rest):
                name, _, k = item.partition("/")
                predicates.append((name.strip(), int(k) if k else 0))
        elif key == "terms":
            term_texts = (term_texts or []) + _split_atoms(rest)
        elif key == "rule":
            if "=>" not in rest:
                raise ParseError(f"line {lineno}: rule needs '=>'")
            rule_texts.append((lineno, rest))
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")

    constants = None
    if term_texts is not None:
        terms = [parse_term(t, constants=()) for t in term_texts]
        constants = {t.name for t in terms if isinstance(t, Const)}
        terms = [Const(t.name) if isinstance(t, Var) else t for t in terms]
        constants |= {t.name for t in terms if isinstance(t, Const)}
    schemas = []
    for lineno, rest in rule_texts:
        lhs, _, rhs = rest.partition("=>")
        try:
            prem = tuple(parse_atom(s, constants) for s in _split_atoms(lhs))
            concl = parse_atom(rhs.strip(), constants)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        schemas.append(RuleSchema(prem, concl))

    if term_texts is None:
        seen = []
        for s in schemas:
            for a in (*s.premises, s.conclusion):
                for t in a.args:
                    if not term_vars(t) and t not in seen:
                        seen.append(t)
        terms = seen
    rules = set()
    for s in schemas:
        rules |= instantiate(s, terms)
    return Base(frozenset(rules), tuple(predicates), tuple(terms))


def load_base(path) -> Base:
    with open(path, encoding="utf-8") as fh:
        return parse_base(fh.read())


def serialize_base(b: Base) -> str:
    lines = []
    if b.predicates:
        lines.append("vocab: " + ", ".join(f"{p}/{k}" for p, k in b.predicates))
    if b.terms:
        lines.append("terms: " + ", ".join(print_term(t) for t in b.terms))
    for r in _ordered_rules(b):
        prem = ", ".join(print_formula(p) for p in sorted(r.premises, key=_atom_key))
        lines.append(f"rule: {prem} => {print_formula(r.conclusion)}".replace(":  =>", ": =>"))
    return "\n".join(lines) + "\n"
