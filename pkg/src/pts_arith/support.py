"""Support in a base, decided over a finite vocabulary.

A base ``B`` over an atom universe of size ``n`` is determined, as far as
support is concerned, by the family of atom sets closed under its rules:
adding rules intersects families, the atoms derivable in ``B`` are the meet
of its family, and every intersection-closed family containing the full set
is the family of some base.  Extensions ``C ⊇ B`` therefore range exactly
over the intersection-closed subfamilies of ``B``'s family, and the support
clauses can be evaluated once per family instead of once per rule set.

Support sets are Python ints used as bitsets over family indices.  Families
are indexed in order of increasing size, so the inconsistent family
``{full}`` is index 0 and the empty base's family (all sets) is the last.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .base import AtomicRule, Base, OutOfVocabularyError
from .syntax import (
    And, Atom, Bot, Const, Forall, Imp, atoms_of, free_vars, is_closed, print_formula, substitute,
)

__all__ = [
    "Vocabulary", "SizeGuardError", "ExtensionError", "MooreLattice",
    "SupportEngine", "engine_for", "supports", "supports_under", "valid",
    "is_consistent", "is_maxiconsistent", "extend_to_maxiconsistent",
    "enumerate_maxiconsistent", "refute", "MAX_ATOMS", "lattice",
]

log = logging.getLogger(__name__)

# 5 atoms already give 1,385,552 families.
MAX_ATOMS = 4


class SizeGuardError(ValueError):
    pass


class ExtensionError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    """Finite stage on which support is decided.

    The atom universe is every predicate applied to the closed terms (plus
    reserve constants ``c0, c1, ...``), then the explicit ``atoms``, then the
    reserve atoms ``R0, R1, ...``.  Reserve material never occurs in queried
    formulas; it only enlarges the space of extensions.
    """
    predicates: tuple = ()
    terms: tuple = ()
    atoms: tuple = ()
    reserve: int = 0
    reserve_constants: int = 0
    forall_excludes_reserve: bool = False

    @classmethod
    def propositional(cls, *names, reserve=0) -> "Vocabulary":
        return cls(atoms=tuple(Atom(n) for n in names), reserve=reserve)

    @classmethod
    def from_base(cls, b: Base, reserve=0, reserve_constants=0,
                  forall_excludes_reserve=False) -> "Vocabulary":
        if b.predicates:
            return cls(b.predicates, b.terms, (), reserve, reserve_constants, forall_excludes_reserve)
        return cls((), b.terms, tuple(b.atoms()), reserve, reserve_constants, forall_excludes_reserve)

    def reserve_terms(self) -> tuple:
        return tuple(Const(f"c{i}") for i in range(self.reserve_constants))

    def reserve_atoms(self) -> tuple:
        return tuple(Atom(f"R{i}") for i in range(self.reserve))

    def all_terms(self) -> tuple:
        return tuple(self.terms) + self.reserve_terms()

    def instance_terms(self) -> tuple:
        """Closed terms a universal quantifier ranges over."""
        if self.forall_excludes_reserve:
            return tuple(self.terms)
        return self.all_terms()

    def universe(self) -> tuple:
        return _universe(self)

    def query_atoms(self) -> frozenset:
        reserved = set(self.reserve_atoms())
        rterms = set(self.reserve_terms())
        return frozenset(a for a in self.universe()
                         if a not in reserved and not rterms.intersection(a.args))

    def size(self) -> int:
        return len(self.universe())


@lru_cache(maxsize=None)
def _universe(v: Vocabulary) -> tuple:
    out = []
    seen = set()

    def add(a):
        if a not in seen:
            seen.add(a)
            out.append(a)

    for pred, k in v.predicates:
        for args in itertools.product(v.all_terms(), repeat=k):
            add(Atom(pred, tuple(args)))
    for a in v.atoms:
        add(a)
    for a in v.reserve_atoms():
        add(a)
    return tuple(out)


# --------------------------------------------------------------------------
# Intersection-closed families

def _close(masks: set) -> frozenset:
    closed = set(masks)
    frontier = list(closed)
    while frontier:
        new = []
        for a in frontier:
            for b in list(closed):
                c = a & b
                if c not in closed:
                    closed.add(c)
                    new.append(c)
        frontier = new
    return frozenset(closed)


def _as_bits(masks) -> int:
    out = 0
    for m in masks:
        out |= 1 << m
    return out


class MooreLattice:
    """All intersection-closed families of subsets of an ``n``-element set
    that contain the full set, with their inclusion order."""

    def __init__(self, n: int):
        if n > MAX_ATOMS:
            raise SizeGuardError(f"{n} atoms exceeds the guard of {MAX_ATOMS}")
        self.n = n
        self.full = (1 << n) - 1
        start = frozenset({self.full})
        seen = {start}
        queue = [start]
        while queue:
            fam = queue.pop()
            for m in range(1 << n):
                if m not in fam:
                    g = _close(fam | {m})
                    if g not in seen:
                        seen.add(g)
                        queue.append(g)
        ordered = sorted(seen, key=lambda f: (len(f), sorted(f)))
        self.families = [_as_bits(f) for f in ordered]
        self.index = {bits: i for i, bits in enumerate(self.families)}
        self.size = len(self.families)
        self.all = (1 << self.size) - 1
        self.meets = []
        for f in ordered:
            m = self.full
            for x in f:
                m &= x
            self.meets.append(m)
        # up[i]: families containing family i (bases that family i extends)
        fams = self.families
        self.up = []
        self.down = []
        for i, g in enumerate(fams):
            u = 0
            d = 0
            for j, f in enumerate(fams):
                if g & ~f == 0:
                    u |= 1 << j
                if f & ~g == 0:
                    d |= 1 << j
            self.up.append(u)
            self.down.append(d)
        self.inconsistent = 0  # index of {full}
        self.empty_base = self.size - 1
        self.atom_sets = []
        for a in range(n):
            s = 0
            for i, m in enumerate(self.meets):
                if m >> a & 1:
                    s |= 1 << i
            self.atom_sets.append(s)

    def family_masks(self, i: int) -> list:
        bits = self.families[i]
        return [m for m in range(1 << self.n) if bits >> m & 1]

    def implication(self, ante: int, cons: int) -> int:
        bad = ante & ~cons & self.all
        covered = 0
        while bad:
            low = bad & -bad
            covered |= self.up[low.bit_length() - 1]
            bad &= ~covered
        return self.all & ~covered

    def family_of_rules(self, rules) -> int:
        """Index of the family of sets closed under ``(premise_mask, conclusion_bit)`` rules."""
        bits = 0
        for x in range(1 << self.n):
            if all(not (p & ~x == 0) or (x >> c & 1) for p, c in rules):
                bits |= 1 << x
        return self.index[bits]

    def closure_in(self, i: int, x: int) -> int:
        m = self.full
        for y in self.family_masks(i):
            if x & ~y == 0:
                m &= y
        return m

    def rules_for(self, i: int) -> list:
        """An implicational base whose closed sets are exactly family ``i``."""
        out = []
        fam = self.families[i]
        for x in range(1 << self.n):
            if not fam >> x & 1:
                cl = self.closure_in(i, x)
                for c in range(self.n):
                    if cl >> c & 1 and not x >> c & 1:
                        out.append((x, c))
        return out


@lru_cache(maxsize=None)
def lattice(n: int) -> MooreLattice:
    return MooreLattice(n)


# --------------------------------------------------------------------------
# Decision procedure

class SupportEngine:
    def __init__(self, v: Vocabulary):
        self.vocab = v
        self.universe = v.universe()
        self.pos = {a: i for i, a in enumerate(self.universe)}
        self.lat = lattice(len(self.universe))
        self.query_atoms = v.query_atoms()
        self.instance_terms = v.instance_terms()
        self._memo = {}
        self.evaluations = 0

    # bases <-> families
    def family(self, b: Base) -> int:
        rules = []
        for r in b.rules:
            rules.append((self._mask(r.premises), self._pos(r.conclusion)))
        return self.lat.family_of_rules(rules)

    def _pos(self, a) -> int:
        try:
            return self.pos[a]
        except KeyError:
            raise OutOfVocabularyError(f"atom {print_formula(a)} is outside the vocabulary") from None

    def _mask(self, atoms) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self._pos(a)
        return m

    def base_for(self, i: int, over: Optional[Base] = None) -> Base:
        rules = set(over.rules) if over is not None else set()
        for x, c in self.lat.rules_for(i):
            prem = frozenset(self.universe[k] for k in range(self.lat.n) if x >> k & 1)
            rules.add(AtomicRule(prem, self.universe[c]))
        if over is not None:
            return over.with_rules(rules)
        return Base(frozenset(rules))

    # support sets
    def check_query(self, phi):
        if free_vars(phi):
            raise ValueError(f"support is defined for closed formulas; {print_formula(phi)} is open")
        arity = dict(self.vocab.predicates)
        terms = set(self.vocab.terms)
        for a in atoms_of(phi):
            if is_closed(a):
                ok = a in self.query_atoms
            else:
                # open atoms are instantiated later; check what is fixed now
                ok = arity.get(a.pred) == len(a.args) and all(
                    t in terms for t in a.args if isinstance(t, Const))
            if not ok:
                raise OutOfVocabularyError(f"atom {print_formula(a)} is outside the queried vocabulary")

    def support_set(self, phi) -> int:
        hit = self._memo.get(phi)
        if hit is not None:
            return hit
        self.evaluations += 1
        lat = self.lat
        if isinstance(phi, Atom):
            # instances of universals may mention reserve constants
            out = lat.atom_sets[self._pos(phi)]
        elif isinstance(phi, Bot):
            out = 1 << lat.inconsistent
        elif isinstance(phi, And):
            out = self.support_set(phi.left) & self.support_set(phi.right)
        elif isinstance(phi, Imp):
            out = lat.implication(self.support_set(phi.left), self.support_set(phi.right))
        elif isinstance(phi, Forall):
            out = lat.all
            for t in self.instance_terms:
                out &= self.support_set(substitute(phi.body, phi.var, t))
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self._memo[phi] = out
        return out

    def supports_family(self, i: int, phi) -> bool:
        return bool(self.support_set(phi) >> i & 1)

    def supports(self, b: Base, phi) -> bool:
        self.check_query(phi)
        return self.supports_family(self.family(b), phi)

    def supports_under(self, b: Base, delta: Iterable, phi) -> bool:
        delta = list(delta)
        self.check_query(phi)
        for d in delta:
            self.check_query(d)
        if not delta:
            return self.supports(b, phi)
        prem = self.lat.all
        for d in delta:
            prem &= self.support_set(d)
        i = self.family(b)
        bad = self.lat.down[i] & prem & ~self.support_set(phi)
        return bad == 0

    # consistency
    def consistent_family(self, i: int) -> bool:
        return i != self.lat.inconsistent

    def maxiconsistent_family(self, i: int) -> bool:
        if not self.consistent_family(i):
            return False
        allowed = (1 << i) | (1 << self.lat.inconsistent)
        return self.lat.down[i] & ~allowed == 0

    def maxiconsistent_families(self) -> list:
        return [i for i in range(self.lat.size) if self.maxiconsistent_family(i)]

    def refute(self, b: Base, phi) -> Optional[Base]:
        """A base ``C ⊇ b`` at which ``phi`` fails outright, or None if ``b`` supports it."""
        self.check_query(phi)
        i = self.family(b)
        if self.supports_family(i, phi):
            return None
        g = self._refute_family(i, phi)
        return None if g is None else self.base_for(g, over=b)

    def _refute_family(self, i, phi):
        if isinstance(phi, And):
            part = phi.left if not self.supports_family(i, phi.left) else phi.right
            return self._refute_family(i, part)
        if isinstance(phi, Forall):
            for t in self.instance_terms:
                inst = substitute(phi.body, phi.var, t)
                if not self.supports_family(i, inst):
                    return self._refute_family(i, inst)
        if isinstance(phi, Imp):
            bad = self.lat.down[i] & self.support_set(phi.left) & ~self.support_set(phi.right)
            # largest witness: fewest added commitments
            return bad.bit_length() - 1
        # atoms and falsum fail at the base itself
        return i


@lru_cache(maxsize=64)
def engine_for(v: Vocabulary) -> SupportEngine:
    return SupportEngine(v)


def _engine(b: Base, v: Optional[Vocabulary]) -> SupportEngine:
    return engine_for(v if v is not None else Vocabulary.from_base(b))


def supports(b: Base, phi, v: Optional[Vocabulary] = None) -> bool:
    return _engine(b, v).supports(b, phi)


def supports_under(b: Base, delta, phi, v: Optional[Vocabulary] = None) -> bool:
    return _engine(b, v).supports_under(b, delta, phi)


def valid(gamma, phi, v: Vocabulary) -> bool:
    """``gamma ⊩ phi``: support in the empty base."""
    return engine_for(v).supports_under(Base(), list(gamma), phi)


def is_consistent(b: Base, v: Optional[Vocabulary] = None) -> bool:
    e = _engine(b, v)
    return e.consistent_family(e.family(b))


def is_maxiconsistent(b: Base, v: Optional[Vocabulary] = None) -> bool:
    """Consistent, and every consistent extension inside the rule universe
    has the same closed-set family (hence supports exactly the same
    formulas)."""
    e = _engine(b, v)
    return e.maxiconsistent_family(e.family(b))


def extend_to_maxiconsistent(b: Base, phi, v: Optional[Vocabulary] = None) -> Base:
    e = _engine(b, v)
    e.check_query(phi)
    i = e.family(b)
    if e.supports_family(i, phi):
        raise ValueError(f"precondition violated: the base supports {print_formula(phi)}")
    if e.maxiconsistent_family(i):
        return b
    candidates = [g for g in e.maxiconsistent_families()
                  if e.lat.down[i] >> g & 1 and not e.supports_family(g, phi)]
    if candidates:
        # prefer the extension committing to the most atoms
        best = min(candidates, key=lambda g: (-bin(e.lat.meets[g]).count("1"), g))
        return e.base_for(best, over=b)
    log.warning("no maxiconsistent extension refuting %s within the rule universe", print_formula(phi))
    raise ExtensionError("no maxiconsistent extension within the rule universe")


def enumerate_maxiconsistent(v: Vocabulary) -> list:
    e = engine_for(v)
    return [e.base_for(g) for g in e.maxiconsistent_families()]


def refute(b: Base, phi, v: Optional[Vocabulary] = None) -> Optional[Base]:
    return _engine(b, v).refute(b, phi)
