"""Slow, deliberately simple reference implementations used as test oracles.

Nothing here shares code with the package beyond the AST classes.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from pts_arith.syntax import And, Atom, Bot, Imp


# --------------------------------------------------------------------------
# Support by the clauses, over explicit rule sets

class NaiveSupport:
    """Support over every subset of the rule universe of ``atoms``.

    Bases are bitmasks over ``self.rules``; a rule is a pair
    ``(premise indices, conclusion index)``.  ``vector(phi)`` is the set of
    bases supporting ``phi``, as a bitmask indexed by base mask.
    """

    def __init__(self, atoms):
        self.atoms = list(atoms)
        self.idx = {a: i for i, a in enumerate(self.atoms)}
        n = len(self.atoms)
        self.rules = [(frozenset(i for i in range(n) if x >> i & 1), c)
                      for x in range(1 << n) for c in range(n)]
        self.count = 1 << len(self.rules)
        self.closures = [self._closure(m) for m in range(self.count)]
        # supersets[m]: bitmask of every base containing base m
        self.supersets = [sum(1 << c for c in range(self.count) if c & m == m) for m in range(self.count)]
        self._memo = {}

    def _closure(self, mask):
        derived = set()
        changed = True
        while changed:
            changed = False
            for j, (prem, c) in enumerate(self.rules):
                if mask >> j & 1 and c not in derived and prem <= derived:
                    derived.add(c)
                    changed = True
        return derived

    def base_mask(self, base):
        """Mask of a package ``Base`` over this rule universe."""
        m = 0
        for r in base.rules:
            m |= 1 << self.rules.index((frozenset(self.idx[a] for a in r.premises), self.idx[r.conclusion]))
        return m

    def vector(self, phi):
        if phi not in self._memo:
            self._memo[phi] = self._vector(phi)
        return self._memo[phi]

    def _vector(self, phi):
        bases = range(self.count)
        if isinstance(phi, Atom):
            i = self.idx[phi]
            return sum(1 << m for m in bases if i in self.closures[m])
        if isinstance(phi, Bot):
            n = len(self.atoms)
            return sum(1 << m for m in bases if len(self.closures[m]) == n)
        if isinstance(phi, And):
            return self.vector(phi.left) & self.vector(phi.right)
        if isinstance(phi, Imp):
            bad = self.vector(phi.left) & ~self.vector(phi.right)
            return sum(1 << m for m in bases if not self.supersets[m] & bad)
        raise TypeError(phi)

    def supports(self, mask, phi):
        return bool(self.vector(phi) >> mask & 1)


# --------------------------------------------------------------------------
# Truth tables

def classical_value(phi, assignment):
    if isinstance(phi, Atom):
        return assignment[phi]
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, And):
        return classical_value(phi.left, assignment) and classical_value(phi.right, assignment)
    if isinstance(phi, Imp):
        return not classical_value(phi.left, assignment) or classical_value(phi.right, assignment)
    raise TypeError(phi)


def is_tautology(phi, atoms):
    return all(classical_value(phi, dict(zip(atoms, row)))
               for row in itertools.product((False, True), repeat=len(atoms)))


def core_formulas(leaves, depth):
    """Every core formula over ``leaves`` built with ``->`` and ``&`` to ``depth``."""
    levels = [list(leaves)]
    upto = list(leaves)
    for d in range(1, depth + 1):
        prev = set(levels[-1])
        new = []
        for a in upto:
            for b in upto:
                if a in prev or b in prev:
                    new.append(Imp(a, b))
                    new.append(And(a, b))
        levels.append(new)
        upto = upto + new
    return upto


def random_prop(rng, atoms, depth):
    if depth == 0 or rng.random() < 0.2:
        return Bot() if rng.random() < 0.1 else rng.choice(atoms)
    k = rng.random()
    if k < 0.2:
        return Imp(random_prop(rng, atoms, depth - 1), Bot())
    left, right = random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1)
    return And(left, right) if k < 0.5 else Imp(left, right)


# --------------------------------------------------------------------------
# Bounded arithmetic sentences as plain tuples
#
# terms:    ("num", n) | ("var", x) | ("S", t) | ("+", s, t) | ("*", s, t)
# formulas: ("eq", s, t) | ("le", s, t) | ("not", f) | ("and", f, g) | ("or", f, g)
#           | ("imp", f, g) | ("all", x, bound_term, f) | ("ex", x, bound_term, f)

def term_value(t, env):
    tag = t[0]
    if tag == "num":
        return t[1]
    if tag == "var":
        return env[t[1]]
    if tag == "S":
        return term_value(t[1], env) + 1
    if tag == "+":
        return term_value(t[1], env) + term_value(t[2], env)
    return term_value(t[1], env) * term_value(t[2], env)


def naive_truth(f, env=None):
    env = env or {}
    tag = f[0]
    if tag == "eq":
        return term_value(f[1], env) == term_value(f[2], env)
    if tag == "le":
        return term_value(f[1], env) <= term_value(f[2], env)
    if tag == "not":
        return not naive_truth(f[1], env)
    if tag == "and":
        return naive_truth(f[1], env) and naive_truth(f[2], env)
    if tag == "or":
        return naive_truth(f[1], env) or naive_truth(f[2], env)
    if tag == "imp":
        return not naive_truth(f[1], env) or naive_truth(f[2], env)
    bound = term_value(f[2], env)
    results = (naive_truth(f[3], {**env, f[1]: v}) for v in range(bound + 1))
    return all(results) if tag == "all" else any(results)


def render_term(t):
    tag = t[0]
    if tag == "num":
        return str(t[1])
    if tag == "var":
        return t[1]
    if tag == "S":
        return f"S({render_term(t[1])})"
    return f"({render_term(t[1])} {tag} {render_term(t[2])})"


def render(f):
    tag = f[0]
    if tag == "eq":
        return f"{render_term(f[1])} = {render_term(f[2])}"
    if tag == "le":
        return f"{render_term(f[1])} < {render_term(f[2])}"
    if tag == "not":
        return f"~({render(f[1])})"
    if tag in ("and", "or", "imp"):
        op = {"and": "&", "or": "|", "imp": "->"}[tag]
        return f"({render(f[1])}) {op} ({render(f[2])})"
    q = "forall" if tag == "all" else "exists"
    return f"({q} {f[1]} < {render_term(f[2])}. {render(f[3])})"


_VARS = "xyzwvu"


def _random_term(rng, scope, depth):
    if depth == 0 or rng.random() < 0.4:
        if scope and rng.random() < 0.6:
            return ("var", rng.choice(scope))
        return ("num", rng.randrange(0, 8))
    op = rng.choice(("S", "+", "*"))
    if op == "S":
        return ("S", _random_term(rng, scope, depth - 1))
    return (op, _random_term(rng, scope, depth - 1), _random_term(rng, scope, depth - 1))


def random_delta0(rng: random.Random, max_bound=50, quantifiers=2, scope=(), depth=3):
    """A random bounded sentence whose numeric bounds never exceed ``max_bound``."""
    if quantifiers and (depth == 0 or rng.random() < 0.5):
        x = _VARS[len(scope)]
        if scope and rng.random() < 0.3:
            bound = ("var", rng.choice(scope))
        else:
            bound = ("num", rng.randrange(0, max_bound + 1))
        body = random_delta0(rng, max_bound, quantifiers - 1, (*scope, x), depth)
        return ("all" if rng.random() < 0.5 else "ex", x, bound, body)
    if depth == 0 or rng.random() < 0.3:
        kind = "eq" if rng.random() < 0.6 else "le"
        return (kind, _random_term(rng, list(scope), 2), _random_term(rng, list(scope), 2))
    op = rng.choice(("not", "and", "or", "imp"))
    if op == "not":
        return ("not", random_delta0(rng, max_bound, quantifiers, scope, depth - 1))
    return (op, random_delta0(rng, max_bound, quantifiers, scope, depth - 1),
            random_delta0(rng, max_bound, 0, scope, depth - 1))


@lru_cache(maxsize=None)
def numeral_text(n):
    return "0" if n == 0 else f"S({numeral_text(n - 1)})"
