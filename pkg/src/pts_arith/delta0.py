"""Bounded arithmetic: recognising Δ0 formulas and deciding Δ0 sentences.

Only core syntax exists, so bounds are recognised by shape.  ``a <= t`` is
``~forall y. ~(a + y = t)`` with ``y`` fresh, a bounded universal is
``forall x. (x <= t -> A)`` with ``x`` not in ``t``, and a bounded
existential is the negation of a bounded universal of a negation.  Bounded
quantifiers range over ``0 .. t`` inclusive.

Formulas are compiled into a small tree of tuples whose terms are Python
closures.  When a conjunct pins the quantified variable down (``x = e``,
``e = x + u``, ``e = u * x`` or a functional predicate such as ``Elt``),
only that value is tried instead of the whole range.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .syntax import (
    And, Atom, Bot, Const, Forall, Imp, Plus, Succ, Times, Var, Zero,
    free_vars, term_vars,
)

__all__ = [
    "Budget", "BudgetExceeded", "NotDelta0", "PredicateSpec", "compile_delta0",
    "evaluate", "is_delta0", "classify", "default_budget", "match_le",
    "match_bounded_forall", "match_bounded_exists",
]

BUDGET_ENV = "PTS_ARITH_BUDGET"
DEFAULT_STEPS = 20_000_000


class NotDelta0(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    return DEFAULT_STEPS


@dataclass
class Budget:
    """Caps total loop iterations and quantifier nesting during evaluation."""
    max_steps: int = field(default_factory=default_budget)
    max_depth: int = 400
    steps: int = 0

    def tick(self, n: int = 1):
        self.steps += n
        if self.steps > self.max_steps:
            raise BudgetExceeded(f"evaluation exceeded {self.max_steps} steps")


@dataclass(frozen=True)
class PredicateSpec:
    """A primitive predicate decided by a Python function.

    ``solvers`` maps an argument position to a function of the remaining
    arguments (in order) returning the only value that position can take,
    or ``None`` when no value makes the predicate true.
    """
    arity: int
    holds: Callable
    solvers: Mapping = field(default_factory=dict)


# --------------------------------------------------------------------------
# Shape recognition

def match_le(phi):
    """``(a, t)`` when ``phi`` is ``~forall y. ~(a + y = t)``, else ``None``."""
    if not (isinstance(phi, Imp) and isinstance(phi.right, Bot) and isinstance(phi.left, Forall)):
        return None
    y, body = phi.left.var, phi.left.body
    if not (isinstance(body, Imp) and isinstance(body.right, Bot) and isinstance(body.left, Atom)):
        return None
    atom = body.left
    if atom.pred != "=":
        return None
    lhs, t = atom.args
    if not (isinstance(lhs, Plus) and lhs.right == Var(y)):
        return None
    a = lhs.left
    if y in term_vars(a) or y in term_vars(t):
        return None
    return a, t


def match_bounded_forall(phi):
    """``(x, t, body)`` for ``forall x. (x <= t -> body)``."""
    if not (isinstance(phi, Forall) and isinstance(phi.body, Imp)):
        return None
    le = match_le(phi.body.left)
    if le is None or le[0] != Var(phi.var) or phi.var in term_vars(le[1]):
        return None
    return phi.var, le[1], phi.body.right


def match_bounded_exists(phi):
    """``(x, t, body)`` for ``~forall x. (x <= t -> ~body)``."""
    if not (isinstance(phi, Imp) and isinstance(phi.right, Bot)):
        return None
    m = match_bounded_forall(phi.left)
    if m is None:
        return None
    x, t, inner = m
    if not (isinstance(inner, Imp) and isinstance(inner.right, Bot)):
        return None
    return x, t, inner.left


# --------------------------------------------------------------------------
# Compilation

def _compile_term(t):
    k = 0
    while isinstance(t, Succ):
        k += 1
        t = t.arg
    if isinstance(t, Zero):
        return lambda env, k=k: k
    if isinstance(t, Var):
        name = t.name
        if k:
            return lambda env: env[name] + k
        return lambda env: env[name]
    if isinstance(t, (Plus, Times)):
        f, g = _compile_term(t.left), _compile_term(t.right)
        if isinstance(t, Plus):
            return lambda env: f(env) + g(env) + k
        return lambda env: f(env) * g(env) + k
    if isinstance(t, Const):
        raise NotDelta0(f"constant {t.name} has no arithmetic value")
    raise NotDelta0(f"not a term: {t!r}")


def _conjuncts(phi, out):
    if isinstance(phi, And):
        _conjuncts(phi.left, out)
        _conjuncts(phi.right, out)
    else:
        out.append(phi)
    return out


def _inverter(side, x):
    """``env, target -> value of x`` when ``x`` occurs exactly once in ``side``.

    Returns ``None`` from the inverter when no natural value fits and
    ``_ANY`` when the equation does not pin ``x`` down (a zero factor).
    """
    if side == Var(x):
        return lambda env, v: v
    if isinstance(side, Succ):
        inner = _inverter(side.arg, x)
        if inner is None:
            return None
        return lambda env, v: inner(env, v - 1) if v >= 1 else None
    if isinstance(side, (Plus, Times)):
        lx, rx = x in term_vars(side.left), x in term_vars(side.right)
        if lx == rx:
            return None
        sub, other = (side.left, side.right) if lx else (side.right, side.left)
        inner = _inverter(sub, x)
        if inner is None:
            return None
        f = _compile_term(other)
        if isinstance(side, Plus):
            def inv(env, v):
                d = v - f(env)
                return inner(env, d) if d >= 0 else None
        else:
            def inv(env, v):
                r = f(env)
                if r == 0:
                    return _ANY if v == 0 else None
                q, m = divmod(v, r)
                return inner(env, q) if m == 0 else None
        return inv
    return None


def _solver_for(x, conjunct, preds):
    """A function ``env -> value | None`` when ``conjunct`` determines ``x``."""
    if not isinstance(conjunct, Atom):
        return None
    if conjunct.pred == "=":
        for side, other in (conjunct.args, conjunct.args[::-1]):
            if x in term_vars(other) or x not in term_vars(side):
                continue
            inv = _inverter(side, x)
            if inv is None:
                continue
            e = _compile_term(other)
            return lambda env, inv=inv, e=e: inv(env, e(env))
        return None
    spec = preds.get(conjunct.pred)
    if spec is None or not spec.solvers:
        return None
    for pos, fn in spec.solvers.items():
        if conjunct.args[pos] != Var(x):
            continue
        rest = [a for i, a in enumerate(conjunct.args) if i != pos]
        if any(x in term_vars(a) for a in rest):
            continue
        fs = [_compile_term(a) for a in rest]
        return lambda env, fn=fn, fs=fs: fn(*[f(env) for f in fs])
    return None


_ANY = object()


def _solvers(x, phi, preds):
    out = []
    for c in _conjuncts(phi, []):
        s = _solver_for(x, c, preds)
        if s is not None:
            out.append(s)
    return out


def _compile(phi, preds, bound_names):
    le = match_le(phi)
    if le is not None:
        return ("le", _compile_term(le[0]), _compile_term(le[1]))
    # ~forall x (x <= t -> ~body) is also the negation of a bounded forall,
    # so a failed existential reading falls through to the plain one
    m = match_bounded_exists(phi)
    if m is not None:
        x, t, body = m
        try:
            return ("ex", x, _compile_term(t), _compile(body, preds, bound_names | {x}),
                    _solvers(x, body, preds))
        except NotDelta0:
            pass
    m = match_bounded_forall(phi)
    if m is not None:
        x, t, body = m
        guard = _solvers(x, body.left, preds) if isinstance(body, Imp) else []
        return ("all", x, _compile_term(t), _compile(body, preds, bound_names | {x}), guard)
    if isinstance(phi, Bot):
        return ("bot",)
    if isinstance(phi, Imp):
        return ("imp", _compile(phi.left, preds, bound_names), _compile(phi.right, preds, bound_names))
    if isinstance(phi, And):
        return ("and", _compile(phi.left, preds, bound_names), _compile(phi.right, preds, bound_names))
    if isinstance(phi, Atom):
        if phi.pred == "=":
            return ("eq", _compile_term(phi.args[0]), _compile_term(phi.args[1]))
        spec = preds.get(phi.pred)
        if spec is None:
            raise NotDelta0(f"predicate {phi.pred} is not a known primitive")
        if spec.arity != len(phi.args):
            raise NotDelta0(f"predicate {phi.pred} takes {spec.arity} arguments")
        return ("pred", phi.pred, spec.holds, tuple(_compile_term(a) for a in phi.args))
    if isinstance(phi, Forall):
        raise NotDelta0(f"unbounded quantifier over {phi.var}")
    raise NotDelta0(f"not a formula: {phi!r}")


def compile_delta0(phi, predicates: Optional[Mapping] = None):
    return _compile(phi, dict(predicates or {}), frozenset())


# --------------------------------------------------------------------------
# Evaluation

def _candidate(solvers, env):
    for s in solvers:
        v = s(env)
        if v is not _ANY:
            return True, v
    return False, None


def _eval(node, env, budget, depth):
    tag = node[0]
    if tag == "eq":
        return node[1](env) == node[2](env)
    if tag == "le":
        return node[1](env) <= node[2](env)
    if tag == "imp":
        return (not _eval(node[1], env, budget, depth)) or _eval(node[2], env, budget, depth)
    if tag == "and":
        return _eval(node[1], env, budget, depth) and _eval(node[2], env, budget, depth)
    if tag == "bot":
        return False
    if tag == "pred":
        budget.tick()
        return bool(node[2](*[f(env) for f in node[3]]))
    # bounded quantifier
    if depth >= budget.max_depth:
        raise BudgetExceeded(f"quantifier nesting exceeded {budget.max_depth}")
    _, x, bound, body, solvers = node
    hi = bound(env)
    saved = env.get(x, _MISSING)
    try:
        solved, v = _candidate(solvers, env)
        if solved:
            budget.tick()
            if v is None or v > hi:
                return tag == "all"
            env[x] = v
            return _eval(body, env, budget, depth + 1)
        want = tag == "ex"
        for v in range(hi + 1):
            budget.tick()
            env[x] = v
            if _eval(body, env, budget, depth + 1) == want:
                return want
        return not want
    finally:
        if saved is _MISSING:
            env.pop(x, None)
        else:
            env[x] = saved


_MISSING = object()


def evaluate(phi, predicates: Optional[Mapping] = None, budget: Optional[Budget] = None,
             env: Optional[Mapping] = None) -> bool:
    """Truth of the Δ0 formula ``phi`` over the natural numbers.

    ``env`` assigns values to free variables; with no ``env`` the formula
    must be a sentence.  Assigning a value is equivalent to substituting its
    numeral, without building a term the size of the number.
    """
    env = dict(env or {})
    missing = free_vars(phi) - set(env)
    if missing:
        raise NotDelta0(f"not a sentence: free variables {sorted(missing)}")
    if any(not isinstance(v, int) or v < 0 for v in env.values()):
        raise ValueError("variables take natural-number values")
    node = compile_delta0(phi, predicates)
    return _eval(node, env, budget or Budget(), 0)


# --------------------------------------------------------------------------
# Classification

def is_delta0(phi, primitives=()) -> bool:
    """All quantifiers bounded; ``primitives`` names predicates counted as Δ0."""
    preds = {p: PredicateSpec(k, lambda *a: False) for p, k in _arity_map(primitives).items()}
    try:
        compile_delta0(phi, preds)
    except NotDelta0:
        return False
    return True


def _arity_map(primitives):
    if isinstance(primitives, Mapping):
        return {k: (v.arity if isinstance(v, PredicateSpec) else int(v)) for k, v in primitives.items()}
    from .coding import DEFINED_PREDICATES
    return {p: DEFINED_PREDICATES[p] for p in primitives}


def classify(phi, primitives=()) -> str:
    """``"delta0"``, ``"sigma1"`` (unbounded existentials over a Δ0 matrix) or ``"other"``."""
    if is_delta0(phi, primitives):
        return "delta0"
    matrix = phi
    while (isinstance(matrix, Imp) and isinstance(matrix.right, Bot)
           and isinstance(matrix.left, Forall) and isinstance(matrix.left.body, Imp)
           and isinstance(matrix.left.body.right, Bot)):
        matrix = matrix.left.body.left
        if is_delta0(matrix, primitives):
            return "sigma1"
    return "other"
