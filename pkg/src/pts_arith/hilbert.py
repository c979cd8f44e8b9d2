"""Hilbert-style proofs: axioms, modus ponens and unrestricted generalization.

Logical axioms are the schemas below, recognised structurally:

    K         A -> (B -> A)
    S         (A -> (B -> C)) -> ((A -> B) -> (A -> C))
    DNE       ((A -> _|_) -> _|_) -> A
    AND-E1    A & B -> A
    AND-E2    A & B -> B
    AND-I     A -> (B -> A & B)
    ALL-INST  (forall x. A) -> A[x := t]        t free for x in A
    ALL-DIST  (forall x. A -> B) -> ((forall x. A) -> forall x. B)
    ALL-VAC   A -> forall x. A                   x not free in A
    EQ-REFL   x = x                              x a variable; closed t = t is derived
    EQ-CONG   s = t -> (P -> P')                 P atomic, P' is P with some s replaced by t

Proof files hold one numbered line per formula with an optional hint::

    1: forall x. ~(S(x) = 0)          # axiom
    2: (forall x. ~(S(x) = 0)) -> ~(S(0) = 0)   # axiom
    3: ~(S(0) = 0)                    # mp 1,2
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    And, Atom, Bot, Forall, Imp, Plus, Succ, Times, Var, Zero, eq, exists,
    free_vars, neg, numeral, parse_formula, print_formula, substitute,
    term_vars,
)

__all__ = [
    "Theory", "Proof", "ProofError", "BoundExceeded", "ProofBuilder",
    "logical_axiom", "q_axioms", "pure_logic", "check_proof", "annotate",
    "prefix", "prove_numeral_atom", "eval_delta0_truth", "parse_proof",
    "load_proof", "format_proof", "is_instance_of_forall",
]


# --------------------------------------------------------------------------
# Axiom recognition

def _match_subst(phi, psi, x):
    """Return ``(True, t)`` when ``psi`` is ``phi[x := t]`` with ``t`` free for ``x``.

    ``t`` is ``None`` when ``x`` has no free occurrence in ``phi``.
    """
    found = [None]

    def terms(a, b, scope):
        if isinstance(a, Var) and a.name == x:
            if found[0] is None:
                if term_vars(b) & scope:
                    return False
                found[0] = b
                return True
            return b == found[0]
        if type(a) is not type(b):
            return False
        if isinstance(a, Succ):
            return terms(a.arg, b.arg, scope)
        if isinstance(a, (Plus, Times)):
            return terms(a.left, b.left, scope) and terms(a.right, b.right, scope)
        return a == b

    def forms(a, b, scope):
        if type(a) is not type(b):
            return False
        if isinstance(a, Atom):
            return (a.pred == b.pred and len(a.args) == len(b.args)
                    and all(terms(s, t, scope) for s, t in zip(a.args, b.args)))
        if isinstance(a, Bot):
            return True
        if isinstance(a, (Imp, And)):
            return forms(a.left, b.left, scope) and forms(a.right, b.right, scope)
        if a.var != b.var:
            return False
        if a.var == x:
            return a.body == b.body
        return forms(a.body, b.body, scope | {a.var})

    ok = forms(phi, psi, frozenset())
    if ok and found[0] is not None:
        # capture check for occurrences met before the first binding
        if term_vars(found[0]) and not _free_for(phi, x, found[0]):
            return False, None
    return ok, found[0]


def _free_for(phi, x, t, scope=frozenset()):
    tv = term_vars(t)
    if isinstance(phi, Atom):
        if any(x in term_vars(a) for a in phi.args):
            return not (tv & scope)
        return True
    if isinstance(phi, Bot):
        return True
    if isinstance(phi, (Imp, And)):
        return _free_for(phi.left, x, t, scope) and _free_for(phi.right, x, t, scope)
    if phi.var == x:
        return True
    return _free_for(phi.body, x, t, scope | {phi.var})


def is_instance_of_forall(phi, psi) -> bool:
    """``psi`` is an instance of the universal formula ``phi``."""
    return isinstance(phi, Forall) and _match_subst(phi.body, psi, phi.var)[0]


def _replaced(s, t, a, b) -> bool:
    """``b`` is ``a`` with some occurrences of the term ``s`` replaced by ``t``."""
    if a == b:
        return True
    if a == s and b == t:
        return True
    if type(a) is not type(b):
        return False
    if isinstance(a, Succ):
        return _replaced(s, t, a.arg, b.arg)
    if isinstance(a, (Plus, Times)):
        return _replaced(s, t, a.left, b.left) and _replaced(s, t, a.right, b.right)
    return False


def logical_axiom(phi) -> Optional[str]:
    """Name of the logical axiom schema ``phi`` instantiates, or ``None``."""
    if isinstance(phi, Atom):
        if phi.pred == "=" and phi.args[0] == phi.args[1] and isinstance(phi.args[0], Var):
            return "EQ-REFL"
        return None
    if not isinstance(phi, Imp):
        return None
    a, b = phi.left, phi.right
    if isinstance(b, Imp) and b.right == a:
        return "K"
    if (isinstance(a, Imp) and isinstance(a.right, Imp) and isinstance(b, Imp)
            and isinstance(b.left, Imp) and isinstance(b.right, Imp)):
        p, q, r = a.left, a.right.left, a.right.right
        if b.left == Imp(p, q) and b.right == Imp(p, r):
            return "S"
    if (isinstance(a, Imp) and isinstance(a.right, Bot) and isinstance(a.left, Imp)
            and isinstance(a.left.right, Bot) and a.left.left == b):
        return "DNE"
    if isinstance(a, And):
        if b == a.left:
            return "AND-E1"
        if b == a.right:
            return "AND-E2"
    if isinstance(b, Imp) and b.right == And(a, b.left):
        return "AND-I"
    if isinstance(a, Forall):
        if (isinstance(a.body, Imp) and isinstance(b, Imp) and b.left == Forall(a.var, a.body.left)
                and b.right == Forall(a.var, a.body.right)):
            return "ALL-DIST"
        if _match_subst(a.body, b, a.var)[0]:
            return "ALL-INST"
    if isinstance(b, Forall) and b.body == a and b.var not in free_vars(a):
        return "ALL-VAC"
    if (isinstance(a, Atom) and a.pred == "=" and isinstance(b, Imp)
            and isinstance(b.left, Atom) and isinstance(b.right, Atom)):
        p, pp = b.left, b.right
        s, t = a.args
        if (p.pred == pp.pred and len(p.args) == len(pp.args)
                and all(_replaced(s, t, u, w) for u, w in zip(p.args, pp.args))):
            return "EQ-CONG"
    return None


# --------------------------------------------------------------------------
# Theories

@dataclass(frozen=True)
class Theory:
    name: str
    axioms: tuple = ()
    labels: tuple = ()

    def axiom_label(self, phi) -> Optional[str]:
        for label, ax in zip(self.labels, self.axioms):
            if ax == phi:
                return label
        return None

    def is_axiom(self, phi) -> Optional[str]:
        """Label of the axiom ``phi`` is (theory axiom or logical schema)."""
        return self.axiom_label(phi) or logical_axiom(phi)

    def extend(self, extra, name=None) -> "Theory":
        extra = tuple(extra)
        labels = tuple(f"H{i + 1}" for i in range(len(extra)))
        return Theory(name or f"{self.name}+", self.axioms + extra, self.labels + labels)


def _q_axiom_list():
    x, y = Var("x"), Var("y")
    return (
        ("Q1", Forall("x", neg(eq(Succ(x), Zero())))),
        ("Q2", Forall("x", Forall("y", Imp(eq(Succ(x), Succ(y)), eq(x, y))))),
        ("Q3", Forall("x", Imp(neg(eq(x, Zero())), exists("y", eq(x, Succ(y)))))),
        ("Q4", Forall("x", eq(Plus(x, Zero()), x))),
        ("Q5", Forall("x", Forall("y", eq(Plus(x, Succ(y)), Succ(Plus(x, y)))))),
        ("Q6", Forall("x", eq(Times(x, Zero()), Zero()))),
        ("Q7", Forall("x", Forall("y", eq(Times(x, Succ(y)), Plus(Times(x, y), x))))),
    )


def q_axioms() -> Theory:
    """Robinson arithmetic: seven axioms, no induction."""
    items = _q_axiom_list()
    return Theory("Q", tuple(f for _, f in items), tuple(n for n, _ in items))


def pure_logic() -> Theory:
    return Theory("logic")


THEORIES = {"q": q_axioms, "logic": pure_logic}


def theory_by_name(name: str) -> Theory:
    try:
        return THEORIES[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown theory {name!r}; known: {', '.join(THEORIES)}") from None


# --------------------------------------------------------------------------
# Proofs

@dataclass(frozen=True)
class Proof:
    lines: tuple
    hints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        hints = tuple(self.hints) or (None,) * len(self.lines)
        if len(hints) != len(self.lines):
            raise ValueError("one hint per line")
        object.__setattr__(self, "hints", hints)
        if not self.lines:
            raise ValueError("a proof has at least one line")

    def __len__(self):
        return len(self.lines)

    @property
    def conclusion(self):
        return self.lines[-1]


class ProofError(ValueError):
    def __init__(self, index: int, reason: str, message: str):
        self.index = index
        self.line = index + 1
        self.reason = reason
        super().__init__(f"line {index + 1}: {reason}: {message}")


class BoundExceeded(ValueError):
    pass


@dataclass
class Justification:
    kind: str  # "axiom" | "mp" | "gen"
    label: Optional[str] = None
    premises: tuple = ()
    warning: Optional[str] = None


def _hint_holds(hint, lines, i, theory):
    kind = hint[0]
    phi = lines[i]
    if kind == "axiom":
        return theory.is_axiom(phi) is not None
    if kind == "mp":
        j, k = hint[1] - 1, hint[2] - 1
        if not (0 <= j < i and 0 <= k < i):
            return False
        return lines[k] == Imp(lines[j], phi) or lines[j] == Imp(lines[k], phi)
    if kind == "gen":
        j = hint[1] - 1
        return 0 <= j < i and isinstance(phi, Forall) and phi.body == lines[j]
    return False


_REASON = {"axiom": "not-axiom", "mp": "bad-mp", "gen": "bad-gen", None: "not-axiom"}


def annotate(p: Proof, theory: Theory) -> list:
    """Recompute a justification for every line; raise on the first bad one."""
    seen = {}
    out = []
    for i, phi in enumerate(p.lines):
        just = None
        label = theory.is_axiom(phi)
        if label is not None:
            just = Justification("axiom", label)
        else:
            for k in range(i):
                imp = p.lines[k]
                if isinstance(imp, Imp) and imp.right == phi and imp.left in seen:
                    just = Justification("mp", premises=(seen[imp.left] + 1, k + 1))
                    break
            if just is None and isinstance(phi, Forall) and phi.body in seen:
                just = Justification("gen", premises=(seen[phi.body] + 1,))
        hint = p.hints[i]
        if just is None:
            kind = hint[0] if hint else None
            if kind == "mp" and hint and max(hint[1:]) > i:
                msg = "modus ponens cites a line that is not earlier"
            elif kind == "gen":
                msg = "generalization does not match an earlier line"
            elif kind == "mp":
                msg = "modus ponens premises do not match"
            else:
                msg = "not an axiom and no earlier lines yield it by MP or Gen"
            raise ProofError(i, _REASON[kind], f"{print_formula(phi)}: {msg}")
        if hint and not _hint_holds(hint, p.lines, i, theory):
            just.warning = f"hint {format_hint(hint)} is wrong; line is justified by {format_just(just)}"
        out.append(just)
        seen.setdefault(phi, i)
    return out


def check_proof(p: Proof, theory: Theory):
    """Return the conclusion of ``p`` if every line is locally justified."""
    annotate(p, theory)
    return p.conclusion


def prefix(p: Proof, k: int) -> Proof:
    if not 1 <= k <= len(p):
        raise ValueError(f"prefix length {k} out of range 1..{len(p)}")
    return Proof(p.lines[:k], p.hints[:k])


# --------------------------------------------------------------------------
# Building proofs

class ProofBuilder:
    """Append-only proof construction; every step is checked as it is added."""

    def __init__(self, theory: Theory):
        self.theory = theory
        self.lines = []
        self.hints = []
        self.where = {}

    def _add(self, phi, hint):
        if phi in self.where:
            return self.where[phi]
        self.lines.append(phi)
        self.hints.append(hint)
        self.where[phi] = len(self.lines) - 1
        return len(self.lines) - 1

    def axiom(self, phi) -> int:
        if self.theory.is_axiom(phi) is None:
            raise ValueError(f"not an axiom: {print_formula(phi)}")
        return self._add(phi, ("axiom",))

    def mp(self, i_ante: int, i_imp: int) -> int:
        imp = self.lines[i_imp]
        if not isinstance(imp, Imp) or imp.left != self.lines[i_ante]:
            raise ValueError("modus ponens premises do not match")
        return self._add(imp.right, ("mp", i_ante + 1, i_imp + 1))

    def gen(self, i: int, x: str) -> int:
        return self._add(Forall(x, self.lines[i]), ("gen", i + 1))

    def inst(self, i_forall: int, t) -> int:
        phi = self.lines[i_forall]
        ax = self.axiom(Imp(phi, substitute(phi.body, phi.var, t)))
        return self.mp(i_forall, ax)

    def refl(self, t) -> int:
        """``t = t`` from the variable axiom by Gen and instantiation."""
        x = Var("x")
        i = self.gen(self.axiom(eq(x, x)), "x")
        return self.inst(i, t)

    def weaken(self, i: int, b) -> int:
        """From ``A`` derive ``B -> A``."""
        a = self.lines[i]
        return self.mp(i, self.axiom(Imp(a, Imp(b, a))))

    def imp_refl(self, a) -> int:
        s = self.axiom(Imp(Imp(a, Imp(Imp(a, a), a)), Imp(Imp(a, Imp(a, a)), Imp(a, a))))
        k1 = self.axiom(Imp(a, Imp(Imp(a, a), a)))
        m = self.mp(k1, s)
        k2 = self.axiom(Imp(a, Imp(a, a)))
        return self.mp(k2, m)

    def distribute(self, i_abc: int, i_ab: int) -> int:
        """From ``A -> (B -> C)`` and ``A -> B`` derive ``A -> C``."""
        abc = self.lines[i_abc]
        a, b, c = abc.left, abc.right.left, abc.right.right
        s = self.axiom(Imp(abc, Imp(Imp(a, b), Imp(a, c))))
        return self.mp(i_ab, self.mp(i_abc, s))

    def syllogism(self, i_ab: int, i_bc: int) -> int:
        """From ``A -> B`` and ``B -> C`` derive ``A -> C``."""
        lifted = self.weaken(i_bc, self.lines[i_ab].left)
        return self.distribute(lifted, i_ab)

    def discharge_middle(self, i_xyz: int, i_y: int) -> int:
        """From ``X -> (Y -> Z)`` and ``Y`` derive ``X -> Z``."""
        x = self.lines[i_xyz].left
        return self.distribute(i_xyz, self.weaken(i_y, x))

    def proof(self) -> Proof:
        return Proof(tuple(self.lines), tuple(self.hints))


def _prove_neq(b: ProofBuilder, m: int, n: int) -> int:
    zero = Zero()
    if n == 0:
        q1 = b.axiom(q_axioms().axioms[0])
        return b.inst(q1, numeral(m - 1))
    if m == 0:
        flipped = _prove_neq(b, n, 0)
        nb = numeral(n)
        cong = b.axiom(Imp(eq(zero, nb), Imp(eq(zero, zero), eq(nb, zero))))
        refl = b.refl(zero)
        sym = b.discharge_middle(cong, refl)
        return b.syllogism(sym, flipped)
    inner = _prove_neq(b, m - 1, n - 1)
    q2 = b.axiom(q_axioms().axioms[1])
    step = b.inst(b.inst(q2, numeral(m - 1)), numeral(n - 1))
    return b.syllogism(step, inner)


def prove_numeral_atom(m: int, n: int, bound: int = 200) -> Proof:
    """A Q-proof of ``m = n`` when the numbers agree, of ``~(m = n)`` otherwise."""
    if m < 0 or n < 0:
        raise ValueError("numerals denote natural numbers")
    if max(m, n) > bound:
        raise BoundExceeded(f"numeral {max(m, n)} exceeds the bound {bound}")
    b = ProofBuilder(q_axioms())
    if m == n:
        b.refl(numeral(m))
    else:
        _prove_neq(b, m, n)
    proof = b.proof()
    target = eq(numeral(m), numeral(n)) if m == n else neg(eq(numeral(m), numeral(n)))
    if proof.conclusion != target:
        raise AssertionError("numeral proof ended on the wrong formula")
    return proof


def eval_delta0_truth(phi) -> bool:
    """Truth of a bounded arithmetic sentence in the standard model."""
    from .delta0 import evaluate
    return evaluate(phi)


# --------------------------------------------------------------------------
# Proof files

_LINE_RE = re.compile(r"^\s*(\d+)\s*[:.]\s*(.*?)\s*(?:#\s*(.*?)\s*)?$")


def _parse_hint(text: Optional[str]):
    if not text:
        return None
    parts = text.replace(",", " ").split()
    kind = parts[0].lower()
    try:
        if kind == "axiom" and len(parts) >= 1:
            return ("axiom",)
        if kind == "mp" and len(parts) == 3:
            return ("mp", int(parts[1]), int(parts[2]))
        if kind == "gen" and len(parts) == 2:
            return ("gen", int(parts[1]))
    except ValueError:
        pass
    raise ValueError(f"cannot read hint {text!r}")


def parse_proof(text: str) -> Proof:
    lines, hints = [], []
    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        m = _LINE_RE.match(raw)
        if not m:
            raise ValueError(f"cannot read proof line {raw!r}")
        num, body, hint = m.groups()
        if int(num) != len(lines) + 1:
            raise ValueError(f"proof lines must be numbered 1, 2, ...; found {num}")
        lines.append(parse_formula(body))
        hints.append(_parse_hint(hint))
    return Proof(tuple(lines), tuple(hints))


def load_proof(path) -> Proof:
    with open(path, encoding="utf-8") as fh:
        return parse_proof(fh.read())


def format_hint(hint) -> str:
    if hint[0] == "axiom":
        return "axiom"
    if hint[0] == "mp":
        return f"mp {hint[1]},{hint[2]}"
    return f"gen {hint[1]}"


def format_just(j: Justification) -> str:
    if j.kind == "axiom":
        return f"axiom {j.label}"
    if j.kind == "mp":
        return f"mp {j.premises[0]},{j.premises[1]}"
    return f"gen {j.premises[0]}"


def format_proof(p: Proof) -> str:
    out = []
    for i, (phi, hint) in enumerate(zip(p.lines, p.hints), 1):
        tail = f"  # {format_hint(hint)}" if hint else ""
        out.append(f"{i}: {print_formula(phi)}{tail}")
    return "\n".join(out) + "\n"
