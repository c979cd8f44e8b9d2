"""Terms and formulas of first-order arithmetic, with a parser and printer.

The core connectives are ``->``, ``&``, ``forall`` and ``_|_``.  Everything
else (``~``, ``|``, ``exists``, ``<`` and bounded quantifiers) is accepted by
the parser and elaborated into the core on the spot, so the AST never holds a
derived form.

Concrete syntax (ASCII, unicode aliases in brackets)::

    formula  := quant | imp
    quant    := ("forall" [∀] | "exists" [∃]) VAR ["<" term] "." formula
    imp      := or ["->" [→] imp]
    or       := and {"|" [∨] and}
    and      := unary {"&" [∧] unary}
    unary    := "~" [¬] unary | quant | "(" formula ")" | "_|_" [⊥] | atom
    atom     := term ("=" | "<") term | PRED ["(" term {"," term} ")"]
    term     := prod {"+" prod}
    prod     := base {"*" [×] base}
    base     := "0" | DIGITS | "S" "(" term ")" | IDENT | "(" term ")"

A digit string ``n`` denotes the numeral ``S(...S(0))`` when ``n`` is at most
``LITERAL_UNARY_MAX``; larger literals become :func:`compact_numeral` terms so
that the tree stays shallow.

Identifiers in term position are variables when bound by an enclosing
quantifier or when they match ``[u-z][0-9]*``; other identifiers are
constants.  Passing ``constants=`` to :func:`parse_formula` overrides the
convention for free identifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "Zero", "Succ", "Plus", "Times", "Var", "Const", "Term",
    "Atom", "Bot", "Imp", "And", "Forall", "Formula",
    "ParseError", "UnknownSymbolError", "OpenTermError",
    "parse_formula", "parse_term", "print_formula", "print_term",
    "numeral", "compact_numeral", "substitute", "substitute_term",
    "free_vars", "term_vars", "is_closed", "eval_closed_term",
    "neg", "disj", "exists", "less", "bounded_forall", "bounded_exists",
    "eq", "fresh_var", "formula_depth", "atoms_of", "BOT",
]


# --------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    arg: "Term"


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Times:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


Term = Union[Zero, Succ, Plus, Times, Var, Const]


# --------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __post_init__(self):
        if self.pred == "=" and len(self.args) != 2:
            raise ValueError("equality atoms take exactly two terms")


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Atom, Bot, Imp, And, Forall]

BOT = Bot()
ZERO = Zero()


class ParseError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownSymbolError(ParseError):
    pass


class OpenTermError(ValueError):
    pass


LITERAL_UNARY_MAX = 256
VAR_PATTERN = re.compile(r"^[u-z][0-9]*$")


# --------------------------------------------------------------------------
# Derived forms

def eq(s, t) -> Atom:
    return Atom("=", (s, t))


def neg(phi) -> Imp:
    return Imp(phi, BOT)


def disj(phi, psi) -> Formula:
    return neg(And(neg(phi), neg(psi)))


def exists(x: str, phi) -> Formula:
    return neg(Forall(x, neg(phi)))


def less(t, s, avoid: Iterable[str] = ()) -> Formula:
    """``t < s``, i.e. ``exists x (t + x = s)`` for a fresh ``x``."""
    x = fresh_var(term_vars(t) | term_vars(s) | set(avoid))
    return exists(x, eq(Plus(t, Var(x)), s))


def bounded_forall(x: str, t, phi) -> Formula:
    """``forall x < t. phi`` as ``forall x (exists y (x + y = t) -> phi)``."""
    if x in term_vars(t):
        raise ValueError(f"bound variable {x} occurs in its own bound")
    return Forall(x, Imp(less(Var(x), t, avoid={x}), phi))


def bounded_exists(x: str, t, phi) -> Formula:
    return neg(bounded_forall(x, t, neg(phi)))


_FRESH_BASE = ("x", "y", "z", "w", "v", "u")


def fresh_var(avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    for name in _fresh_names():
        if name not in avoid:
            return name
    raise AssertionError("unreachable")


def _fresh_names() -> Iterator[str]:
    yield from _FRESH_BASE
    k = 1
    while True:
        for b in _FRESH_BASE:
            yield f"{b}{k}"
        k += 1


# --------------------------------------------------------------------------
# Numerals and evaluation

def numeral(n: int):
    if n < 0:
        raise ValueError("numerals denote natural numbers")
    t = ZERO
    for _ in range(n):
        t = Succ(t)
    return t


def compact_numeral(n: int):
    """A closed term of value ``n`` whose size is near-linear in the bit length of ``n``.

    Small values get the plain numeral.  Larger ones split as
    ``2^h * hi + lo`` with ``h`` half the bit length, and powers of two are
    built by squaring, so the term depth stays polylogarithmic in the bit
    length.  Only ``0``, ``S``, ``+`` and ``*`` occur.
    """
    if n < 0:
        raise ValueError("numerals denote natural numbers")
    if n < 8:
        return numeral(n)
    h = n.bit_length() // 2
    hi, lo = divmod(n, 1 << h)
    t = Times(_power_of_two(h), compact_numeral(hi))
    return Plus(t, compact_numeral(lo)) if lo else t


def _power_of_two(h: int):
    if h < 3:
        return numeral(1 << h)
    root = _power_of_two(h // 2)
    sq = Times(root, root)
    return Times(numeral(2), sq) if h % 2 else sq


def eval_closed_term(t) -> int:
    stack = [(t, False)]
    values = []
    while stack:
        node, done = stack.pop()
        if isinstance(node, Zero):
            values.append(0)
        elif isinstance(node, Succ):
            if done:
                values.append(values.pop() + 1)
            else:
                stack.append((node, True))
                stack.append((node.arg, False))
        elif isinstance(node, (Plus, Times)):
            if done:
                b = values.pop()
                a = values.pop()
                values.append(a + b if isinstance(node, Plus) else a * b)
            else:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
        elif isinstance(node, Var):
            raise OpenTermError(f"term contains variable {node.name}")
        elif isinstance(node, Const):
            raise OpenTermError(f"constant {node.name} has no arithmetic value")
        else:
            raise TypeError(f"not a term: {node!r}")
    return values[0]


# --------------------------------------------------------------------------
# Variables and substitution

def term_vars(t) -> frozenset:
    return _term_vars(t)


@lru_cache(maxsize=65536)
def _term_vars(t) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Succ):
        return _term_vars(t.arg)
    if isinstance(t, (Plus, Times)):
        return _term_vars(t.left) | _term_vars(t.right)
    return frozenset()


def free_vars(phi) -> frozenset:
    if isinstance(phi, Atom):
        out = frozenset()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Bot):
        return frozenset()
    if isinstance(phi, (Imp, And)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Forall):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def is_closed(phi) -> bool:
    return not free_vars(phi)


def substitute_term(t, x: str, s):
    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, Succ):
        return Succ(substitute_term(t.arg, x, s))
    if isinstance(t, Plus):
        return Plus(substitute_term(t.left, x, s), substitute_term(t.right, x, s))
    if isinstance(t, Times):
        return Times(substitute_term(t.left, x, s), substitute_term(t.right, x, s))
    return t


def substitute(phi, x: str, t):
    """Replace the free occurrences of ``x`` in ``phi`` by the closed term ``t``."""
    if term_vars(t):
        raise OpenTermError("substitution requires a closed term")
    return _subst(phi, x, t)


def _subst(phi, x, t):
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(substitute_term(a, x, t) for a in phi.args))
    if isinstance(phi, Bot):
        return phi
    if isinstance(phi, Imp):
        return Imp(_subst(phi.left, x, t), _subst(phi.right, x, t))
    if isinstance(phi, And):
        return And(_subst(phi.left, x, t), _subst(phi.right, x, t))
    if isinstance(phi, Forall):
        if phi.var == x:
            return phi
        return Forall(phi.var, _subst(phi.body, x, t))
    raise TypeError(f"not a formula: {phi!r}")


def formula_depth(phi) -> int:
    if isinstance(phi, (Atom, Bot)):
        return 0
    if isinstance(phi, (Imp, And)):
        return 1 + max(formula_depth(phi.left), formula_depth(phi.right))
    return 1 + formula_depth(phi.body)


def atoms_of(phi) -> set:
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f)
        elif isinstance(f, (Imp, And)):
            stack.extend((f.left, f.right))
        elif isinstance(f, Forall):
            stack.append(f.body)
    return out


# --------------------------------------------------------------------------
# Lexer

_TOKEN_SPEC = [
    ("WS", r"\s+"),
    ("ARROW", r"->|→"),
    ("BOT", r"_\|_|⊥"),
    ("AND", r"&|∧"),
    ("OR", r"\||∨"),
    ("NOT", r"~|¬"),
    ("FORALL", r"∀"),
    ("EXISTS", r"∃"),
    ("EQ", r"="),
    ("LT", r"<"),
    ("PLUS", r"\+"),
    ("TIMES", r"\*|×|·"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("DOT", r"\."),
    ("NUM", r"[0-9]+"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_']*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))
_KEYWORDS = {"forall": "FORALL", "exists": "EXISTS"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise UnknownSymbolError(f"unknown symbol {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "WS":
            value = m.group()
            if kind == "IDENT" and value in _KEYWORDS:
                kind = _KEYWORDS[value]
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, constants):
        self.tokens = _tokenize(text)
        self.i = 0
        self.constants = constants
        self.bound = []

    # helpers
    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def error(self, message):
        tok = self.peek()
        return ParseError(message, tok[2])

    # formulas
    def formula(self):
        if self.peek()[0] in ("FORALL", "EXISTS"):
            return self.quant()
        return self.imp()

    def quant(self):
        kind = self.next()[0]
        x = self.expect("IDENT")[1]
        bound = None
        if self.peek()[0] == "LT":
            self.next()
            bound = self.term()
        self.expect("DOT")
        self.bound.append(x)
        try:
            body = self.formula()
        finally:
            self.bound.pop()
        if bound is None:
            return Forall(x, body) if kind == "FORALL" else exists(x, body)
        if kind == "FORALL":
            return bounded_forall(x, bound, body)
        return bounded_exists(x, bound, body)

    def imp(self):
        left = self.disj()
        if self.peek()[0] == "ARROW":
            self.next()
            return Imp(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[0] == "OR":
            self.next()
            left = disj(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[0] == "AND":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind = self.peek()[0]
        if kind == "NOT":
            self.next()
            return neg(self.unary())
        if kind in ("FORALL", "EXISTS"):
            return self.quant()
        if kind == "BOT":
            self.next()
            return BOT
        if kind in ("LPAREN", "IDENT", "NUM"):
            saved = self.i
            try:
                left = self.term()
                op = self.peek()[0]
                if op in ("EQ", "LT"):
                    self.next()
                    right = self.term()
                    return eq(left, right) if op == "EQ" else less(left, right)
            except ParseError:
                pass
            self.i = saved
            if kind == "LPAREN":
                self.next()
                inner = self.formula()
                self.expect("RPAREN")
                return inner
            if kind == "IDENT":
                return self.pred_atom()
        raise self.error(f"unexpected {self.peek()[1] or 'end of input'!r}")

    def pred_atom(self):
        name = self.next()[1]
        args = ()
        if self.peek()[0] == "LPAREN":
            self.next()
            items = [self.term()]
            while self.peek()[0] == "COMMA":
                self.next()
                items.append(self.term())
            self.expect("RPAREN")
            args = tuple(items)
        return Atom(name, args)

    # terms
    def term(self):
        left = self.prod()
        while self.peek()[0] == "PLUS":
            self.next()
            left = Plus(left, self.prod())
        return left

    def prod(self):
        left = self.base()
        while self.peek()[0] == "TIMES":
            self.next()
            left = Times(left, self.base())
        return left

    def base(self):
        kind, value, pos = self.next()
        if kind == "NUM":
            n = int(value)
            return numeral(n) if n <= LITERAL_UNARY_MAX else compact_numeral(n)
        if kind == "LPAREN":
            inner = self.term()
            self.expect("RPAREN")
            return inner
        if kind == "IDENT":
            if value == "S" and self.peek()[0] == "LPAREN":
                self.next()
                inner = self.term()
                self.expect("RPAREN")
                return Succ(inner)
            if self.peek()[0] == "LPAREN":
                raise ParseError(f"unknown function symbol {value!r}", pos)
            return self.name_term(value)
        raise ParseError(f"expected a term, found {value or 'end of input'!r}", pos)

    def name_term(self, name):
        if name in self.bound:
            return Var(name)
        if self.constants is not None:
            return Const(name) if name in self.constants else Var(name)
        return Var(name) if VAR_PATTERN.match(name) else Const(name)


def parse_formula(text: str, constants: Optional[Iterable[str]] = None):
    """Parse ``text`` into a core formula.

    >>> print_formula(parse_formula("~(0 = S(0))"))
    '0 = S(0) -> _|_'
    """
    p = _Parser(text, None if constants is None else frozenset(constants))
    phi = p.formula()
    if p.peek()[0] != "EOF":
        raise p.error(f"trailing input {p.peek()[1]!r}")
    return phi


def parse_term(text: str, constants: Optional[Iterable[str]] = None):
    p = _Parser(text, None if constants is None else frozenset(constants))
    t = p.term()
    if p.peek()[0] != "EOF":
        raise p.error(f"trailing input {p.peek()[1]!r}")
    return t


# --------------------------------------------------------------------------
# Printer

_ASCII = {"imp": "->", "and": "&", "bot": "_|_", "forall": "forall", "times": "*"}
_UNICODE = {"imp": "→", "and": "∧", "bot": "⊥", "forall": "∀", "times": "×"}


def print_term(t, unicode: bool = False) -> str:
    sym = _UNICODE if unicode else _ASCII
    return _pt(t, 0, sym)


def _pt(t, level, sym):
    # level: 0 sum context, 1 product context, 2 operand of a product
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Succ):
        return f"S({_pt(t.arg, 0, sym)})"
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Plus):
        s = f"{_pt(t.left, 0, sym)} + {_pt(t.right, 1, sym)}"
        return f"({s})" if level >= 1 else s
    if isinstance(t, Times):
        s = f"{_pt(t.left, 1, sym)} {sym['times']} {_pt(t.right, 2, sym)}"
        return f"({s})" if level >= 2 else s
    raise TypeError(f"not a term: {t!r}")


def print_formula(phi, unicode: bool = False) -> str:
    sym = _UNICODE if unicode else _ASCII
    return _pf(phi, 0, True, sym)


# precedence: 0 quantifier/imp context, 1 and-left, 2 and-right operand
def _pf(phi, level, rightmost, sym):
    if isinstance(phi, Bot):
        return sym["bot"]
    if isinstance(phi, Atom):
        if phi.pred == "=":
            return f"{print_term(phi.args[0], sym is _UNICODE)} = {print_term(phi.args[1], sym is _UNICODE)}"
        if not phi.args:
            return phi.pred
        inner = ", ".join(print_term(a, sym is _UNICODE) for a in phi.args)
        return f"{phi.pred}({inner})"
    if isinstance(phi, Forall):
        sep = "" if sym is _UNICODE else " "
        s = f"{sym['forall']}{sep}{phi.var}. {_pf(phi.body, 0, True, sym)}"
        return s if rightmost and level == 0 else f"({s})"
    if isinstance(phi, Imp):
        left = _pf(phi.left, 1, False, sym)
        if isinstance(phi.left, Imp):
            left = f"({_pf(phi.left, 0, True, sym)})"
        s = f"{left} {sym['imp']} {_pf(phi.right, 0, rightmost or level > 0, sym)}"
        return s if level == 0 else f"({s})"
    if isinstance(phi, And):
        left = _pf(phi.left, 1, False, sym)
        right = _pf(phi.right, 2, rightmost and level < 2, sym)
        if isinstance(phi.right, And):
            right = f"({_pf(phi.right, 0, True, sym)})"
        s = f"{left} {sym['and']} {right}"
        return s if level <= 1 else f"({s})"
    raise TypeError(f"not a formula: {phi!r}")
