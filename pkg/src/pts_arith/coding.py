"""Gödel numbering of terms, formulas and finite sequences.

Expressions are written in Polish notation over a fixed alphabet and read as
base-19 numerals, first symbol least significant.  No symbol has digit 0, so
the length of a code is its number of base-19 digits and concatenation is
``code(uv) = code(u) + 19**len(u) * code(v)``.

A variable is the digit 10 followed by ``k`` copies of the digit 11, where
``k`` is the rank of its name in a fixed enumeration of identifiers
(``x, y, z, u, v, w, a, b, ...``).

A sequence ``c_0 .. c_{n-1}`` is coded as ``pair(W, s)`` where
``s = sum((pair(i, c_i) + 1) * W**i)`` and ``W`` is the least prime above
every digit.  Each digit carries its own index, which keeps the element
relation expressible with bounded quantifiers only.
"""

from __future__ import annotations

from math import isqrt

from sympy import isprime, nextprime

from .syntax import (
    And, Atom, Bot, Const, Forall, Imp, Plus, Succ, Times, Var, Zero,
)

__all__ = [
    "BASE", "CODING_VERSION", "SYMBOLS", "DEFINED_PREDICATES", "CodingError",
    "code_symbol", "code_term", "code_formula", "decode_formula", "decode_term",
    "digits", "from_digits", "code_length", "var_rank", "var_name",
    "pair", "unpair", "code_sequence", "decode_sequence", "seq_len", "elt",
    "pref_code", "coding_table",
]

BASE = 19
CODING_VERSION = "1.0"

SYMBOLS = {
    "⊥": 1, "→": 2, "∧": 3, "∀": 4, "=": 5,
    "0": 6, "S": 7, "+": 8, "×": 9, "var": 10, "'": 11,
    "Form": 12, "Seq": 13, "Elt": 14, "Ax": 15, "MP": 16, "Gen": 17,
}
DEFINED_PREDICATES = {"Form": 1, "Seq": 2, "Elt": 3, "Ax": 1, "MP": 3, "Gen": 2}
_PRED_DIGIT = {name: SYMBOLS[name] for name in DEFINED_PREDICATES}
_DIGIT_PRED = {d: name for name, d in _PRED_DIGIT.items()}

BOT_D, IMP_D, AND_D, ALL_D, EQ_D = 1, 2, 3, 4, 5
ZERO_D, SUCC_D, PLUS_D, TIMES_D, VAR_D, TICK_D = 6, 7, 8, 9, 10, 11


class CodingError(ValueError):
    pass


# --------------------------------------------------------------------------
# Variable names

_FIRST = "xyzuvwabcdefghijklmnopqrst"
_REST = _FIRST + "0123456789_'"


def var_rank(name: str) -> int:
    """Position of ``name`` in the shortlex enumeration of identifiers."""
    if not name or name[0] not in _FIRST or any(ch not in _REST for ch in name[1:]):
        raise CodingError(f"cannot code variable name {name!r}")
    rank = 0
    block = len(_FIRST)
    for length in range(1, len(name)):
        rank += block
        block *= len(_REST)
    idx = _FIRST.index(name[0])
    for ch in name[1:]:
        idx = idx * len(_REST) + _REST.index(ch)
    return rank + idx


def var_name(rank: int) -> str:
    length = 1
    block = len(_FIRST)
    while rank >= block:
        rank -= block
        block *= len(_REST)
        length += 1
    chars = []
    for _ in range(length - 1):
        rank, r = divmod(rank, len(_REST))
        chars.append(_REST[r])
    chars.append(_FIRST[rank])
    return "".join(reversed(chars))


# --------------------------------------------------------------------------
# Digit strings

def digits(c: int) -> list:
    out = []
    while c:
        c, d = divmod(c, BASE)
        out.append(d)
    return out


def from_digits(ds) -> int:
    c = 0
    for d in reversed(ds):
        c = c * BASE + d
    return c


def code_length(c: int) -> int:
    return len(digits(c))


def code_symbol(symbol: str) -> int:
    """Code of a single symbol, or of a variable name as its digit string."""
    if symbol in SYMBOLS and symbol != "var" and symbol != "'":
        return SYMBOLS[symbol]
    ascii_alias = {"_|_": "⊥", "->": "→", "&": "∧", "forall": "∀", "*": "×"}
    if symbol in ascii_alias:
        return SYMBOLS[ascii_alias[symbol]]
    return from_digits(_var_digits(symbol))


def _var_digits(name: str) -> list:
    return [VAR_D] + [TICK_D] * var_rank(name)


def _term_digits(t, out: list):
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Zero):
            out.append(ZERO_D)
        elif isinstance(t, Succ):
            out.append(SUCC_D)
            stack.append(t.arg)
        elif isinstance(t, (Plus, Times)):
            out.append(PLUS_D if isinstance(t, Plus) else TIMES_D)
            stack.append(t.right)
            stack.append(t.left)
        elif isinstance(t, Var):
            out.extend(_var_digits(t.name))
        elif isinstance(t, Const):
            raise CodingError(f"constant {t.name} is not part of the arithmetic signature")
        else:
            raise CodingError(f"not a term: {t!r}")


def _formula_digits(phi, out: list):
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Bot):
            out.append(BOT_D)
        elif isinstance(f, (Imp, And)):
            out.append(IMP_D if isinstance(f, Imp) else AND_D)
            stack.append(f.right)
            stack.append(f.left)
        elif isinstance(f, Forall):
            out.append(ALL_D)
            out.extend(_var_digits(f.var))
            stack.append(f.body)
        elif isinstance(f, Atom):
            if f.pred == "=":
                out.append(EQ_D)
            elif f.pred in _PRED_DIGIT and len(f.args) == DEFINED_PREDICATES[f.pred]:
                out.append(_PRED_DIGIT[f.pred])
            else:
                raise CodingError(f"predicate {f.pred}/{len(f.args)} is not part of the arithmetic signature")
            for a in f.args:
                _term_digits(a, out)
        else:
            raise CodingError(f"not a formula: {f!r}")


def code_term(t) -> int:
    out = []
    _term_digits(t, out)
    return from_digits(out)


def code_formula(phi) -> int:
    out = []
    _formula_digits(phi, out)
    return from_digits(out)


class _Reader:
    def __init__(self, ds):
        self.ds = ds
        self.i = 0

    def take(self):
        if self.i >= len(self.ds):
            raise CodingError("truncated code")
        d = self.ds[self.i]
        self.i += 1
        return d

    def var(self):
        if self.take() != VAR_D:
            raise CodingError("expected a variable")
        k = 0
        while self.i < len(self.ds) and self.ds[self.i] == TICK_D:
            self.i += 1
            k += 1
        return var_name(k)

    def term(self):
        d = self.take()
        if d == ZERO_D:
            return Zero()
        if d == SUCC_D:
            return Succ(self.term())
        if d in (PLUS_D, TIMES_D):
            left = self.term()
            right = self.term()
            return Plus(left, right) if d == PLUS_D else Times(left, right)
        if d == VAR_D:
            self.i -= 1
            return Var(self.var())
        raise CodingError(f"digit {d} does not start a term")

    def formula(self):
        d = self.take()
        if d == BOT_D:
            return Bot()
        if d in (IMP_D, AND_D):
            left = self.formula()
            right = self.formula()
            return Imp(left, right) if d == IMP_D else And(left, right)
        if d == ALL_D:
            x = self.var()
            return Forall(x, self.formula())
        if d == EQ_D:
            return Atom("=", (self.term(), self.term()))
        if d in _DIGIT_PRED:
            name = _DIGIT_PRED[d]
            return Atom(name, tuple(self.term() for _ in range(DEFINED_PREDICATES[name])))
        raise CodingError(f"digit {d} does not start a formula")


def decode_formula(c: int):
    """Inverse of :func:`code_formula`; ``None`` when ``c`` codes no formula.

    ``0`` codes the empty string and therefore decodes to ``None``.
    """
    if c <= 0:
        return None
    r = _Reader(digits(c))
    try:
        phi = r.formula()
    except (CodingError, RecursionError):
        return None
    return phi if r.i == len(r.ds) else None


def decode_term(c: int):
    if c <= 0:
        return None
    r = _Reader(digits(c))
    try:
        t = r.term()
    except (CodingError, RecursionError):
        return None
    return t if r.i == len(r.ds) else None


# --------------------------------------------------------------------------
# Sequences

def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(p: int):
    w = (isqrt(8 * p + 1) - 1) // 2
    b = p - w * (w + 1) // 2
    return w - b, b


def code_sequence(xs) -> int:
    xs = list(xs)
    for x in xs:
        if x < 0:
            raise CodingError("sequence elements are natural numbers")
    ds = [pair(i, x) + 1 for i, x in enumerate(xs)]
    w = nextprime(max(ds, default=1))
    s = 0
    for d in reversed(ds):
        s = s * w + d
    return pair(w, s)


def decode_sequence(p: int):
    """The sequence coded by ``p``, or ``None``.

    Any prime ``W`` is accepted, not only the least one, so several codes
    may denote the same sequence; :func:`code_sequence` emits the canonical
    one.
    """
    if p < 0:
        return None
    w, s = unpair(p)
    if w < 2 or not isprime(w):
        return None
    out = []
    i = 0
    while s:
        s, d = divmod(s, w)
        if d == 0:
            return None
        j, x = unpair(d - 1)
        if j != i:
            return None
        out.append(x)
        i += 1
    return out


def seq_len(p: int) -> int:
    xs = decode_sequence(p)
    if xs is None:
        raise CodingError(f"{p} does not code a sequence")
    return len(xs)


def elt(p: int, i: int) -> int:
    xs = decode_sequence(p)
    if xs is None:
        raise CodingError(f"{p} does not code a sequence")
    if not 0 <= i < len(xs):
        raise IndexError(f"index {i} out of range for a sequence of length {len(xs)}")
    return xs[i]


def pref_code(p: int, k: int) -> int:
    xs = decode_sequence(p)
    if xs is None:
        raise CodingError(f"{p} does not code a sequence")
    if not 0 < k <= len(xs):
        raise IndexError(f"prefix length {k} out of range 1..{len(xs)}")
    return code_sequence(xs[:k])


def coding_table() -> dict:
    return {
        "version": CODING_VERSION,
        "base": BASE,
        "symbols": {k: v for k, v in SYMBOLS.items()},
        "variables": "digit 10 followed by k digits 11, k = shortlex rank of the name "
                     f"over first letters {_FIRST!r} and further characters {_REST!r}",
        "order": "Polish notation, first symbol least significant",
        "sequences": "pair(W, sum((pair(i, c_i) + 1) * W**i)), W least prime above every digit; "
                     "pair(a, b) = (a + b)(a + b + 1)/2 + b",
        "unused_digits": [0, 18],
    }
