"""Two-valued truth tables for propositional formulas.

A truth table over atoms ``a_0 .. a_{k-1}`` is an int whose bit ``j`` is the
value under the assignment making ``a_i`` true exactly when bit ``i`` of
``j`` is set.
"""

from __future__ import annotations

from .syntax import And, Atom, Bot, Forall, Imp, atoms_of, print_formula


def _value(phi, assignment: dict) -> bool:
    if isinstance(phi, Atom):
        return assignment[phi]
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Imp):
        return (not _value(phi.left, assignment)) or _value(phi.right, assignment)
    if isinstance(phi, And):
        return _value(phi.left, assignment) and _value(phi.right, assignment)
    if isinstance(phi, Forall):
        raise ValueError(f"not propositional: {print_formula(phi)}")
    raise TypeError(f"not a formula: {phi!r}")


def truth_table(phi, atoms=None) -> int:
    atoms = list(atoms) if atoms is not None else sorted(atoms_of(phi), key=print_formula)
    table = 0
    for j in range(1 << len(atoms)):
        assignment = {a: bool(j >> i & 1) for i, a in enumerate(atoms)}
        if _value(phi, assignment):
            table |= 1 << j
    return table


def tautology(phi, atoms=None) -> bool:
    atoms = list(atoms) if atoms is not None else sorted(atoms_of(phi), key=print_formula)
    return truth_table(phi, atoms) == (1 << (1 << len(atoms))) - 1
