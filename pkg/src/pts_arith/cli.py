"""Command-line entry point.

Every subcommand prints one JSON document on stdout (``--pretty`` prints a
human-readable summary instead).  Exit status is 0 on success or a positive
verdict, 1 on a negative verdict or an evaluation that ran out of budget,
and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .base import derivation_tree, derives, parse_atom
from .coding import (
    CODING_VERSION, CodingError, code_formula, code_term, coding_table, decode_formula,
    decode_term,
)
from .delta0 import Budget, BudgetExceeded, NotDelta0, classify, default_budget
from .syntax import (
    And, Forall, Imp, ParseError, Var, atoms_of, formula_depth, free_vars,
    parse_formula, parse_term, print_formula, print_term,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj, pretty: bool, out=None):
    out = out or sys.stdout
    if pretty:
        _print_pretty(obj, out)
    else:
        out.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _print_pretty(obj, out, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                out.write(f"{pad}{k}:\n")
                _print_pretty(v, out, indent + 1)
            else:
                out.write(f"{pad}{k}: {v}\n")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict):
                out.write(f"{pad}-\n")
                _print_pretty(v, out, indent + 1)
            else:
                out.write(f"{pad}- {v}\n")
    else:
        out.write(f"{pad}{obj}\n")


def _stamp(obj: dict) -> dict:
    obj.setdefault("tool_version", __version__)
    obj.setdefault("coding_version", CODING_VERSION)
    return obj


def _formula_arg(text):
    try:
        return parse_formula(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse formula: {exc}") from exc


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_base(path):
    from .base import parse_base
    try:
        return parse_base(_read_text(path))
    except (ParseError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _theory(name, given=()):
    from .hilbert import theory_by_name
    try:
        t = theory_by_name(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if given:
        t = t.extend([_formula_arg(g) for g in given])
    return t


# --------------------------------------------------------------------------
# subcommands

def cmd_parse(args):
    phi = _formula_arg(args.formula)
    out = {
        "formula": print_formula(phi, unicode=args.unicode),
        "depth": formula_depth(phi),
        "free_variables": sorted(free_vars(phi)),
        "closed": not free_vars(phi),
        "atoms": sorted(print_formula(a) for a in atoms_of(phi)),
    }
    return out, EXIT_OK


def cmd_derive(args):
    b = _load_base(args.base)
    try:
        a = parse_atom(args.atom, constants={t.name for t in b.terms if hasattr(t, "name")})
    except ParseError as exc:
        raise UsageError(f"cannot parse atom: {exc}") from exc
    ok = derives(b, a)
    out = {"atom": print_formula(a), "derivable": ok}
    if args.trace and ok:
        out["derivation"] = derivation_tree(b, a).pretty().splitlines()
    return out, EXIT_OK if ok else EXIT_NEGATIVE


def _vocabulary(b, phis, args):
    from .support import Vocabulary
    kw = dict(reserve=args.reserve, reserve_constants=args.reserve_constants,
              forall_excludes_reserve=args.forall_excludes_reserve)
    if b.predicates:
        return Vocabulary.from_base(b, **kw)
    mentioned = list(b.atoms())
    for phi in phis:
        for a in sorted(atoms_of(phi), key=print_formula):
            if a not in mentioned:
                mentioned.append(a)
    return Vocabulary(atoms=tuple(mentioned), terms=b.terms, **kw)


def _subformulas(phi, out):
    if isinstance(phi, (Imp, And)):
        _subformulas(phi.left, out)
        _subformulas(phi.right, out)
    elif isinstance(phi, Forall):
        pass
    if phi not in out:
        out.append(phi)
    return out


def cmd_support(args):
    from .base import Base
    from .support import SizeGuardError, engine_for
    b = _load_base(args.base) if args.base else Base()
    phi = _formula_arg(args.formula)
    given = [_formula_arg(g) for g in args.given]
    v = _vocabulary(b, [phi, *given], args)
    try:
        e = engine_for(v)
        verdict = e.supports_under(b, given, phi) if given else e.supports(b, phi)
    except SizeGuardError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = {"verdict": verdict}
    if not verdict and not given:
        c = e.refute(b, phi)
        if c is not None:
            added = sorted(str(r) for r in c.rules - b.rules)
            out["witness_extension"] = {"added_rules": added}
    if args.trace:
        out["trace"] = [{"formula": print_formula(psi), "supported": e.supports(b, psi)}
                        for psi in _subformulas(phi, []) if not free_vars(psi)]
    out["stats"] = {"atoms": v.size(), "reserve": v.reserve, "base_classes": e.lat.size,
                    "support_sets_computed": e.evaluations}
    return out, EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_check_proof(args):
    from .hilbert import ProofError, annotate, format_just, parse_proof
    try:
        p = parse_proof(_read_text(args.file))
    except (ParseError, ValueError) as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    t = _theory(args.theory, args.given)
    try:
        just = annotate(p, t)
    except ProofError as exc:
        return {"accepted": False, "line": exc.line, "reason": exc.reason, "message": str(exc),
                "lines": len(p)}, EXIT_NEGATIVE
    return {
        "accepted": True,
        "conclusion": print_formula(p.conclusion),
        "lines": len(p),
        "justifications": [format_just(j) for j in just],
        "warnings": [f"line {i + 1}: {j.warning}" for i, j in enumerate(just) if j.warning],
    }, EXIT_OK


def cmd_encode(args):
    try:
        if args.term is not None:
            return {"term": args.term, "code": str(code_term(parse_term(args.term)))}, EXIT_OK
        phi = _formula_arg(args.formula)
        return {"formula": print_formula(phi), "code": str(code_formula(phi))}, EXIT_OK
    except (CodingError, ParseError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_decode(args):
    try:
        c = int(args.code)
    except ValueError:
        raise UsageError(f"code must be a natural number, got {args.code!r}") from None
    if c < 0:
        raise UsageError("code must be a natural number")
    phi = decode_formula(c)
    if phi is not None:
        return {"code": str(c), "kind": "formula", "formula": print_formula(phi)}, EXIT_OK
    t = decode_term(c)
    if t is not None:
        return {"code": str(c), "kind": "term", "term": print_term(t)}, EXIT_OK
    return {"code": str(c), "kind": None}, EXIT_NEGATIVE


def cmd_codes(args):
    return coding_table(), EXIT_OK


_PRIMITIVES = ("Form", "Seq", "Elt", "Ax", "MP", "Gen")


def cmd_build(args):
    from . import arith
    t = _theory(args.theory)
    p, x, i, n, y, a, b, c = (Var(s) for s in ("p", "x", "i", "n", "y", "a", "b", "c"))
    builders = {
        "form": lambda: arith.build_form(x), "seq": lambda: arith.build_seq(p, n),
        "elt": lambda: arith.build_elt(p, i, y), "ax": lambda: arith.build_ax(x),
        "mp": lambda: arith.build_mp(a, b, c), "gen": lambda: arith.build_gen(a, c),
        "line": lambda: arith.build_line(p, i), "prf": lambda: arith.build_prf(p, x),
        "prov": lambda: arith.build_prov(x), "con": lambda: arith.build_con(t),
    }
    phi = builders[args.what]()
    if args.pure:
        phi = arith.expand_pure(phi)
    out = {
        "what": args.what,
        "theory": t.name,
        "mode": "pure" if args.pure else "oracle",
        "classification": classify(phi, ("Form", "Ax") if args.pure else _PRIMITIVES),
        "free_variables": sorted(free_vars(phi)),
        "closed": not free_vars(phi),
        "size": len(print_formula(phi)),
    }
    if args.what == "con":
        code = code_formula(phi)
        out["code_digits"] = len(str(code))
        out["form_of_code"] = arith.eval_delta0(arith.build_form(Var("x")), env={"x": code})
    if args.print:
        out["formula"] = print_formula(phi, unicode=args.unicode)
    return out, EXIT_OK


def cmd_eval(args):
    from .arith import eval_delta0
    if args.formula is not None:
        text = _read_text(args.formula)
    else:
        text = args.sentence
    text = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    phi = _formula_arg(text)
    budget = Budget(args.budget) if args.budget else Budget()
    out = {"formula": print_formula(phi), "mode": args.mode}
    try:
        value = eval_delta0(phi, args.mode, budget, _theory(args.theory))
    except NotDelta0 as exc:
        raise UsageError(f"not a bounded sentence: {exc}") from exc
    except BudgetExceeded as exc:
        out.update(value=None, error=str(exc), steps=budget.steps)
        return out, EXIT_NEGATIVE
    out.update(value=value, steps=budget.steps)
    return out, EXIT_OK if value else EXIT_NEGATIVE


def cmd_crosscheck(args):
    from .arith import crosscheck
    from .hilbert import parse_proof
    try:
        p = parse_proof(_read_text(args.file))
    except (ParseError, ValueError) as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    budget = Budget(args.budget) if args.budget else Budget()
    try:
        rep = crosscheck(p, _theory(args.theory), budget)
    except BudgetExceeded as exc:
        return {"agree": None, "error": str(exc)}, EXIT_NEGATIVE
    return rep, EXIT_OK if rep["agree"] else EXIT_NEGATIVE


def cmd_experiment(args):
    from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
    if args.name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {args.name!r}; choose from {', '.join(EXPERIMENTS)}")
    cfg = ExperimentConfig(
        atoms=args.atoms, reserve=args.reserve, depth=args.depth, samples=args.samples,
        sample_depth=args.sample_depth, seed=args.seed, budget=args.budget, theory=args.theory,
        mutations=args.mutations, max_numeral=args.max_numeral,
        forall_excludes_reserve=args.forall_excludes_reserve,
    )
    if cfg.depth < 0 or cfg.reserve < 0 or (cfg.atoms is not None and cfg.atoms < 0):
        raise UsageError("depth, reserve and atoms must be non-negative")
    try:
        report = run_experiment(args.name, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{args.name}.json").write_text(
            json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        if not args.no_figure:
            from .plotting import render
            render(report, out_dir / f"{args.name}.png")
    return report, EXIT_OK if report["passed"] else EXIT_NEGATIVE


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's unset flag from hiding the global one
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS,
                        help="human-readable output instead of JSON")

    ap = _Parser(prog="pts-arith", description=__doc__.splitlines()[0], parents=[common])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(fn=fn)
        return p

    def reserve_flags(p):
        p.add_argument("--reserve", type=int, default=2, help="fresh nullary atoms (default 2)")
        p.add_argument("--reserve-constants", type=int, default=0, help="fresh constants for universals")
        p.add_argument("--forall-excludes-reserve", action="store_true",
                       help="universals range over the declared terms only")

    p = add("parse", cmd_parse, "parse and pretty-print a formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--unicode", action="store_true")

    p = add("derive", cmd_derive, "atomic derivability in a base")
    p.add_argument("--base", required=True)
    p.add_argument("--atom", required=True)
    p.add_argument("--trace", action="store_true", help="include the derivation tree")

    p = add("support", cmd_support, "decide support of a formula in a base")
    p.add_argument("--base")
    p.add_argument("--formula", required=True)
    p.add_argument("--given", action="append", default=[], help="antecedent formula (repeatable)")
    p.add_argument("--trace", action="store_true", help="support of every closed subformula")
    reserve_flags(p)

    p = add("check-proof", cmd_check_proof, "check a Hilbert proof file")
    p.add_argument("file")
    p.add_argument("--theory", default="q")
    p.add_argument("--given", action="append", default=[], help="extra axiom (repeatable)")

    p = add("encode", cmd_encode, "Gödel number of a formula or term")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--formula")
    g.add_argument("--term")

    p = add("decode", cmd_decode, "formula or term with a given code")
    p.add_argument("--code", required=True)

    p = add("codes", cmd_codes, "print the coding table")
    p.add_argument("--table", action="store_true", required=True)

    p = add("build", cmd_build, "construct an arithmetized formula")
    p.add_argument("--what", required=True,
                   choices=("form", "seq", "elt", "ax", "mp", "gen", "line", "prf", "prov", "con"))
    p.add_argument("--theory", default="q")
    p.add_argument("--pure", action="store_true", help="expand Seq, Elt, MP and Gen into arithmetic")
    p.add_argument("--print", action="store_true", help="include the formula text")
    p.add_argument("--unicode", action="store_true")

    budget_help = f"step budget (default ${'{'}PTS_ARITH_BUDGET{'}'} or {default_budget()})"
    p = add("eval", cmd_eval, "evaluate a bounded sentence over the naturals")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--formula", help="file holding the sentence")
    g.add_argument("--sentence", help="the sentence itself")
    p.add_argument("--mode", choices=("oracle", "pure"), default="oracle")
    p.add_argument("--budget", type=int, help=budget_help)
    p.add_argument("--theory", default="q")

    p = add("crosscheck", cmd_crosscheck, "compare the proof checker with arithmetized Prf")
    p.add_argument("file")
    p.add_argument("--theory", default="q")
    p.add_argument("--budget", type=int, help=budget_help)

    p = add("experiment", cmd_experiment, "run an experiment suite")
    p.add_argument("name")
    p.add_argument("--atoms", type=int)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--samples", type=int)
    p.add_argument("--sample-depth", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--theory", default="q")
    p.add_argument("--mutations", type=int, default=40)
    p.add_argument("--max-numeral", type=int, default=20)
    p.add_argument("--out", help="directory for the JSON report and figure")
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--reserve", type=int, default=2)
    p.add_argument("--forall-excludes-reserve", action="store_true")
    return ap


def main(argv=None) -> int:
    # codes are printed in decimal however long they get
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, code = args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"pts-arith: error: {exc}\n")
        return EXIT_USAGE
    if isinstance(out, dict):
        _stamp(out)
    _emit(out, getattr(args, "pretty", False))
    return code


if __name__ == "__main__":
    sys.exit(main())
