"""Surface syntax: proof scripts are s-expression files.

Declarations:  (declare-sort r)  (declare-fun + (r r) r)  (declare-pred <= (r r))
               (axiom name FORMULA)  (define-pred N PRED)  (define-prog n PROG)
               (theorem name FORMULA DERIV)  (include other.ifp)

All abbreviations (not, neq, >=, iff, subset, allb, exb, abs, false, defined
predicate names, cap/cup) are expanded here; the kernel never sees them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import kernel as kn
from . import programs as pr
from .sexpr import Atom, Sexpr, SexprError, SList, parse_all, parse_one
from .syntax import (
    Abst, All, And, Eq, Ex, Formula, FunApp, Imp, Mu, Nu, Operator, Or,
    Predicate, PredApp, PredConst, PredVar, Signature, SyntaxError_, TVar,
    Term, falsity, predapp,
)


class ParseError(Exception):
    def __init__(self, msg: str, node: Sexpr | None = None):
        pos = getattr(node, "pos", None)
        if pos:
            msg = f"{pos[0]}:{pos[1]}: {msg}"
        super().__init__(msg)


_FORMULA_KEYWORDS = {"=", "pred", "and", "or", "imp", "all", "ex", "not",
                     "neq", "iff", "subset", "allb", "exb", "false"}
_PRED_KEYWORDS = {"lambda", "mu", "nu", "cap", "cup"}

_DERIV_TAGS = {"assume", "axm", "thm", "refl", "cong", "andi", "andl", "andr",
               "orl", "orr", "ore", "impi", "impe", "alli", "alle", "exi",
               "exe", "cl", "cocl", "ind", "coind", "si", "hsi", "sci",
               "hsci", "wfi", "aiq", "aibq"}

_PROG_KEYWORDS = {"lam", "rec", "case", "let", "pair", "left", "right",
                  "nil", "bot", "head", "tail"}
_PROG_CONSTS = {
    "L": pr.L2, "R": pr.R2,
    "-1": pr.SD_MINUS1, "1": pr.SD_ONE, "0": pr.SD_ZERO,
}


@dataclass
class Env:
    """Parsing environment for one script."""
    sig: Signature
    preddefs: dict[str, Predicate] = field(default_factory=dict)
    ovars: dict[str, TVar] = field(default_factory=dict)
    pvars: dict[str, PredVar] = field(default_factory=dict)

    def default_sort(self, node) -> str:
        if len(self.sig.sorts) != 1:
            raise ParseError("binder needs an explicit sort", node)
        return self.sig.sorts[0]

    def child(self, **kw) -> "Env":
        e = Env(self.sig, self.preddefs, dict(self.ovars), dict(self.pvars))
        for k, v in kw.items():
            getattr(e, k).update(v)
        return e


def _expect_atom(node: Sexpr, what: str) -> str:
    if not isinstance(node, Atom):
        raise ParseError(f"expected {what}", node)
    return node.text


def _binder(node: Sexpr, env: Env) -> TVar:
    if isinstance(node, Atom):
        return TVar(node.text, env.default_sort(node))
    if isinstance(node, SList) and len(node) == 2:
        name = _expect_atom(node[0], "variable name")
        sort = _expect_atom(node[1], "sort name")
        if sort not in env.sig.sorts:
            raise ParseError(f"unknown sort {sort}", node[1])
        return TVar(name, sort)
    raise ParseError("expected a binder: x or (x sort)", node)


def _binder_list(node: Sexpr, env: Env) -> tuple[TVar, ...]:
    if not isinstance(node, SList):
        raise ParseError("expected a binder list", node)
    out = []
    for item in node.items:
        out.append(_binder(item, env))
    return tuple(out)


# ---------------------------------------------------------------------------
# Terms

def parse_term(node: Sexpr, env: Env) -> Term:
    if isinstance(node, Atom):
        name = node.text
        if name in env.ovars:
            return env.ovars[name]
        if name in env.sig.funcs:
            argsorts, res = env.sig.funcs[name]
            if argsorts:
                raise ParseError(f"function {name} expects arguments", node)
            return FunApp(name, (), res)
        raise ParseError(f"unresolved symbol {name}", node)
    if len(node) == 0:
        raise ParseError("empty term", node)
    head = _expect_atom(node[0], "function symbol")
    if head == "abs":  # |t| := max(t, neg t)
        if len(node) != 2:
            raise ParseError("abs takes one argument", node)
        t = parse_term(node[1], env)
        return FunApp("max", (t, _neg(t, env, node)), t.sort)
    if head not in env.sig.funcs:
        raise ParseError(f"unresolved symbol {head}", node)
    argsorts, res = env.sig.funcs[head]
    args = tuple(parse_term(a, env) for a in node.items[1:])
    if tuple(a.sort for a in args) != argsorts:
        raise ParseError(f"sort mismatch applying {head}", node)
    return FunApp(head, args, res)


def _neg(t: Term, env: Env, node) -> Term:
    if env.sig.funcs.get("neg") != ((t.sort,), t.sort):
        raise ParseError("abs needs a declared neg : (s) -> s", node)
    return FunApp("neg", (t,), t.sort)


# ---------------------------------------------------------------------------
# Predicates

def parse_predicate(node: Sexpr, env: Env) -> Predicate:
    if isinstance(node, Atom):
        name = node.text
        if name in env.pvars:
            return env.pvars[name]
        if name in env.preddefs:
            return env.preddefs[name]
        if name in env.sig.predconsts:
            return PredConst(name, env.sig.predconsts[name])
        raise ParseError(f"unresolved predicate {name}", node)
    if len(node) == 0:
        raise ParseError("empty predicate", node)
    head = _expect_atom(node[0], "predicate form")
    if head == "lambda":
        if len(node) != 3:
            raise ParseError("(lambda (binders) FORMULA)", node)
        vs = _binder_list(node[1], env)
        body = parse_formula(node[2], env.child(ovars={v.name: v for v in vs}))
        return Abst(vs, body)
    if head in ("mu", "nu"):
        op = _parse_operator_tail(node, env, head)
        return Mu(op) if head == "mu" else Nu(op)
    if head in ("cap", "cup"):
        if len(node) != 3:
            raise ParseError(f"({head} P Q)", node)
        p = parse_predicate(node[1], env)
        q = parse_predicate(node[2], env)
        return kn.inter(p, q) if head == "cap" else kn.union(p, q)
    raise ParseError(f"unknown predicate form {head}", node)


def _parse_operator_tail(node: SList, env: Env, what: str) -> Operator:
    # (mu X (binders) FORMULA)
    if len(node) != 4:
        raise ParseError(f"({what} X (binders) FORMULA)", node)
    xname = _expect_atom(node[1], "predicate variable")
    vs = _binder_list(node[2], env)
    x = PredVar(xname, tuple(v.sort for v in vs))
    inner = env.child(ovars={v.name: v for v in vs}, pvars={xname: x})
    body = parse_formula(node[3], inner)
    try:
        return Operator(x, Abst(vs, body))
    except SyntaxError_ as e:
        raise ParseError(str(e), node) from e


def parse_operator(node: Sexpr, env: Env) -> Operator:
    if not isinstance(node, SList) or len(node) == 0 or not (
            isinstance(node[0], Atom) and node[0].text == "op"):
        raise ParseError("(op X (binders) FORMULA)", node)
    return _parse_operator_tail(node, env, "op")


# ---------------------------------------------------------------------------
# Formulas

def parse_formula(node: Sexpr, env: Env) -> Formula:
    if isinstance(node, Atom):
        if node.text == "false":
            return falsity()
        name = node.text
        if (name in env.pvars and env.pvars[name].arity == ()) or (
                name in env.preddefs or name in env.sig.predconsts):
            return _apply_pred_name(name, (), env, node)
        raise ParseError(f"expected a formula, got {name}", node)
    if len(node) == 0:
        raise ParseError("empty formula", node)
    if not isinstance(node[0], Atom):
        raise ParseError("formula head must be a symbol", node[0])
    head = node[0].text
    rest = node.items[1:]
    if head == "=":
        _arity(node, 2)
        lhs, rhs = parse_term(rest[0], env), parse_term(rest[1], env)
        try:
            return Eq(lhs, rhs)
        except SyntaxError_ as e:
            raise ParseError(str(e), node) from e
    if head == "pred":
        if not rest:
            raise ParseError("(pred P t...)", node)
        p = parse_predicate(rest[0], env)
        args = tuple(parse_term(t, env) for t in rest[1:])
        return _predapp(p, args, node)
    if head == "and":
        _arity(node, 2)
        return And(parse_formula(rest[0], env), parse_formula(rest[1], env))
    if head == "or":
        _arity(node, 2)
        return Or(parse_formula(rest[0], env), parse_formula(rest[1], env))
    if head == "imp":
        _arity(node, 2)
        return Imp(parse_formula(rest[0], env), parse_formula(rest[1], env))
    if head == "not":
        _arity(node, 1)
        return Imp(parse_formula(rest[0], env), falsity())
    if head == "neq":
        _arity(node, 2)
        lhs, rhs = parse_term(rest[0], env), parse_term(rest[1], env)
        return Imp(Eq(lhs, rhs), falsity())
    if head == "iff":
        _arity(node, 2)
        a, b = parse_formula(rest[0], env), parse_formula(rest[1], env)
        return And(Imp(a, b), Imp(b, a))
    if head in ("all", "ex"):
        _arity(node, 2)
        v = _binder(rest[0], env)
        body = parse_formula(rest[1], env.child(ovars={v.name: v}))
        return All(v, body) if head == "all" else Ex(v, body)
    if head in ("allb", "exb"):
        # (allb x P A) := all x (P(x) -> A);  (exb x P A) := ex x (P(x) & A)
        _arity(node, 3)
        v = _binder(rest[0], env)
        p = parse_predicate(rest[1], env)
        body = parse_formula(rest[2], env.child(ovars={v.name: v}))
        guard = _predapp(p, (v,), node)
        return (All(v, Imp(guard, body)) if head == "allb"
                else Ex(v, And(guard, body)))
    if head == "subset":
        _arity(node, 2)
        p = parse_predicate(rest[0], env)
        q = parse_predicate(rest[1], env)
        try:
            return kn.subset_formula(p, q)
        except kn.CheckError as e:
            raise ParseError(str(e), node) from e
    if head == ">=":
        _arity(node, 2)
        lhs, rhs = parse_term(rest[0], env), parse_term(rest[1], env)
        return _apply_pred_name("<=", (rhs, lhs), env, node)
    if head not in _FORMULA_KEYWORDS and head not in _PRED_KEYWORDS:
        # (P t...): application of a named predicate or predicate variable
        if head in env.pvars or head in env.preddefs or head in env.sig.predconsts:
            args = tuple(parse_term(t, env) for t in rest)
            return _apply_pred_name(head, args, env, node)
    raise ParseError(f"unknown formula form {head}", node)


def _apply_pred_name(name: str, args: tuple, env: Env, node) -> Formula:
    if name in env.pvars:
        p: Predicate = env.pvars[name]
    elif name in env.preddefs:
        p = env.preddefs[name]
    elif name in env.sig.predconsts:
        p = PredConst(name, env.sig.predconsts[name])
    else:
        raise ParseError(f"unresolved predicate {name}", node)
    return _predapp(p, args, node)


def _predapp(p: Predicate, args: tuple, node) -> Formula:
    try:
        return predapp(p, args)
    except SyntaxError_ as e:
        raise ParseError(str(e), node) from e


def _arity(node: SList, n: int) -> None:
    if len(node) != n + 1:
        raise ParseError(
            f"{node[0]} takes {n} argument(s), got {len(node) - 1}", node)


# ---------------------------------------------------------------------------
# Derivations

def parse_derivation(node: Sexpr, env: Env) -> kn.Derivation:
    if not isinstance(node, SList) or len(node) == 0 or not isinstance(node[0], Atom):
        raise ParseError("expected a derivation", node)
    head = node[0].text
    rest = node.items[1:]
    if head not in _DERIV_TAGS:
        raise ParseError(f"unknown derivation rule {head}", node)

    def deriv(i):
        return parse_derivation(rest[i], env)

    if head == "assume":
        _arity(node, 1)
        return kn.Assume(_expect_atom(rest[0], "assumption label"))
    if head == "axm":
        _arity(node, 1)
        return kn.Axm(_expect_atom(rest[0], "axiom name"))
    if head == "thm":
        _arity(node, 1)
        return kn.UseThm(_expect_atom(rest[0], "theorem name"))
    if head == "refl":
        _arity(node, 1)
        return kn.Refl(parse_term(rest[0], env))
    if head == "cong":
        _arity(node, 4)
        v = _binder(rest[2], env)
        body = parse_formula(rest[3], env.child(ovars={v.name: v}))
        return kn.Cong(deriv(0), deriv(1), v, body)
    if head == "andi":
        _arity(node, 2)
        return kn.AndI(deriv(0), deriv(1))
    if head == "andl":
        _arity(node, 1)
        return kn.AndL(deriv(0))
    if head == "andr":
        _arity(node, 1)
        return kn.AndR(deriv(0))
    if head == "orl":
        _arity(node, 2)
        return kn.OrL(deriv(0), parse_formula(rest[1], env))
    if head == "orr":
        _arity(node, 2)
        return kn.OrR(deriv(0), parse_formula(rest[1], env))
    if head == "ore":
        _arity(node, 3)
        return kn.OrE(deriv(0), deriv(1), deriv(2))
    if head == "impi":
        _arity(node, 3)
        label = _expect_atom(rest[0], "assumption label")
        return kn.ImpI(label, parse_formula(rest[1], env), deriv(2))
    if head == "impe":
        _arity(node, 2)
        return kn.ImpE(deriv(0), deriv(1))
    if head == "alli":
        _arity(node, 2)
        v = _binder(rest[0], env)
        return kn.AllI(v, parse_derivation(rest[1], env.child(ovars={v.name: v})))
    if head == "alle":
        _arity(node, 2)
        return kn.AllE(deriv(0), parse_term(rest[1], env))
    if head == "exi":
        _arity(node, 4)
        v = _binder(rest[0], env)
        body = parse_formula(rest[1], env.child(ovars={v.name: v}))
        return kn.ExI(v, body, parse_term(rest[2], env), deriv(3))
    if head == "exe":
        _arity(node, 2)
        return kn.ExE(deriv(0), deriv(1))
    if head in ("cl", "cocl"):
        _arity(node, 1)
        op = parse_operator(rest[0], env)
        return kn.Cl(op) if head == "cl" else kn.CoCl(op)
    if head in ("ind", "coind", "si", "hsi", "sci", "hsci"):
        _arity(node, 3)
        op = parse_operator(rest[0], env)
        p = parse_predicate(rest[1], env)
        cls = {"ind": kn.Ind, "coind": kn.Coind, "si": kn.SI,
               "hsi": kn.HSI, "sci": kn.SCI, "hsci": kn.HSCI}[head]
        return cls(op, p, deriv(2))
    if head == "wfi":
        _arity(node, 4)
        return kn.WfI(parse_predicate(rest[0], env), parse_predicate(rest[1], env),
                      parse_predicate(rest[2], env), deriv(3))
    if head == "aiq":
        _arity(node, 3)
        return kn.AIq(parse_term(rest[0], env), parse_predicate(rest[1], env),
                      deriv(2))
    if head == "aibq":
        _arity(node, 4)
        return kn.AIBq(parse_term(rest[0], env), parse_predicate(rest[1], env),
                       parse_predicate(rest[2], env), deriv(3))
    raise ParseError(f"unknown derivation rule {head}", node)


# ---------------------------------------------------------------------------
# Programs

def parse_program(node: Sexpr, bound: frozenset[str] = frozenset(),
                  defs: frozenset[str] = frozenset()) -> pr.Program:
    if isinstance(node, Atom):
        name = node.text
        if name == "nil":
            return pr.NIL
        if name == "bot":
            return pr.Bot()
        if name in bound:
            return pr.PVar(name)
        if name in _PROG_CONSTS:
            return _PROG_CONSTS[name]
        if name in defs:
            return pr.Ref(name)
        raise ParseError(f"unresolved program name {name}", node)
    if len(node) == 0:
        raise ParseError("empty program", node)
    if isinstance(node[0], Atom):
        head = node[0].text
        rest = node.items[1:]
        if head == "lam":
            _arity(node, 2)
            v = _expect_atom(rest[0], "variable")
            _check_binder_name(v, rest[0])
            return pr.Lam(v, parse_program(rest[1], bound | {v}, defs))
        if head == "rec":
            _arity(node, 1)
            return pr.Rec(parse_program(rest[0], bound, defs))
        if head == "let":
            _arity(node, 3)
            v = _expect_atom(rest[0], "variable")
            _check_binder_name(v, rest[0])
            m = parse_program(rest[1], bound, defs)
            n = parse_program(rest[2], bound | {v}, defs)
            return pr.App(pr.Lam(v, n), m)
        if head == "pair":
            _arity(node, 2)
            return pr.pair(parse_program(rest[0], bound, defs),
                           parse_program(rest[1], bound, defs))
        if head in ("left", "right"):
            _arity(node, 1)
            return pr.Con(head, (parse_program(rest[0], bound, defs),))
        if head == "head":
            _arity(node, 1)
            return pr.proj_left(parse_program(rest[0], bound, defs))
        if head == "tail":
            _arity(node, 1)
            return pr.proj_right(parse_program(rest[0], bound, defs))
        if head == "case":
            if len(rest) < 2:
                raise ParseError("(case M clause...)", node)
            scrut = parse_program(rest[0], bound, defs)
            return _parse_clauses(scrut, rest[1:], bound, defs, node)
    # application, left-associated
    parts = [parse_program(item, bound, defs) for item in node.items]
    out = parts[0]
    for p in parts[1:]:
        out = pr.App(out, p)
    return out


def _check_binder_name(v: str, node) -> None:
    if v in _PROG_KEYWORDS or v in _PROG_CONSTS or v == "nil" or v == "bot":
        raise ParseError(f"reserved name {v} cannot be bound", node)


def _parse_clauses(scrut, items, bound, defs, node) -> pr.Program:
    plain: list[pr.Clause] = []
    digit: dict[str, pr.Program] = {}
    twoway: dict[str, pr.Program] = {}
    for it in items:
        if not isinstance(it, SList) or len(it) != 2:
            raise ParseError("clause must be (PATTERN BODY)", it)
        pat, body_node = it[0], it[1]
        if isinstance(pat, Atom):
            if pat.text == "nil":
                plain.append(pr.Clause("nil", (), parse_program(body_node, bound, defs)))
            elif pat.text in ("-1", "0", "1"):
                digit[pat.text] = parse_program(body_node, bound, defs)
            elif pat.text in ("L", "R"):
                twoway[pat.text] = parse_program(body_node, bound, defs)
            else:
                raise ParseError(f"unknown pattern {pat.text}", pat)
        else:
            tag = _expect_atom(pat[0], "constructor")
            vs = tuple(_expect_atom(v, "pattern variable") for v in pat.items[1:])
            for v in vs:
                _check_binder_name(v, pat)
            if tag not in pr.CONSTRUCTORS or pr.CONSTRUCTORS[tag] != len(vs):
                raise ParseError(f"bad pattern ({tag} ...)", pat)
            plain.append(pr.Clause(tag, vs, parse_program(body_node, bound | set(vs), defs)))
    if digit and (plain or twoway):
        raise ParseError("digit patterns cannot mix with other patterns", node)
    if twoway and (plain or digit):
        raise ParseError("L/R patterns cannot mix with other patterns", node)
    if digit:
        if set(digit) != {"-1", "0", "1"}:
            raise ParseError("digit case needs clauses -1, 0 and 1", node)
        u = _fresh_unused("u", digit.values())
        inner = pr.Case(pr.PVar(u), (
            pr.Clause("left", (_fresh_unused("w", digit.values()),), digit["-1"]),
            pr.Clause("right", (_fresh_unused("w", digit.values()),), digit["1"])))
        return pr.Case(scrut, (
            pr.Clause("left", (u,), inner),
            pr.Clause("right", (_fresh_unused("w", digit.values()),), digit["0"])))
    if twoway:
        if set(twoway) != {"L", "R"}:
            raise ParseError("L/R case needs both clauses", node)
        return pr.Case(scrut, (
            pr.Clause("left", (_fresh_unused("w", twoway.values()),), twoway["L"]),
            pr.Clause("right", (_fresh_unused("w", twoway.values()),), twoway["R"])))
    try:
        return pr.Case(scrut, tuple(plain))
    except ValueError as e:
        raise ParseError(str(e), node) from e


def _fresh_unused(base: str, bodies) -> str:
    avoid = frozenset()
    for b in bodies:
        avoid |= pr.free_pvars(b)
    return pr._fresh(base, avoid)


# ---------------------------------------------------------------------------
# Scripts

@dataclass
class Theorem:
    name: str
    formula: Formula
    derivation: kn.Derivation


@dataclass
class Script:
    sig: Signature
    preddefs: dict[str, Predicate] = field(default_factory=dict)
    theorems: dict[str, Theorem] = field(default_factory=dict)
    progdefs: dict[str, pr.Program] = field(default_factory=dict)
    path: str | None = None

    def env(self) -> Env:
        return Env(self.sig, self.preddefs)

    def theorem_formulas(self) -> dict[str, Formula]:
        return {n: t.formula for n, t in self.theorems.items()}

    def check_theorem(self, name: str) -> None:
        """Check one theorem (its use-theorem references must be earlier)."""
        thms = {}
        for n, t in self.theorems.items():
            if n == name:
                kn.check({}, t.derivation, t.formula, self.sig, thms)
                return
            thms[n] = t.formula
        raise KeyError(f"no theorem named {name}")

    def check_all(self) -> None:
        thms: dict[str, Formula] = {}
        for n, t in self.theorems.items():
            kn.check({}, t.derivation, t.formula, self.sig, thms)
            thms[n] = t.formula


def load_script(path: str) -> Script:
    script = Script(Signature())
    _load_into(script, os.path.abspath(path), set())
    script.path = path
    return script


def parse_script_text(text: str, script: Script | None = None) -> Script:
    script = script or Script(Signature())
    for form in parse_all(text):
        _toplevel(script, form, basedir=None, seen=set())
    return script


def _load_into(script: Script, path: str, seen: set[str]) -> None:
    if path in seen:
        return
    seen.add(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}")
    for form in parse_all(text):
        _toplevel(script, form, basedir=os.path.dirname(path), seen=seen)


def _toplevel(script: Script, form: Sexpr, basedir: str | None, seen: set[str]) -> None:
    if not isinstance(form, SList) or len(form) == 0 or not isinstance(form[0], Atom):
        raise ParseError("expected a toplevel declaration", form)
    head = form[0].text
    rest = form.items[1:]
    env = script.env()
    try:
        if head == "include":
            _arity(form, 1)
            if basedir is None:
                raise ParseError("include not allowed here", form)
            _load_into(script, os.path.join(basedir, _expect_atom(rest[0], "path")),
                       seen)
            return
        if head == "declare-sort":
            _arity(form, 1)
            script.sig.declare_sort(_expect_atom(rest[0], "sort name"))
            return
        if head == "declare-fun":
            _arity(form, 3)
            name = _expect_atom(rest[0], "function name")
            if not isinstance(rest[1], SList):
                raise ParseError("argument sorts must be a list", rest[1])
            argsorts = tuple(_expect_atom(s, "sort") for s in rest[1].items)
            script.sig.declare_fun(name, argsorts, _expect_atom(rest[2], "sort"))
            return
        if head == "declare-pred":
            _arity(form, 2)
            name = _expect_atom(rest[0], "predicate name")
            if not isinstance(rest[1], SList):
                raise ParseError("argument sorts must be a list", rest[1])
            argsorts = tuple(_expect_atom(s, "sort") for s in rest[1].items)
            script.sig.declare_pred(name, argsorts)
            return
        if head == "axiom":
            _arity(form, 2)
            name = _expect_atom(rest[0], "axiom name")
            script.sig.add_axiom(name, parse_formula(rest[1], env))
            return
        if head == "define-pred":
            _arity(form, 2)
            name = _expect_atom(rest[0], "predicate name")
            if name in script.preddefs:
                raise ParseError(f"predicate {name} redefined", form)
            script.preddefs[name] = parse_predicate(rest[1], env)
            return
        if head == "define-prog":
            _arity(form, 2)
            name = _expect_atom(rest[0], "program name")
            if name in script.progdefs:
                raise ParseError(f"program {name} redefined", form)
            defs = frozenset(script.progdefs) | frozenset(script.theorems)
            script.progdefs[name] = parse_program(rest[1], frozenset(), defs)
            return
        if head == "theorem":
            _arity(form, 3)
            name = _expect_atom(rest[0], "theorem name")
            if name in script.theorems:
                raise ParseError(f"theorem {name} redeclared", form)
            formula = parse_formula(rest[1], env)
            deriv = parse_derivation(rest[2], env)
            script.theorems[name] = Theorem(name, formula, deriv)
            return
    except SyntaxError_ as e:
        raise ParseError(str(e), form) from e
    raise ParseError(f"unknown declaration {head}", form)
