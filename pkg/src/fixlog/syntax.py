"""Abstract syntax for the logic: terms, formulas, predicates, operators.

Everything is an immutable tree.  Substitution is capture-avoiding, predicate
application of an abstraction beta-reduces eagerly (so the kernel only ever
sees applications of predicate variables, constants and mu/nu predicates),
and alpha-equality is the only notion of formula identity used anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Union


class SyntaxError_(Exception):
    """Ill-formed expression (sort clash, arity clash, non-positive operator)."""


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class TVar:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FunApp:
    func: str
    args: tuple[Term, ...]
    sort: str

    def __str__(self) -> str:
        if not self.args:
            return self.func
        return "(%s %s)" % (self.func, " ".join(str(a) for a in self.args))


Term = Union[TVar, FunApp]


def term_sort(t: Term) -> str:
    return t.sort


def term_vars(t: Term) -> set[TVar]:
    if isinstance(t, TVar):
        return {t}
    out: set[TVar] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_subst(t: Term, env: Mapping[str, Term]) -> Term:
    if isinstance(t, TVar):
        return env.get(t.name, t)
    return FunApp(t.func, tuple(term_subst(a, env) for a in t.args), t.sort)


# ---------------------------------------------------------------------------
# Formulas and predicates (mutually recursive)

@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.lhs.sort != self.rhs.sort:
            raise SyntaxError_(
                f"equation between sorts {self.lhs.sort} and {self.rhs.sort}")


@dataclass(frozen=True)
class PredApp:
    pred: Predicate
    args: tuple[Term, ...]

    def __post_init__(self):
        ar = pred_arity(self.pred)
        got = tuple(a.sort for a in self.args)
        if ar != got:
            raise SyntaxError_(f"predicate arity {ar} applied to {got}")


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp:
    prem: Formula
    concl: Formula


@dataclass(frozen=True)
class All:
    var: TVar
    body: Formula


@dataclass(frozen=True)
class Ex:
    var: TVar
    body: Formula


Formula = Union[Eq, PredApp, And, Or, Imp, All, Ex]


@dataclass(frozen=True)
class PredVar:
    name: str
    arity: tuple[str, ...]


@dataclass(frozen=True)
class PredConst:
    name: str
    arity: tuple[str, ...]


@dataclass(frozen=True)
class Abst:
    vars: tuple[TVar, ...]
    body: Formula


@dataclass(frozen=True)
class Mu:
    op: Operator


@dataclass(frozen=True)
class Nu:
    op: Operator


Predicate = Union[PredVar, PredConst, Abst, Mu, Nu]


@dataclass(frozen=True)
class Operator:
    """lambda X . P with P strictly positive in X; arity(P) = arity(X)."""

    var: PredVar
    body: Predicate

    def __post_init__(self):
        if pred_arity(self.body) != self.var.arity:
            raise SyntaxError_("operator body arity differs from bound variable")
        if not strictly_positive(self.body, self.var):
            raise SyntaxError_(
                f"operator body not strictly positive in {self.var.name}")


Expression = Union[Formula, Predicate, Operator]


def pred_arity(p: Predicate) -> tuple[str, ...]:
    if isinstance(p, (PredVar, PredConst)):
        return p.arity
    if isinstance(p, Abst):
        return tuple(v.sort for v in p.vars)
    return p.op.var.arity


def falsity() -> Formula:
    """False := mu(lambda X . X) applied to the empty tuple."""
    x = PredVar("X", ())
    return PredApp(Mu(Operator(x, x)), ())


def is_falsity(a: Formula) -> bool:
    return (isinstance(a, PredApp) and isinstance(a.pred, Mu)
            and isinstance(a.pred.op.body, PredVar)
            and a.pred.op.body == a.pred.op.var)


def predapp(p: Predicate, args: tuple[Term, ...]) -> Formula:
    """Apply a predicate, beta-reducing abstractions eagerly."""
    if isinstance(p, Abst):
        if len(p.vars) != len(args):
            raise SyntaxError_("abstraction applied to wrong number of terms")
        env = {v.name: a for v, a in zip(p.vars, args)}
        for v, a in zip(p.vars, args):
            if v.sort != a.sort:
                raise SyntaxError_(f"sort mismatch {v.sort} vs {a.sort}")
        return subst_formula(p.body, env, {})
    return PredApp(p, args)


# ---------------------------------------------------------------------------
# Free variables

def free_vars(e: Expression) -> set[TVar]:
    """Free object variables of a formula/predicate/operator."""
    if isinstance(e, Eq):
        return term_vars(e.lhs) | term_vars(e.rhs)
    if isinstance(e, PredApp):
        out = free_vars(e.pred)
        for t in e.args:
            out |= term_vars(t)
        return out
    if isinstance(e, (And, Or)):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Imp):
        return free_vars(e.prem) | free_vars(e.concl)
    if isinstance(e, (All, Ex)):
        return free_vars(e.body) - {e.var}
    if isinstance(e, (PredVar, PredConst)):
        return set()
    if isinstance(e, Abst):
        return free_vars(e.body) - set(e.vars)
    if isinstance(e, (Mu, Nu)):
        return free_vars(e.op)
    if isinstance(e, Operator):
        return free_vars(e.body)
    raise TypeError(e)


def free_pred_vars(e: Expression) -> set[PredVar]:
    if isinstance(e, Eq):
        return set()
    if isinstance(e, PredApp):
        return free_pred_vars(e.pred)
    if isinstance(e, (And, Or)):
        return free_pred_vars(e.left) | free_pred_vars(e.right)
    if isinstance(e, Imp):
        return free_pred_vars(e.prem) | free_pred_vars(e.concl)
    if isinstance(e, (All, Ex)):
        return free_pred_vars(e.body)
    if isinstance(e, PredVar):
        return {e}
    if isinstance(e, PredConst):
        return set()
    if isinstance(e, Abst):
        return free_pred_vars(e.body)
    if isinstance(e, (Mu, Nu)):
        return free_pred_vars(e.op)
    if isinstance(e, Operator):
        return free_pred_vars(e.body) - {e.var}
    raise TypeError(e)


def has_disjunction(e: Expression) -> bool:
    if isinstance(e, Or):
        return True
    if isinstance(e, Eq):
        return False
    if isinstance(e, PredApp):
        return has_disjunction(e.pred)
    if isinstance(e, And):
        return has_disjunction(e.left) or has_disjunction(e.right)
    if isinstance(e, Imp):
        return has_disjunction(e.prem) or has_disjunction(e.concl)
    if isinstance(e, (All, Ex)):
        return has_disjunction(e.body)
    if isinstance(e, (PredVar, PredConst)):
        return False
    if isinstance(e, Abst):
        return has_disjunction(e.body)
    if isinstance(e, (Mu, Nu)):
        return has_disjunction(e.op.body)
    if isinstance(e, Operator):
        return has_disjunction(e.body)
    raise TypeError(e)


# ---------------------------------------------------------------------------
# Substitution (capture-avoiding)

_FRESH_SEP = "'"


def _fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    root = base.split(_FRESH_SEP)[0]
    i = 1
    while f"{root}{_FRESH_SEP}{i}" in avoid:
        i += 1
    return f"{root}{_FRESH_SEP}{i}"


def subst_formula(a: Formula, tenv: Mapping[str, Term],
                  penv: Mapping[str, Predicate]) -> Formula:
    """Substitute terms for object variables and predicates for predicate
    variables simultaneously; renames bound variables on capture."""
    if not tenv and not penv:
        return a
    return _subst(a, dict(tenv), dict(penv))


def subst_predicate(p: Predicate, tenv: Mapping[str, Term],
                    penv: Mapping[str, Predicate]) -> Predicate:
    if not tenv and not penv:
        return p
    return _subst(p, dict(tenv), dict(penv))


def _range_obj_vars(tenv: Mapping[str, Term], penv: Mapping[str, Predicate]) -> set[str]:
    out: set[str] = set()
    for t in tenv.values():
        out |= {v.name for v in term_vars(t)}
    for p in penv.values():
        out |= {v.name for v in free_vars(p)}
    return out


def _range_pred_vars(penv: Mapping[str, Predicate]) -> set[str]:
    out: set[str] = set()
    for p in penv.values():
        out |= {x.name for x in free_pred_vars(p)}
    return out


def _subst(e, tenv: dict, penv: dict):
    if isinstance(e, Eq):
        return Eq(term_subst(e.lhs, tenv), term_subst(e.rhs, tenv))
    if isinstance(e, PredApp):
        args = tuple(term_subst(t, tenv) for t in e.args)
        return predapp(_subst(e.pred, tenv, penv), args)
    if isinstance(e, And):
        return And(_subst(e.left, tenv, penv), _subst(e.right, tenv, penv))
    if isinstance(e, Or):
        return Or(_subst(e.left, tenv, penv), _subst(e.right, tenv, penv))
    if isinstance(e, Imp):
        return Imp(_subst(e.prem, tenv, penv), _subst(e.concl, tenv, penv))
    if isinstance(e, (All, Ex)):
        cls = type(e)
        v, body = _rename_obj_binders((e.var,), e.body, tenv, penv)
        return cls(v[0], _subst(body, _drop(tenv, [v[0].name]), penv))
    if isinstance(e, PredVar):
        return penv.get(e.name, e)
    if isinstance(e, PredConst):
        return e
    if isinstance(e, Abst):
        vs, body = _rename_obj_binders(e.vars, e.body, tenv, penv)
        return Abst(vs, _subst(body, _drop(tenv, [v.name for v in vs]), penv))
    if isinstance(e, (Mu, Nu)):
        return type(e)(_subst(e.op, tenv, penv))
    if isinstance(e, Operator):
        x, body = e.var, e.body
        avoid = _range_pred_vars(penv) | set(penv.keys())
        if x.name in avoid:
            nx = PredVar(_fresh_name(x.name, avoid | {y.name for y in free_pred_vars(body)}),
                         x.arity)
            body = _subst(body, {}, {x.name: nx})
            x = nx
        return Operator(x, _subst(body, tenv, _drop(penv, [x.name])))
    raise TypeError(e)


def _drop(env: dict, names) -> dict:
    out = dict(env)
    for n in names:
        out.pop(n, None)
    return out


def _rename_obj_binders(vs: tuple[TVar, ...], body, tenv, penv):
    relevant = {k: v for k, v in tenv.items() if k not in {x.name for x in vs}}
    avoid = _range_obj_vars(relevant, penv) | set(relevant.keys())
    out = []
    ren: dict[str, Term] = {}
    taken = avoid | {v.name for v in free_vars(body)}
    for v in vs:
        if v.name in avoid:
            nv = TVar(_fresh_name(v.name, taken), v.sort)
            taken.add(nv.name)
            ren[v.name] = nv
            out.append(nv)
        else:
            out.append(v)
    if ren:
        body = _subst(body, ren, {})
    return tuple(out), body


# ---------------------------------------------------------------------------
# Alpha equality

def alpha_eq(e1: Expression, e2: Expression) -> bool:
    return _aeq(e1, e2, {}, {})


def _aeq(e1, e2, oenv: dict, penv: dict) -> bool:
    if type(e1) is not type(e2):
        return False
    if isinstance(e1, Eq):
        return _teq(e1.lhs, e2.lhs, oenv) and _teq(e1.rhs, e2.rhs, oenv)
    if isinstance(e1, PredApp):
        return (len(e1.args) == len(e2.args)
                and all(_teq(a, b, oenv) for a, b in zip(e1.args, e2.args))
                and _aeq(e1.pred, e2.pred, oenv, penv))
    if isinstance(e1, (And, Or)):
        return _aeq(e1.left, e2.left, oenv, penv) and _aeq(e1.right, e2.right, oenv, penv)
    if isinstance(e1, Imp):
        return _aeq(e1.prem, e2.prem, oenv, penv) and _aeq(e1.concl, e2.concl, oenv, penv)
    if isinstance(e1, (All, Ex)):
        if e1.var.sort != e2.var.sort:
            return False
        o2 = dict(oenv)
        o2[e1.var.name] = e2.var.name
        return _aeq(e1.body, e2.body, o2, penv)
    if isinstance(e1, PredVar):
        return penv.get(e1.name, e1.name) == e2.name and e1.arity == e2.arity
    if isinstance(e1, PredConst):
        return e1 == e2
    if isinstance(e1, Abst):
        if len(e1.vars) != len(e2.vars):
            return False
        if any(a.sort != b.sort for a, b in zip(e1.vars, e2.vars)):
            return False
        o2 = dict(oenv)
        for a, b in zip(e1.vars, e2.vars):
            o2[a.name] = b.name
        return _aeq(e1.body, e2.body, o2, penv)
    if isinstance(e1, (Mu, Nu)):
        return _aeq(e1.op, e2.op, oenv, penv)
    if isinstance(e1, Operator):
        if e1.var.arity != e2.var.arity:
            return False
        p2 = dict(penv)
        p2[e1.var.name] = e2.var.name
        return _aeq(e1.body, e2.body, oenv, p2)
    raise TypeError(e1)


def _teq(t1: Term, t2: Term, oenv: dict) -> bool:
    if isinstance(t1, TVar) and isinstance(t2, TVar):
        return oenv.get(t1.name, t1.name) == t2.name and t1.sort == t2.sort
    if isinstance(t1, FunApp) and isinstance(t2, FunApp):
        return (t1.func == t2.func and len(t1.args) == len(t2.args)
                and all(_teq(a, b, oenv) for a, b in zip(t1.args, t2.args)))
    return False


# ---------------------------------------------------------------------------
# Strict positivity and classification

def strictly_positive(p: Expression, x: PredVar) -> bool:
    """True iff no free occurrence of x sits inside an implication premise."""
    return _sp(p, x.name)


def _sp(e, name: str) -> bool:
    if isinstance(e, Eq):
        return True
    if isinstance(e, PredApp):
        return _sp(e.pred, name)
    if isinstance(e, (And, Or)):
        return _sp(e.left, name) and _sp(e.right, name)
    if isinstance(e, Imp):
        return name not in {v.name for v in free_pred_vars(e.prem)} and _sp(e.concl, name)
    if isinstance(e, (All, Ex)):
        return _sp(e.body, name)
    if isinstance(e, (PredVar, PredConst)):
        return True
    if isinstance(e, Abst):
        return _sp(e.body, name)
    if isinstance(e, (Mu, Nu)):
        return _sp(e.op, name)
    if isinstance(e, Operator):
        if e.var.name == name:
            return True
        return _sp(e.body, name)
    raise TypeError(e)


class Classification(enum.Enum):
    NC = "nc"
    HARROP = "harrop"
    NON_HARROP = "non-harrop"


def is_harrop(e: Expression, shielded: frozenset[str] = frozenset()) -> bool:
    """No disjunction or free predicate variable at a strictly positive
    position.  `shielded` names predicate variables treated as constants
    (used for the X-Harrop test on operator bodies)."""
    if isinstance(e, Eq):
        return True
    if isinstance(e, PredApp):
        return is_harrop(e.pred, shielded)
    if isinstance(e, And):
        return is_harrop(e.left, shielded) and is_harrop(e.right, shielded)
    if isinstance(e, Or):
        return False
    if isinstance(e, Imp):
        return is_harrop(e.concl, shielded)
    if isinstance(e, (All, Ex)):
        return is_harrop(e.body, shielded)
    if isinstance(e, PredVar):
        return e.name in shielded
    if isinstance(e, PredConst):
        return True
    if isinstance(e, Abst):
        return is_harrop(e.body, shielded)
    if isinstance(e, (Mu, Nu)):
        return is_harrop(e.op, shielded)
    if isinstance(e, Operator):
        # the operator is Harrop iff its body is X-Harrop
        return is_harrop(e.body, shielded | {e.var.name})
    raise TypeError(e)


def is_nc(e: Expression) -> bool:
    return not has_disjunction(e) and not free_pred_vars(e)


def classify(e: Expression) -> Classification:
    if is_nc(e):
        return Classification.NC
    if is_harrop(e):
        return Classification.HARROP
    return Classification.NON_HARROP


def non_harrop(e: Expression) -> bool:
    return not is_harrop(e)


# ---------------------------------------------------------------------------
# Signature

@dataclass
class Signature:
    """A user-declared instance: sorts, function symbols, predicate constants
    and named nc axioms."""

    sorts: list[str] = field(default_factory=list)
    funcs: dict[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    predconsts: dict[str, tuple[str, ...]] = field(default_factory=dict)
    axioms: dict[str, Formula] = field(default_factory=dict)

    def declare_sort(self, name: str) -> None:
        if name in self.sorts:
            raise SyntaxError_(f"sort {name} redeclared")
        self.sorts.append(name)

    def declare_fun(self, name: str, argsorts: tuple[str, ...], res: str) -> None:
        for s in argsorts + (res,):
            if s not in self.sorts:
                raise SyntaxError_(f"unknown sort {s}")
        if name in self.funcs:
            raise SyntaxError_(f"function {name} redeclared")
        self.funcs[name] = (argsorts, res)

    def declare_pred(self, name: str, argsorts: tuple[str, ...]) -> None:
        for s in argsorts:
            if s not in self.sorts:
                raise SyntaxError_(f"unknown sort {s}")
        if name in self.predconsts:
            raise SyntaxError_(f"predicate {name} redeclared")
        self.predconsts[name] = argsorts

    def add_axiom(self, name: str, a: Formula) -> None:
        if name in self.axioms:
            raise SyntaxError_(f"axiom {name} redeclared")
        if free_vars(a):
            raise SyntaxError_(f"axiom {name} is not closed")
        if classify(a) is not Classification.NC:
            raise SyntaxError_(f"axiom {name} is not non-computational")
        self.axioms[name] = a


# ---------------------------------------------------------------------------
# Printing (s-expression surface; inverse of the parser up to alpha)

def print_term(t: Term) -> str:
    if isinstance(t, TVar):
        return t.name
    if not t.args:
        return t.func
    return "(%s %s)" % (t.func, " ".join(print_term(a) for a in t.args))


def print_formula(a: Formula) -> str:
    if is_falsity(a):
        return "false"
    if isinstance(a, Eq):
        return f"(= {print_term(a.lhs)} {print_term(a.rhs)})"
    if isinstance(a, PredApp):
        head = print_predicate(a.pred)
        if not a.args:
            return f"(pred {head})"
        return "(pred %s %s)" % (head, " ".join(print_term(t) for t in a.args))
    if isinstance(a, And):
        return f"(and {print_formula(a.left)} {print_formula(a.right)})"
    if isinstance(a, Or):
        return f"(or {print_formula(a.left)} {print_formula(a.right)})"
    if isinstance(a, Imp):
        return f"(imp {print_formula(a.prem)} {print_formula(a.concl)})"
    if isinstance(a, All):
        return f"(all ({a.var.name} {a.var.sort}) {print_formula(a.body)})"
    if isinstance(a, Ex):
        return f"(ex ({a.var.name} {a.var.sort}) {print_formula(a.body)})"
    raise TypeError(a)


def print_predicate(p: Predicate) -> str:
    if isinstance(p, PredVar):
        return p.name
    if isinstance(p, PredConst):
        return p.name
    if isinstance(p, Abst):
        binds = " ".join(f"({v.name} {v.sort})" for v in p.vars)
        return f"(lambda ({binds}) {print_formula(p.body)})"
    if isinstance(p, Mu):
        return f"(mu {_print_op_inner(p.op)})"
    if isinstance(p, Nu):
        return f"(nu {_print_op_inner(p.op)})"
    raise TypeError(p)


def _print_op_inner(op: Operator) -> str:
    body = op.body
    if isinstance(body, Abst):
        binds = " ".join(f"({v.name} {v.sort})" for v in body.vars)
        return f"{op.var.name} ({binds}) {print_formula(body.body)}"
    # nullary or non-abstraction body: print with empty binder list trick
    if isinstance(body, PredVar) and body == op.var and body.arity == ():
        return f"{op.var.name} () (pred {body.name})"
    raise SyntaxError_("cannot print operator with non-abstraction body")


def print_expression(e: Expression) -> str:
    if isinstance(e, (PredVar, PredConst, Abst, Mu, Nu)):
        return print_predicate(e)
    if isinstance(e, Operator):
        return f"(op {_print_op_inner(e)})"
    return print_formula(e)
