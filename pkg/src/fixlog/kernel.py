"""Derivation terms and the checking judgement.

`infer` computes the unique formula a derivation proves, rule-directed;
`check` wraps it with an alpha-comparison against a stated goal.  Derived
rules (wellfounded induction, Archimedean induction) are primitive nodes
whose premise obligations come from `expand_derived`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from .syntax import (
    Abst, All, And, Eq, Ex, Formula, FunApp, Imp, Mu, Nu, Operator, Or,
    Predicate, PredApp, PredConst, PredVar, Signature, TVar, Term,
    alpha_eq, falsity, free_vars, pred_arity, predapp, subst_formula,
    subst_predicate,
)


class CheckError(Exception):
    def __init__(self, msg: str, path: tuple[str, ...] = ()):
        self.path = path
        where = "/".join(path) or "root"
        super().__init__(f"{msg} (at {where})")


# ---------------------------------------------------------------------------
# Derivation nodes

@dataclass(frozen=True)
class Assume:
    label: str


@dataclass(frozen=True)
class Axm:
    name: str


@dataclass(frozen=True)
class UseThm:
    name: str


@dataclass(frozen=True)
class Refl:
    term: Term


@dataclass(frozen=True)
class Cong:
    """From d : A[s/x] and e : s = t conclude A[t/x]; carries lambda x. A."""
    d: "Derivation"
    e: "Derivation"
    var: TVar
    body: Formula


@dataclass(frozen=True)
class AndI:
    d: "Derivation"
    e: "Derivation"


@dataclass(frozen=True)
class AndL:
    d: "Derivation"


@dataclass(frozen=True)
class AndR:
    d: "Derivation"


@dataclass(frozen=True)
class OrL:
    d: "Derivation"
    right: Formula


@dataclass(frozen=True)
class OrR:
    d: "Derivation"
    left: Formula


@dataclass(frozen=True)
class OrE:
    d: "Derivation"
    e: "Derivation"
    f: "Derivation"


@dataclass(frozen=True)
class ImpI:
    label: str
    prem: Formula
    d: "Derivation"


@dataclass(frozen=True)
class ImpE:
    d: "Derivation"
    e: "Derivation"


@dataclass(frozen=True)
class AllI:
    var: TVar
    d: "Derivation"


@dataclass(frozen=True)
class AllE:
    d: "Derivation"
    term: Term


@dataclass(frozen=True)
class ExI:
    """exi(t, d, lambda x. A) : exists x. A from d : A[t/x]."""
    var: TVar
    body: Formula
    witness: Term
    d: "Derivation"


@dataclass(frozen=True)
class ExE:
    d: "Derivation"
    e: "Derivation"


@dataclass(frozen=True)
class Cl:
    op: Operator


@dataclass(frozen=True)
class CoCl:
    op: Operator


@dataclass(frozen=True)
class Ind:
    op: Operator
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class Coind:
    op: Operator
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class SI:
    op: Operator
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class HSI:
    op: Operator
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class SCI:
    op: Operator
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class HSCI:
    op: Operator
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class WfI:
    prec: Predicate  # binary
    dom: Predicate   # unary, the relativizing predicate
    pred: Predicate  # unary, the goal
    d: "Derivation"


@dataclass(frozen=True)
class AIq:
    q: Term
    pred: Predicate
    d: "Derivation"


@dataclass(frozen=True)
class AIBq:
    q: Term
    dom: Predicate
    pred: Predicate
    d: "Derivation"


Derivation = Union[
    Assume, Axm, UseThm, Refl, Cong, AndI, AndL, AndR, OrL, OrR, OrE,
    ImpI, ImpE, AllI, AllE, ExI, ExE, Cl, CoCl, Ind, Coind,
    SI, HSI, SCI, HSCI, WfI, AIq, AIBq,
]

Context = Mapping[str, Formula]


# ---------------------------------------------------------------------------
# Formula building blocks for rule schemas

_BINDER_NAMES = ("x", "y", "z", "w", "v", "u")


def _fresh_tvars(sorts: tuple[str, ...], avoid: set[str]) -> tuple[TVar, ...]:
    out = []
    taken = set(avoid)
    for i, s in enumerate(sorts):
        for base in _BINDER_NAMES:
            if base not in taken:
                name = base
                break
        else:
            j = 0
            while f"x{j}" in taken:
                j += 1
            name = f"x{j}"
        taken.add(name)
        out.append(TVar(name, s))
    return tuple(out)


def _avoid_of(*preds) -> set[str]:
    out: set[str] = set()
    for p in preds:
        out |= {v.name for v in free_vars(p)}
    return out


def subset_formula(p: Predicate, q: Predicate) -> Formula:
    """P subseteq Q  :=  forall xs (P(xs) -> Q(xs))."""
    ar = pred_arity(p)
    if ar != pred_arity(q):
        raise CheckError("inclusion between predicates of different arity")
    vs = _fresh_tvars(ar, _avoid_of(p, q))
    body: Formula = Imp(predapp(p, vs), predapp(q, vs))
    for v in reversed(vs):
        body = All(v, body)
    return body


def inter(p: Predicate, q: Predicate) -> Predicate:
    ar = pred_arity(p)
    vs = _fresh_tvars(ar, _avoid_of(p, q))
    return Abst(vs, And(predapp(p, vs), predapp(q, vs)))


def union(p: Predicate, q: Predicate) -> Predicate:
    ar = pred_arity(p)
    vs = _fresh_tvars(ar, _avoid_of(p, q))
    return Abst(vs, Or(predapp(p, vs), predapp(q, vs)))


def op_apply(op: Operator, p: Predicate) -> Predicate:
    return subst_predicate(op.body, {}, {op.var.name: p})


def neq(t: Term, s: Term) -> Formula:
    return Imp(Eq(t, s), falsity())


# ---------------------------------------------------------------------------
# Derived-rule schemas

def _schema_fun(sig: Signature, name: str, argsorts: tuple[str, ...], res: str):
    got = sig.funcs.get(name)
    if got != (argsorts, res):
        raise CheckError(
            f"derived rule needs function {name} : {argsorts} -> {res}, "
            f"signature has {got}")


def _schema_syms(sig: Signature, sort: str) -> dict:
    _schema_fun(sig, "max", (sort, sort), sort)
    _schema_fun(sig, "neg", (sort,), sort)
    _schema_fun(sig, "*", (sort, sort), sort)
    _schema_fun(sig, "2", (), sort)
    _schema_fun(sig, "0", (), sort)
    if sig.predconsts.get("<=") != (sort, sort):
        raise CheckError(f"derived rule needs predicate <= : ({sort} {sort})")
    le = PredConst("<=", (sort, sort))
    zero = FunApp("0", (), sort)
    two = FunApp("2", (), sort)

    def absof(t: Term) -> Term:
        return FunApp("max", (t, FunApp("neg", (t,), sort)), sort)

    def twice(t: Term) -> Term:
        return FunApp("*", (two, t), sort)

    return {"le": le, "zero": zero, "abs": absof, "twice": twice}


def expand_derived(node: Derivation, sig: Signature) -> tuple[Formula, Formula]:
    """Premise obligation and conclusion of a derived-rule node."""
    if isinstance(node, AIq):
        p, q = node.pred, node.q
        if pred_arity(p) != (q.sort,):
            raise CheckError("AI_q predicate must be unary over the sort of q")
        sy = _schema_syms(sig, q.sort)
        (x,) = _fresh_tvars((q.sort,), _avoid_of(p) | {v.name for v in free_vars_term(q)})
        nonzero = neq(x, sy["zero"])
        prem_inner = Imp(
            Imp(predapp(sy["le"], (sy["abs"](x), q)), predapp(p, (sy["twice"](x),))),
            predapp(p, (x,)))
        obligation = All(x, Imp(nonzero, prem_inner))
        conclusion = All(x, Imp(nonzero, predapp(p, (x,))))
        return obligation, conclusion
    if isinstance(node, AIBq):
        b, p, q = node.dom, node.pred, node.q
        if pred_arity(p) != (q.sort,) or pred_arity(b) != (q.sort,):
            raise CheckError("AIB_q predicates must be unary over the sort of q")
        sy = _schema_syms(sig, q.sort)
        (x,) = _fresh_tvars((q.sort,),
                            _avoid_of(p, b) | {v.name for v in free_vars_term(q)})
        nonzero = neq(x, sy["zero"])
        tw = sy["twice"](x)
        disj = Or(predapp(p, (x,)),
                  And(predapp(sy["le"], (sy["abs"](x), q)),
                      And(predapp(b, (tw,)),
                          Imp(predapp(p, (tw,)), predapp(p, (x,))))))
        obligation = All(x, Imp(predapp(b, (x,)), Imp(nonzero, disj)))
        conclusion = All(x, Imp(predapp(b, (x,)), Imp(nonzero, predapp(p, (x,)))))
        return obligation, conclusion
    if isinstance(node, WfI):
        prec, a, p = node.prec, node.dom, node.pred
        ar = pred_arity(p)
        if len(ar) != 1 or pred_arity(a) != ar or pred_arity(prec) != (ar[0], ar[0]):
            raise CheckError("WfI arities: prec binary, dom and goal unary")
        sort = ar[0]
        x, y = _fresh_tvars((sort, sort), _avoid_of(prec, a, p))
        prog = All(x, Imp(
            predapp(a, (x,)),
            Imp(All(y, Imp(predapp(a, (y,)),
                           Imp(predapp(prec, (y, x)), predapp(p, (y,))))),
                predapp(p, (x,)))))
        acc_x = PredVar("X", (sort,))
        xv, yv = _fresh_tvars((sort, sort), _avoid_of(prec))
        acc = Mu(Operator(acc_x, Abst((xv,), All(yv, Imp(
            predapp(prec, (yv, xv)), PredApp(acc_x, (yv,)))))))
        concl = All(x, Imp(And(predapp(acc, (x,)), predapp(a, (x,))),
                           predapp(p, (x,))))
        return prog, concl
    raise CheckError(f"not a derived-rule node: {type(node).__name__}")


def free_vars_term(t: Term) -> set[TVar]:
    from .syntax import term_vars
    return term_vars(t)


# ---------------------------------------------------------------------------
# Inference

@dataclass(frozen=True)
class Annotated:
    """A derivation node with its inferred formula and annotated children."""
    node: Derivation
    formula: Formula
    children: tuple["Annotated", ...]
    path: tuple[str, ...] = ()


def infer(ctx: Context, d: Derivation, sig: Signature,
          thms: Mapping[str, Formula] | None = None) -> Formula:
    return annotate(ctx, d, sig, thms).formula


def check(ctx: Context, d: Derivation, goal: Formula, sig: Signature,
          thms: Mapping[str, Formula] | None = None) -> None:
    got = infer(ctx, d, sig, thms)
    if not alpha_eq(got, goal):
        raise CheckError(
            f"derivation proves\n  {got}\nnot the stated\n  {goal}")


def annotate(ctx: Context, d: Derivation, sig: Signature,
             thms: Mapping[str, Formula] | None = None,
             path: tuple[str, ...] = ()) -> Annotated:
    thms = thms or {}
    return _ann(dict(ctx), d, sig, dict(thms), path)


def _tag(d: Derivation) -> str:
    return type(d).__name__.lower()


def _ann(ctx, d, sig, thms, path) -> Annotated:
    tag = _tag(d)

    def sub(child, i, extra_ctx=None, name=None):
        c = dict(ctx)
        if extra_ctx:
            c.update(extra_ctx)
        return _ann(c, child, sig, thms, path + (name or f"{tag}.{i}",))

    def fail(msg):
        raise CheckError(msg, path + (tag,))

    def done(formula, *children):
        return Annotated(d, formula, tuple(children), path)

    if isinstance(d, Assume):
        if d.label not in ctx:
            fail(f"unbound assumption {d.label}")
        return done(ctx[d.label])
    if isinstance(d, Axm):
        if d.name not in sig.axioms:
            fail(f"unknown axiom {d.name}")
        return done(sig.axioms[d.name])
    if isinstance(d, UseThm):
        if d.name not in thms:
            fail(f"unknown theorem {d.name}")
        return done(thms[d.name])
    if isinstance(d, Refl):
        return done(Eq(d.term, d.term))
    if isinstance(d, Cong):
        ad = sub(d.d, 0)
        ae = sub(d.e, 1)
        if not isinstance(ae.formula, Eq):
            fail("second premise of cong must prove an equation")
        s, t = ae.formula.lhs, ae.formula.rhs
        if s.sort != d.var.sort:
            fail("cong rewrite variable sort mismatch")
        want = subst_formula(d.body, {d.var.name: s}, {})
        if not alpha_eq(ad.formula, want):
            fail(f"cong premise is {ad.formula}, expected {want}")
        return done(subst_formula(d.body, {d.var.name: t}, {}), ad, ae)
    if isinstance(d, AndI):
        a, b = sub(d.d, 0), sub(d.e, 1)
        return done(And(a.formula, b.formula), a, b)
    if isinstance(d, AndL):
        a = sub(d.d, 0)
        if not isinstance(a.formula, And):
            fail("and-elimination of a non-conjunction")
        return done(a.formula.left, a)
    if isinstance(d, AndR):
        a = sub(d.d, 0)
        if not isinstance(a.formula, And):
            fail("and-elimination of a non-conjunction")
        return done(a.formula.right, a)
    if isinstance(d, OrL):
        a = sub(d.d, 0)
        return done(Or(a.formula, d.right), a)
    if isinstance(d, OrR):
        a = sub(d.d, 0)
        return done(Or(d.left, a.formula), a)
    if isinstance(d, OrE):
        a, b, c = sub(d.d, 0), sub(d.e, 1), sub(d.f, 2)
        if not isinstance(a.formula, Or):
            fail("or-elimination of a non-disjunction")
        if not isinstance(b.formula, Imp) or not isinstance(c.formula, Imp):
            fail("or-elimination branches must prove implications")
        if not alpha_eq(b.formula.prem, a.formula.left):
            fail("left branch premise does not match left disjunct")
        if not alpha_eq(c.formula.prem, a.formula.right):
            fail("right branch premise does not match right disjunct")
        if not alpha_eq(b.formula.concl, c.formula.concl):
            fail("or-elimination branches conclude different formulas")
        return done(b.formula.concl, a, b, c)
    if isinstance(d, ImpI):
        if d.label in ctx:
            fail(f"assumption label {d.label} already in use")
        a = sub(d.d, 0, extra_ctx={d.label: d.prem})
        return done(Imp(d.prem, a.formula), a)
    if isinstance(d, ImpE):
        a, b = sub(d.d, 0), sub(d.e, 1)
        if not isinstance(a.formula, Imp):
            fail("modus ponens on a non-implication")
        if not alpha_eq(a.formula.prem, b.formula):
            fail(f"modus ponens argument proves {b.formula}, "
                 f"expected {a.formula.prem}")
        return done(a.formula.concl, a, b)
    if isinstance(d, AllI):
        for label, form in ctx.items():
            if d.var in free_vars(form):
                fail(f"eigenvariable {d.var.name} occurs free in assumption {label}")
        a = sub(d.d, 0)
        return done(All(d.var, a.formula), a)
    if isinstance(d, AllE):
        a = sub(d.d, 0)
        if not isinstance(a.formula, All):
            fail("forall-elimination of a non-universal")
        if a.formula.var.sort != d.term.sort:
            fail("forall-elimination term sort mismatch")
        return done(subst_formula(a.formula.body,
                                  {a.formula.var.name: d.term}, {}), a)
    if isinstance(d, ExI):
        a = sub(d.d, 0)
        if d.var.sort != d.witness.sort:
            fail("exists-introduction witness sort mismatch")
        want = subst_formula(d.body, {d.var.name: d.witness}, {})
        if not alpha_eq(a.formula, want):
            fail(f"exists-introduction premise is {a.formula}, expected {want}")
        return done(Ex(d.var, d.body), a)
    if isinstance(d, ExE):
        a, b = sub(d.d, 0), sub(d.e, 1)
        if not isinstance(a.formula, Ex):
            fail("exists-elimination of a non-existential")
        bf = b.formula
        if not isinstance(bf, All) or not isinstance(bf.body, Imp):
            fail("exists-elimination side premise must prove forall x (A -> B)")
        if not alpha_eq(Ex(bf.var, bf.body.prem), a.formula):
            fail("exists-elimination premise mismatch")
        if bf.var in free_vars(bf.body.concl):
            fail(f"variable {bf.var.name} occurs free in the conclusion")
        return done(bf.body.concl, a, b)
    if isinstance(d, Cl):
        return done(subset_formula(op_apply(d.op, Mu(d.op)), Mu(d.op)))
    if isinstance(d, CoCl):
        return done(subset_formula(Nu(d.op), op_apply(d.op, Nu(d.op))))
    if isinstance(d, (Ind, Coind, SI, HSI, SCI, HSCI)):
        op, p = d.op, d.pred
        if pred_arity(p) != op.var.arity:
            fail("induction predicate arity differs from operator arity")
        if isinstance(d, Ind):
            want = subset_formula(op_apply(op, p), p)
            concl = subset_formula(Mu(op), p)
        elif isinstance(d, SI):
            want = subset_formula(op_apply(op, inter(p, Mu(op))), p)
            concl = subset_formula(Mu(op), p)
        elif isinstance(d, HSI):
            want = subset_formula(inter(op_apply(op, p), Mu(op)), p)
            concl = subset_formula(Mu(op), p)
        elif isinstance(d, Coind):
            want = subset_formula(p, op_apply(op, p))
            concl = subset_formula(p, Nu(op))
        elif isinstance(d, SCI):
            want = subset_formula(p, op_apply(op, union(p, Nu(op))))
            concl = subset_formula(p, Nu(op))
        else:  # HSCI
            want = subset_formula(p, union(op_apply(op, p), Nu(op)))
            concl = subset_formula(p, Nu(op))
        a = sub(d.d, 0)
        if not alpha_eq(a.formula, want):
            fail(f"rule-mismatch: premise proves\n  {a.formula}\nexpected\n  {want}")
        return done(concl, a)
    if isinstance(d, (WfI, AIq, AIBq)):
        try:
            want, concl = expand_derived(d, sig)
        except CheckError as e:
            fail(str(e))
        a = sub(d.d, 0)
        if not alpha_eq(a.formula, want):
            fail(f"rule-mismatch: premise proves\n  {a.formula}\nexpected\n  {want}")
        return done(concl, a)
    fail(f"unknown derivation node {type(d).__name__}")
