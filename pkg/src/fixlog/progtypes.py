"""Realizer types, the type assignment for logic expressions, and a checker
for target-language programs.

tau follows one table: Harrop expressions collapse to the unit type, predicate
variables map to dedicated type variables, mu/nu map to fixed-point types.
The program checker is bidirectional (synthesize variables/applications/
references, check everything else) and folds/unfolds fixed-point types
greedily when no annotation is present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from . import programs as pr
from . import syntax as sy


@dataclass(frozen=True)
class TypeVar:
    name: str

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True)
class One:
    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True)
class Sum:
    left: "ProgType"
    right: "ProgType"

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True)
class Prod:
    left: "ProgType"
    right: "ProgType"

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True)
class Arrow:
    dom: "ProgType"
    cod: "ProgType"

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True)
class Fix:
    var: TypeVar
    body: "ProgType"

    def __post_init__(self):
        if not type_strictly_positive(self.body, self.var):
            raise ValueError(f"fix body not strictly positive in {self.var.name}")

    def __str__(self) -> str:
        return print_type(self)


ProgType = Union[TypeVar, One, Sum, Prod, Arrow, Fix]

ONE = One()
TWO = Sum(ONE, ONE)
THREE = Sum(TWO, ONE)


def nat_type() -> ProgType:
    return Fix(TypeVar("a"), Sum(ONE, TypeVar("a")))


def stream_type(cell: ProgType) -> ProgType:
    return Fix(TypeVar("a"), Prod(cell, TypeVar("a")))


def print_type(t: ProgType) -> str:
    if isinstance(t, TypeVar):
        return t.name
    if isinstance(t, One):
        return "1"
    if isinstance(t, Sum):
        return f"(+ {print_type(t.left)} {print_type(t.right)})"
    if isinstance(t, Prod):
        return f"(* {print_type(t.left)} {print_type(t.right)})"
    if isinstance(t, Arrow):
        return f"(-> {print_type(t.dom)} {print_type(t.cod)})"
    if isinstance(t, Fix):
        return f"(fix {t.var.name} {print_type(t.body)})"
    raise TypeError(t)


def type_free_vars(t: ProgType) -> frozenset[str]:
    if isinstance(t, TypeVar):
        return frozenset((t.name,))
    if isinstance(t, One):
        return frozenset()
    if isinstance(t, (Sum, Prod)):
        return type_free_vars(t.left) | type_free_vars(t.right)
    if isinstance(t, Arrow):
        return type_free_vars(t.dom) | type_free_vars(t.cod)
    return type_free_vars(t.body) - frozenset((t.var.name,))


def type_strictly_positive(t: ProgType, v: TypeVar) -> bool:
    if isinstance(t, (TypeVar, One)):
        return True
    if isinstance(t, (Sum, Prod)):
        return type_strictly_positive(t.left, v) and type_strictly_positive(t.right, v)
    if isinstance(t, Arrow):
        return v.name not in type_free_vars(t.dom) and type_strictly_positive(t.cod, v)
    if isinstance(t, Fix):
        if t.var == v:
            return True
        return type_strictly_positive(t.body, v)
    raise TypeError(t)


def type_subst(t: ProgType, env: Mapping[str, ProgType]) -> ProgType:
    if not env:
        return t
    if isinstance(t, TypeVar):
        return env.get(t.name, t)
    if isinstance(t, One):
        return t
    if isinstance(t, Sum):
        return Sum(type_subst(t.left, env), type_subst(t.right, env))
    if isinstance(t, Prod):
        return Prod(type_subst(t.left, env), type_subst(t.right, env))
    if isinstance(t, Arrow):
        return Arrow(type_subst(t.dom, env), type_subst(t.cod, env))
    if isinstance(t, Fix):
        inner = {k: v for k, v in env.items() if k != t.var.name}
        captured = set()
        for v in inner.values():
            captured |= type_free_vars(v)
        var, body = t.var, t.body
        if var.name in captured:
            i = 1
            while f"{var.name}{i}" in captured | type_free_vars(body):
                i += 1
            nv = TypeVar(f"{var.name}{i}")
            body = type_subst(body, {var.name: nv})
            var = nv
        return Fix(var, type_subst(body, inner))
    raise TypeError(t)


def type_alpha_eq(t1: ProgType, t2: ProgType) -> bool:
    return _taeq(t1, t2, {}, {})


def _taeq(t1, t2, e1, e2) -> bool:
    if type(t1) is not type(t2):
        return False
    if isinstance(t1, TypeVar):
        return e1.get(t1.name, t1.name) == e2.get(t2.name, t2.name)
    if isinstance(t1, One):
        return True
    if isinstance(t1, (Sum, Prod)):
        return _taeq(t1.left, t2.left, e1, e2) and _taeq(t1.right, t2.right, e1, e2)
    if isinstance(t1, Arrow):
        return _taeq(t1.dom, t2.dom, e1, e2) and _taeq(t1.cod, t2.cod, e1, e2)
    fresh = f"#{len(e1)}"
    return _taeq(t1.body, t2.body, {**e1, t1.var.name: fresh},
                 {**e2, t2.var.name: fresh})


def canonical_type(t: ProgType, counter: list[int] | None = None,
                   env: Mapping[str, str] | None = None) -> ProgType:
    """Rename bound type variables to a canonical de-Bruijn-style scheme."""
    if counter is None:
        counter = [0]
    env = env or {}
    if isinstance(t, TypeVar):
        return TypeVar(env.get(t.name, t.name))
    if isinstance(t, One):
        return t
    if isinstance(t, Sum):
        return Sum(canonical_type(t.left, counter, env),
                   canonical_type(t.right, counter, env))
    if isinstance(t, Prod):
        return Prod(canonical_type(t.left, counter, env),
                    canonical_type(t.right, counter, env))
    if isinstance(t, Arrow):
        return Arrow(canonical_type(t.dom, counter, env),
                     canonical_type(t.cod, counter, env))
    name = f"t{counter[0]}"
    counter[0] += 1
    return Fix(TypeVar(name), canonical_type(t.body, counter, {**env, t.var.name: name}))


def is_regular(t: ProgType) -> bool:
    """No subexpression of the form fix a (fix b1 ... fix bn a)."""
    if isinstance(t, (TypeVar, One)):
        return True
    if isinstance(t, (Sum, Prod)):
        return is_regular(t.left) and is_regular(t.right)
    if isinstance(t, Arrow):
        return is_regular(t.dom) and is_regular(t.cod)
    body = t.body
    while isinstance(body, Fix):
        body = body.body
    if isinstance(body, TypeVar) and body.name == t.var.name:
        return False
    return is_regular(t.body)


def unfold_fix(t: Fix) -> ProgType:
    return type_subst(t.body, {t.var.name: t})


# ---------------------------------------------------------------------------
# tau: types of logic expressions

def alpha_of(x: sy.PredVar) -> TypeVar:
    return TypeVar(f"a_{x.name}")


def tau(e: sy.Expression) -> ProgType:
    if isinstance(e, sy.Eq):
        return ONE
    if isinstance(e, sy.PredApp):
        return tau(e.pred)
    if isinstance(e, sy.Or):
        return Sum(tau(e.left), tau(e.right))
    if isinstance(e, sy.And):
        lh, rh = sy.is_harrop(e.left), sy.is_harrop(e.right)
        if lh and rh:
            return ONE
        if rh:
            return tau(e.left)
        if lh:
            return tau(e.right)
        return Prod(tau(e.left), tau(e.right))
    if isinstance(e, sy.Imp):
        if sy.is_harrop(e.concl):
            return ONE
        if sy.is_harrop(e.prem):
            return tau(e.concl)
        return Arrow(tau(e.prem), tau(e.concl))
    if isinstance(e, (sy.All, sy.Ex)):
        return tau(e.body)
    if isinstance(e, sy.PredVar):
        return alpha_of(e)
    if isinstance(e, sy.PredConst):
        return ONE
    if isinstance(e, sy.Abst):
        return tau(e.body)
    if isinstance(e, (sy.Mu, sy.Nu)):
        op = e.op
        if sy.is_harrop(op):  # body is X-Harrop
            return ONE
        return Fix(alpha_of(op.var), tau(op.body))
    if isinstance(e, sy.Operator):
        return tau(e.body)
    raise TypeError(e)


def is_data_formula(a: sy.Formula) -> bool:
    """No free predicate variables and no strictly positive subformula A -> B
    with both A and B non-Harrop."""
    if sy.free_pred_vars(a):
        return False
    return _df(a)


def _df(e) -> bool:
    if isinstance(e, sy.Eq):
        return True
    if isinstance(e, sy.PredApp):
        return _df(e.pred)
    if isinstance(e, (sy.And, sy.Or)):
        return _df(e.left) and _df(e.right)
    if isinstance(e, sy.Imp):
        if sy.non_harrop(e.prem) and sy.non_harrop(e.concl):
            return False
        return _df(e.concl)
    if isinstance(e, (sy.All, sy.Ex)):
        return _df(e.body)
    if isinstance(e, (sy.PredVar, sy.PredConst)):
        return True
    if isinstance(e, sy.Abst):
        return _df(e.body)
    if isinstance(e, (sy.Mu, sy.Nu)):
        return _df(e.op.body)
    raise TypeError(e)


# ---------------------------------------------------------------------------
# Program type checking

class TypeCheckError(Exception):
    pass


MAX_UNFOLDS = 64


def _head_unfold(t: ProgType) -> ProgType:
    """Unfold top-level fixes until a structural head appears (UNROLL)."""
    n = 0
    while isinstance(t, Fix):
        t = unfold_fix(t)
        n += 1
        if n > MAX_UNFOLDS:
            raise TypeCheckError("fixed-point type does not reach a structural head")
    return t


class _Checker:
    """Bidirectional checker.  Extraction output is unannotated, so before the
    syntax-directed rules apply, the subject is reduced by type-preserving
    administrative steps (beta, case-of-constructor, case commuting); the step
    budget keeps this terminating on arbitrary input."""

    def __init__(self, refs: Mapping[str, ProgType], greedy: bool, budget: int = 200_000):
        self.refs = dict(refs)
        self.greedy = greedy
        self.budget = budget

    def spend(self):
        self.budget -= 1
        if self.budget <= 0:
            raise TypeCheckError("checker reduction budget exceeded")

    # -- administrative reduction ------------------------------------------
    def reduce(self, m: pr.Program) -> pr.Program:
        while True:
            m2 = self._step(m)
            if m2 is None:
                return m
            self.spend()
            m = m2

    def _step(self, m):
        if isinstance(m, pr.App):
            if isinstance(m.fun, pr.Lam):
                return pr.subst(m.fun.body, m.fun.var, m.arg)
            if isinstance(m.fun, pr.Case):
                return self._push_app(m.fun, m.arg)
            f2 = self._step(m.fun)
            if f2 is not None:
                return pr.App(f2, m.arg)
            return None
        if isinstance(m, pr.Case):
            s = m.scrut
            if isinstance(s, pr.Con):
                for c in m.clauses:
                    if c.tag == s.tag:
                        body = c.body
                        for v, a in zip(c.vars, s.args):
                            body = pr.subst(body, v, a)
                        return body
                return None  # stuck case: denotes bottom, checks against anything below
            if isinstance(s, pr.Case):
                return self._push_case(s, m.clauses)
            s2 = self._step(s)
            if s2 is not None:
                return pr.Case(s2, m.clauses)
            return None
        return None

    def _push_app(self, case: pr.Case, arg: pr.Program):
        fv = pr.free_pvars(arg)
        cls = []
        for c in case.clauses:
            c = _avoid_capture(c, fv)
            cls.append(pr.Clause(c.tag, c.vars, pr.App(c.body, arg)))
        return pr.Case(case.scrut, tuple(cls))

    def _push_case(self, inner: pr.Case, outer_clauses):
        fv = frozenset()
        for c in outer_clauses:
            fv |= pr.free_pvars(pr.Case(pr.NIL, (c,)))
        cls = []
        for c in inner.clauses:
            c = _avoid_capture(c, fv)
            cls.append(pr.Clause(c.tag, c.vars, pr.Case(c.body, outer_clauses)))
        return pr.Case(inner.scrut, tuple(cls))

    # -- synthesis ----------------------------------------------------------
    def synth(self, ctx, m) -> ProgType:
        m = self.reduce(m)
        if isinstance(m, pr.PVar):
            if m.name not in ctx:
                raise TypeCheckError(f"unbound variable {m.name}")
            return ctx[m.name]
        if isinstance(m, pr.Ref):
            if m.name not in self.refs:
                raise TypeCheckError(f"reference {m.name} has no declared type")
            return self.refs[m.name]
        if isinstance(m, pr.App):
            if isinstance(m.fun, (pr.Roll, pr.Unroll)):
                fix = m.fun.fix
                if not isinstance(fix, Fix):
                    raise TypeCheckError("coercion must carry a fixed-point type")
                if isinstance(m.fun, pr.Roll):
                    self.check(ctx, m.arg, unfold_fix(fix))
                    return fix
                self.check(ctx, m.arg, fix)
                return unfold_fix(fix)
            ft = self.synth(ctx, m.fun)
            if self.greedy and isinstance(ft, Fix):
                ft = _head_unfold(ft)
            if not isinstance(ft, Arrow):
                raise TypeCheckError(f"application head has non-function type {ft}")
            self.check(ctx, m.arg, ft.dom)
            return ft.cod
        raise TypeCheckError(f"cannot synthesize a type for {type(m).__name__}")

    # -- checking ------------------------------------------------------------
    def check(self, ctx, m, want: ProgType) -> None:
        m = self.reduce(m)
        if isinstance(m, pr.Bot):
            return
        if self.greedy and isinstance(want, Fix) and isinstance(m, (pr.Con, pr.Lam)):
            self.check(ctx, m, _head_unfold(want))  # implicit ROLL
            return
        if isinstance(m, pr.Con):
            if m.tag == "nil":
                if isinstance(want, One):
                    return
                raise TypeCheckError(f"nil against {want}")
            if m.tag == "left":
                if isinstance(want, Sum):
                    self.check(ctx, m.args[0], want.left)
                    return
                raise TypeCheckError(f"left(..) against {want}")
            if m.tag == "right":
                if isinstance(want, Sum):
                    self.check(ctx, m.args[0], want.right)
                    return
                raise TypeCheckError(f"right(..) against {want}")
            if isinstance(want, Prod):
                self.check(ctx, m.args[0], want.left)
                self.check(ctx, m.args[1], want.right)
                return
            raise TypeCheckError(f"pair(..) against {want}")
        if isinstance(m, pr.Lam):
            if not isinstance(want, Arrow):
                raise TypeCheckError(f"lambda against {want}")
            self.check({**ctx, m.var: want.dom}, m.body, want.cod)
            return
        if isinstance(m, pr.Rec):
            body = m.body
            if isinstance(body, pr.Lam):
                self.check({**ctx, body.var: want}, body.body, want)
                return
            self.check(ctx, body, Arrow(want, want))
            return
        if isinstance(m, pr.Case):
            st = self.synth(ctx, m.scrut)
            if self.greedy and isinstance(st, Fix):
                st = _head_unfold(st)
            for c in m.clauses:
                if c.tag == "nil":
                    if not isinstance(st, One):
                        raise TypeCheckError(f"nil pattern against scrutinee {st}")
                    self.check(ctx, c.body, want)
                elif c.tag in ("left", "right"):
                    if not isinstance(st, Sum):
                        raise TypeCheckError(f"sum pattern against scrutinee {st}")
                    part = st.left if c.tag == "left" else st.right
                    self.check({**ctx, c.vars[0]: part}, c.body, want)
                else:
                    if not isinstance(st, Prod):
                        raise TypeCheckError(f"pair pattern against scrutinee {st}")
                    self.check({**ctx, c.vars[0]: st.left, c.vars[1]: st.right},
                               c.body, want)
            return
        got = self.synth(ctx, m)
        if self.greedy:
            if type_alpha_eq(got, want):
                return
            if isinstance(got, Fix) and not isinstance(want, Fix):
                _require(_head_unfold(got), want)
                return
            if isinstance(want, Fix) and not isinstance(got, Fix):
                _require(got, _head_unfold(want))
                return
        _require(got, want)


def _avoid_capture(c: pr.Clause, fv: frozenset[str]) -> pr.Clause:
    vs, body = list(c.vars), c.body
    for i, v in enumerate(vs):
        if v in fv:
            nv = pr._fresh(v, fv | pr.free_pvars(body) | frozenset(vs))
            body = pr.subst(body, v, pr.PVar(nv))
            vs[i] = nv
    return pr.Clause(c.tag, tuple(vs), body)


def type_check(ctx: Mapping[str, ProgType], m: pr.Program, want: ProgType,
               refs: Mapping[str, ProgType] | None = None,
               greedy: bool = True) -> None:
    """Check m : want.  Raises TypeCheckError on failure.  With greedy=True,
    ROLL/UNROLL are inserted implicitly at fixed-point boundaries; with
    greedy=False the program must carry explicit Roll/Unroll coercions."""
    _Checker(refs or {}, greedy).check(dict(ctx), m, want)


def _require(got: ProgType, want: ProgType) -> None:
    if not type_alpha_eq(got, want):
        raise TypeCheckError(f"expected {want}, found {got}")
