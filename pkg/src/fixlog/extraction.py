"""Program extraction from checked derivations.

The extractor walks an annotated derivation.  Harrop conclusions contribute
nil; closure/coclosure are identities (fold/unfold coercions in typed mode);
(co)induction wraps the premise realizer in a recursion composed with a
monotonicity witness generated directly from the operator; derived rules use
their fixed realizer templates.  `simplify` applies the local, behaviour-
preserving rewrites that bring raw output to the shape of the displayed
equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import kernel as kn
from . import programs as pr
from . import progtypes as ty
from . import syntax as sy
from .kernel import Annotated
from .programs import App, Bot, Case, Clause, Con, Lam, Program, PVar, Rec, Ref
from .syntax import is_harrop


class ExtractError(Exception):
    pass


@dataclass
class ExtractionResult:
    program: Program                 # plain extraction
    type: ty.ProgType                # tau of the theorem formula
    typed_program: Program           # with Roll/Unroll coercions
    provenance: dict[int, tuple[str, ...]] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Monotonicity witnesses

class _Names:
    def __init__(self) -> None:
        self.n = 0

    def fresh(self, base: str) -> str:
        self.n += 1
        return f"_{base}{self.n}"


def _app_map(m: Program | None, t: Program) -> Program:
    return t if m is None else App(m, t)


def _map_prog(t: ty.ProgType, env: dict[str, Program], names: _Names,
              typed: bool, tsub_in: dict[str, ty.ProgType],
              tsub_out: dict[str, ty.ProgType]) -> Program | None:
    """Functorial map over a type skeleton: env maps marked type variables to
    map programs; None means the identity."""
    marked = set(env) & ty.type_free_vars(t)
    if not marked:
        return None
    if isinstance(t, ty.TypeVar):
        return env[t.name]
    if isinstance(t, ty.Sum):
        c, a, b = names.fresh("c"), names.fresh("a"), names.fresh("b")
        ml = _map_prog(t.left, env, names, typed, tsub_in, tsub_out)
        mr = _map_prog(t.right, env, names, typed, tsub_in, tsub_out)
        return Lam(c, Case(PVar(c), (
            Clause("left", (a,), pr.left(_app_map(ml, PVar(a)))),
            Clause("right", (b,), pr.right(_app_map(mr, PVar(b)))))))
    if isinstance(t, ty.Prod):
        c = names.fresh("c")
        ml = _map_prog(t.left, env, names, typed, tsub_in, tsub_out)
        mr = _map_prog(t.right, env, names, typed, tsub_in, tsub_out)
        return Lam(c, pr.pair(_app_map(ml, pr.proj_left(PVar(c))),
                              _app_map(mr, pr.proj_right(PVar(c)))))
    if isinstance(t, ty.Arrow):
        # strict positivity: marked variables cannot occur in the domain
        g, x = names.fresh("g"), names.fresh("x")
        mc = _map_prog(t.cod, env, names, typed, tsub_in, tsub_out)
        return Lam(g, Lam(x, _app_map(mc, App(PVar(g), PVar(x)))))
    if isinstance(t, ty.Fix):
        h = names.fresh("h")
        inner = _map_prog(t.body, {**env, t.var.name: PVar(h)}, names, typed,
                          tsub_in, tsub_out)
        if inner is None:
            return None
        if not typed:
            return Rec(Lam(h, inner))
        in_fix = ty.type_subst(t, tsub_in)
        out_fix = ty.type_subst(t, tsub_out)
        c = names.fresh("c")
        return Rec(Lam(h, Lam(c, App(
            pr.Roll(out_fix), _app_map(inner, App(pr.Unroll(in_fix), PVar(c)))))))
    raise TypeError(t)


def gen_mon(op: sy.Operator, names: _Names | None = None, typed: bool = False,
            target_in: ty.ProgType | None = None,
            target_out: ty.ProgType | None = None) -> Program:
    """The functorial-map program for a strictly positive non-Harrop operator:
    lam f . map over tau(body) with f at the bound variable's positions."""
    if is_harrop(op):
        raise ExtractError("monotonicity map asked for a Harrop operator")
    names = names or _Names()
    f = names.fresh("f")
    alpha = ty.alpha_of(op.var)
    tin = {alpha.name: target_in} if (typed and target_in is not None) else {}
    tout = {alpha.name: target_out} if (typed and target_out is not None) else {}
    body = _map_prog(ty.tau(op.body), {alpha.name: PVar(f)}, names, typed, tin, tout)
    if body is None:
        a = names.fresh("a")
        body = Lam(a, PVar(a))
    return Lam(f, body)


# Insert-mode witnesses: used when one side of the rule is Harrop.  For a
# Harrop operator the witness builds a value of tau(body[Y/X]) from a realizer
# a of the conclusion type; for a non-Harrop operator with Harrop invariant it
# maps the collapsed realizer of body[X^/X] to one of body[Y/X].

_NOX, _CONST, _FN = "nox", "const", "fn"


class _InsertGen:
    def __init__(self, xname: str, avar: str, names: _Names, typed: bool):
        self.avar = avar
        self.names = names
        self.typed = typed
        self.shield = frozenset((xname,))
        self.env: dict[str, tuple[str, Program]] = {}
        self.relevant = {xname}

    def _relevant(self, e) -> bool:
        return bool({v.name for v in sy.free_pred_vars(e)} & self.relevant)

    def _in_harrop(self, e) -> bool:
        return is_harrop(e, self.shield)

    def go(self, e) -> tuple[str, Program | None]:
        if not self._relevant(e):
            return (_NOX, None)
        if isinstance(e, sy.PredApp):
            return self.go(e.pred)
        if isinstance(e, sy.PredVar):
            if e.name in self.env:
                return self.env[e.name]
            return (_CONST, PVar(self.avar))
        if isinstance(e, sy.Abst):
            return self.go(e.body)
        if isinstance(e, (sy.All, sy.Ex)):
            return self.go(e.body)
        if isinstance(e, sy.And):
            return self._conj(e.left, e.right)
        if isinstance(e, sy.Or):
            return self._disj(e.left, e.right)
        if isinstance(e, sy.Imp):
            return self._imp(e.prem, e.concl)
        if isinstance(e, (sy.Mu, sy.Nu)):
            return self._fix(e.op)
        raise ExtractError(f"insert witness: unsupported expression {type(e).__name__}")

    def _piece(self, kind, m, inp):
        if kind == _NOX:
            return inp
        if kind == _CONST:
            return m
        return App(m, inp)

    def _conj(self, a, b):
        ka, ma = self.go(a)
        kb, mb = self.go(b)
        in_a = not self._in_harrop(a)
        in_b = not self._in_harrop(b)
        out_a = not is_harrop(a)
        out_b = not is_harrop(b)
        if not in_a and not in_b:
            oa = self._piece(ka, ma, None) if out_a else None
            ob = self._piece(kb, mb, None) if out_b else None
            return (_CONST, self._both(oa, ob))
        c = self.names.fresh("c")
        if in_a and in_b:
            ia, ib = pr.proj_left(PVar(c)), pr.proj_right(PVar(c))
        elif in_a:
            ia, ib = PVar(c), None
        else:
            ia, ib = None, PVar(c)
        oa = self._piece(ka, ma, ia) if out_a else None
        ob = self._piece(kb, mb, ib) if out_b else None
        return (_FN, Lam(c, self._both(oa, ob)))

    @staticmethod
    def _both(oa, ob):
        if oa is not None and ob is not None:
            return pr.pair(oa, ob)
        out = oa if oa is not None else ob
        if out is None:
            raise ExtractError("insert witness produced no output")
        return out

    def _disj(self, a, b):
        ka, ma = self.go(a)
        kb, mb = self.go(b)
        c, v, w = (self.names.fresh("c"), self.names.fresh("v"),
                   self.names.fresh("w"))
        la = pr.left(self._piece(ka, ma, PVar(v)))
        rb = pr.right(self._piece(kb, mb, PVar(w)))
        return (_FN, Lam(c, Case(PVar(c), (Clause("left", (v,), la),
                                           Clause("right", (w,), rb)))))

    def _imp(self, a, b):
        if self._relevant(a):
            raise ExtractError("bound predicate variable in an implication premise")
        kb, mb = self.go(b)
        a_non_harrop = not is_harrop(a)
        if kb == _CONST:
            if a_non_harrop:
                return (_CONST, Lam(self.names.fresh("u"), mb))
            return (_CONST, mb)
        if a_non_harrop:
            g, x = self.names.fresh("g"), self.names.fresh("x")
            return (_FN, Lam(g, Lam(x, App(mb, App(PVar(g), PVar(x))))))
        return (_FN, mb)

    def _fix(self, op: sy.Operator):
        z = op.var.name
        body = op.body
        collapsed_harrop = is_harrop(body, self.shield | {z})
        saved_env, saved_shield, saved_rel = dict(self.env), self.shield, set(self.relevant)
        self.relevant.add(z)
        if collapsed_harrop:
            zv = self.names.fresh("z")
            self.shield = self.shield | {z}
            self.env[z] = (_CONST, PVar(zv))
            kind, m = self.go(body)
            self.env, self.shield, self.relevant = saved_env, saved_shield, saved_rel
            if kind != _CONST:
                raise ExtractError("collapsed fixed point is not value-like")
            return (_CONST, Rec(Lam(zv, m)))
        mv = self.names.fresh("m")
        self.env[z] = (_FN, PVar(mv))
        kind, m = self.go(body)
        self.env, self.shield, self.relevant = saved_env, saved_shield, saved_rel
        if kind != _FN:
            raise ExtractError("live fixed point did not yield a map")
        return (_FN, Rec(Lam(mv, m)))


def gen_mon_insert(op: sy.Operator, names: _Names, typed: bool) -> tuple[str, Program]:
    """Witness for rules with a Harrop side: lam a . <body>, where the body is
    either a value of the operator-body type with a inserted at the bound
    variable's positions (Harrop operator) or a map from the collapsed to the
    full realizer (non-Harrop operator, Harrop invariant)."""
    a = names.fresh("a")
    gen = _InsertGen(op.var.name, a, names, typed)
    body = op.body.body if isinstance(op.body, sy.Abst) else op.body
    kind, m = gen.go(body)
    if kind == _NOX:
        raise ExtractError("operator is constant; no witness needed")
    return kind, Lam(a, m)


# ---------------------------------------------------------------------------
# Extraction proper

class _Extractor:
    def __init__(self, sig: sy.Signature, typed: bool):
        self.sig = sig
        self.typed = typed
        self.names = _Names()
        self.provenance: dict[int, tuple[str, ...]] = {}
        self.keep: list[Program] = []

    def fresh(self, base: str) -> str:
        return self.names.fresh(base)

    def mark(self, prog: Program, ann: Annotated, what: str) -> Program:
        self.provenance[id(prog)] = ann.path + (what,)
        self.keep.append(prog)
        return prog

    # -- coercions -----------------------------------------------------------
    def roll(self, fix: ty.ProgType) -> Program:
        if self.typed:
            return pr.Roll(fix)
        return pr.identity(self.fresh("a"))

    def unroll(self, fix: ty.ProgType) -> Program:
        if self.typed:
            return pr.Unroll(fix)
        return pr.identity(self.fresh("a"))

    # -- main dispatch --------------------------------------------------------
    def ex(self, ann: Annotated) -> Program:
        if not sy.non_harrop(ann.formula):
            return pr.NIL
        d = ann.node
        name = type(d).__name__.lower()
        fn = getattr(self, f"ex_{name}", None)
        if fn is None:
            raise ExtractError(f"no extraction for {name}")
        return self.mark(fn(ann), ann, name)

    def ex_assume(self, ann):
        return PVar(ann.node.label)

    def ex_usethm(self, ann):
        return Ref(ann.node.name)

    def ex_cong(self, ann):
        return self.ex(ann.children[0])

    def ex_andi(self, ann):
        a, b = ann.children
        if is_harrop(b.formula):
            return self.ex(a)
        if is_harrop(a.formula):
            return self.ex(b)
        return pr.pair(self.ex(a), self.ex(b))

    def ex_andl(self, ann):
        (a,) = ann.children
        if is_harrop(a.formula.right):
            return self.ex(a)
        return pr.proj_left(self.ex(a), self.fresh("a"), self.fresh("b"))

    def ex_andr(self, ann):
        (a,) = ann.children
        if is_harrop(a.formula.left):
            return self.ex(a)
        return pr.proj_right(self.ex(a), self.fresh("a"), self.fresh("b"))

    def ex_orl(self, ann):
        return pr.left(self.ex(ann.children[0]))

    def ex_orr(self, ann):
        return pr.right(self.ex(ann.children[0]))

    def ex_ore(self, ann):
        d, e, f = ann.children
        disj = d.formula
        av, bv = self.fresh("a"), self.fresh("b")
        eb = self.ex(e)
        fb = self.ex(f)
        lbody = App(eb, PVar(av)) if sy.non_harrop(disj.left) else eb
        rbody = App(fb, PVar(bv)) if sy.non_harrop(disj.right) else fb
        return Case(self.ex(d), (Clause("left", (av,), lbody),
                                 Clause("right", (bv,), rbody)))

    def ex_impi(self, ann):
        (b,) = ann.children
        if is_harrop(ann.node.prem):
            return self.ex(b)
        return Lam(ann.node.label, self.ex(b))

    def ex_impe(self, ann):
        d, e = ann.children
        if is_harrop(d.formula.prem):
            return self.ex(d)
        return App(self.ex(d), self.ex(e))

    def ex_alli(self, ann):
        return self.ex(ann.children[0])

    def ex_alle(self, ann):
        return self.ex(ann.children[0])

    def ex_exi(self, ann):
        return self.ex(ann.children[0])

    def ex_exe(self, ann):
        d, e = ann.children
        a_form = e.formula.body.prem
        if is_harrop(a_form):
            return self.ex(e)
        return App(self.ex(e), self.ex(d))

    def ex_cl(self, ann):
        return self.roll(ty.tau(sy.Mu(ann.node.op)))

    def ex_cocl(self, ann):
        return self.unroll(ty.tau(sy.Nu(ann.node.op)))

    # -- induction and coinduction --------------------------------------------
    def _concl_pred_type(self, p: sy.Predicate) -> ty.ProgType:
        return ty.tau(p)

    def ex_ind(self, ann):
        op, p = ann.node.op, ann.node.pred
        s = self.ex(ann.children[0])
        fv, cv = self.fresh("f"), self.fresh("c")
        if not is_harrop(op):
            m = gen_mon(op, self.names, self.typed,
                        target_in=ty.tau(sy.Mu(op)),
                        target_out=self._concl_pred_type(p))
            fix = ty.tau(sy.Mu(op))
            if self.typed:
                body = Lam(cv, App(s, App(App(m, PVar(fv)),
                                          App(self.unroll(fix), PVar(cv)))))
            else:
                body = Lam(cv, App(s, App(App(m, PVar(fv)), PVar(cv))))
            return Rec(Lam(fv, body))
        if op.var.name not in {v.name for v in sy.free_pred_vars(op.body)}:
            return s  # constant Harrop operator: the premise realizer suffices
        _, m = gen_mon_insert(op, self.names, self.typed)
        return Rec(Lam(fv, App(s, App(m, PVar(fv)))))

    def ex_coind(self, ann):
        op, p = ann.node.op, ann.node.pred
        s = self.ex(ann.children[0])
        fv, cv = self.fresh("f"), self.fresh("c")
        fix = ty.tau(sy.Nu(op))
        if sy.non_harrop(p):
            m = gen_mon(op, self.names, self.typed,
                        target_in=ty.tau(p), target_out=fix)
            inner = App(App(m, PVar(fv)), App(s, PVar(cv)))
            if self.typed:
                inner = App(self.roll(fix), inner)
            return Rec(Lam(fv, Lam(cv, inner)))
        kind, m = gen_mon_insert(op, self.names, self.typed)
        if kind != _FN:
            raise ExtractError("coinduction witness for a Harrop invariant "
                               "must map collapsed realizers")
        inner = App(App(m, PVar(fv)), s)
        if self.typed:
            inner = App(self.roll(fix), inner)
        return Rec(Lam(fv, inner))

    def ex_si(self, ann):
        raise ExtractError(
            "strong induction with a computational goal has no presented "
            "realizer; use plain or half-strong induction")

    def ex_hsi(self, ann):
        op = ann.node.op
        if not is_harrop(op):
            raise ExtractError(
                "half-strong induction is only realized for a Harrop operator")
        if op.var.name not in {v.name for v in sy.free_pred_vars(op.body)}:
            raise ExtractError(
                "half-strong induction over a constant operator is not realized")
        s = self.ex(ann.children[0])
        fv = self.fresh("f")
        _, m = gen_mon_insert(op, self.names, self.typed)
        return Rec(Lam(fv, App(s, App(m, PVar(fv)))))

    def ex_hsci(self, ann):
        op, p = ann.node.op, ann.node.pred
        if is_harrop(p):
            raise ExtractError(
                "half-strong coinduction with a Harrop invariant is not realized")
        s = self.ex(ann.children[0])
        fix = ty.tau(sy.Nu(op))
        m = gen_mon(op, self.names, self.typed,
                    target_in=ty.tau(p), target_out=fix)
        fv, cv, sv, av, bv = (self.fresh("f"), self.fresh("c"), self.fresh("s"),
                              self.fresh("a"), self.fresh("b"))
        lfun = App(m, PVar(fv))
        if self.typed:
            lfun = pr.compose(self.roll(fix), lfun, self.fresh("c"))
        branch = pr.case_sum(lfun, pr.identity(self.fresh("i")), sv, av, bv)
        return Rec(Lam(fv, Lam(cv, App(branch, App(s, PVar(cv))))))

    def ex_sci(self, ann):
        op, p = ann.node.op, ann.node.pred
        if is_harrop(p):
            raise ExtractError(
                "strong coinduction with a Harrop invariant is not realized")
        s = self.ex(ann.children[0])
        fix = ty.tau(sy.Nu(op))
        m = gen_mon(op, self.names, self.typed,
                    target_in=ty.Sum(ty.tau(p), fix), target_out=fix)
        fv, cv, sv, av, bv = (self.fresh("f"), self.fresh("c"), self.fresh("s"),
                              self.fresh("a"), self.fresh("b"))
        split = pr.case_sum(PVar(fv), pr.identity(self.fresh("i")), sv, av, bv)
        inner = App(App(m, split), App(s, PVar(cv)))
        if self.typed:
            inner = App(self.roll(fix), inner)
        return Rec(Lam(fv, Lam(cv, inner)))

    # -- derived rules ---------------------------------------------------------
    def ex_wfi(self, ann):
        node = ann.node
        s = self.ex(ann.children[0])
        prec_h = is_harrop(node.prec)
        dom_h = is_harrop(node.dom)
        fv = self.fresh("f")
        if not prec_h and not dom_h:
            a, a2, b = self.fresh("a"), self.fresh("a"), self.fresh("b")
            return Rec(Lam(fv, Lam(a, App(App(s, PVar(a)),
                                          Lam(a2, Lam(b, App(PVar(fv), PVar(a2))))))))
        if prec_h and not dom_h:
            a = self.fresh("a")
            return Rec(Lam(fv, Lam(a, App(App(s, PVar(a)), PVar(fv)))))
        if not prec_h and dom_h:
            b = self.fresh("b")
            return Rec(Lam(fv, App(s, Lam(b, PVar(fv)))))
        return Rec(s)

    def ex_aiq(self, ann):
        return Rec(self.ex(ann.children[0]))

    def ex_aibq(self, ann):
        node = ann.node
        if is_harrop(node.dom) or is_harrop(node.pred):
            raise ExtractError(
                "Archimedean induction with invariant is only realized for "
                "computational domain and goal predicates")
        s = self.ex(ann.children[0])
        av, bv, cv, rv, b2, dv = (self.fresh("a"), self.fresh("b"),
                                  self.fresh("c"), self.fresh("r"),
                                  self.fresh("b"), self.fresh("d"))
        inner = Case(PVar(rv), (Clause("pair", (b2, dv),
                                       App(PVar(dv), App(PVar(av), PVar(b2)))),))
        body = Case(App(s, PVar(bv)), (Clause("left", (cv,), PVar(cv)),
                                       Clause("right", (rv,), inner)))
        return Rec(Lam(av, Lam(bv, body)))


def extract_annotated(ann: Annotated, sig: sy.Signature, typed: bool = False
                      ) -> tuple[Program, dict[int, tuple[str, ...]]]:
    ext = _Extractor(sig, typed)
    prog = ext.ex(ann)
    ext.keep.append(prog)
    return prog, ext.provenance


def extract(ctx: Mapping[str, sy.Formula], d: kn.Derivation, sig: sy.Signature,
            thms: Mapping[str, sy.Formula] | None = None) -> Program:
    """Plain extraction (no coercions) from a checked derivation."""
    ann = kn.annotate(ctx, d, sig, thms)
    prog, _ = extract_annotated(ann, sig, typed=False)
    return prog


def extract_typed(ctx: Mapping[str, sy.Formula], d: kn.Derivation,
                  sig: sy.Signature,
                  thms: Mapping[str, sy.Formula] | None = None) -> ExtractionResult:
    ann = kn.annotate(ctx, d, sig, thms)
    raw, _ = extract_annotated(ann, sig, typed=False)
    typed_prog, prov = extract_annotated(ann, sig, typed=True)
    res = ExtractionResult(program=raw, type=ty.tau(ann.formula),
                           typed_program=typed_prog, provenance=prov)
    return res


# ---------------------------------------------------------------------------
# Simplifier

SIMPLIFY_PASSES = 400
SIMPLIFY_SIZE_CAP = 50_000


def simplify(m: Program) -> Program:
    """Beta, case-of-known-constructor, case commuting into strict contexts,
    and the two-valued case-eta collapse, iterated to a fixed point under a
    pass and size budget.  Identity on irreducible programs."""
    for _ in range(SIMPLIFY_PASSES):
        m2 = _simp(m)
        if m2 == m:
            return m
        if pr.size(m2) > SIMPLIFY_SIZE_CAP:
            return m
        m = m2
    return m


def _simp(m: Program) -> Program:
    # children first
    if isinstance(m, Con):
        m = Con(m.tag, tuple(_simp(a) for a in m.args))
    elif isinstance(m, Case):
        m = Case(_simp(m.scrut), tuple(Clause(c.tag, c.vars, _simp(c.body))
                                       for c in m.clauses))
    elif isinstance(m, Lam):
        m = Lam(m.var, _simp(m.body))
    elif isinstance(m, App):
        m = App(_simp(m.fun), _simp(m.arg))
    elif isinstance(m, Rec):
        m = Rec(_simp(m.body))
    # then the root, repeatedly
    while True:
        m2 = _root_step(m)
        if m2 is None:
            return m
        m = m2


def _root_step(m: Program) -> Program | None:
    if isinstance(m, App):
        if isinstance(m.fun, Lam):
            return pr.subst(m.fun.body, m.fun.var, m.arg)
        # f (case M of {..}) -> case M of {.. -> f ..} for syntactically
        # strict f: a case-dispatching abstraction
        if (isinstance(m.arg, Case) and _is_strict_fun(m.fun)
                and not _is_projection(m.arg)):
            fv = pr.free_pvars(m.fun)
            cls = []
            for c in m.arg.clauses:
                c = _rename_clause(c, fv)
                cls.append(Clause(c.tag, c.vars, App(m.fun, c.body)))
            return Case(m.arg.scrut, tuple(cls))
        return None
    if isinstance(m, Case):
        s = m.scrut
        if isinstance(s, Con):
            for c in m.clauses:
                if c.tag == s.tag:
                    body = c.body
                    for v, a in zip(c.vars, s.args):
                        body = pr.subst(body, v, a)
                    return body
            return None
        if isinstance(s, Case) and not _is_projection(s):
            fv = frozenset()
            for c in m.clauses:
                fv |= pr.free_pvars(Case(pr.NIL, (c,)))
            cls = []
            for c in s.clauses:
                c = _rename_clause(c, fv)
                cls.append(Clause(c.tag, c.vars, Case(c.body, m.clauses)))
            return Case(s.scrut, tuple(cls))
        if _is_bool_eta(m):
            return s
        return None
    return None


def _is_strict_fun(f: Program) -> bool:
    return (isinstance(f, Lam) and isinstance(f.body, Case)
            and isinstance(f.body.scrut, PVar) and f.body.scrut.name == f.var)


def _is_projection(c: Case) -> bool:
    """A pair destructor (the paper's left/right projections): kept atomic so
    simplified output matches the displayed equations."""
    return (len(c.clauses) == 1 and c.clauses[0].tag == "pair"
            and isinstance(c.clauses[0].body, PVar)
            and c.clauses[0].body.name in c.clauses[0].vars)


def _is_bool_eta(m: Case) -> bool:
    """case M of {Left(_) -> Left(Nil); Right(_) -> Right(Nil)}  ==  M
    on total two-valued data (the only shape extraction produces here).
    Restricted to computed scrutinees: dispatches over pattern variables are
    the displayed digit tables and stay."""
    if isinstance(m.scrut, PVar):
        return False
    if len(m.clauses) != 2:
        return False
    seen = {}
    for c in m.clauses:
        seen[c.tag] = c.body
    if set(seen) != {"left", "right"}:
        return False
    return (seen["left"] == pr.left(pr.NIL)
            and seen["right"] == pr.right(pr.NIL))


def _rename_clause(c: Clause, avoid: frozenset[str]) -> Clause:
    vs, body = list(c.vars), c.body
    for i, v in enumerate(vs):
        if v in avoid:
            nv = pr._fresh(v, avoid | pr.free_pvars(body) | frozenset(vs))
            body = pr.subst(body, v, PVar(nv))
            vs[i] = nv
    return Clause(c.tag, tuple(vs), body)
