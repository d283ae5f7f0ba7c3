"""Untyped target-language terms: constructors, case, lambda, application,
general recursion and bottom.

`Ref` is a named reference to a script-level definition (a hand-written
program or an earlier theorem's extraction); the runtime inlines references
before evaluation, printers and golden comparisons keep them symbolic.
`Roll`/`Unroll` are identity coercions recording where a fixed-point type is
folded; only typed extraction emits them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

CONSTRUCTORS = {"nil": 0, "left": 1, "right": 1, "pair": 2}


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class Con:
    """Constructor application: nil, left(M), right(M), pair(M,N)."""
    tag: str
    args: tuple["Program", ...]

    def __post_init__(self):
        if self.tag not in CONSTRUCTORS or CONSTRUCTORS[self.tag] != len(self.args):
            raise ValueError(f"bad constructor {self.tag}/{len(self.args)}")


@dataclass(frozen=True)
class Clause:
    tag: str
    vars: tuple[str, ...]
    body: "Program"

    def __post_init__(self):
        if self.tag not in CONSTRUCTORS or CONSTRUCTORS[self.tag] != len(self.vars):
            raise ValueError(f"bad pattern {self.tag}/{len(self.vars)}")


@dataclass(frozen=True)
class Case:
    scrut: "Program"
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        tags = [c.tag for c in self.clauses]
        if len(set(tags)) != len(tags):
            raise ValueError("duplicate constructor in case")


@dataclass(frozen=True)
class Lam:
    var: str
    body: "Program"


@dataclass(frozen=True)
class App:
    fun: "Program"
    arg: "Program"


@dataclass(frozen=True)
class Rec:
    body: "Program"


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Roll:
    """Identity coercion into a fixed-point type (typed extraction only)."""
    fix: object  # ProgType, kept loose to avoid an import cycle


@dataclass(frozen=True)
class Unroll:
    fix: object


Program = Union[PVar, Con, Case, Lam, App, Rec, Bot, Ref, Roll, Unroll]

NIL = Con("nil", ())


def left(m: Program) -> Program:
    return Con("left", (m,))


def right(m: Program) -> Program:
    return Con("right", (m,))


def pair(m: Program, n: Program) -> Program:
    return Con("pair", (m, n))


# digit encodings (realizers of the 2- and 3-element types)
L2 = left(NIL)
R2 = right(NIL)
SD_MINUS1 = left(left(NIL))
SD_ONE = left(right(NIL))
SD_ZERO = right(NIL)


def proj_left(m: Program, a: str = "a", b: str = "b") -> Program:
    return Case(m, (Clause("pair", (a, b), PVar(a)),))


def proj_right(m: Program, a: str = "a", b: str = "b") -> Program:
    return Case(m, (Clause("pair", (a, b), PVar(b)),))


def compose(m: Program, n: Program, v: str) -> Program:
    """m . n  as  lam v. m (n v)"""
    return Lam(v, App(m, App(n, PVar(v))))


def case_sum(f: Program, g: Program, v: str, a: str, b: str) -> Program:
    """[f + g]  as  lam v. case v of {left(a) -> f a; right(b) -> g b}"""
    return Lam(v, Case(PVar(v), (Clause("left", (a,), App(f, PVar(a))),
                                 Clause("right", (b,), App(g, PVar(b))))))


def identity(v: str = "a") -> Program:
    return Lam(v, PVar(v))


# ---------------------------------------------------------------------------
# Variables / substitution / alpha equality

def free_pvars(m: Program) -> frozenset[str]:
    if isinstance(m, PVar):
        return frozenset((m.name,))
    if isinstance(m, Con):
        out = frozenset()
        for a in m.args:
            out |= free_pvars(a)
        return out
    if isinstance(m, Case):
        out = free_pvars(m.scrut)
        for c in m.clauses:
            out |= free_pvars(c.body) - frozenset(c.vars)
        return out
    if isinstance(m, Lam):
        return free_pvars(m.body) - frozenset((m.var,))
    if isinstance(m, App):
        return free_pvars(m.fun) | free_pvars(m.arg)
    if isinstance(m, Rec):
        return free_pvars(m.body)
    return frozenset()


def is_closed(m: Program) -> bool:
    return not free_pvars(m)


def _fresh(base: str, avoid: frozenset[str]) -> str:
    if base not in avoid:
        return base
    root = base.rstrip("0123456789")
    i = 1
    while f"{root}{i}" in avoid:
        i += 1
    return f"{root}{i}"


def subst(m: Program, name: str, val: Program) -> Program:
    """Capture-avoiding substitution of `val` for the free variable `name`."""
    if name not in free_pvars(m):
        return m
    val_fv = free_pvars(val)
    return _subst(m, name, val, val_fv)


def _subst(m, name, val, val_fv):
    if isinstance(m, PVar):
        return val if m.name == name else m
    if isinstance(m, Con):
        return Con(m.tag, tuple(_subst(a, name, val, val_fv) for a in m.args))
    if isinstance(m, App):
        return App(_subst(m.fun, name, val, val_fv), _subst(m.arg, name, val, val_fv))
    if isinstance(m, Rec):
        return Rec(_subst(m.body, name, val, val_fv))
    if isinstance(m, Lam):
        if m.var == name:
            return m
        if m.var in val_fv and name in free_pvars(m.body):
            nv = _fresh(m.var, val_fv | free_pvars(m.body))
            body = _subst(m.body, m.var, PVar(nv), frozenset((nv,)))
            return Lam(nv, _subst(body, name, val, val_fv))
        return Lam(m.var, _subst(m.body, name, val, val_fv))
    if isinstance(m, Case):
        scrut = _subst(m.scrut, name, val, val_fv)
        cls = []
        for c in m.clauses:
            if name in c.vars:
                cls.append(c)
                continue
            if name not in free_pvars(c.body):
                cls.append(c)
                continue
            vs, body = list(c.vars), c.body
            for i, v in enumerate(vs):
                if v in val_fv:
                    nv = _fresh(v, val_fv | free_pvars(body) | frozenset(vs))
                    body = _subst(body, v, PVar(nv), frozenset((nv,)))
                    vs[i] = nv
            cls.append(Clause(c.tag, tuple(vs), _subst(body, name, val, val_fv)))
        return Case(scrut, tuple(cls))
    return m  # Bot, Ref, Roll, Unroll


def prog_alpha_eq(m1: Program, m2: Program) -> bool:
    return _paeq(m1, m2, {}, {})


def _paeq(m1, m2, env1, env2) -> bool:
    if type(m1) is not type(m2):
        return False
    if isinstance(m1, PVar):
        return env1.get(m1.name, m1.name) == env2.get(m2.name, m2.name)
    if isinstance(m1, Con):
        return m1.tag == m2.tag and all(
            _paeq(a, b, env1, env2) for a, b in zip(m1.args, m2.args))
    if isinstance(m1, App):
        return _paeq(m1.fun, m2.fun, env1, env2) and _paeq(m1.arg, m2.arg, env1, env2)
    if isinstance(m1, Rec):
        return _paeq(m1.body, m2.body, env1, env2)
    if isinstance(m1, Lam):
        fresh = f"#{len(env1)}"
        return _paeq(m1.body, m2.body, {**env1, m1.var: fresh}, {**env2, m2.var: fresh})
    if isinstance(m1, Case):
        if not _paeq(m1.scrut, m2.scrut, env1, env2):
            return False
        if len(m1.clauses) != len(m2.clauses):
            return False
        c2 = {c.tag: c for c in m2.clauses}
        for c in m1.clauses:
            if c.tag not in c2:
                return False
            d = c2[c.tag]
            e1, e2 = dict(env1), dict(env2)
            for i, (v, w) in enumerate(zip(c.vars, d.vars)):
                fresh = f"#{len(env1)}.{i}"
                e1[v] = fresh
                e2[w] = fresh
            if not _paeq(c.body, d.body, e1, e2):
                return False
        return True
    if isinstance(m1, (Roll, Unroll)):
        return m1.fix == m2.fix
    return m1 == m2  # Bot, Ref


def resolve_refs(m: Program, env: Mapping[str, Program]) -> Program:
    """Inline named references (recursively) for evaluation."""
    if isinstance(m, Ref):
        if m.name not in env:
            raise KeyError(f"unknown program reference {m.name}")
        return resolve_refs(env[m.name], env)
    if isinstance(m, Con):
        return Con(m.tag, tuple(resolve_refs(a, env) for a in m.args))
    if isinstance(m, Case):
        return Case(resolve_refs(m.scrut, env),
                    tuple(Clause(c.tag, c.vars, resolve_refs(c.body, env))
                          for c in m.clauses))
    if isinstance(m, Lam):
        return Lam(m.var, resolve_refs(m.body, env))
    if isinstance(m, App):
        return App(resolve_refs(m.fun, env), resolve_refs(m.arg, env))
    if isinstance(m, Rec):
        return Rec(resolve_refs(m.body, env))
    if isinstance(m, (Roll, Unroll)):
        return identity("a")
    return m


def strip_coercions(m: Program) -> Program:
    """Replace Roll/Unroll markers by identities (for running typed output)."""
    if isinstance(m, (Roll, Unroll)):
        return identity("a")
    if isinstance(m, Con):
        return Con(m.tag, tuple(strip_coercions(a) for a in m.args))
    if isinstance(m, Case):
        return Case(strip_coercions(m.scrut),
                    tuple(Clause(c.tag, c.vars, strip_coercions(c.body))
                          for c in m.clauses))
    if isinstance(m, Lam):
        return Lam(m.var, strip_coercions(m.body))
    if isinstance(m, App):
        return App(strip_coercions(m.fun), strip_coercions(m.arg))
    if isinstance(m, Rec):
        return Rec(strip_coercions(m.body))
    return m


# ---------------------------------------------------------------------------
# Printing

def print_program(m: Program) -> str:
    if isinstance(m, PVar):
        return m.name
    if isinstance(m, Con):
        if not m.args:
            return m.tag
        return "(%s %s)" % (m.tag, " ".join(print_program(a) for a in m.args))
    if isinstance(m, Case):
        cls = []
        for c in m.clauses:
            if c.vars:
                pat = "(%s %s)" % (c.tag, " ".join(c.vars))
            else:
                pat = c.tag
            cls.append(f"({pat} {print_program(c.body)})")
        return "(case %s %s)" % (print_program(m.scrut), " ".join(cls))
    if isinstance(m, Lam):
        return f"(lam {m.var} {print_program(m.body)})"
    if isinstance(m, App):
        return f"({print_program(m.fun)} {print_program(m.arg)})"
    if isinstance(m, Rec):
        return f"(rec {print_program(m.body)})"
    if isinstance(m, Bot):
        return "bot"
    if isinstance(m, Ref):
        return m.name
    if isinstance(m, Roll):
        return f"(roll@ {m.fix!s})"
    if isinstance(m, Unroll):
        return f"(unroll@ {m.fix!s})"
    raise TypeError(m)


def size(m: Program) -> int:
    if isinstance(m, Con):
        return 1 + sum(size(a) for a in m.args)
    if isinstance(m, Case):
        return 1 + size(m.scrut) + sum(size(c.body) for c in m.clauses)
    if isinstance(m, Lam):
        return 1 + size(m.body)
    if isinstance(m, App):
        return 1 + size(m.fun) + size(m.arg)
    if isinstance(m, Rec):
        return 1 + size(m.body)
    return 1
