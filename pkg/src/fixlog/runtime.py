"""Operational semantics: bigstep evaluation to weak head values, leftmost-
outermost smallstep, the parallel step that also reduces under constructors,
finite data approximations, and the data order.

Evaluation is by substitution exactly as the rules state; no environments and
no sharing, so step counts are deterministic.  All inputs must be closed and
reference-free (see programs.resolve_refs / strip_coercions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .programs import (
    App, Bot, Case, Clause, Con, Lam, Program, PVar, Rec, Ref, Roll, Unroll,
)


def subst(body: Program, name: str, val: Program) -> Program:
    """Substitution for evaluation: `val` is always closed (reduction only
    ever substitutes subterms of a closed program), so no capture check is
    needed; unchanged subtrees are returned as-is (shared)."""
    t = type(body)
    if t is PVar:
        return val if body.name == name else body
    if t is Con:
        args = tuple(subst(a, name, val) for a in body.args)
        if all(a is b for a, b in zip(args, body.args)):
            return body
        return Con(body.tag, args)
    if t is App:
        f = subst(body.fun, name, val)
        a = subst(body.arg, name, val)
        if f is body.fun and a is body.arg:
            return body
        return App(f, a)
    if t is Rec:
        b = subst(body.body, name, val)
        return body if b is body.body else Rec(b)
    if t is Lam:
        if body.var == name:
            return body
        b = subst(body.body, name, val)
        return body if b is body.body else Lam(body.var, b)
    if t is Case:
        s = subst(body.scrut, name, val)
        cls = []
        changed = s is not body.scrut
        for c in body.clauses:
            if name in c.vars:
                cls.append(c)
                continue
            b = subst(c.body, name, val)
            if b is c.body:
                cls.append(c)
            else:
                cls.append(Clause(c.tag, c.vars, b))
                changed = True
        if not changed:
            return body
        return Case(s, tuple(cls))
    return body  # Bot (Ref/Roll/Unroll are rejected before evaluation)


# ---------------------------------------------------------------------------
# Data: constructor trees with bottom leaves

@dataclass(frozen=True)
class DBot:
    def __str__(self) -> str:
        return "⊥"


@dataclass(frozen=True)
class DCon:
    tag: str
    args: tuple["Data", ...]

    def __str__(self) -> str:
        return print_data(self)


Data = Union[DBot, DCon]
BOT = DBot()
D_NIL = DCon("nil", ())


def data_leq(d1: Data, d2: Data) -> bool:
    """The domain order: bottom below everything, constructors componentwise."""
    todo = [(d1, d2)]
    while todo:
        a, b = todo.pop()
        if isinstance(a, DBot):
            continue
        if isinstance(b, DBot) or a.tag != b.tag:
            return False
        todo.extend(zip(a.args, b.args))
    return True


def data_from_ints(cells: list[int | None], tail: Data = BOT) -> Data:
    """Build a stream datum from digit codes: -1/1/0 signed digits, 2/3 for
    L/R, None for bottom cells."""
    enc = {-1: DCon("left", (DCon("left", (D_NIL,)),)),
           1: DCon("left", (DCon("right", (D_NIL,)),)),
           0: DCon("right", (D_NIL,)),
           2: DCon("left", (D_NIL,)),
           3: DCon("right", (D_NIL,))}
    out = tail
    for c in reversed(cells):
        cell = BOT if c is None else enc[c]
        out = DCon("pair", (cell, out))
    return out


_ALIASES = {
    DCon("left", (D_NIL,)): "L",
    DCon("right", (D_NIL,)): "R",
    DCon("left", (DCon("left", (D_NIL,)),)): "-1",
    DCon("left", (DCon("right", (D_NIL,)),)): "1",
}
_TAGNAME = {"nil": "Nil", "left": "Left", "right": "Right", "pair": "Pair"}


def print_data(d: Data, stream_sugar: bool = True, max_cells: int = 32) -> str:
    """Constructor term, with `:`-separated cells for right-nested pair
    spines and L/R/-1/1 digit aliases."""
    if stream_sugar and isinstance(d, DCon) and d.tag == "pair":
        cells = []
        cur: Data = d
        while isinstance(cur, DCon) and cur.tag == "pair" and len(cells) < max_cells:
            cells.append(_cell_str(cur.args[0]))
            cur = cur.args[1]
        if len(cells) >= max_cells:
            cells.append("…")
        else:
            cells.append(_cell_str(cur))
        return ":".join(cells)
    return _plain_data(d)


def _cell_str(d: Data) -> str:
    if isinstance(d, DCon) and d in _ALIASES:
        return _ALIASES[d]
    return _plain_data(d)


def _plain_data(d: Data) -> str:
    if isinstance(d, DBot):
        return "⊥"
    if not d.args:
        return _TAGNAME[d.tag]
    return "%s(%s)" % (_TAGNAME[d.tag], ", ".join(_plain_data(a) for a in d.args))


# ---------------------------------------------------------------------------
# Values and bigstep evaluation

def is_value(m: Program) -> bool:
    """A value begins with a constructor or is a lambda abstraction."""
    return isinstance(m, (Con, Lam))


@dataclass(frozen=True)
class Value:
    prog: Program


@dataclass(frozen=True)
class Diverged:
    pass


@dataclass(frozen=True)
class Stuck:
    pass


BigstepResult = Union[Value, Diverged, Stuck]

DEFAULT_BIGSTEP_FUEL = 10**5
DEFAULT_APPROX_STEPS = 10**4


def _assert_runnable(m: Program) -> None:
    if isinstance(m, (Ref, Roll, Unroll)):
        raise ValueError("resolve references/coercions before evaluation")


class _Fuel:
    __slots__ = ("n",)

    def __init__(self, n: int):
        self.n = n

    def spend(self) -> bool:
        self.n -= 1
        return self.n >= 0


def bigstep(m: Program, fuel: int = DEFAULT_BIGSTEP_FUEL) -> BigstepResult:
    """Evaluate a closed program to a weak head value.  Fuel counts bigstep
    rule applications."""
    return _bigstep(m, _Fuel(fuel))


def _bigstep(m: Program, fuel: _Fuel) -> BigstepResult:
    stack: list = []
    cur = m
    while True:
        if not fuel.spend():
            return Diverged()
        if isinstance(cur, Con) or isinstance(cur, Lam):
            if not stack:
                return Value(cur)
            frame = stack.pop()
            if frame[0] == "case":
                clauses = frame[1]
                if not isinstance(cur, Con):
                    return Stuck()
                for c in clauses:
                    if c.tag == cur.tag:
                        body = c.body
                        for v, a in zip(c.vars, cur.args):
                            body = subst(body, v, a)
                        cur = body
                        break
                else:
                    return Stuck()
            else:  # app
                if not isinstance(cur, Lam):
                    return Stuck()
                cur = subst(cur.body, cur.var, frame[1])
            continue
        if isinstance(cur, Case):
            stack.append(("case", cur.clauses))
            cur = cur.scrut
            continue
        if isinstance(cur, App):
            _assert_runnable(cur.fun)
            stack.append(("app", cur.arg))
            cur = cur.fun
            continue
        if isinstance(cur, Rec):
            cur = App(cur.body, cur)
            continue
        if isinstance(cur, Bot):
            return Stuck()
        if isinstance(cur, PVar):
            raise ValueError(f"open program: free variable {cur.name}")
        _assert_runnable(cur)
        raise TypeError(cur)


# ---------------------------------------------------------------------------
# Smallstep

@dataclass(frozen=True)
class Step:
    prog: Program


SmallstepResult = Union[Step, Value, Stuck]


def smallstep(m: Program) -> SmallstepResult:
    """One leftmost-outermost step of a closed program."""
    frames: list = []
    cur = m

    def rebuild(inner: Program) -> Program:
        for f in reversed(frames):
            if f[0] == "case":
                inner = Case(inner, f[1])
            else:
                inner = App(inner, f[1])
        return inner

    while True:
        if isinstance(cur, Case):
            s = cur.scrut
            if isinstance(s, Con):
                for c in cur.clauses:
                    if c.tag == s.tag:
                        body = c.body
                        for v, a in zip(c.vars, s.args):
                            body = subst(body, v, a)
                        return Step(rebuild(body))
                return Stuck()
            if isinstance(s, Lam):
                return Stuck()
            frames.append(("case", cur.clauses))
            cur = s
            continue
        if isinstance(cur, App):
            f = cur.fun
            if isinstance(f, Lam):
                return Step(rebuild(subst(f.body, f.var, cur.arg)))
            if isinstance(f, Con):
                return Stuck()
            frames.append(("app", cur.arg))
            cur = f
            continue
        if isinstance(cur, Rec):
            return Step(rebuild(App(cur.body, cur)))
        if isinstance(cur, Bot):
            return Stuck()
        if isinstance(cur, (Con, Lam)):
            if frames:
                raise AssertionError("descended into a value")
            return Value(cur)
        if isinstance(cur, PVar):
            raise ValueError(f"open program: free variable {cur.name}")
        _assert_runnable(cur)
        raise TypeError(cur)


def parallel_step(m: Program) -> Program:
    """One parallel step: a smallstep if one applies, otherwise componentwise
    under a constructor, otherwise the identity."""
    r = smallstep(m)
    if isinstance(r, Step):
        return r.prog
    if isinstance(m, Con):
        return Con(m.tag, tuple(parallel_step(a) for a in m.args))
    return m


class _Machine:
    """Leftmost-outermost reduction machine for one frontier leaf, in closure
    form: the focus is a term with an environment mapping variables to
    closures, frames persist between steps.  Each `advance` fires exactly one
    smallstep rule (environment lookups and context descent are free), so the
    round counts coincide with the substitution semantics while one step
    costs amortized constant work."""

    __slots__ = ("term", "env", "frames", "state")

    def __init__(self, term: Program, env: dict):
        self.term = term
        self.env = env
        self.frames: list = []
        self.state = "run"  # run | con | done

    def settle(self) -> None:
        """Classify an initial value leaf without consuming a step."""
        if type(self.term) is Lam:
            self.state = "done"

    def advance(self) -> None:
        term, env, frames = self.term, self.env, self.frames
        while True:
            t = type(term)
            if t is PVar:
                try:
                    term, env = env[term.name]
                except KeyError:
                    raise ValueError(f"open program: free variable {term.name}")
                continue
            if t is Case:
                s = term.scrut
                if type(s) is Con:
                    for c in term.clauses:
                        if c.tag == s.tag:
                            if c.vars:
                                env2 = dict(env)
                                for v, a in zip(c.vars, s.args):
                                    env2[v] = (a, env)
                            else:
                                env2 = env
                            return self._fired(c.body, env2, frames)
                    return self._finish()
                frames.append((0, term.clauses, env))
                term = s
                continue
            if t is App:
                f = term.fun
                if type(f) is Lam:
                    return self._fired(f.body, {**env, f.var: (term.arg, env)},
                                       frames)
                frames.append((1, term.arg, env))
                term = f
                continue
            if t is Rec:
                # rec M  ~>  M (rec M): one step, then descend into M
                frames.append((1, term, env))
                return self._fired(term.body, env, frames)
            if t is Con or t is Lam:
                if not frames:
                    self.term, self.env = term, env
                    self.state = "con" if t is Con else "done"
                    return
                frame = frames.pop()
                if frame[0] == 0:  # case frame
                    if t is Con:
                        for c in frame[1]:
                            if c.tag == term.tag:
                                if c.vars:
                                    env2 = dict(frame[2])
                                    for v, a in zip(c.vars, term.args):
                                        env2[v] = (a, env)
                                else:
                                    env2 = frame[2]
                                return self._fired(c.body, env2, frames)
                    return self._finish()
                if t is Lam:  # app frame
                    return self._fired(
                        term.body, {**env, term.var: (frame[1], frame[2])},
                        frames)
                return self._finish()
            if t is Bot:
                return self._finish()
            _assert_runnable(term)
            raise TypeError(term)

    def _fired(self, term: Program, env: dict, frames: list) -> None:
        while type(term) is PVar:  # resolve to keep value detection simple
            term, env = env[term.name]
        self.term = term
        self.env = env
        self.frames = frames
        if not frames:
            t = type(term)
            if t is Con:
                self.state = "con"
                return
            if t is Lam:
                self.state = "done"
                return
        self.state = "run"

    def _finish(self) -> None:
        self.state = "done"  # stuck: the identity forever


class _Frontier:
    """Incremental driver for iterated parallel steps.

    Constructors are permanent once they appear at an active position, and
    the parallel step thereafter acts on their arguments independently; the
    driver keeps the resolved constructor skeleton and advances one reduction
    machine per active leaf.  Agrees with iterating parallel_step (tested as
    a property)."""

    __slots__ = ("skeleton", "leaves")

    def __init__(self, m: Program):
        self.leaves: list[list] = []
        self.skeleton = _skel_node(m, {}, self.leaves)

    def active(self) -> bool:
        return any(n[1].state == "run" for n in self.leaves)

    def round(self) -> bool:
        """One parallel round; True iff the constructor skeleton grew."""
        new_leaves: list[list] = []
        grew = False
        for node in self.leaves:
            mach: _Machine = node[1]
            if mach.state == "run":
                mach.advance()
            if mach.state == "con":
                # joins the skeleton; arguments step from the next round on
                fresh: list[list] = []
                children = [_skel_node(a, mach.env, fresh)
                            for a in mach.term.args]
                node[0] = "con"
                node[1] = mach.term.tag
                node[2] = children
                new_leaves.extend(fresh)
                grew = True
            else:
                new_leaves.append(node)
        self.leaves = new_leaves
        return grew

    def datum(self) -> Data:
        out: dict[int, Data] = {}
        stack: list[tuple[list, bool]] = [(self.skeleton, False)]
        while stack:
            node, expanded = stack.pop()
            if node[0] == "leaf":
                out[id(node)] = BOT
                continue
            if not expanded:
                stack.append((node, True))
                for ch in node[2]:
                    stack.append((ch, False))
                continue
            out[id(node)] = DCon(node[1], tuple(out[id(ch)] for ch in node[2]))
        return out[id(self.skeleton)]


def _skel_node(m: Program, env: dict, leaves: list[list]) -> list:
    # node := ["con", tag, children] | ["leaf", machine, None]
    while type(m) is PVar:
        m, env = env[m.name]
    if isinstance(m, Con):
        return ["con", m.tag, [_skel_node(a, env, leaves) for a in m.args]]
    node = ["leaf", _Machine(m, env), None]
    node[1].settle()
    leaves.append(node)
    return node


def data_part(m: Program) -> Data:
    """Constructor spine of a program with bottom at every other position."""
    out: dict[int, Data] = {}
    stack: list[tuple[Program, bool]] = [(m, False)]
    while stack:
        cur, expanded = stack.pop()
        if not isinstance(cur, Con):
            out[id(cur)] = BOT
            continue
        if not expanded:
            stack.append((cur, True))
            for a in cur.args:
                stack.append((a, False))
            continue
        out[id(cur)] = DCon(cur.tag, tuple(out[id(a)] for a in cur.args))
    return out[id(m)]


def approx(m: Program, steps: int = DEFAULT_APPROX_STEPS,
           watch: Callable[[int, Data], None] | None = None) -> Data:
    """data_part after `steps` parallel steps; `watch` is called on every
    strictly larger intermediate approximation."""
    fr = _Frontier(m)
    best = fr.datum()
    if watch:
        watch(0, best)
    for i in range(steps):
        if not fr.active():
            break
        grew = fr.round()
        if watch is not None and grew:
            d = fr.datum()
            if d != best:
                best = d
                watch(i + 1, d)
    return fr.datum()


def approx_iter(m: Program, steps: int):
    """Yield (n, approximation) for n = 0..steps (stops early once no
    position can step again)."""
    fr = _Frontier(m)
    yield 0, fr.datum()
    for i in range(steps):
        if not fr.active():
            return
        fr.round()
        yield i + 1, fr.datum()


# ---------------------------------------------------------------------------
# Finite total evaluation

def compute_finite(m: Program, fuel: int = DEFAULT_BIGSTEP_FUEL) -> Data | Diverged:
    """Recursive bigstep under constructors; total finite data or Diverged.
    A lambda value has no finite-data rule, so it also yields Diverged."""
    budget = _Fuel(fuel)
    # iterative post-order: evaluate to weak head, then recurse on arguments
    out: dict[int, Data] = {}
    stack: list[tuple[Program, Con | None]] = [(m, None)]
    while stack:
        cur, headed = stack.pop()
        if headed is not None:
            out[id(cur)] = DCon(headed.tag, tuple(out[id(a)] for a in headed.args))
            continue
        r = _bigstep(cur, budget)
        if not isinstance(r, Value) or not isinstance(r.prog, Con):
            return Diverged()
        v = r.prog
        stack.append((cur, v))
        for a in v.args:
            stack.append((a, None))
    return out[id(m)]
