"""Small s-expression reader with source positions.

Atoms are plain strings; lists are SList.  `;` starts a comment that runs to
the end of the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class SexprError(Exception):
    def __init__(self, msg: str, pos: tuple[int, int] | None = None):
        self.pos = pos
        if pos is not None:
            msg = f"{pos[0]}:{pos[1]}: {msg}"
        super().__init__(msg)


@dataclass(frozen=True)
class Atom:
    text: str
    pos: tuple[int, int] = (0, 0)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple["Sexpr", ...]
    pos: tuple[int, int] = (0, 0)

    def __str__(self) -> str:
        return "(%s)" % " ".join(str(i) for i in self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


Sexpr = Atom | SList

_DELIMS = "()\t\n\r ;"


def parse_all(text: str) -> list[Sexpr]:
    """Parse a whole source file into a list of toplevel s-expressions."""
    toks = list(_tokens(text))
    out = []
    i = 0
    while i < len(toks):
        expr, i = _read(toks, i)
        out.append(expr)
    return out


def parse_one(text: str) -> Sexpr:
    exprs = parse_all(text)
    if len(exprs) != 1:
        raise SexprError(f"expected exactly one expression, got {len(exprs)}")
    return exprs[0]


def _tokens(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield (c, (line, col))
            i += 1
            col += 1
        else:
            start = i
            startpos = (line, col)
            while i < n and text[i] not in _DELIMS:
                i += 1
                col += 1
            yield (text[start:i], startpos)


def _read(toks, i):
    if i >= len(toks):
        raise SexprError("unexpected end of input")
    tok, pos = toks[i]
    if tok == "(":
        items = []
        i += 1
        while True:
            if i >= len(toks):
                raise SexprError("unbalanced parenthesis", pos)
            if toks[i][0] == ")":
                return SList(tuple(items), pos), i + 1
            item, i = _read(toks, i)
            items.append(item)
    if tok == ")":
        raise SexprError("unexpected ')'", pos)
    return Atom(tok, pos), i + 1
