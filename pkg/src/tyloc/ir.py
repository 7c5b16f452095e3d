"""Textual constraint IR.

A document has three sections separated by ``---`` lines::

    0 1;0-1;21
    1 1;8-1;12 7
    ---
    0 x('x) {
      1 'x = string
    }
    ---
    0 x('x0)
    2 'l2 = bool -> bool

Location lines are ``index range [weight]``; weight 0 marks a hard
location and a missing weight means "use the default heuristic".
Whitespace between tokens is insignificant.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .errors import (ArityMismatch, DanglingLocIndex, IrSyntaxError,
                     UnknownScheme)
from .frontend import SourceRange
from .terms import Constraint, Eq, Inst, Monotype, Scheme, TArrow, TGround, TVar

SEPARATOR = "---"


@dataclass(frozen=True)
class LocEntry:
    index: int
    range: SourceRange
    weight: int | None = None

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("location index must be non-negative")
        if self.weight is not None and self.weight < 0:
            raise ValueError("weight must be non-negative")

    def __str__(self) -> str:
        w = "" if self.weight is None else f" {self.weight}"
        return f"{self.index} {self.range}{w}"


@dataclass
class IrDoc:
    locations: list[LocEntry] = field(default_factory=list)
    schemes: list[Scheme] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)

    def location(self, index: int) -> LocEntry:
        for entry in self.locations:
            if entry.index == index:
                return entry
        raise DanglingLocIndex(index)

    def scheme(self, name: str) -> Scheme:
        for s in self.schemes:
            if s.name == name:
                return s
        raise UnknownScheme(name)

    def declared_weights(self) -> dict[int, int]:
        return {e.index: e.weight for e in self.locations if e.weight is not None}

    def all_constraints(self) -> Iterator[Constraint]:
        for s in self.schemes:
            yield from s.body
        yield from self.constraints

    def equality_count(self) -> int:
        return sum(isinstance(c, Eq) for c in self.all_constraints())

    def with_weights(self, weights: dict[int, int]) -> IrDoc:
        """Copy with the given location weights overriding declared ones."""
        locs = [replace(e, weight=weights[e.index]) if e.index in weights else e
                for e in self.locations]
        return IrDoc(locs, list(self.schemes), list(self.constraints))

    def with_hard(self, indices: Iterable[int]) -> IrDoc:
        indices = set(indices)
        for i in indices:
            self.location(i)
        return self.with_weights({i: 0 for i in indices})


def validate(doc: IrDoc) -> None:
    """Check cross-references; raises the matching IrError subclass."""
    seen: set[int] = set()
    for e in doc.locations:
        if e.index in seen:
            raise IrSyntaxError(f"duplicate location index {e.index}")
        seen.add(e.index)
    arity: dict[str, int] = {}

    def check(c: Constraint) -> None:
        if c.loc not in seen:
            raise DanglingLocIndex(c.loc)
        if isinstance(c, Inst):
            if c.scheme not in arity:
                raise UnknownScheme(c.scheme)
            if len(c.args) != arity[c.scheme]:
                raise ArityMismatch(c.scheme, arity[c.scheme], len(c.args))

    for s in doc.schemes:
        if s.name in arity:
            raise IrSyntaxError(f"duplicate scheme name '{s.name}'")
        if s.loc not in seen:
            raise DanglingLocIndex(s.loc)
        if len(set(s.params)) != len(s.params):
            raise IrSyntaxError(f"scheme '{s.name}' repeats a quantified variable")
        # bodies may only instantiate schemes defined before them
        for c in s.body:
            check(c)
        arity[s.name] = len(s.params)
    for c in doc.constraints:
        check(c)


# -- printing ---------------------------------------------------------------

def print_ir(doc: IrDoc) -> str:
    lines = [str(e) for e in doc.locations]
    lines.append(SEPARATOR)
    for s in doc.schemes:
        params = ", ".join(map(str, s.params))
        lines.append(f"{s.loc} {s.name}({params}) {{")
        lines.extend("  " + str(c) for c in s.body)
        lines.append("}")
    lines.append(SEPARATOR)
    lines.extend(str(c) for c in doc.constraints)
    return "\n".join(lines) + "\n"


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<sep>---)|(?P<arrow>->)|(?P<int>\d+)"
    r"|(?P<var>'[A-Za-z_][A-Za-z0-9_]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>[-;=(),{}])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, col = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise IrSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group()
        if m.lastgroup != "ws":
            kind = m.lastgroup if m.lastgroup != "sym" else lexeme
            toks.append(_Tok(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n") - 1
        else:
            col += len(lexeme)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _IrParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            shown = "end of input" if t.kind == "eof" else repr(t.text)
            raise IrSyntaxError(f"expected {kind}, found {shown}", t.line, t.col)
        self.i += 1
        return t

    def num(self) -> int:
        return int(self.take("int").text)

    def document(self) -> IrDoc:
        locs = []
        while self.peek().kind != "sep":
            locs.append(self.location())
        self.take("sep")
        schemes = []
        while self.peek().kind != "sep":
            schemes.append(self.scheme())
        self.take("sep")
        cons = []
        while self.peek().kind != "eof":
            cons.append(self.constraint())
        return IrDoc(locs, schemes, cons)

    def location(self) -> LocEntry:
        start = self.peek()
        index = self.num()
        sl = self.num()
        self.take(";")
        sc = self.num()
        self.take("-")
        el = self.num()
        self.take(";")
        ec = self.num()
        try:
            rng = SourceRange(sl, sc, el, ec)
        except ValueError as exc:
            raise IrSyntaxError(str(exc), start.line, start.col) from None
        weight = None
        # a following "i line ;" starts the next location; a lone int is a weight
        if self.peek().kind == "int" and not (self.peek(1).kind == "int" and self.peek(2).kind == ";"):
            weight = self.num()
        return LocEntry(index, rng, weight)

    def scheme(self) -> Scheme:
        loc = self.num()
        name = self.take("ident").text
        params = self.var_list()
        self.take("{")
        body = []
        while self.peek().kind != "}":
            body.append(self.constraint())
        self.take("}")
        return Scheme(name, params, tuple(body), loc)

    def var_list(self) -> tuple[TVar, ...]:
        self.take("(")
        out = []
        while self.peek().kind != ")":
            out.append(TVar(self.take("var").text[1:]))
            if self.peek().kind == ",":
                self.i += 1
        self.take(")")
        return tuple(out)

    def constraint(self) -> Constraint:
        loc = self.num()
        if self.peek().kind == "ident" and self.peek(1).kind == "(":
            name = self.take("ident").text
            return Inst(loc, name, self.var_list())
        lhs = self.type()
        self.take("=")
        return Eq(loc, lhs, self.type())

    def type(self) -> Monotype:
        left = self.type_atom()
        if self.peek().kind == "arrow":
            self.i += 1
            return TArrow(left, self.type())
        return left

    def type_atom(self) -> Monotype:
        t = self.peek()
        if t.kind == "var":
            self.i += 1
            return TVar(t.text[1:])
        if t.kind == "ident":
            self.i += 1
            return TGround(t.text)
        if t.kind == "(":
            self.i += 1
            inner = self.type()
            self.take(")")
            return inner
        shown = "end of input" if t.kind == "eof" else repr(t.text)
        raise IrSyntaxError(f"expected a type, found {shown}", t.line, t.col)


def parse_ir(text: str) -> IrDoc:
    doc = _IrParser(text).document()
    validate(doc)
    return doc
