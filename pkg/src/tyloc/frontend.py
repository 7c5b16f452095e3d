"""Lexer and parser for the ML fragment.

Every AST node carries a :class:`SourceRange`. Lines are 1-based, columns
0-based and end-exclusive. A parenthesized expression's range includes the
parentheses.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Union

from .errors import ParseError


@dataclass(frozen=True, order=True)
class SourceRange:
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if self.start_line < 1 or self.end_line < 1 or self.start_col < 0 or self.end_col < 0:
            raise ValueError(f"invalid range {self}")
        if self.start >= self.end:
            raise ValueError(f"empty or inverted range {self}")

    @property
    def start(self) -> tuple[int, int]:
        return (self.start_line, self.start_col)

    @property
    def end(self) -> tuple[int, int]:
        return (self.end_line, self.end_col)

    def contains(self, other: SourceRange) -> bool:
        return self.start <= other.start and other.end <= self.end

    def strictly_contains(self, other: SourceRange) -> bool:
        return self.contains(other) and self != other

    def overlaps(self, other: SourceRange) -> bool:
        return self.start < other.end and other.start < self.end

    def disjoint(self, other: SourceRange) -> bool:
        return not self.overlaps(other)

    def __str__(self) -> str:
        return f"{self.start_line};{self.start_col}-{self.end_line};{self.end_col}"

    _TEXT = re.compile(r"\s*(\d+)\s*;\s*(\d+)\s*-\s*(\d+)\s*;\s*(\d+)\s*$")

    @classmethod
    def parse(cls, text: str) -> SourceRange:
        m = cls._TEXT.match(text)
        if not m:
            raise ValueError(f"not a source range: {text!r}")
        return cls(*(int(g) for g in m.groups()))


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    range: SourceRange


@dataclass(frozen=True)
class FloatLit:
    value: float
    range: SourceRange


@dataclass(frozen=True)
class StringLit:
    value: str
    range: SourceRange


@dataclass(frozen=True)
class BoolLit:
    value: bool
    range: SourceRange


@dataclass(frozen=True)
class Var:
    name: str
    range: SourceRange


@dataclass(frozen=True)
class Abs:
    param: str
    body: Expr
    range: SourceRange


@dataclass(frozen=True)
class App:
    fn: Expr
    arg: Expr
    range: SourceRange


@dataclass(frozen=True)
class Cond:
    cond: Expr
    then: Expr
    else_: Expr
    range: SourceRange


@dataclass(frozen=True)
class Let:
    name: str
    bound: Expr
    body: Expr
    range: SourceRange


Expr = Union[IntLit, FloatLit, StringLit, BoolLit, Var, Abs, App, Cond, Let]
LITERALS = (IntLit, FloatLit, StringLit, BoolLit)


@dataclass(frozen=True)
class TopLet:
    """A top-level ``let x = e`` item (no ``in``)."""
    name: str
    bound: Expr
    range: SourceRange


Item = Union[TopLet, Expr]


@dataclass(frozen=True)
class Program:
    items: tuple[Item, ...]


def children(node) -> tuple:
    if isinstance(node, (TopLet,)):
        return (node.bound,)
    if isinstance(node, Abs):
        return (node.body,)
    if isinstance(node, App):
        return (node.fn, node.arg)
    if isinstance(node, Cond):
        return (node.cond, node.then, node.else_)
    if isinstance(node, Let):
        return (node.bound, node.body)
    return ()


def preorder(p: Program) -> Iterator:
    stack = list(reversed(p.items))
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def node_ranges(p: Program) -> list[tuple[int, SourceRange]]:
    """Index every node's range in pre-order."""
    return [(i, node.range) for i, node in enumerate(preorder(p))]


def index_nodes(p: Program) -> dict[int, int]:
    """Map ``id(node)`` to the node's pre-order location index."""
    return {id(node): i for i, node in enumerate(preorder(p))}


# -- lexer ------------------------------------------------------------------

KEYWORDS = frozenset({"let", "in", "fun", "if", "then", "else", "true", "false", "rec"})

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\(\*)
  | (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<string>")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|;;|[()=])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # int float string ident kw sym eof
    text: str
    value: object
    line: int
    col: int
    end_line: int
    end_col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 0

    def advance(self, n: int) -> None:
        chunk = self.text[self.pos:self.pos + n]
        nl = chunk.count("\n")
        if nl:
            self.line += nl
            self.col = len(chunk) - chunk.rfind("\n") - 1
        else:
            self.col += n
        self.pos += n


def tokenize(text: str) -> list[Token]:
    cur = _Cursor(text)
    tokens = []
    while cur.pos < len(text):
        m = _TOKEN.match(text, cur.pos)
        if m is None:
            raise ParseError(f"unexpected character {text[cur.pos]!r}", cur.line, cur.col)
        kind = m.lastgroup
        line, col = cur.line, cur.col
        if kind == "ws":
            cur.advance(m.end() - m.start())
            continue
        if kind == "comment":
            _skip_comment(cur)
            continue
        if kind == "string":
            raw, value = _read_string(cur)
            tokens.append(Token("string", raw, value, line, col, cur.line, cur.col))
            continue
        lexeme = m.group()
        cur.advance(len(lexeme))
        if kind == "float":
            value = float(lexeme)
        elif kind == "int":
            value = int(lexeme)
        elif kind == "ident" and lexeme in KEYWORDS:
            kind = "kw"
            value = lexeme
        else:
            value = lexeme
        tokens.append(Token(kind, lexeme, value, line, col, cur.line, cur.col))
    tokens.append(Token("eof", "", None, cur.line, cur.col, cur.line, cur.col))
    return tokens


def _skip_comment(cur: _Cursor) -> None:
    line, col = cur.line, cur.col
    depth = 0
    text = cur.text
    while cur.pos < len(text):
        if text.startswith("(*", cur.pos):
            depth += 1
            cur.advance(2)
        elif text.startswith("*)", cur.pos):
            depth -= 1
            cur.advance(2)
            if depth == 0:
                return
        else:
            cur.advance(1)
    raise ParseError("unterminated comment", line, col)


def _read_string(cur: _Cursor) -> tuple[str, str]:
    line, col = cur.line, cur.col
    text = cur.text
    start = cur.pos
    cur.advance(1)
    out = []
    while cur.pos < len(text):
        c = text[cur.pos]
        if c == '"':
            cur.advance(1)
            return text[start:cur.pos], "".join(out)
        if c == "\\":
            nxt = text[cur.pos + 1:cur.pos + 2]
            if nxt not in _ESCAPES:
                raise ParseError(f"bad escape \\{nxt}", cur.line, cur.col)
            out.append(_ESCAPES[nxt])
            cur.advance(2)
            continue
        if c == "\n":
            break
        out.append(c)
        cur.advance(1)
    raise ParseError("unterminated string literal", line, col)


# -- parser -----------------------------------------------------------------

def _span(first: Token | SourceRange, last: Token | SourceRange) -> SourceRange:
    if isinstance(first, Token):
        sl, sc = first.line, first.col
    else:
        sl, sc = first.start
    if isinstance(last, Token):
        el, ec = last.end_line, last.end_col
    else:
        el, ec = last.end
    return SourceRange(sl, sc, el, ec)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            self.fail(f"expected {text or kind}")
        return self.next()

    def fail(self, what: str):
        t = self.tok
        raise ParseError(f"{what}, found {t.describe()}", t.line, t.col)

    def ident(self) -> Token:
        if not self.at("ident"):
            self.fail("expected identifier")
        return self.next()

    # program := { ';;' } { item { ';;' } }
    def program(self) -> Program:
        items = []
        while not self.at("eof"):
            if self.at("sym", ";;"):
                self.next()
                continue
            items.append(self.item())
            if not (self.at("eof") or self.at("sym", ";;") or self.at("kw", "let")):
                self.fail("expected ';;' or end of input")
        return Program(tuple(items))

    def item(self) -> Item:
        if not self.at("kw", "let"):
            return self.expr()
        start = self.next()
        name = self.ident().text
        self.expect("sym", "=")
        bound = self.expr()
        if self.at("kw", "in"):
            self.next()
            body = self.expr()
            return Let(name, bound, body, _span(start, body.range))
        return TopLet(name, bound, _span(start, bound.range))

    def expr(self) -> Expr:
        t = self.tok
        if t.kind == "kw":
            if t.text == "fun":
                return self.fun()
            if t.text == "if":
                self.next()
                c = self.expr()
                self.expect("kw", "then")
                a = self.expr()
                self.expect("kw", "else")
                b = self.expr()
                return Cond(c, a, b, _span(t, b.range))
            if t.text == "let":
                self.next()
                name = self.ident().text
                self.expect("sym", "=")
                bound = self.expr()
                self.expect("kw", "in")
                body = self.expr()
                return Let(name, bound, body, _span(t, body.range))
        return self.app()

    def fun(self) -> Expr:
        start = self.next()
        params = [self.ident()]
        while self.at("ident"):
            params.append(self.next())
        self.expect("sym", "->")
        body = self.expr()
        # fun x y -> e  ==  fun x -> fun y -> e ; inner ranges start at the parameter
        for p in reversed(params[1:]):
            body = Abs(p.text, body, _span(p, body.range))
        return Abs(params[0].text, body, _span(start, body.range))

    def app(self) -> Expr:
        fn = self.atom()
        while self.starts_atom():
            arg = self.atom()
            fn = App(fn, arg, _span(fn.range, arg.range))
        return fn

    def starts_atom(self) -> bool:
        t = self.tok
        return (t.kind in ("int", "float", "string", "ident")
                or (t.kind == "kw" and t.text in ("true", "false"))
                or (t.kind == "sym" and t.text == "("))

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.next()
            return IntLit(t.value, _span(t, t))
        if t.kind == "float":
            self.next()
            return FloatLit(t.value, _span(t, t))
        if t.kind == "string":
            self.next()
            return StringLit(t.value, _span(t, t))
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return BoolLit(t.text == "true", _span(t, t))
        if t.kind == "ident":
            self.next()
            return Var(t.text, _span(t, t))
        if t.kind == "sym" and t.text == "(":
            self.next()
            inner = self.expr()
            close = self.expect("sym", ")")
            return replace(inner, range=_span(t, close))
        self.fail("expected expression")


def parse(text: str) -> Program:
    return Parser(text).program()
