"""Minimal S-expression reader/writer for SMT-LIB text."""
from __future__ import annotations

import re
from typing import Union

SExp = Union[str, list]

_TOKEN = re.compile(r'\s+|;[^\n]*|(\()|(\))|(\|[^|]*\|)|("(?:[^"]|"")*")|([^\s()|";]+)')


def tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"cannot tokenize at {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        tok = m.group(1) or m.group(2) or m.group(3) or m.group(4) or m.group(5)
        if tok:
            out.append(tok)
    return out


def parse_all(text: str) -> list[SExp]:
    """Parse every top-level S-expression in ``text``."""
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ValueError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    return stack[0]


def dump(e: SExp) -> str:
    if isinstance(e, str):
        return e
    return "(" + " ".join(dump(x) for x in e) + ")"
