"""Monotypes, located constraints and type schemes."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return "'" + self.name


@dataclass(frozen=True)
class TGround:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TArrow:
    dom: Monotype
    cod: Monotype

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, TArrow) else str(self.dom)
        return f"{left} -> {self.cod}"


Monotype = Union[TVar, TGround, TArrow]

INT = TGround("int")
FLOAT = TGround("float")
BOOL = TGround("bool")
STRING = TGround("string")


def arrow(*tys: Monotype) -> Monotype:
    """``arrow(a, b, c)`` is ``a -> b -> c``."""
    result = tys[-1]
    for t in reversed(tys[:-1]):
        result = TArrow(t, result)
    return result


def type_vars(t: Monotype) -> Iterator[TVar]:
    """Variables of ``t`` in left-to-right order (with repeats)."""
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, TVar):
            yield t
        elif isinstance(t, TArrow):
            stack.append(t.cod)
            stack.append(t.dom)


def ground_names(t: Monotype) -> Iterator[str]:
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, TGround):
            yield t.name
        elif isinstance(t, TArrow):
            stack.append(t.cod)
            stack.append(t.dom)


def subst_type(t: Monotype, s: Mapping[TVar, Monotype]) -> Monotype:
    if isinstance(t, TVar):
        return s.get(t, t)
    if isinstance(t, TArrow):
        return TArrow(subst_type(t.dom, s), subst_type(t.cod, s))
    return t


@dataclass(frozen=True)
class Eq:
    loc: int
    lhs: Monotype
    rhs: Monotype

    def __str__(self) -> str:
        return f"{self.loc} {self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Inst:
    loc: int
    scheme: str
    args: tuple[TVar, ...]

    def __str__(self) -> str:
        return f"{self.loc} {self.scheme}({', '.join(map(str, self.args))})"


Constraint = Union[Eq, Inst]


@dataclass(frozen=True)
class Scheme:
    """``forall params. (body => params[-1])``, defined at location ``loc``."""
    name: str
    params: tuple[TVar, ...]
    body: tuple[Constraint, ...]
    loc: int

    @property
    def result(self) -> TVar | None:
        return self.params[-1] if self.params else None

    def free_vars(self) -> list[TVar]:
        bound = set(self.params)
        return [v for v in constraint_vars(self.body) if v not in bound]


def constraint_vars(cs: Iterable[Constraint]) -> list[TVar]:
    """Distinct variables of ``cs`` in first-occurrence order."""
    seen: dict[TVar, None] = {}
    for c in cs:
        if isinstance(c, Eq):
            for v in type_vars(c.lhs):
                seen.setdefault(v)
            for v in type_vars(c.rhs):
                seen.setdefault(v)
        else:
            for v in c.args:
                seen.setdefault(v)
    return list(seen)


# -- textual types ----------------------------------------------------------

_TYPE_TOKEN = re.compile(r"\s*(?:(->)|([()])|'([A-Za-z_][A-Za-z0-9_]*)|([A-Za-z_][A-Za-z0-9_]*))")


def parse_type(text: str) -> Monotype:
    """Parse ``int -> ('a -> bool)`` style type text."""
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TYPE_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad type syntax at {pos}: {text!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("->", None))
        elif m.group(2):
            toks.append((m.group(2), None))
        elif m.group(3):
            toks.append(("var", m.group(3)))
        else:
            toks.append(("ground", m.group(4)))
    i = 0

    def ty() -> Monotype:
        nonlocal i
        left = atom()
        if i < len(toks) and toks[i][0] == "->":
            i += 1
            return TArrow(left, ty())
        return left

    def atom() -> Monotype:
        nonlocal i
        if i >= len(toks):
            raise ValueError(f"truncated type: {text!r}")
        kind, val = toks[i]
        i += 1
        if kind == "var":
            return TVar(val)
        if kind == "ground":
            return TGround(val)
        if kind == "(":
            inner = ty()
            if i >= len(toks) or toks[i][0] != ")":
                raise ValueError(f"unbalanced parentheses: {text!r}")
            i += 1
            return inner
        raise ValueError(f"unexpected {kind!r} in type {text!r}")

    result = ty()
    if i != len(toks):
        raise ValueError(f"trailing tokens in type {text!r}")
    return result
