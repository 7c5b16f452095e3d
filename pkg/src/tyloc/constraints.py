"""Constraint generation.

Every expression is related to a type variable. Literals, applications,
abstractions and conditionals emit located equalities; ``let`` bindings
produce a :class:`Scheme` holding the bound expression's constraints, and
each use of a let-bound name emits an instantiation constraint instead of a
copy of those constraints.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Union

from . import frontend as fe
from .errors import PreludeError, UnboundVariable
from .terms import (BOOL, FLOAT, INT, STRING, Constraint, Eq, Inst, Monotype,
                    Scheme, TArrow, TVar, constraint_vars, parse_type, type_vars)

DEFAULT_PRELUDE = """\
not : bool -> bool
add : int -> int -> int
sub : int -> int -> int
mul : int -> int -> int
eq : int -> int -> bool
lt : int -> int -> bool
fadd : float -> float -> float
fmul : float -> float -> float
float_of_int : int -> float
int_of_float : float -> int
concat : string -> string -> string
length : string -> int
string_of_int : int -> string
"""


class FreshSupply:
    """Issues type variables that are unique within one inference run."""

    def __init__(self):
        self._used: set[str] = set()
        self._counters: dict[str, int] = defaultdict(int)

    def fresh(self, hint: str) -> TVar:
        while True:
            name = f"{hint}{self._counters[hint]}"
            self._counters[hint] += 1
            if name not in self._used:
                self._used.add(name)
                return TVar(name)

    def named(self, name: str) -> TVar:
        """Use ``name`` verbatim if it is still free, else a fresh variant."""
        if name in self._used:
            return self.fresh(name)
        self._used.add(name)
        return TVar(name)

    def reserve(self, names) -> None:
        self._used.update(names)


Binding = Union[Monotype, Scheme]


class TypingEnv:
    """Immutable lexical environment: name -> monotype or scheme."""

    def __init__(self, bindings: Mapping[str, Binding] | None = None):
        self._bindings = dict(bindings or {})

    def lookup(self, name: str) -> Binding | None:
        return self._bindings.get(name)

    def extend(self, name: str, binding: Binding) -> TypingEnv:
        new = dict(self._bindings)
        new[name] = binding
        return TypingEnv(new)

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def items(self):
        return self._bindings.items()

    def free_vars(self) -> set[TVar]:
        out: set[TVar] = set()
        for b in self._bindings.values():
            if isinstance(b, Scheme):
                out.update(b.free_vars())
            else:
                out.update(type_vars(b))
        return out


def parse_prelude(text: str) -> TypingEnv:
    bindings: dict[str, Binding] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, ty = line.partition(":")
        name = name.strip()
        if not sep or not name.isidentifier() or name in fe.KEYWORDS:
            raise PreludeError(f"line {lineno}: expected 'name : type', got {raw!r}")
        try:
            t = parse_type(ty)
        except ValueError as exc:
            raise PreludeError(f"line {lineno}: {exc}") from None
        if any(True for _ in type_vars(t)):
            raise PreludeError(f"line {lineno}: built-in types must be monomorphic")
        bindings[name] = t
    return TypingEnv(bindings)


def load_prelude(path: str | Path | None = None) -> TypingEnv:
    if path is None:
        return parse_prelude(DEFAULT_PRELUDE)
    return parse_prelude(Path(path).read_text(encoding="utf-8"))


def generalize(bound_constraints, result: TVar, env: TypingEnv, def_loc: int,
               name: str = "x", supply: FreshSupply | None = None) -> Scheme:
    """Quantify every variable of the bound constraints (and ``result``) that is
    not free in ``env``; the result variable goes last."""
    body = tuple(bound_constraints)
    env_fv = env.free_vars()
    params = [v for v in constraint_vars(body) if v not in env_fv and v != result]
    if result in env_fv:
        # result is pinned by the environment; quantify an alias of it instead
        alias = (supply or FreshSupply()).fresh(result.name + "_")
        body = body + (Eq(def_loc, alias, result),)
        params.append(alias)
    else:
        params.append(result)
    return Scheme(name, tuple(params), body, def_loc)


@dataclass
class Generated:
    constraints: list[Constraint]
    schemes: list[Scheme]
    result_vars: list[TVar]
    locations: list[tuple[int, fe.SourceRange]] = field(default_factory=list)


class _Generator:
    def __init__(self, p: fe.Program):
        self.index = fe.index_nodes(p)
        self.supply = FreshSupply()
        self.schemes: list[Scheme] = []
        self._scheme_names: set[str] = set()

    def scheme_name(self, name: str) -> str:
        candidate, k = name, 0
        while candidate in self._scheme_names:
            k += 1
            candidate = f"{name}_{k}"
        self._scheme_names.add(candidate)
        return candidate

    def result_var(self, loc: int, hint: str | None) -> TVar:
        return self.supply.named(hint if hint is not None else f"l{loc}")

    def instantiate(self, scheme: Scheme, loc: int) -> Inst:
        args = tuple(self.supply.fresh(p.name) for p in scheme.params)
        return Inst(loc, scheme.name, args)

    def define(self, name: str, bound, env: TypingEnv, loc: int) -> tuple[Scheme, Inst]:
        body: list[Constraint] = []
        result = self.infer(bound, env, body, hint=name)
        scheme = generalize(body, result, env, loc, self.scheme_name(name), self.supply)
        self.schemes.append(scheme)
        return scheme, self.instantiate(scheme, loc)

    def infer(self, e, env: TypingEnv, out: list, hint: str | None = None) -> TVar:
        loc = self.index[id(e)]
        if isinstance(e, fe.LITERALS):
            ground = {fe.IntLit: INT, fe.FloatLit: FLOAT,
                      fe.StringLit: STRING, fe.BoolLit: BOOL}[type(e)]
            a = self.result_var(loc, hint)
            out.append(Eq(loc, a, ground))
            return a
        if isinstance(e, fe.Var):
            b = env.lookup(e.name)
            if b is None:
                raise UnboundVariable(e.name, e.range)
            if isinstance(b, Scheme):
                inst = self.instantiate(b, loc)
                out.append(inst)
                return inst.args[-1]
            g = self.result_var(loc, hint)
            out.append(Eq(loc, g, b))
            return g
        if isinstance(e, fe.Abs):
            ax = self.supply.named(e.param)
            body = self.infer(e.body, env.extend(e.param, ax), out)
            g = self.result_var(loc, hint)
            out.append(Eq(loc, g, TArrow(ax, body)))
            return g
        if isinstance(e, fe.App):
            a = self.infer(e.fn, env, out)
            b = self.infer(e.arg, env, out)
            g = self.result_var(loc, hint)
            out.append(Eq(loc, a, TArrow(b, g)))
            return g
        if isinstance(e, fe.Cond):
            a = self.infer(e.cond, env, out)
            b = self.infer(e.then, env, out)
            d = self.infer(e.else_, env, out)
            g = self.result_var(loc, hint)
            out.append(Eq(self.index[id(e.cond)], a, BOOL))
            out.append(Eq(self.index[id(e.then)], b, g))
            out.append(Eq(self.index[id(e.else_)], d, g))
            return g
        if isinstance(e, fe.Let):
            scheme, consistency = self.define(e.name, e.bound, env, loc)
            out.append(consistency)
            # the let's type is its body's variable; no separate equality
            return self.infer(e.body, env.extend(e.name, scheme), out)
        raise TypeError(f"not an expression: {e!r}")


def infer_constraints(p: fe.Program, initial_env: TypingEnv | None = None) -> Generated:
    env = initial_env if initial_env is not None else load_prelude()
    gen = _Generator(p)
    top: list[Constraint] = []
    results: list[TVar] = []
    for item in p.items:
        if isinstance(item, fe.TopLet):
            loc = gen.index[id(item)]
            scheme, consistency = gen.define(item.name, item.bound, env, loc)
            top.append(consistency)
            results.append(consistency.args[-1])
            env = env.extend(item.name, scheme)
        else:
            results.append(gen.infer(item, env, top))
    return Generated(top, gen.schemes, results, fe.node_ranges(p))
