"""Ground truth independent of the SMT route.

* :func:`expand` inlines instantiation constraints by substitution;
* :func:`satisfiable` runs first-order unification with an occurs check;
* :func:`brute_force_min_sources` enumerates removal sets by weight;
* :func:`classical_infer` is the eager, left-to-right inferencer whose first
  failure is the conventional compiler blame.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import frontend as fe
from .constraints import TypingEnv, load_prelude
from .encoder import LocForest, forest_for
from .errors import ArityMismatch, NoErrorSource, TooLarge, UnboundVariable, UnknownScheme
from .ir import IrDoc, validate
from .terms import (BOOL, FLOAT, INT, STRING, Eq, Inst, Monotype, Scheme, TArrow,
                    TVar, subst_type, type_vars)

DEFAULT_LIMIT = 20


@dataclass(frozen=True)
class ActiveSet:
    """Locations that are kept and whose ancestors are all kept."""
    kept: frozenset[int]
    active: frozenset[int]

    @classmethod
    def from_removed(cls, forest: LocForest, removed=()) -> ActiveSet:
        removed = set(removed)
        kept = frozenset(i for i in forest.nodes if i not in removed)
        dead: set[int] = set()
        for r in removed:
            if r in forest.children:
                dead.update(forest.subtree(r))
        return cls(kept, frozenset(i for i in forest.nodes if i not in dead))

    @classmethod
    def everything(cls, forest: LocForest) -> ActiveSet:
        return cls.from_removed(forest, ())

    def __contains__(self, i: int) -> bool:
        return i in self.active


def expand(doc: IrDoc, active: ActiveSet) -> list[Eq]:
    """Replace each active instantiation by the scheme's active equalities
    with the arguments substituted for the quantified variables."""
    order = {s.name: k for k, s in enumerate(doc.schemes)}
    schemes = {s.name: s for s in doc.schemes}
    out: list[Eq] = []

    def inline(inst: Inst, sub_outer: dict, within: int | None) -> None:
        if inst.scheme not in schemes:
            raise UnknownScheme(inst.scheme)
        if within is not None and order[inst.scheme] >= within:
            raise UnknownScheme(inst.scheme)  # forward/cyclic reference
        s = schemes[inst.scheme]
        args = tuple(sub_outer.get(v, v) for v in inst.args)
        if len(args) != len(s.params):
            raise ArityMismatch(s.name, len(s.params), len(args))
        sub = dict(zip(s.params, args))
        for c in s.body:
            if c.loc not in active:
                continue
            if isinstance(c, Eq):
                out.append(Eq(c.loc, subst_type(c.lhs, sub), subst_type(c.rhs, sub)))
            else:
                inline(c, sub, order[s.name])

    for c in doc.constraints:
        if c.loc not in active:
            continue
        if isinstance(c, Eq):
            out.append(c)
        else:
            inline(c, {}, None)
    return out


# -- unification ------------------------------------------------------------

class Unifier:
    """Triangular substitution with an occurs check."""

    def __init__(self):
        self.subst: dict[TVar, Monotype] = {}

    def walk(self, t: Monotype) -> Monotype:
        while isinstance(t, TVar) and t in self.subst:
            t = self.subst[t]
        return t

    def occurs(self, v: TVar, t: Monotype) -> bool:
        stack = [t]
        while stack:
            t = self.walk(stack.pop())
            if t == v:
                return True
            if isinstance(t, TArrow):
                stack.append(t.dom)
                stack.append(t.cod)
        return False

    def unify(self, a: Monotype, b: Monotype) -> bool:
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            a, b = self.walk(a), self.walk(b)
            if a == b:
                continue
            if isinstance(a, TVar) or isinstance(b, TVar):
                v, t = (a, b) if isinstance(a, TVar) else (b, a)
                if self.occurs(v, t):
                    return False
                self.subst[v] = t
            elif isinstance(a, TArrow) and isinstance(b, TArrow):
                stack.append((a.cod, b.cod))
                stack.append((a.dom, b.dom))
            else:
                return False
        return True

    def resolve(self, t: Monotype) -> Monotype:
        t = self.walk(t)
        if isinstance(t, TArrow):
            return TArrow(self.resolve(t.dom), self.resolve(t.cod))
        return t


@dataclass
class UnifyResult:
    satisfiable: bool
    substitution: dict[TVar, Monotype] = field(default_factory=dict)
    failed_loc: int | None = None

    def __bool__(self) -> bool:
        return self.satisfiable


def satisfiable(equalities: list[Eq]) -> UnifyResult:
    u = Unifier()
    for c in equalities:
        if not u.unify(c.lhs, c.rhs):
            return UnifyResult(False, failed_loc=c.loc)
    return UnifyResult(True, {v: u.resolve(v) for v in u.subst})


# -- brute force ------------------------------------------------------------

def _antichains(forest: LocForest, soft: set[int]) -> list[frozenset[int]]:
    """All removal sets in which no member is an ancestor of another."""

    def of(n: int) -> list[frozenset[int]]:
        combos = [frozenset()]
        for ch in forest.children[n]:
            combos = [a | b for a in combos for b in of(ch)]
        if n in soft:
            combos.append(frozenset({n}))
        return combos

    out = [frozenset()]
    for r in forest.roots:
        out = [a | b for a in out for b in of(r)]
    return out


def removal_weight(forest: LocForest, removed) -> int:
    """Weight of a removal set, counting only ancestor-maximal members."""
    removed = set(removed)
    return sum(forest.weight[i] for i in removed
               if not any(forest.is_ancestor(j, i) for j in removed))


def canonical(forest: LocForest, removed) -> frozenset[int]:
    removed = set(removed)
    return frozenset(i for i in removed if not any(forest.is_ancestor(j, i) for j in removed))


def brute_force_min_sources(doc: IrDoc, limit: int = DEFAULT_LIMIT) -> tuple[int, set[frozenset[int]]]:
    validate(doc)
    forest = forest_for(doc)
    if len(forest.nodes) > limit:
        raise TooLarge(f"{len(forest.nodes)} locations exceed the enumeration limit of {limit}")
    soft = {i for i in forest.nodes if forest.weight[i] > 0}
    candidates = _antichains(forest, soft)
    candidates.sort(key=lambda s: (sum(forest.weight[i] for i in s), len(s), sorted(s)))
    best = None
    sources: set[frozenset[int]] = set()
    for cand in candidates:
        w = sum(forest.weight[i] for i in cand)
        if best is not None and w > best:
            break
        if satisfiable(expand(doc, ActiveSet.from_removed(forest, cand))):
            best = w
            sources.add(cand)
    if best is None:
        raise NoErrorSource("no removal of soft locations makes the constraints satisfiable")
    return best, sources


# -- classical inference ----------------------------------------------------

@dataclass
class ClassicalResult:
    ok: bool
    blame: int | None = None
    blame_range: fe.SourceRange | None = None
    types: list[Monotype] = field(default_factory=list)
    substitution: dict[TVar, Monotype] = field(default_factory=dict)


class _Blame(Exception):
    def __init__(self, node):
        self.node = node


class _Classical:
    def __init__(self):
        self.u = Unifier()
        self.counter = itertools.count()

    def fresh(self) -> TVar:
        return TVar(f"t{next(self.counter)}")

    def instantiate(self, scheme) -> Monotype:
        qs, t = scheme
        return subst_type(t, {q: self.fresh() for q in qs})

    def generalize(self, t: Monotype, env: dict) -> tuple:
        t = self.u.resolve(t)
        env_fv = set()
        for qs, et in env.values():
            env_fv.update(v for v in type_vars(self.u.resolve(et)) if v not in qs)
        qs = tuple(dict.fromkeys(v for v in type_vars(t) if v not in env_fv))
        return (qs, t)

    def infer(self, e, env: dict) -> Monotype:
        if isinstance(e, fe.IntLit):
            return INT
        if isinstance(e, fe.FloatLit):
            return FLOAT
        if isinstance(e, fe.StringLit):
            return STRING
        if isinstance(e, fe.BoolLit):
            return BOOL
        if isinstance(e, fe.Var):
            if e.name not in env:
                raise UnboundVariable(e.name, e.range)
            return self.instantiate(env[e.name])
        if isinstance(e, fe.Abs):
            a = self.fresh()
            body = self.infer(e.body, {**env, e.param: ((), a)})
            return TArrow(a, body)
        if isinstance(e, fe.App):
            tf = self.infer(e.fn, env)
            a, r = self.fresh(), self.fresh()
            if not self.u.unify(tf, TArrow(a, r)):
                raise _Blame(e.fn)
            ta = self.infer(e.arg, env)
            if not self.u.unify(a, ta):
                raise _Blame(e.arg)
            return r
        if isinstance(e, fe.Cond):
            if not self.u.unify(self.infer(e.cond, env), BOOL):
                raise _Blame(e.cond)
            tt = self.infer(e.then, env)
            if not self.u.unify(self.infer(e.else_, env), tt):
                raise _Blame(e.else_)
            return tt
        if isinstance(e, fe.Let):
            t1 = self.infer(e.bound, env)
            return self.infer(e.body, {**env, e.name: self.generalize(t1, env)})
        raise TypeError(f"not an expression: {e!r}")


def _classical_env(env: TypingEnv) -> dict:
    out = {}
    for name, b in env.items():
        if isinstance(b, Scheme):
            raise TypeError("classical inference expects a monomorphic built-in environment")
        out[name] = ((), b)
    return out


def classical_infer(p: fe.Program, env: TypingEnv | None = None) -> ClassicalResult:
    """Eager HM inference; on the first failed unification, blame the node
    visited last (the argument of an application, the condition or else
    branch of a conditional, or the function position if it is not a
    function)."""
    cenv = _classical_env(env if env is not None else load_prelude())
    index = fe.index_nodes(p)
    c = _Classical()
    types = []
    try:
        for item in p.items:
            if isinstance(item, fe.TopLet):
                t = c.infer(item.bound, cenv)
                cenv = {**cenv, item.name: c.generalize(t, cenv)}
            else:
                t = c.infer(item, cenv)
            types.append(t)
    except _Blame as b:
        return ClassicalResult(False, index[id(b.node)], b.node.range)
    return ClassicalResult(True, types=[c.u.resolve(t) for t in types],
                           substitution={v: c.u.resolve(v) for v in c.u.subst})
