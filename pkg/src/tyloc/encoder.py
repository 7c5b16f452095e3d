"""IR to SMT-LIB translation.

Location intervals are arranged into an AST forest by containment. Each
location becomes a Boolean constant that is softly asserted with its weight;
a constraint at location ``l`` only holds when ``l`` and every ancestor of
``l`` are kept. Schemes become ``define-fun`` predicates over their
quantified variables, so the solver instantiates them on demand.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import MalformedLocations
from .ir import IrDoc, LocEntry, validate
from .frontend import SourceRange
from .sexp import SExp, dump
from .terms import (Constraint, Eq, Inst, Monotype, TArrow, TGround, TVar,
                    constraint_vars, ground_names)

ENCODINGS = ("deep", "flat")

# core SMT-LIB symbols a user identifier must not shadow
SMT_RESERVED = frozenset({
    "and", "or", "not", "xor", "ite", "true", "false", "distinct", "let",
    "forall", "exists", "match", "par", "as", "lambda", "_", "NUMERAL",
    "DECIMAL", "STRING", "Bool", "Type",
})
_LOC_NAME = re.compile(r"l\d+")


@dataclass
class LocForest:
    nodes: list[int]
    ranges: dict[int, SourceRange]
    parent: dict[int, int]
    children: dict[int, list[int]]
    roots: list[int]
    weight: dict[int, int] = field(default_factory=dict)

    def ancestors(self, i: int) -> list[int]:
        """Chain from the root down to ``i`` (inclusive)."""
        chain = [i]
        while chain[-1] in self.parent:
            chain.append(self.parent[chain[-1]])
        chain.reverse()
        return chain

    def subtree(self, i: int) -> list[int]:
        out, stack = [], [i]
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(self.children[n]))
        return out

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` is a proper ancestor of ``b``."""
        while b in self.parent:
            b = self.parent[b]
            if b == a:
                return True
        return False


def build_forest(locations: list[LocEntry]) -> LocForest:
    ranges = {e.index: e.range for e in locations}
    order = sorted(locations, key=lambda e: (e.range.start, _neg(e.range.end), e.index))
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {e.index: [] for e in locations}
    roots: list[int] = []
    stack: list[LocEntry] = []
    for cur in order:
        while stack and stack[-1].range.end <= cur.range.start:
            stack.pop()
        if stack:
            top = stack[-1]
            if top.range == cur.range:
                raise MalformedLocations(
                    f"locations {top.index} and {cur.index} share range {cur.range}")
            if cur.range.end > top.range.end:
                raise MalformedLocations(
                    f"locations {top.index} ({top.range}) and {cur.index} ({cur.range}) partially overlap")
            parent[cur.index] = top.index
            children[top.index].append(cur.index)
        else:
            roots.append(cur.index)
        stack.append(cur)
    return LocForest([e.index for e in locations], ranges, parent, children, roots)


def _neg(pos: tuple[int, int]) -> tuple[int, int]:
    return (-pos[0], -pos[1])


def assign_weights(f: LocForest, declared: dict[int, int] | None = None) -> LocForest:
    """Declared weights win; other nodes weigh the size of their sub-AST."""
    declared = declared or {}
    weight = {}
    for i in f.nodes:
        weight[i] = declared[i] if i in declared else len(f.subtree(i))
    return replace(f, weight=weight)


def forest_for(doc: IrDoc) -> LocForest:
    return assign_weights(build_forest(doc.locations), doc.declared_weights())


@dataclass
class SmtScript:
    commands: list[str]
    location_names: dict[int, str]
    encoding: str = "deep"

    @property
    def text(self) -> str:
        return "\n".join(self.commands) + "\n"

    def __str__(self) -> str:
        return self.text


class _Encoder:
    def __init__(self, doc: IrDoc, quote: bool, fixed: dict[int, bool] | None):
        validate(doc)
        self.doc = doc
        self.forest = forest_for(doc)
        self.fixed = fixed or {}
        self.arrow = "|->|" if quote else "->"
        self.sel = ("|->.1|", "|->.2|") if quote else ("->.1", "->.2")
        grounds: dict[str, None] = {}
        for c in doc.all_constraints():
            if isinstance(c, Eq):
                for g in ground_names(c.lhs):
                    grounds.setdefault(g)
                for g in ground_names(c.rhs):
                    grounds.setdefault(g)
        self.grounds = {g: self._ground_symbol(g) for g in grounds}
        self.scheme_names = {s.name: self._scheme_symbol(s.name) for s in doc.schemes}
        self.arity = {s.name: len(s.params) for s in doc.schemes}

    @staticmethod
    def _ground_symbol(name: str) -> str:
        if name in SMT_RESERVED or _LOC_NAME.fullmatch(name):
            return "g!" + name
        return name

    def _scheme_symbol(self, name: str) -> str:
        if name in SMT_RESERVED or _LOC_NAME.fullmatch(name) or name in self.grounds:
            return "s!" + name
        return name

    @staticmethod
    def loc(i: int) -> str:
        return f"l{i}"

    def type(self, t: Monotype) -> SExp:
        if isinstance(t, TVar):
            return "-" + t.name
        if isinstance(t, TGround):
            return self.grounds[t.name]
        return [self.arrow, self.type(t.dom), self.type(t.cod)]

    def constraint(self, c: Constraint) -> SExp:
        if isinstance(c, Eq):
            return ["=", self.type(c.lhs), self.type(c.rhs)]
        fn = self.scheme_names[c.scheme]
        if not c.args:
            return fn
        return [fn] + ["-" + v.name for v in c.args]

    # guard structure

    def deep(self, cs: list[Constraint]) -> list[SExp]:
        """One nested implication tree per root that carries constraints."""
        at: dict[int, list[SExp]] = {}
        for c in cs:
            at.setdefault(c.loc, []).append(self.constraint(c))
        needed: set[int] = set()
        for i in at:
            needed.update(self.forest.ancestors(i))

        def tree(n: int) -> SExp:
            parts = list(at.get(n, []))
            parts += [tree(ch) for ch in self.forest.children[n] if ch in needed]
            body = parts[0] if len(parts) == 1 else ["and"] + parts
            return ["=>", self.loc(n), body]

        return [tree(r) for r in self.forest.roots if r in needed]

    def flat(self, cs: list[Constraint]) -> list[SExp]:
        out = []
        for c in cs:
            chain = [self.loc(i) for i in self.forest.ancestors(c.loc)]
            guard = chain[0] if len(chain) == 1 else ["and"] + chain
            out.append(["=>", guard, self.constraint(c)])
        return out

    def script(self, encoding: str) -> SmtScript:
        if encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {encoding!r}")
        guards = self.deep if encoding == "deep" else self.flat
        cmds = []
        ctors = [f"({sym})" for sym in self.grounds.values()] or ["(g!any)"]
        ctors.append(f"({self.arrow} ({self.sel[0]} Type) ({self.sel[1]} Type))")
        cmds.append(f"(declare-datatype Type ({' '.join(ctors)}))")

        names = {}
        for e in self.doc.locations:
            name = names[e.index] = self.loc(e.index)
            cmds.append(f"(declare-const {name} Bool)")
            if e.index in self.fixed:
                cmds.append(f"(assert {name})" if self.fixed[e.index] else f"(assert (not {name}))")
            elif self.forest.weight[e.index] == 0:
                cmds.append(f"(assert {name})")
            else:
                cmds.append(f"(assert-soft {name} :weight {self.forest.weight[e.index]})")

        free: dict[TVar, None] = {}
        for s in self.doc.schemes:
            for v in s.free_vars():
                free.setdefault(v)
        for v in constraint_vars(self.doc.constraints):
            free.setdefault(v)
        for v in free:
            cmds.append(f"(declare-const -{v.name} Type)")

        for s in self.doc.schemes:
            parts = guards(list(s.body))
            body = "true" if not parts else dump(parts[0] if len(parts) == 1 else ["and"] + parts)
            params = " ".join(f"(-{p.name} Type)" for p in s.params)
            cmds.append(f"(define-fun {self.scheme_names[s.name]} ({params}) Bool {body})")

        for a in guards(list(self.doc.constraints)):
            cmds.append(f"(assert {dump(a)})")

        cmds.append("(check-sat)")
        cmds.append("(get-objectives)")
        if names:
            cmds.append(f"(get-value ({' '.join(names.values())}))")
        return SmtScript(cmds, names, encoding)


def encode(doc: IrDoc, encoding: str = "flat", *, quote: bool = False,
           fixed: dict[int, bool] | None = None) -> SmtScript:
    """Translate ``doc``; ``fixed`` pins location Booleans with hard assertions."""
    return _Encoder(doc, quote, fixed).script(encoding)


def encode_deep(doc: IrDoc, **kw) -> SmtScript:
    return encode(doc, "deep", **kw)


def encode_flat(doc: IrDoc, **kw) -> SmtScript:
    return encode(doc, "flat", **kw)
