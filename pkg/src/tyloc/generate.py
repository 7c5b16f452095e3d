"""Deterministic random programs over the ML fragment.

``well_typed`` builds programs type-directed from a target type; ``mutate``
breaks one or more leaves so the result is (usually) ill-typed. Programs are
returned as source text so they go through the real parser.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .constraints import DEFAULT_PRELUDE, parse_prelude
from .terms import BOOL, FLOAT, INT, STRING, Monotype, TArrow, TGround

GROUNDS = (INT, BOOL, STRING, FLOAT)
NAMES = ("x", "y", "z", "f", "g", "h", "a", "b")
_STRINGS = ("hi", "a", "ok", "")


def _builtins() -> dict[str, Monotype]:
    return dict(parse_prelude(DEFAULT_PRELUDE).items())


# mini AST: tuples tagged by their first element
#   ("lit", ground-name, value) ("var", name) ("fun", x, body) ("app", f, a)
#   ("if", c, t, e) ("let", x, bound, body)

def size(node) -> int:
    tag = node[0]
    if tag in ("lit", "var"):
        return 1
    if tag == "fun":
        return 1 + size(node[2])
    if tag == "app":
        return 1 + size(node[1]) + size(node[2])
    if tag == "if":
        return 1 + size(node[1]) + size(node[2]) + size(node[3])
    return 1 + size(node[2]) + size(node[3])


def _fmt_lit(ground: str, value) -> str:
    if ground == "string":
        return '"' + value + '"'
    if ground == "bool":
        return "true" if value else "false"
    if ground == "float":
        return repr(float(value))
    return str(value)


def to_source(node) -> str:
    tag = node[0]
    if tag == "lit":
        return _fmt_lit(node[1], node[2])
    if tag == "var":
        return node[1]
    if tag == "fun":
        return f"fun {node[1]} -> {to_source(node[2])}"
    if tag == "if":
        return f"if {to_source(node[1])} then {to_source(node[2])} else {to_source(node[3])}"
    if tag == "let":
        return f"let {node[1]} = {to_source(node[2])} in {to_source(node[3])}"
    f, a = node[1], node[2]
    fs = to_source(f) if f[0] in ("lit", "var", "app") else f"({to_source(f)})"
    as_ = to_source(a) if a[0] in ("lit", "var") else f"({to_source(a)})"
    return f"{fs} {as_}"


@dataclass(frozen=True)
class _Poly:
    """Generator-side polymorphic bindings: identity or constant function."""
    kind: str  # "id" | "const"

    def matches(self, ty: Monotype) -> bool:
        if not isinstance(ty, TArrow):
            return False
        if self.kind == "id":
            return ty.dom == ty.cod
        return isinstance(ty.cod, TArrow) and ty.cod.cod == ty.dom


_POLY_DEFS = {"id": lambda x, y: ("fun", x, ("var", x)),
              "const": lambda x, y: ("fun", x, ("fun", y, ("var", x)))}


class Generator:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.builtins = _builtins()

    def ground(self) -> TGround:
        return self.rng.choice(GROUNDS)

    def literal(self, ground: TGround):
        r = self.rng
        value = {"int": lambda: r.randint(0, 9), "bool": lambda: r.random() < 0.5,
                 "string": lambda: r.choice(_STRINGS), "float": lambda: r.choice((0.5, 1.0, 2.5))}[ground.name]()
        return ("lit", ground.name, value)

    def matching_vars(self, ty: Monotype, env: dict) -> list[str]:
        out = [n for n, t in env.items()
               if (t.matches(ty) if isinstance(t, _Poly) else t == ty)]
        out += [n for n, t in self.builtins.items() if t == ty and n not in env]
        return out

    def leaf(self, ty: Monotype, env: dict):
        names = self.matching_vars(ty, env)
        if isinstance(ty, TGround):
            if names and self.rng.random() < 0.4:
                return ("var", self.rng.choice(names))
            return self.literal(ty)
        if names:
            return ("var", self.rng.choice(names))
        x = self.rng.choice(NAMES)
        return ("fun", x, self.leaf(ty.cod, {**env, x: ty.dom}))

    def expr(self, ty: Monotype, env: dict, budget: int):
        r = self.rng
        options = ["leaf"] if budget < 5 else []
        if budget >= 3:
            options += ["app", "app"]
            if isinstance(ty, TArrow):
                options += ["fun", "fun"]
        if budget >= 4:
            options += ["if", "let", "poly"]
        choice = r.choice(options)
        if choice == "leaf":
            return self.leaf(ty, env)
        if choice == "fun":
            x = r.choice(NAMES)
            return ("fun", x, self.expr(ty.cod, {**env, x: ty.dom}, budget - 1))
        if choice == "app":
            arg_ty = self.ground()
            fb = r.randint(1, budget - 2)
            return ("app", self.expr(TArrow(arg_ty, ty), env, fb),
                    self.expr(arg_ty, env, budget - 1 - fb))
        if choice == "if":
            rest = budget - 1
            cb = r.randint(1, max(1, rest // 3))
            tb = r.randint(1, max(1, (rest - cb) // 2))
            return ("if", self.expr(BOOL, env, cb), self.expr(ty, env, tb),
                    self.expr(ty, env, max(1, rest - cb - tb)))
        if choice == "let":
            x = r.choice(NAMES)
            bty = self.ground()
            bb = r.randint(1, budget - 2)
            return ("let", x, self.expr(bty, env, bb),
                    self.expr(ty, {**env, x: bty}, budget - 1 - bb))
        # let-bound polymorphic helper used at the target type
        kind = r.choice(("id", "const"))
        x, y, f = r.sample(NAMES, 3)
        bound = _POLY_DEFS[kind](x, y)
        body_env = {**env, f: _Poly(kind)}
        return ("let", f, bound, self.use_poly(f, kind, ty, body_env, budget - 1 - size(bound)))

    def use_poly(self, f: str, kind: str, ty: Monotype, env: dict, budget: int):
        """An expression of type ``ty`` that applies the polymorphic ``f``."""
        budget = max(budget, 3)
        if kind == "id":
            return ("app", ("var", f), self.expr(ty, env, budget - 2))
        other = self.ground()
        ab = max(1, (budget - 3) // 2)
        return ("app", ("app", ("var", f), self.expr(ty, env, ab)),
                self.expr(other, env, max(1, budget - 3 - ab)))

    def program(self, budget: int):
        """A list of top-level items: ("item", node) or ("top", name, node)."""
        r = self.rng
        target = self.ground() if r.random() < 0.8 else TArrow(self.ground(), self.ground())
        if r.random() < 0.3 and budget >= 7:
            kind = r.choice(("id", "const"))
            f, x, y = r.sample(NAMES, 3)
            bound = _POLY_DEFS[kind](x, y)
            rest = budget - 1 - size(bound)
            return [("top", f, bound), ("item", self.use_poly(f, kind, target, {f: _Poly(kind)}, rest))]
        return [("item", self.expr(target, {}, budget))]

    # -- mutation -----------------------------------------------------------

    def mutate(self, items, count: int = 1):
        for _ in range(count):
            leaves = []
            for k, it in enumerate(items):
                _collect_leaves(it[-1], (k,), leaves)
            if not leaves:
                return items
            path, leaf = self.rng.choice(leaves)
            items = _replace(items, path, self.break_leaf(leaf))
        return items

    def break_leaf(self, leaf):
        if leaf[0] == "lit" or self.rng.random() < 0.3:
            choices = [g for g in GROUNDS if leaf[0] != "lit" or g.name != leaf[1]]
            return self.literal(self.rng.choice(choices))
        if self.rng.random() < 0.5:
            return self.literal(self.ground())
        name = self.rng.choice([n for n in self.builtins if n != leaf[1]])
        return ("var", name)


def _collect_leaves(node, path, out) -> None:
    if node[0] in ("lit", "var"):
        out.append((path, node))
        return
    start = 2 if node[0] in ("fun", "let") else 1
    for k in range(start, len(node)):
        _collect_leaves(node[k], path + (k,), out)


def _replace_in(node, path, new):
    if not path:
        return new
    k = path[0]
    return node[:k] + (_replace_in(node[k], path[1:], new),) + node[k + 1:]


def _replace(items, path, new):
    k = path[0]
    item = items[k]
    new_item = item[:-1] + (_replace_in(item[-1], path[1:], new),)
    return items[:k] + [new_item] + items[k + 1:]


def items_to_source(items) -> str:
    out = []
    for it in items:
        if it[0] == "top":
            out.append(f"let {it[1]} = {to_source(it[2])};;")
        else:
            out.append(to_source(it[1]))
    return "\n".join(out) + "\n"


def program_size(items) -> int:
    return sum(size(it[-1]) + (1 if it[0] == "top" else 0) for it in items)


def well_typed(seed: int, max_locations: int = 15, budget: int | None = None) -> str:
    """A generated program, well-typed by construction."""
    g = Generator(seed)
    budget = budget or max_locations
    while True:
        items = g.program(g.rng.randint(max(3, budget // 2), budget))
        if program_size(items) <= max_locations:
            return items_to_source(items)


def ill_typed(seed: int, max_locations: int = 15, budget: int | None = None,
              mutations: int | None = None) -> str:
    """A generated program with one or two broken leaves (usually ill-typed)."""
    g = Generator(seed)
    budget = budget or max_locations
    while True:
        items = g.program(g.rng.randint(max(3, budget // 2), budget))
        if program_size(items) <= max_locations:
            break
    n = mutations if mutations is not None else (1 if g.rng.random() < 0.7 else 2)
    return items_to_source(g.mutate(items, n))


def corpus(seed: int, count: int, max_locations: int = 15, ill_fraction: float = 0.7) -> list[str]:
    r = random.Random(seed)
    out = []
    for _ in range(count):
        s = r.randrange(1 << 30)
        if r.random() < ill_fraction:
            out.append(ill_typed(s, max_locations))
        else:
            out.append(well_typed(s, max_locations))
    return out
