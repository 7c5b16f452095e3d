import pytest

from tyloc import frontend as fe
from tyloc.constraints import (FreshSupply, TypingEnv, generalize, infer_constraints,
                               load_prelude, parse_prelude)
from tyloc.errors import PreludeError, UnboundVariable
from tyloc.oracle import ActiveSet, classical_infer, expand, satisfiable
from tyloc.encoder import forest_for
from tyloc.pipeline import program_to_ir
from tyloc.terms import BOOL, INT, STRING, Eq, TArrow, TVar, parse_type
from tyloc.generate import corpus

from conftest import WORKED_SOURCE


def lines(cs):
    return [str(c) for c in cs]


def test_int_literal_rule():
    g = infer_constraints(fe.parse("5"))
    assert lines(g.constraints) == ["0 'l0 = int"]
    assert g.result_vars == [TVar("l0")]
    assert g.schemes == []


def test_worked_constraints(prelude):
    g = infer_constraints(fe.parse(WORKED_SOURCE), prelude)
    assert lines(g.constraints) == [
        "0 x('x0)",
        "3 'l3 = bool -> bool",
        "4 x('x1)",
        "2 'l3 = 'x1 -> 'l2",
    ]
    (s,) = g.schemes
    assert s.name == "x" and s.params == (TVar("x"),) and s.loc == 0
    assert lines(s.body) == ["1 'x = string"]


def test_abstraction_and_application():
    g = infer_constraints(fe.parse("(fun y -> y) 1"), TypingEnv())
    assert lines(g.constraints) == [
        "2 'l2 = 'y",
        "1 'l1 = 'y -> 'l2",
        "3 'l3 = int",
        "0 'l1 = 'l3 -> 'l0",
    ]


def test_conditional_rule_uses_child_locations():
    g = infer_constraints(fe.parse("if true then 1 else 2"), TypingEnv())
    assert lines(g.constraints)[-3:] == ["1 'l1 = bool", "2 'l2 = 'l0", "3 'l3 = 'l0"]


def test_generalize_identity():
    ay, g = TVar("y"), TVar("g")
    s = generalize([Eq(1, g, TArrow(ay, ay))], g, TypingEnv(), 0, "id")
    assert s.params == (ay, g)
    assert s.result == g


def test_generalize_keeps_environment_variables_free():
    a, g = TVar("a"), TVar("g")
    env = TypingEnv({"z": a})
    s = generalize([Eq(1, g, TArrow(a, INT))], g, env, 0)
    assert s.params == (g,)
    assert list(s.free_vars()) == [a]


def test_lambda_bound_variable_is_not_generalized():
    p = fe.parse("fun z -> let w = z in add w 1")
    g = infer_constraints(p)
    (s,) = g.schemes
    assert TVar("z") not in s.params
    assert TVar("z") in list(s.free_vars())


def test_fresh_supply():
    s = FreshSupply()
    assert s.fresh("x") == TVar("x0")
    assert s.named("x0") != TVar("x0")
    names = {s.fresh("t").name for _ in range(10**6)}
    assert len(names) == 10**6


def test_unbound_variable_has_position():
    with pytest.raises(UnboundVariable) as info:
        infer_constraints(fe.parse("let a = 1 in b"))
    assert info.value.name == "b"
    assert str(info.value.range) == "1;13-1;14"


def test_prelude_parsing(tmp_path):
    env = parse_prelude("# built-ins\nneg : int -> int\n\n")
    assert env.lookup("neg") == parse_type("int -> int")
    with pytest.raises(PreludeError):
        parse_prelude("id : 'a -> 'a")
    with pytest.raises(PreludeError):
        parse_prelude("broken")
    f = tmp_path / "p.txt"
    f.write_text("pi : float\n")
    assert load_prelude(f).lookup("pi").name == "float"


def test_shadowed_let_names_get_distinct_schemes():
    g = infer_constraints(fe.parse("let a = 1 in let a = true in a"))
    assert [s.name for s in g.schemes] == ["a", "a_1"]


def test_let_polymorphism_is_typable():
    src = "let id = fun v -> v in if id true then id 1 else 2"
    doc = program_to_ir(fe.parse(src))
    forest = forest_for(doc)
    assert satisfiable(expand(doc, ActiveSet.everything(forest)))


def test_constraints_agree_with_classical_inference(prelude):
    for src in corpus(11, 120):
        p = fe.parse(src)
        doc = program_to_ir(p, prelude)
        ok = bool(satisfiable(expand(doc, ActiveSet.everything(forest_for(doc)))))
        assert ok == classical_infer(p, prelude).ok, src
