from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from tyloc import frontend as fe
from tyloc.encoder import forest_for
from tyloc.errors import NoErrorSource, TooLarge
from tyloc.ir import parse_ir
from tyloc.oracle import (ActiveSet, Unifier, brute_force_min_sources, canonical,
                          classical_infer, expand, removal_weight, satisfiable)
from tyloc.pipeline import source_to_ir
from tyloc.terms import BOOL, INT, Eq, TArrow, TVar
from tyloc.generate import well_typed

from conftest import WORKED_SOURCE

WORKED = parse_ir((Path(__file__).parent / "data" / "worked.tir").read_text())
a, b, c = TVar("a"), TVar("b"), TVar("c")


def strs(eqs):
    return [str(e) for e in eqs]


def test_expand_worked():
    f = forest_for(WORKED)
    assert strs(expand(WORKED, ActiveSet.everything(f))) == [
        "1 'x0 = string", "2 'l2 = bool -> bool", "1 'x1 = string", "4 'l2 = 'x1 -> 'l4"]
    assert strs(expand(WORKED, ActiveSet.from_removed(f, {1}))) == [
        "2 'l2 = bool -> bool", "4 'l2 = 'x1 -> 'l4"]
    assert expand(WORKED, ActiveSet.from_removed(f, {0})) == []


def test_expand_two_levels():
    doc = parse_ir("0 1;0-1;9\n1 1;1-1;2\n2 1;3-1;4\n---\n"
                   "1 f('a) {\n  1 'a = int\n}\n2 g('b) {\n  2 f('b)\n}\n---\n0 g('z)\n")
    assert strs(expand(doc, ActiveSet.everything(forest_for(doc)))) == ["1 'z = int"]


@pytest.mark.parametrize("lhs, rhs, ok", [
    (a, INT, True),
    (TArrow(a, b), TArrow(INT, BOOL), True),
    (a, TArrow(a, INT), False),
    (TArrow(a, a), TArrow(INT, BOOL), False),
    (INT, BOOL, False),
    (TArrow(a, b), INT, False),
])
def test_unify(lhs, rhs, ok):
    assert Unifier().unify(lhs, rhs) is ok


def test_satisfiable_reports_first_failure_and_substitution():
    r = satisfiable([Eq(0, a, TArrow(b, c)), Eq(1, b, INT), Eq(2, c, BOOL)])
    assert r and r.substitution[a] == TArrow(INT, BOOL)
    bad = satisfiable([Eq(0, a, INT), Eq(1, a, BOOL)])
    assert not bad and bad.failed_loc == 1


def test_brute_force_worked_example_hand_numbering():
    assert brute_force_min_sources(WORKED) == (1, {frozenset({1}), frozenset({2}), frozenset({3})})


def test_brute_force_worked_from_source(prelude):
    doc = source_to_ir(WORKED_SOURCE, prelude)
    weight, sources = brute_force_min_sources(doc)
    assert weight == 1
    assert sources == {frozenset({1}), frozenset({3}), frozenset({4})}


def test_brute_force_branch_mismatch(prelude):
    doc = source_to_ir("if true then 1 else false", prelude)
    assert brute_force_min_sources(doc) == (1, {frozenset({2}), frozenset({3})})


def test_well_typed_is_weight_zero(prelude):
    assert brute_force_min_sources(source_to_ir("not true", prelude)) == (0, {frozenset()})


def test_limits():
    with pytest.raises(TooLarge):
        brute_force_min_sources(WORKED, limit=4)
    with pytest.raises(NoErrorSource):
        brute_force_min_sources(WORKED.with_hard([0, 1, 2, 3, 4]))


def test_removal_weight_ignores_nested_members():
    f = forest_for(WORKED)
    assert removal_weight(f, {4, 2}) == 3
    assert canonical(f, {0, 3}) == {0}


def test_classical_blames_the_argument(prelude):
    r = classical_infer(fe.parse(WORKED_SOURCE), prelude)
    assert not r.ok and r.blame == 4 and str(r.blame_range) == "1;20-1;21"


def test_classical_blames_the_condition(prelude):
    r = classical_infer(fe.parse("if 1 then 2 else 3"), prelude)
    assert not r.ok and r.blame == 1


def test_classical_blames_non_function(prelude):
    r = classical_infer(fe.parse("1 2"), prelude)
    assert not r.ok and r.blame == 1


def test_classical_let_polymorphism(prelude):
    r = classical_infer(fe.parse("let id = fun v -> v in if id true then id 1 else 2"), prelude)
    assert r.ok and r.types == [INT]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_well_typed_generator_is_sound(seed):
    src = well_typed(seed)
    assert classical_infer(fe.parse(src)).ok
    assert brute_force_min_sources(source_to_ir(src))[0] == 0
