from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from tyloc.errors import (ArityMismatch, DanglingLocIndex, IrSyntaxError, UnknownScheme)
from tyloc.generate import corpus
from tyloc.ir import IrDoc, parse_ir, print_ir
from tyloc.pipeline import source_to_ir
from tyloc.terms import TArrow, TVar, parse_type

DATA = Path(__file__).parent / "data"


def test_empty_document():
    assert print_ir(IrDoc([], [], [])) == "---\n---\n"
    doc = parse_ir("---\n---\n")
    assert doc.locations == [] and doc.schemes == [] and doc.constraints == []


def test_nested_arrow_prints_with_parentheses():
    text = "0 1;0-1;1\n---\n---\n0 'c = ('a -> 'b) -> 'c\n"
    doc = parse_ir(text)
    (c,) = doc.constraints
    assert c.rhs == TArrow(TArrow(TVar("a"), TVar("b")), TVar("c"))
    assert print_ir(doc) == text
    assert str(parse_type("'a -> 'b -> 'c")) == "'a -> 'b -> 'c"


@pytest.mark.parametrize("text, exc", [
    ("0 1;0-1;1\n---\n---\n9 'a = int\n", DanglingLocIndex),
    ("0 1;0-1;1\n---\n---\n0 nope('a)\n", UnknownScheme),
    ("0 1;0-1;1\n---\n0 f('a) {\n}\n---\n0 f('a, 'b)\n", ArityMismatch),
    ("0 1;0-1;1\n---\n0 f('a) {\n  0 g('a)\n}\n1 g('b) {\n}\n---\n", UnknownScheme),
    ("0 1;0-1;1\n---\n---\n0 'a = \n", IrSyntaxError),
    ("0 1;0-1;1\n---\n", IrSyntaxError),
])
def test_invalid_documents(text, exc):
    with pytest.raises(exc):
        parse_ir(text)


def test_whitespace_insensitive():
    tight = parse_ir(DATA.joinpath("worked.tir").read_text())
    loose = parse_ir("0 1;0-1;23 1 1;8-1;12 2 1;17-1;20 3 1;21-1;22 4 1;16-1;23 --- "
                     "0 x('x) { 1 'x = string } --- 0 x('x0) 2 'l2 = bool -> bool "
                     "3 x('x1) 4 'l2 = 'x1 -> 'l4")
    assert print_ir(tight) == print_ir(loose)


def test_declared_weights_survive():
    doc = parse_ir(DATA.joinpath("nested.tir").read_text())
    assert doc.declared_weights() == {1: 2, 6: 0}
    assert doc.with_hard([3]).declared_weights() == {1: 2, 3: 0, 6: 0}
    with pytest.raises(DanglingLocIndex):
        doc.with_hard([42])


@pytest.mark.parametrize("name", ["worked.tir", "nested.tir"])
def test_hand_written_files_are_idempotent(name):
    once = print_ir(parse_ir(DATA.joinpath(name).read_text()))
    assert print_ir(parse_ir(once)) == once


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_round_trip(seed):
    for src in corpus(seed, 3):
        doc = source_to_ir(src)
        assert parse_ir(print_ir(doc)) == doc
