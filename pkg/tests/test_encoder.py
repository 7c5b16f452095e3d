from pathlib import Path

import pytest

from tyloc import sexp
from tyloc.encoder import assign_weights, build_forest, encode, forest_for
from tyloc.errors import MalformedLocations
from tyloc.frontend import SourceRange
from tyloc.ir import IrDoc, LocEntry, parse_ir
from tyloc.pipeline import source_to_ir

DATA = Path(__file__).parent / "data"
WORKED_SMT_DEEP_TAIL = """\
(declare-const -x0 Type)
(declare-const -l2 Type)
(declare-const -x1 Type)
(declare-const -l4 Type)
(define-fun x ((-x Type)) Bool (=> l0 (=> l1 (= -x string))))
(assert (=> l0 (and (x -x0) (=> l4 (and (= -l2 (-> -x1 -l4)) (=> l2 (= -l2 (-> bool bool))) (=> l3 (x -x1)))))))
(check-sat)
(get-objectives)
(get-value (l0 l1 l2 l3 l4))
"""


@pytest.fixture
def worked():
    return parse_ir(DATA.joinpath("worked.tir").read_text())


def loc(i, text, w=None):
    return LocEntry(i, SourceRange.parse(text), w)


def test_worked_forest(worked):
    f = forest_for(worked)
    assert f.roots == [0]
    assert f.children[0] == [1, 4]
    assert f.children[4] == [2, 3]
    assert f.parent[2] == 4 and f.parent.get(0) is None
    assert f.ancestors(3) == [0, 4, 3]
    assert f.weight == {0: 5, 1: 1, 2: 1, 3: 1, 4: 3}


def test_declared_weights_override():
    f = assign_weights(build_forest([loc(0, "1;0-1;9"), loc(1, "1;0-1;3", 7)]), {1: 7})
    assert f.weight == {0: 2, 1: 7}


def test_partial_overlap_is_rejected():
    with pytest.raises(MalformedLocations):
        build_forest([loc(0, "1;0-1;5"), loc(1, "1;3-1;8")])
    with pytest.raises(MalformedLocations):
        build_forest([loc(0, "1;0-1;5"), loc(1, "1;0-1;5")])


def test_several_roots():
    f = build_forest([loc(0, "1;0-1;4"), loc(1, "2;0-2;3"), loc(2, "2;1-2;2")])
    assert f.roots == [0, 1] and f.children[1] == [2]


def test_worked_deep_script(worked):
    text = encode(worked, "deep").text
    assert text.startswith("(declare-datatype Type ((string) (bool) (-> (->.1 Type) (->.2 Type))))\n")
    for i, w in [(0, 5), (1, 1), (2, 1), (3, 1), (4, 3)]:
        assert f"(declare-const l{i} Bool)\n(assert-soft l{i} :weight {w})\n" in text
    assert text.endswith(WORKED_SMT_DEEP_TAIL)


def test_worked_flat_guards(worked):
    text = encode(worked, "flat").text
    assert "(assert (=> (and l0 l4 l3) (x -x1)))" in text
    assert "(assert (=> l0 (x -x0)))" in text
    assert "(define-fun x ((-x Type)) Bool (=> (and l0 l1) (= -x string)))" in text


def _guards(expr, acc, out):
    """Collect (guard chain, constraint) pairs from a deep assertion."""
    if isinstance(expr, list) and expr and expr[0] == "=>":
        _guards(expr[2], acc + [expr[1]], out)
    elif isinstance(expr, list) and expr and expr[0] == "and":
        for e in expr[1:]:
            _guards(e, acc, out)
    else:
        out.append((tuple(acc), sexp.dump(expr)))


def test_deep_guards_follow_the_forest():
    doc = source_to_ir("let f = fun a -> if a then 1 else 2;;\nf (not true)")
    forest = forest_for(doc)
    script = sexp.parse_all(encode(doc, "deep").text)
    pairs = []
    for cmd in script:
        if cmd[0] == "assert":
            _guards(cmd[1], [], pairs)
        if cmd[0] == "define-fun":
            _guards(cmd[4], [], pairs)
    assert pairs
    for chain, _ in pairs:
        idx = [int(g[1:]) for g in chain]
        assert idx == forest.ancestors(idx[-1])


def test_hard_location_is_asserted(worked):
    text = encode(worked.with_hard([2])).text
    assert "(assert l2)" in text and "assert-soft l2" not in text


def test_quoted_arrow(worked):
    text = encode(worked, quote=True).text
    assert "(|->| (|->.1| Type) (|->.2| Type))" in text
    assert "(|->| -x1 -l4)" in text


def test_reserved_and_clashing_names_are_mangled():
    doc = parse_ir("0 1;0-1;1\n1 2;0-2;1\n---\n1 l1('r) {\n}\n---\n0 'a = Bool\n1 l1('b)\n")
    text = encode(doc).text
    assert "(g!Bool)" in text and "(define-fun s!l1 ((-r Type)) Bool true)" in text


def test_encoding_is_deterministic():
    doc = source_to_ir("let g = fun h -> h 1 in g not")
    assert encode(doc, "deep").text == encode(doc, "deep").text
    assert encode(doc, "flat").text == encode(doc, "flat").text


def test_empty_document_encodes(z3_available):
    from tyloc.solver import solve
    src = solve(IrDoc([], [], []))
    assert src.removed == frozenset() and src.total_weight == 0
