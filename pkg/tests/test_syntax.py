import pytest
from hypothesis import given, settings, strategies as st

from snrn.evaluator import value_of
from snrn.stdlib import STDLIB_NAMES, lookup
from snrn.syntax import ParseError, parse_document, parse_term, print_document, print_term
from snrn.terms import Comp, Cond, Pred, Proj, Succ, Zero
from snrn.tm import CORPUS, CORPUS_STEPS, compile_tm


def test_parse_examples():
    assert parse_term("(succ 0)") == Succ(0)
    t = parse_term("(comp (proj 2 1 3) :select (1 2) :safe ((pred)))")
    assert t == Comp(Proj(2, 1, 3), (1, 2), (Pred(),))


def test_numerals_in_binary():
    assert parse_term("(proj 0b10 1 0b11)") == Proj(2, 1, 3)


def test_f1_print_reparses():
    text = print_document({"f1": lookup("f1")})
    again = parse_document(text).defs["f1"]
    assert value_of(again, (1, 1, 0), (1,)) == 4


@pytest.mark.parametrize("name", STDLIB_NAMES)
def test_stdlib_roundtrip(name):
    text = print_document({"t": lookup(name)})
    assert print_document(parse_document(text).defs) == text


def test_compiled_machine_roundtrip():
    t = compile_tm(CORPUS["increment"](), CORPUS_STEPS)
    text = print_document({"inc": t})
    doc = parse_document(text)
    assert print_document(doc.public()) == text
    assert value_of(doc.defs["inc"], (3,), ()) == value_of(t, (3,), ())


def test_names_resolve_in_order_and_to_stdlib():
    doc = parse_document("(def two (comp f0 :select (1) :safe ((comp (succ 1) :safe ((zero 1 1)))) :sig (1 1)))\n(def again two)")
    assert value_of(doc.defs["again"], (0,), (0,)) == 2
    assert list(doc.public()) == ["two", "again"]
    assert doc.positions["again"] == (2, 1)


@pytest.mark.parametrize(
    "text,where",
    [
        ("(succ 0", (1, 1)),
        ("(bogus 1)", (1, 1)),
        ("(succ 0) (succ 1)", None),
        ("(comp (succ 0)\n  :select (1) :safe ((nope)))", (2, 22)),
        ("(proj 1 x 2)", (1, 1)),
    ],
)
def test_parse_errors(text, where):
    with pytest.raises(ParseError) as e:
        parse_term(text)
    if where:
        assert (e.value.line, e.value.col) == where


def test_duplicate_definitions_rejected():
    with pytest.raises(ParseError):
        parse_document("(def a (pred)) (def a (pred))")


def test_malformed_tree_parses_and_fails_later():
    t = parse_term("(proj 1 1 5)")
    assert isinstance(t, Proj)


def terms(depth=3):
    leaves = st.one_of(
        st.just(Pred()), st.just(Cond()), st.builds(Succ, st.integers(0, 1)),
        st.builds(Zero, st.integers(0, 2), st.integers(0, 2)),
        st.builds(Proj, st.integers(0, 2), st.integers(0, 2), st.integers(1, 4)),
    )
    if depth == 0:
        return leaves
    sub = terms(depth - 1)
    comp = st.builds(
        Comp, sub, st.lists(st.integers(1, 3), max_size=2).map(tuple),
        st.lists(sub, max_size=3).map(tuple), st.integers(0, 3), st.integers(0, 3),
    )
    return st.one_of(leaves, comp)


@settings(max_examples=80, deadline=None)
@given(terms())
def test_print_parse_roundtrip(t):
    text = print_term(t)
    assert parse_term(text) == t
    assert print_term(parse_term(text)) == text
