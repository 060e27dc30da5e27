import random

import pytest
from hypothesis import given, settings, strategies as st

from sparseq import rpqlang as R

from helpers import rand_expr


def test_basic_concat():
    q = R.parse("?x  a/b  ?y")
    assert q.subject == R.Variable("x")
    assert q.object == R.Variable("y")
    assert q.expr == R.Concat((R.Label("a"), R.Label("b")))


def test_subway_example():
    q = R.parse("CentralPark  walk/(N|Q|R)+/walk  ?y")
    assert q.subject == R.Constant("CentralPark")
    assert q.expr == R.Concat(
        (
            R.Label("walk"),
            R.Plus(R.Alt((R.Label("N"), R.Label("Q"), R.Label("R")))),
            R.Label("walk"),
        )
    )


def test_inverse_star_both_ends_same_variable():
    q = R.parse("?x  (^p)*  ?x")
    assert q.expr == R.Star(R.InverseLabel("p"))
    assert q.subject == q.object == R.Variable("x")


def test_precedence():
    # postfix > '/' > '|'
    assert R.parse_expr("a/b|c") == R.Alt((R.Concat((R.Label("a"), R.Label("b"))), R.Label("c")))
    assert R.parse_expr("a|b/c") == R.Alt((R.Label("a"), R.Concat((R.Label("b"), R.Label("c")))))
    assert R.parse_expr("a/b*") == R.Concat((R.Label("a"), R.Star(R.Label("b"))))
    assert R.parse_expr("(a/b)*") == R.Star(R.Concat((R.Label("a"), R.Label("b"))))


def test_postfix_stacking():
    assert R.parse_expr("a*+?") == R.Optional(R.Plus(R.Star(R.Label("a"))))


def test_epsilon_and_quoting():
    assert R.parse_expr("eps") == R.Epsilon()
    assert R.parse_expr("<eps>") == R.Label("eps")
    assert R.parse_expr("<has part>") == R.Label("has part")
    assert R.parse_expr("^<a\\>b>") == R.InverseLabel("a>b")
    q = R.parse("<New York>  walk  ?y")
    assert q.subject == R.Constant("New York")


def test_optional_is_not_a_variable():
    # '?' directly before an identifier is a variable; detached it is postfix
    q = R.parse("?x  a?  ?y")
    assert q.expr == R.Optional(R.Label("a"))


def test_flattened_nary():
    e = R.parse_expr("a/b/c/d")
    assert isinstance(e, R.Concat) and len(e.children) == 4
    e = R.parse_expr("a|b|c")
    assert isinstance(e, R.Alt) and len(e.children) == 3
    with pytest.raises(ValueError):
        R.Concat((R.Label("a"),))
    with pytest.raises(ValueError):
        R.Alt((R.Label("a"),))


@pytest.mark.parametrize(
    "text,where",
    [
        ("?x  a/  ?y", "label"),
        ("?x  (a  ?y", ")"),
        ("?x  <open  ?y", "unterminated"),
        ("?x  <a\\qb>  ?y", "escape"),
        ("?x  ^  ?y", "label"),
        ("?x  a  ?y  extra", "trailing"),
        ("a b c d", "trailing"),
        ("?x  a  ", "variable or node"),
    ],
)
def test_syntax_errors_have_positions(text, where):
    with pytest.raises(R.RpqSyntaxError) as err:
        R.parse(text)
    assert isinstance(err.value.pos, int)
    assert where.split()[0] in str(err.value)


def test_print_round_trip_examples():
    for text in ["?x  a/b  ?y", "CentralPark  walk/(N|Q|R)+/walk  ?y", "?x  (^p)*  ?x"]:
        q = R.parse(text)
        assert R.parse(R.print_query(q)) == q


def test_print_minimal_parens():
    assert R.print_expr(R.parse_expr("a/b|c")) == "a/b|c"
    assert R.print_expr(R.parse_expr("(a|b)/c")) == "(a|b)/c"
    assert R.print_expr(R.parse_expr("(a/b)*")) == "(a/b)*"


def test_random_round_trip():
    rng = random.Random(30)
    for _ in range(500):
        ast = rand_expr(rng, 4, labels=("a", "walk", "has part", "eps", "x>y"))
        assert R.parse_expr(R.print_expr(ast)) == ast


_names = st.text(
    st.characters(codec="utf-8", exclude_characters="\x00"), min_size=1, max_size=8
)


@settings(max_examples=200, deadline=None)
@given(_names, _names)
def test_any_label_and_constant_survives_printing(label, const):
    q = R.RpqQuery(R.Constant(const), R.Star(R.InverseLabel(label)), R.Variable("y"))
    assert R.parse(R.print_query(q)) == q
