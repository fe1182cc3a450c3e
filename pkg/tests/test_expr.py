import pytest
from hypothesis import given

from starproc.errors import AlphabetError, ParseError, VertexCapExceeded
from starproc.expr import (
    EMPTY_STEP,
    ONE,
    ZERO,
    Act,
    Prod,
    Star,
    Sum,
    chart_of,
    parse,
    step,
    terminates,
    to_str,
)

from conftest import exprs

a, b, c = Act("a"), Act("b"), Act("c")


def test_parse_grammar():
    assert parse("a.(b+c)*") is Prod(a, Star(Sum(b, c)))
    assert parse("0") is ZERO
    assert parse("a·b·c") is Prod(Prod(a, b), c)
    assert parse("a+b·c*") is Sum(a, Prod(b, Star(c)))


def test_parse_errors():
    with pytest.raises(ParseError):
        parse("a+(b")
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(AlphabetError):
        parse("a+d", alphabet={"a", "b"})


def test_terminates():
    assert terminates(ONE)
    assert not terminates(Prod(Sum(ONE, a), b))
    assert terminates(Star(ZERO))
    assert not terminates(ZERO)


def test_step():
    assert step(a) == {("a", ONE)}
    assert step(Sum(a, Prod(b, c))) == {("a", ONE), ("b", Prod(ONE, c))}
    assert step(ZERO) == frozenset()


def test_chart_of_star():
    ch = chart_of(Star(a))
    s, t = Star(a), Prod(ONE, Star(a))
    assert {to_str(v) for v in (s, t)} == ch.vertices
    assert ch.terminating == ch.vertices
    assert ch.transitions == {(to_str(s), "a", to_str(t)), (to_str(t), "a", to_str(t))}


def test_chart_of_product():
    ch = chart_of(Prod(a, b))
    assert ch.vertices == {"a·b", "1·b", "1"}
    assert ch.terminating == {"1"}
    assert ch.transitions == {("a·b", "a", "1·b"), ("1·b", "b", "1")}


def test_chart_of_zero():
    ch = chart_of(ZERO)
    assert len(ch.vertices) == 1 and not ch.transitions and not ch.terminating


def test_vertex_cap():
    with pytest.raises(VertexCapExceeded):
        chart_of(parse("a*·b*·c*"), max_vertices=2)


def test_sum_dedup_single_vertex():
    # a+a and a share every derivative, so the chart has no duplicate copies
    assert len(chart_of(parse("a+a")).vertices) == 2


@given(exprs)
def test_print_parse_roundtrip(e):
    assert parse(to_str(e)) is e


@given(exprs)
def test_chart_has_no_empty_steps_and_starts_at_e(e):
    ch = chart_of(e)
    assert ch.start == to_str(e)
    assert all(label != EMPTY_STEP for _, label, _ in ch.transitions)
    # closed under step
    for v in ch.vertices:
        for _, _, w in ch.out[v]:
            assert w in ch.vertices
