"""Parser, renderer, error positions, and the round-trip property."""

from fractions import Fraction as Q

import pytest

from setmeans import (
    CutAbove,
    Finite,
    GeomSeq,
    Interval,
    Leaf,
    ParseError,
    Tower,
    Translate,
    Union,
    ValidationError,
    gen_corpus,
    normalize,
    parse,
    render,
    render_set,
)


def test_parse_union_of_intervals():
    e = parse("[0,2] U [4,5]")
    assert isinstance(e, Union)
    assert e.parts == (Leaf(Interval(Q(0), Q(2))), Leaf(Interval(Q(4), Q(5))))


def test_parse_shift():
    e = parse("shift(seq(0,1,1/2), 3)")
    assert e == Translate(Leaf(GeomSeq(Q(0), Q(1), Q(1, 2))), Q(3))


def test_parse_finite_and_rationals():
    e = parse("{1, -2/3, +4}")
    assert e == Leaf(Finite((Q(-2, 3), Q(1), Q(4))))


def test_parse_cuts():
    e = parse("above([0,2], 1)")
    assert e == CutAbove(Leaf(Interval(Q(0), Q(2))), Q(1))


def test_parse_tower_scale_extension():
    assert parse("tower(2, 0, 1/4)") == Leaf(Tower(2, Q(0), Q(1), Q(1, 4)))
    assert parse("tower(2, 0, 1/4, -1/2)") == Leaf(Tower(2, Q(0), Q(-1, 2), Q(1, 4)))


def test_validation_errors():
    with pytest.raises(ValidationError):
        parse("tower(2, 0, 1/2)")  # ratio at or above 1/3
    with pytest.raises(ValidationError):
        parse("cantor(0, 1, 2, 1/2)")
    with pytest.raises(ValidationError):
        parse("[3, 1]")
    with pytest.raises(ValidationError):
        parse("seq(0, 0, 1/2)")


MALFORMED = [
    ("", 1, 1),
    ("[0 2]", 1, 4),
    ("{1, }", 1, 5),
    ("seq(1, 2)", 1, 9),
    ("[0, 1] U", 1, 9),
    ("shift([0,1], )", 1, 14),
    ("(" * 3 + "[0,1]", 1, 9),
    ("[0,1] [2,3]", 1, 7),
    ("tower(1/2, 0, 1/4)", 1, 8),
    ("cantor(0, 1, 2, 1/0)", 1, 19),
    ("1/2", 1, 1),
    ("seq(0, 1, 1/2) U U", 1, 18),
]


@pytest.mark.parametrize("src,line,col", MALFORMED)
def test_error_positions(src, line, col):
    with pytest.raises(ParseError) as exc_info:
        parse(src)
    err = exc_info.value
    assert (err.line, err.column) == (line, col)
    assert err.expected


def test_render_canonical_forms():
    assert render(Leaf(Finite((Q(1), Q(2))))) == "{1, 2}"
    assert render(Leaf(Interval(Q(0), Q(1)))) == "[0, 1]"
    assert render(Leaf(GeomSeq(Q(0), Q(1), Q(1, 2)))) == "seq(0, 1, 1/2)"
    assert render(Leaf(Tower(2, Q(0), Q(1), Q(1, 4)))) == "tower(2, 0, 1/4)"
    assert render(Translate(Leaf(Finite((Q(1),))), Q(2))) == "shift({1}, 2)"


def test_render_translated_finite_normalizes():
    e = Translate(Leaf(Finite((Q(1),))), Q(2))
    assert render_set(normalize(e)) == "{3}"


def test_round_trip_on_corpora():
    count = 0
    for profile in ("finite", "sequences", "towers", "intervals", "cantor", "mixed"):
        for e in gen_corpus(101, 60, profile):
            text = render(e)
            assert normalize(parse(text)) == normalize(e)
            count += 1
    assert count == 360


def test_round_trip_normalized_sets():
    for e in gen_corpus(103, 80, "mixed"):
        bs = normalize(e)
        assert normalize(parse(render_set(bs))) == bs
