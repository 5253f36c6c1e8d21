"""Diagram canonical form, total persistence, and serialization."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdmetric import (
    BASEPOINT,
    Diagram,
    HalfLineOrigin,
    ParseError,
    PlaneDiagonal,
    SpaceMismatch,
    canonicalize,
    empty_diagram,
    parse_diagram,
    total_persistence,
    write_diagram,
)


def plane():
    return PlaneDiagonal()


# -- canonical form -----------------------------------------------------------


def test_canonicalize_drops_A_points_and_merges():
    pair = plane()
    d = canonicalize(
        [
            pair.point(3.0, 3.0),  # on the diagonal: dropped
            pair.point(0.0, 4.0),
            (pair.point(0.0, 4.0), 2),
            BASEPOINT,
            pair.point(1.0, 2.0),
        ],
        pair,
    )
    assert d.points == (
        (pair.point(0.0, 4.0), 3),
        (pair.point(1.0, 2.0), 1),
    )
    assert d.size == 4
    assert not d.is_empty


def test_canonicalize_idempotent():
    pair = plane()
    d = canonicalize([pair.point(0.0, 4.0), (pair.point(5.0, 9.0), 2)], pair)
    again = canonicalize(d.points, pair)
    assert again == d


def test_canonicalize_zero_mult_and_errors():
    pair = plane()
    assert canonicalize([(pair.point(0.0, 4.0), 0)], pair).is_empty
    with pytest.raises(ValueError):
        canonicalize([(pair.point(0.0, 4.0), -1)], pair)
    other = PlaneDiagonal(1, "euclidean")
    with pytest.raises(SpaceMismatch):
        canonicalize([other.point(0.0, 4.0)], pair)


def test_equality_is_canonical_equality():
    pair = plane()
    a = canonicalize([pair.point(0.0, 4.0), pair.point(1.0, 3.0)], pair)
    b = canonicalize([pair.point(1.0, 3.0), pair.point(2.0, 2.0), pair.point(0.0, 4.0)], pair)
    assert a == b
    c = canonicalize([pair.point(0.0, 4.0)], pair)
    assert a != c


def test_multiplicity_lookup():
    pair = plane()
    d = canonicalize([(pair.point(0.0, 4.0), 2)], pair)
    assert d.multiplicity(pair.point(0.0, 4.0)) == 2
    assert d.multiplicity(pair.point(1.0, 4.0)) == 0
    assert list(d.iter_points()) == [pair.point(0.0, 4.0)] * 2


# -- total persistence ---------------------------------------------------------


def test_total_persistence_closed_forms():
    pair = plane()
    d = canonicalize([pair.point(0.0, 4.0), pair.point(1.0, 3.0)], pair)
    # dist-to-A multiset is {2, 1}
    assert total_persistence(d, math.inf, pair) == 2.0
    assert total_persistence(d, 1.0, pair) == 3.0
    assert total_persistence(d, 2.0, pair) == math.fsum([1.0, 4.0]) ** 0.5
    assert total_persistence(empty_diagram(pair), 2.0, pair) == 0.0
    with pytest.raises(ValueError):
        total_persistence(d, 0.5, pair)


# -- json ---------------------------------------------------------------------


def test_json_round_trip_exact():
    pair = plane()
    d = canonicalize([(pair.point(0.1, 0.30000000000000004), 2), pair.point(5e-324, 1.0)], pair)
    text = write_diagram(d, "json", pair)
    assert parse_diagram(text, "json", pair) == d
    obj = json.loads(text)
    assert obj["space"]["kind"] == "EuclideanPlaneDiagonal"


def test_json_space_id_string_accepted():
    pair = plane()
    d = canonicalize([pair.point(0.0, 4.0)], pair)
    text = write_diagram(d, "json")
    assert json.loads(text)["space"] == pair.space_id
    assert parse_diagram(text, "json", pair) == d


def test_json_default_multiplicity_and_strict():
    pair = plane()
    lax = '{"points": [{"coords": [0, 4]}]}'
    d = parse_diagram(lax, "json", pair)
    assert d.points[0][1] == 1
    with pytest.raises(ParseError):
        parse_diagram(lax, "json", pair, strict=True)


def test_json_errors():
    pair = plane()
    with pytest.raises(ParseError):
        parse_diagram("{bad", "json", pair)
    with pytest.raises(ParseError):
        parse_diagram('{"points": [{"coords": [4, 0]}]}', "json", pair)
    with pytest.raises(ParseError):
        parse_diagram('{"points": [{"coords": [0, 4], "mult": 0}]}', "json", pair)
    with pytest.raises(SpaceMismatch):
        parse_diagram('{"space": "halfline", "points": []}', "json", pair)


# -- csv ------------------------------------------------------------------------


def test_csv_round_trip_with_header_and_default_mult():
    pair = plane()
    text = "birth,death,mult\n0,10,1\n2,4,2\n"
    d = parse_diagram(text, "csv", pair)
    assert d.size == 3
    no_mult = "1,11\n"
    d2 = parse_diagram(no_mult, "csv", pair)
    assert d2.points[0][1] == 1
    out = write_diagram(d, "csv", pair)
    assert parse_diagram(out, "csv", pair) == d


def test_csv_strict_requires_mult():
    pair = plane()
    with pytest.raises(ParseError):
        parse_diagram("0,10\n", "csv", pair, strict=True)


def test_csv_error_carries_line_number():
    pair = plane()
    with pytest.raises(ParseError) as exc:
        parse_diagram("0,10,1\nx,4,1\n", "csv", pair)
    assert "line 2" in str(exc.value)


def test_csv_rejected_off_plane():
    hl = HalfLineOrigin()
    with pytest.raises(ParseError):
        parse_diagram("3\n", "csv", hl)
    d = canonicalize([hl.point(3.0)], hl)
    with pytest.raises(ParseError):
        write_diagram(d, "csv", hl)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(0, 100, allow_nan=False),
            st.floats(0, 50, allow_nan=False),
            st.integers(1, 3),
        ),
        max_size=6,
    )
)
def test_serialization_round_trip_property(entries):
    pair = plane()
    d = canonicalize(
        [(pair.point(b, b + g), m) for b, g, m in entries], pair
    )
    assert parse_diagram(write_diagram(d, "json", pair), "json", pair) == d
    assert parse_diagram(write_diagram(d, "csv", pair), "csv", pair) == d
