import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geohighlight.errors import UnknownFacetError
from geohighlight.feedback import FeedbackVector, facet_weight, update_feedback
from geohighlight.geometry import GeoPoint
from geohighlight.ingestion import Attribute, AttributeSchema, PointRecord

ROOM_SCHEMA = AttributeSchema(
    [
        Attribute("beds", "categorical", ("1", "2", "+2")),
        Attribute("balcony", "categorical", ("Yes", "No")),
        Attribute("aircon", "categorical", ("Yes", "No")),
        Attribute("rating", "ordinal", (1, 2, 3, 4, 5)),
    ]
)


def room(pid, beds, balcony, aircon, rating):
    return PointRecord(
        id=pid,
        location=GeoPoint(48.86, 2.29),
        attributes={"beds": beds, "balcony": balcony, "aircon": aircon, "rating": rating},
    )


# the four points matched inside the first region of the worked example:
# prices 130/58/92/67, beds 1/1/2/1, balcony all yes, air-con yes/no/no/no, rating 5/5/5/4
ROOMS = [
    room(1, "1", "Yes", "Yes", 5),
    room(2, "1", "Yes", "No", 5),
    room(3, "2", "Yes", "No", 5),
    room(4, "1", "Yes", "No", 4),
]


def test_worked_example_normalized_cells():
    f = update_feedback(FeedbackVector.zeros(ROOM_SCHEMA), ROOMS, delta=1.0)
    expected = {
        ("beds", "1"): 0.19,
        ("beds", "2"): 0.06,
        ("beds", "+2"): 0.00,
        ("balcony", "Yes"): 0.25,
        ("balcony", "No"): 0.00,
        ("aircon", "Yes"): 0.06,
        ("aircon", "No"): 0.19,
        ("rating", 1): 0.00,
        ("rating", 2): 0.00,
        ("rating", 3): 0.00,
        ("rating", 4): 0.06,
        ("rating", 5): 0.19,
    }
    for (attr, value), want in expected.items():
        assert f.weight(attr, value) == pytest.approx(want, abs=0.005)
    # exact fractions behind the rounded table: 3/16, 1/16, 4/16
    assert f.weight("beds", "1") == pytest.approx(3 / 16)
    assert f.weight("balcony", "Yes") == pytest.approx(4 / 16)
    assert f.weight("rating", 4) == pytest.approx(1 / 16)
    assert sum(f.weights().values()) == pytest.approx(1.0, abs=1e-9)


def test_empty_matched_set_leaves_vector_unchanged():
    f0 = FeedbackVector.zeros(ROOM_SCHEMA)
    f1 = update_feedback(f0, [], delta=1.0)
    assert f1.raw_counts == f0.raw_counts == {}
    assert f1.total == 0.0


def test_two_facets_single_point_split_evenly():
    schema = AttributeSchema(
        [Attribute("a", "categorical", ("x", "y")), Attribute("b", "categorical", ("u", "v"))]
    )
    p = PointRecord(id=1, location=GeoPoint(0, 0), attributes={"a": "x", "b": "u"})
    f = update_feedback(FeedbackVector.zeros(schema), [p], delta=2.0)
    assert f.weight("a", "x") == 0.5
    assert f.weight("b", "u") == 0.5


def test_untouched_facet_weight_zero():
    f = FeedbackVector.zeros(ROOM_SCHEMA)
    assert facet_weight(f, "rating", 2) == 0.0
    f = update_feedback(f, ROOMS, delta=1.0)
    assert facet_weight(f, "rating", 2) == 0.0
    assert facet_weight(f, "balcony", "Yes") == pytest.approx(0.25, abs=0.005)


def test_unknown_facet_raises():
    f = FeedbackVector.zeros(ROOM_SCHEMA)
    with pytest.raises(UnknownFacetError):
        f.weight("beds", "99")
    with pytest.raises(UnknownFacetError):
        f.weight("pool", "Yes")
    bad_point = PointRecord(id=9, location=GeoPoint(0, 0),
                            attributes={"beds": "9", "balcony": "Yes", "aircon": "No", "rating": 5})
    with pytest.raises(UnknownFacetError):
        update_feedback(f, [bad_point], delta=1.0)


def test_delta_must_be_positive():
    f = FeedbackVector.zeros(ROOM_SCHEMA)
    with pytest.raises(ValueError):
        update_feedback(f, ROOMS, delta=0.0)
    with pytest.raises(ValueError):
        update_feedback(f, ROOMS, delta=-1.0)


def test_scale_invariance_of_weights():
    for c in (0.5, 2.0, 10.0):
        f1 = update_feedback(FeedbackVector.zeros(ROOM_SCHEMA), ROOMS, delta=1.0)
        f2 = update_feedback(FeedbackVector.zeros(ROOM_SCHEMA), ROOMS, delta=c)
        for facet, w in f1.weights().items():
            assert f2.weights()[facet] == pytest.approx(w, rel=1e-12, abs=1e-15)


def test_raw_counts_monotone_and_update_is_pure():
    f0 = FeedbackVector.zeros(ROOM_SCHEMA)
    f1 = update_feedback(f0, ROOMS[:2], delta=1.0)
    f2 = update_feedback(f1, ROOMS[2:], delta=1.0)
    assert f0.raw_counts == {}  # untouched by later updates
    for facet, count in f1.raw_counts.items():
        assert f2.raw_counts.get(facet, 0.0) >= count
    assert f2.weight("balcony", "Yes") == pytest.approx(0.25, abs=0.005)


def test_rewarding_one_facet_dilutes_others():
    f1 = update_feedback(FeedbackVector.zeros(ROOM_SCHEMA), [ROOMS[0]], delta=1.0)
    before = f1.weight("aircon", "Yes")
    assert before > 0
    f2 = update_feedback(f1, [ROOMS[1]], delta=1.0)  # rewards aircon=No, not Yes
    assert f2.weight("aircon", "Yes") < before
    # but raw counts never decreased
    assert f2.raw_count("aircon", "Yes") == f1.raw_count("aircon", "Yes")


def test_max_weight_per_attribute():
    f = update_feedback(FeedbackVector.zeros(ROOM_SCHEMA), ROOMS, delta=1.0)
    assert f.max_weight("beds") == pytest.approx(3 / 16)
    assert f.max_weight("balcony") == pytest.approx(4 / 16)
    assert FeedbackVector.zeros(ROOM_SCHEMA).max_weight("beds") == 0.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=12),
       st.floats(min_value=0.1, max_value=5.0, allow_nan=False))
def test_weights_always_normalized(picks, delta):
    f = FeedbackVector.zeros(ROOM_SCHEMA)
    f = update_feedback(f, [ROOMS[i] for i in picks], delta)
    assert sum(f.weights().values()) == pytest.approx(1.0, abs=1e-9)
    assert all(0.0 <= w <= 1.0 for w in f.weights().values())


def test_document_lists_facets_in_schema_order():
    f = update_feedback(FeedbackVector.zeros(ROOM_SCHEMA), ROOMS, delta=1.0)
    doc = f.to_document()
    assert doc["total_raw"] == 16.0
    names = [(row["attribute"], row["value"]) for row in doc["facets"]]
    assert names == ROOM_SCHEMA.facet_universe()
