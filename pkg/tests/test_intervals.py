import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratan.intervals import IntervalValue
from stratan.linear import AffExpr, parse_constraint
from stratan.polyhedra import ContractError

IJ = ("i", "j")


def box(*bounds):
    return IntervalValue(IJ, bounds)


class TestIntervals:
    def test_inverted_bounds_are_bottom(self):
        assert box((3, 1), (0, 0)).is_empty()

    def test_join_and_meet(self):
        a, b = box((0, 2), (0, 0)), box((1, 5), (None, 3))
        assert a.join(b) == box((0, 5), (None, 3))
        assert a.meet(b) == box((1, 2), (0, 0))

    def test_widen_drops_moving_bounds(self):
        a, b = box((0, 1), (0, 0)), box((0, 2), (0, 0))
        assert a.widen(b) == box((0, None), (0, 0))

    def test_widen_with_threshold(self):
        a, b = box((0, 1), (0, 0)), box((0, 2), (0, 0))
        assert a.widen(b, [parse_constraint("i <= 5")]) == box((0, 5), (0, 0))

    def test_widen_requires_inclusion(self):
        with pytest.raises(ContractError):
            box((0, 2), (0, 0)).widen(box((0, 1), (0, 0)))

    def test_assign_shift(self):
        v = box((1, 5), (0, 0)).assign("i", AffExpr.var("i") + AffExpr.const(1))
        assert v == box((2, 6), (0, 0))

    def test_guard_propagates_relational_bound(self):
        v = box((0, 10), (0, 3)).guard([parse_constraint("i <= j")])
        assert v == box((0, 3), (0, 3))

    def test_project_and_embed(self):
        v = box((1, 2), (3, 4))
        assert v.project(["j"]) == IntervalValue(("j",), [(3, 4)])
        assert v.project(["j"]).embed(IJ) == box((None, None), (3, 4))

    def test_text(self):
        assert str(box((0, 2), (None, None))) == "i in [0, 2]"


bound = st.one_of(st.none(), st.integers(-6, 6))
boxes = st.lists(st.tuples(bound, bound), min_size=2, max_size=2).map(lambda b: IntervalValue(IJ, b))


class TestIntervalProperties:
    @settings(max_examples=200, deadline=None)
    @given(boxes, boxes)
    def test_widen_is_upper_bound(self, a, b):
        w = a.widen(a.join(b))
        assert w.includes(a) and w.includes(b)

    @settings(max_examples=200, deadline=None)
    @given(boxes, boxes)
    def test_join_meet_order(self, a, b):
        assert a.join(b).includes(a) and a.includes(a.meet(b))
