import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divarchive.core import EmptySetError
from divarchive.metrics import (
    ReferenceSet,
    build_reference_set,
    evaluate_front,
    fullness,
    igd_plus,
    normalize,
    normalized_hypervolume,
    spread,
)

REF = ReferenceSet.from_points([(0, 10), (5, 5), (10, 0)])


def test_reference_set_from_snapshots():
    ref = build_reference_set([[(0, 10), (6, 6)], [(5, 5), (10, 0), (11, 11)]])
    assert set(ref.points) == {(0, 10), (5, 5), (10, 0)}
    assert ref.ideal == (0, 0) and ref.nadir_pt == (10, 10)
    with pytest.raises(EmptySetError):
        ReferenceSet.from_points([])


def test_fullness():
    assert fullness([1] * 45, 50) == 90.0
    with pytest.raises(ValueError):
        fullness([], 0)


def test_normalize_flat_axis():
    ref = ReferenceSet.from_points([(3, 1), (3, 1)])
    assert normalize([(3, 1), (4, 2)], ref) == [(0.0, 0.0), (0.0, 0.0)]
    assert normalize([(5, 5)], REF) == [(0.5, 0.5)]


def test_igd_plus_examples():
    assert igd_plus([(0, 0)], [(0, 0)]) == 0.0
    assert igd_plus([(1, 1)], [(0, 0)]) == pytest.approx(math.sqrt(2))
    # a front point better than the reference contributes nothing
    assert igd_plus([(-1, -1)], [(0, 0)]) == 0.0
    assert igd_plus([(1, 0)], [(0, 0), (2, 0)]) == pytest.approx(0.5)
    assert igd_plus(REF.points, REF) == 0.0
    with pytest.raises(EmptySetError):
        igd_plus([], REF)


def test_normalized_hypervolume():
    assert normalized_hypervolume([(10, 10)], REF) == pytest.approx((0.1 / 1.1) ** 2)
    assert normalized_hypervolume([(0, 0)], REF) == pytest.approx(1.0)
    assert normalized_hypervolume([(20, 20)], REF) == 0.0
    hv_ref = normalized_hypervolume(REF.points, REF)
    assert 0 < hv_ref < 1


def test_spread_cases():
    assert spread([(5, 5)], REF) == 1.0
    # evenly spaced front that hits both extremes
    assert spread(REF.points, REF) == pytest.approx(0.0)
    uneven = spread([(0, 10), (1, 9), (10, 0)], REF)
    assert 0 < uneven <= 1.5
    with pytest.raises(ValueError):
        spread([(1, 2, 3)], ReferenceSet.from_points([(1, 2, 3)]))
    with pytest.raises(EmptySetError):
        spread([], REF)


def test_evaluate_front():
    row = evaluate_front(REF.points, 4, REF)
    assert row.fullness_pct == 75.0
    assert row.igd_plus == 0.0
    assert row.spread == pytest.approx(0.0)


points2 = st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(points2, points2)
def test_indicator_properties(front, others):
    ref = build_reference_set([front, others])
    assert igd_plus(normalize(ref.points, ref), normalize(ref.points, ref)) == 0.0
    hv = normalized_hypervolume(front, ref)
    assert 0.0 <= hv <= 1.0 + 1e-12
    assert normalized_hypervolume(list(front) + list(others), ref) >= hv - 1e-12
    assert igd_plus(normalize(front, ref), normalize(ref.points, ref)) >= 0.0
    assert spread(front, ref) >= 0.0
