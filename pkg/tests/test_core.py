import pytest
from hypothesis import given, strategies as st

from divarchive.core import (
    DimensionError,
    EmptySetError,
    Relation,
    compare,
    dominates,
    nadir,
    pareto_filter,
)

vec2 = st.tuples(st.integers(0, 20), st.integers(0, 20))
vec3 = st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))


def test_dominates_examples():
    assert not dominates((1, 2), (1, 2))
    assert dominates((1, 2), (2, 2))
    assert not dominates((1, 3), (2, 2))
    assert not dominates((2, 2), (1, 3))


def test_dominates_dimension_mismatch():
    with pytest.raises(DimensionError):
        dominates((1, 2), (1, 2, 3))
    with pytest.raises(DimensionError):
        compare((1,), (1, 2))


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((20, 24), (24, 25), Relation.DOMINATES),
        ((24, 25), (20, 24), Relation.DOMINATED_BY),
        ((20, 24), (26, 17), Relation.INCOMPARABLE),
        ((5, 5), (5, 5), Relation.EQUAL),
    ],
)
def test_compare(a, b, expected):
    assert compare(a, b) is expected


def test_pareto_filter_examples():
    assert pareto_filter([(20, 24), (24, 25), (26, 17)]) == [(20, 24), (26, 17)]
    assert pareto_filter([]) == []
    assert pareto_filter([(1, 1), (1, 1)]) == [(1, 1)]


def test_nadir_examples():
    assert nadir([(20, 24), (26, 17)]) == (26, 24)
    assert nadir([(1, 1)]) == (1, 1)
    assert nadir([(0, 3), (3, 0), (2, 2)]) == (3, 3)
    # dominated points do not move the nadir
    assert nadir([(0, 3), (3, 0), (9, 9)]) == (3, 3)
    with pytest.raises(EmptySetError):
        nadir([])


@given(vec3, vec3)
def test_antisymmetry(a, b):
    assert not (dominates(a, b) and dominates(b, a))


@given(vec3, vec3, vec3)
def test_transitivity(a, b, c):
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


@given(st.lists(vec2, max_size=25))
def test_pareto_filter_against_quadratic_oracle(points):
    out = pareto_filter(points)
    for p in out:
        assert not any(dominates(q, p) for q in out)
    assert len(set(out)) == len(out)
    for p in points:
        assert any(q == tuple(p) or dominates(q, p) for q in out)
    # survivors keep input order
    firsts = []
    for p in points:
        if p in out and p not in firsts:
            firsts.append(p)
    assert out == firsts


@given(st.lists(vec3, max_size=20))
def test_pareto_filter_idempotent(points):
    once = pareto_filter(points)
    assert pareto_filter(once) == once
