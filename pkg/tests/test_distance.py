import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divarchive.archive import ArchiveEntry, BoundedArchive, ConfigurationError
from divarchive.distance import (
    DistancePolicy,
    EdgeSet,
    RandomPolicy,
    contribution_sum,
    hamming_distance,
    hamming_metric,
    jaccard_distance,
    jaccard_metric,
    select_victim_dist,
    tour_hamming_distance,
)
from divarchive.tsp import Tour


def bits(text):
    return [int(c) for c in text]


def test_hamming_bit_vectors():
    assert hamming_distance(bits("111100110101"), bits("000000110100")) == 5
    assert hamming_distance(bits("0000"), bits("0000")) == 0
    with pytest.raises(ValueError):
        hamming_distance([0, 1], [0])


def test_jaccard_sets():
    assert jaccard_distance({1, 2, 3}, {2, 3, 4}) == pytest.approx(0.5)
    assert jaccard_distance(set(), set()) == 0.0
    assert jaccard_distance({1}, {2}) == 1.0


def test_tour_edges_ignore_rotation_and_direction():
    a = EdgeSet.from_order([0, 1, 2, 3, 4])
    b = EdgeSet.from_order([2, 3, 4, 0, 1])
    c = EdgeSet.from_order([0, 4, 3, 2, 1])
    assert a == b == c
    assert tour_hamming_distance(a, c) == 0
    assert len(a) == 5


def test_figure_tours_distance():
    a = Tour((0, 1, 2, 3))
    b = Tour((0, 2, 1, 3))
    # shared edges {1,2} and {0,3}; each tour has two private edges
    assert hamming_metric(a, b) == 4
    assert jaccard_metric(a, b) == pytest.approx(1 - 2 / 6)


def test_node_count_mismatch():
    with pytest.raises(ValueError):
        tour_hamming_distance(EdgeSet.from_order([0, 1, 2]), EdgeSet.from_order([0, 1, 2, 3]))


def test_from_pairs_matches_order():
    assert EdgeSet.from_pairs(4, [(1, 0), (1, 2), (3, 2), (0, 3)]) == EdgeSet.from_order([0, 1, 2, 3])
    with pytest.raises(ValueError):
        EdgeSet.from_pairs(3, [(1, 1)])


def random_tour(rng, n):
    return Tour(tuple(rng.permutation(n).tolist()))


@settings(max_examples=200, deadline=None)
@given(st.integers(5, 40), st.integers(0, 2**32 - 1))
def test_metric_axioms(n, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_tour(rng, n) for _ in range(3))
    for d in (hamming_metric, jaccard_metric):
        assert d(a, a) == 0
        assert d(a, b) >= 0
        assert d(a, b) == d(b, a)
        assert d(a, c) <= d(a, b) + d(b, c) + 1e-12
        if d(a, b) == 0:
            assert a.edges == b.edges


@settings(max_examples=100, deadline=None)
@given(st.integers(5, 40), st.integers(0, 2**32 - 1))
def test_jaccard_is_monotone_in_hamming_for_tours(n, seed):
    rng = np.random.default_rng(seed)
    a, b = random_tour(rng, n), random_tour(rng, n)
    h = hamming_metric(a, b)
    assert jaccard_metric(a, b) == pytest.approx(2 * h / (2 * n + h))


def test_contribution_sum_needs_two():
    with pytest.raises(ValueError):
        contribution_sum(0, [ArchiveEntry(Tour((0, 1, 2, 3)), (1, 1))], hamming_metric)


def test_select_victim_ties_take_earliest():
    t = Tour((0, 1, 2, 3))
    entries = [ArchiveEntry(t, (i, -i)) for i in range(3)]
    assert select_victim_dist(entries, 2, hamming_metric) == 0


def test_capacity_one_rejected():
    with pytest.raises(ConfigurationError):
        a = BoundedArchive(1, DistancePolicy("hamming"))
        a.try_insert(ArchiveEntry(Tour((0, 1, 2, 3)), (1, 1)))


@pytest.mark.parametrize("metric", ["hamming", "jaccard"])
def test_cache_matches_from_scratch(metric):
    rng = np.random.default_rng(7)
    fn = hamming_metric if metric == "hamming" else jaccard_metric
    policy = DistancePolicy(metric)
    archive = BoundedArchive(8, policy)
    for step in range(600):
        x = float(rng.integers(0, 200))
        cand = ArchiveEntry(random_tour(rng, 12), (x, 200.0 - x))
        before = archive.snapshot()
        if len(before) == archive.capacity and not archive.is_dominated(cand.objectives):
            alpha = list(before) + [cand]
            expect = select_victim_dist(alpha, len(before), fn)
            assert policy.select_victim(alpha, len(before)) == expect
        archive.try_insert(cand)
        sols = [e.solution for e in archive]
        brute = [[fn(a, b) for b in sols] for a in sols]
        assert policy.distance_matrix() == brute
        scratch = [math.fsum(r) for r in brute]
        assert policy.row_sums() == scratch


def test_random_policy_is_uniform():
    rng = np.random.default_rng(99)
    policy = RandomPolicy(rng)
    entries = [ArchiveEntry(i, (i, -i)) for i in range(5)]
    draws = 100_000
    counts = np.bincount([policy.select_victim(entries, 4) for _ in range(draws)], minlength=5)
    p = 1 / 5
    sigma = math.sqrt(draws * p * (1 - p))
    assert np.all(np.abs(counts - draws * p) < 5 * sigma)
