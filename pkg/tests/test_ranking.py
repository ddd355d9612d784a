import numpy as np
import pytest
from scipy import stats

from divarchive.ranking import (
    Direction,
    RankMatrix,
    average_ranks,
    friedman_pvalue,
    friedman_statistic,
    nemenyi_critical_difference,
    rank_row,
)

POLICIES = ["Random", "AGA", "HA", "HD", "JD"]
# Cluster-subset hypervolume ranks, one row per node count
CLUSTER_HV = {
    500: [4.444, 2.000, 1.222, 2.778, 4.556],
    1000: [3.778, 3.167, 2.056, 1.444, 4.556],
    2000: [3.611, 3.222, 2.833, 1.167, 4.167],
}


def test_rank_row_directions_and_ties():
    assert rank_row([0.3, 0.1, 0.2], Direction.LOWER_BETTER) == [3.0, 1.0, 2.0]
    assert rank_row([0.3, 0.1, 0.2], Direction.HIGHER_BETTER) == [1.0, 3.0, 2.0]
    assert rank_row([1, 1, 2], Direction.LOWER_BETTER) == [1.5, 1.5, 3.0]
    with pytest.raises(ValueError):
        rank_row([], Direction.LOWER_BETTER)


def test_rank_rows_sum_to_triangle():
    rng = np.random.default_rng(0)
    for _ in range(100):
        vals = rng.integers(0, 4, size=6)
        assert sum(rank_row(vals, Direction.LOWER_BETTER)) == pytest.approx(21)


def test_cluster_table_average_row():
    m = RankMatrix(POLICIES)
    for size, row in CLUSTER_HV.items():
        m.add(row, size)
    per_group, overall = average_ranks(m)
    assert per_group[1000] == pytest.approx(CLUSTER_HV[1000])
    expected = {"Random": 3.944, "AGA": 2.796, "HA": 2.037, "HD": 1.796, "JD": 4.426}
    for name, value in zip(POLICIES, overall):
        assert abs(value - expected[name]) <= 0.001


def test_average_ranks_validation():
    with pytest.raises(ValueError):
        average_ranks(RankMatrix(["a"]))
    m = RankMatrix(["a", "b"])
    m.add([1, 2])
    with pytest.raises(ValueError):
        average_ranks(m, grouping=["x", "y"])
    with pytest.raises(ValueError):
        m.add([1, 2, 3])


def test_friedman_matches_closed_form_and_scipy():
    rng = np.random.default_rng(3)
    values = rng.random((12, 4))
    m = RankMatrix.from_values(list("abcd"), values.tolist(), Direction.LOWER_BETTER)
    n, k = 12, 4
    R = np.sum(m.rows, axis=0)
    closed = 12 / (n * k * (k + 1)) * np.sum(R**2) - 3 * n * (k + 1)
    assert friedman_statistic(m) == pytest.approx(closed)
    ref = stats.friedmanchisquare(*values.T)
    assert friedman_statistic(m) == pytest.approx(ref.statistic)
    assert friedman_pvalue(m) == pytest.approx(ref.pvalue)


def test_friedman_null_rejection_rate():
    rng = np.random.default_rng(5)
    trials = 400
    rejections = 0
    for _ in range(trials):
        m = RankMatrix.from_values(list("abcde"), rng.random((20, 5)).tolist(), Direction.LOWER_BETTER)
        rejections += friedman_pvalue(m) < 0.05
    assert 0.01 <= rejections / trials <= 0.10


def test_nemenyi_cd():
    assert nemenyi_critical_difference(5, 10) == pytest.approx(1.929, abs=1e-3)
    assert nemenyi_critical_difference(5, 40) < nemenyi_critical_difference(5, 10)
