import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divarchive.archive import BoundedArchive, ConfigurationError
from divarchive.core import dominates
from divarchive.distance import RandomPolicy
from divarchive.dmols import (
    POLICIES,
    SearchConfig,
    load_run_record,
    make_policy,
    nondominated_mask,
    parse_run_record,
    run_dmols,
    run_policy,
    save_run_record,
    write_run_record,
)
from divarchive.tsp import evaluate, make_instance, two_opt_neighbors


@pytest.mark.parametrize("policy", POLICIES)
def test_figure_instance_reaches_exact_front(fig_instance, policy):
    rec = run_policy(fig_instance, policy, 10, SearchConfig(time_limit=5.0, seed=3))
    assert set(rec.objective_vectors()) == {(20.0, 24.0), (26.0, 17.0)}
    assert rec.stop_reason == "local_optimum"


def test_capacity_one_is_a_configuration_error(fig_instance):
    with pytest.raises(ConfigurationError):
        run_dmols(fig_instance, BoundedArchive(1, RandomPolicy(np.random.default_rng(0))), SearchConfig(max_iterations=5))


def test_unknown_policy():
    with pytest.raises(ConfigurationError):
        make_policy("crowding", np.random.default_rng(0))


def test_search_config_validation():
    with pytest.raises(ConfigurationError):
        SearchConfig()
    with pytest.raises(ConfigurationError):
        SearchConfig(time_limit=0)
    with pytest.raises(ConfigurationError):
        SearchConfig(max_iterations=3, current_set_size=0)


@pytest.mark.parametrize("policy", POLICIES)
def test_iteration_budget_is_deterministic(policy):
    inst = make_instance("random", 20, 1, 2)
    cfg = SearchConfig(max_iterations=40, seed=11)
    a = run_policy(inst, policy, 8, cfg)
    b = run_policy(inst, policy, 8, cfg)
    assert [(e.solution, e.objectives) for e in a.archive] == [(e.solution, e.objectives) for e in b.archive]
    assert a.iterations == b.iterations <= 40


@pytest.mark.parametrize("policy", POLICIES)
def test_archive_objectives_are_true_costs(policy):
    inst = make_instance("euclidean", 15, 3, 4)
    rec = run_policy(inst, policy, 6, SearchConfig(max_iterations=60, seed=2))
    assert 0 < len(rec.archive) <= 6
    for e in rec.archive:
        assert evaluate(e.solution, inst) == e.objectives
    objs = rec.objective_vectors()
    assert not any(dominates(p, q) for p in objs for q in objs)


def test_unbounded_run_ends_at_pareto_local_optimum():
    inst = make_instance("euclidean", 7, 5, 6)
    rec = run_policy(inst, "random", 500, SearchConfig(max_iterations=100_000, seed=1))
    assert rec.stop_reason == "local_optimum"
    objs = set(rec.objective_vectors())
    for e in rec.archive:
        for nb in two_opt_neighbors(e.solution):
            f = evaluate(nb, inst)
            assert not any(dominates(f, q) for q in objs)


def test_restart_happens_once_with_budget_left(fig_instance):
    rec = run_policy(fig_instance, "aga", 10, SearchConfig(max_iterations=1000, seed=0))
    assert rec.restarts == 1
    assert rec.stop_reason == "local_optimum"
    # a second exhaustion ends the run even with most of the budget left
    assert rec.iterations < 100


def brute_mask(F):
    return np.array([not any(dominates(q, p) for q in F.tolist()) for p in F.tolist()], dtype=bool)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=30))
def test_nondominated_mask_matches_brute_force(rows):
    F = np.array(rows, dtype=float).reshape(-1, 2)
    assert np.array_equal(nondominated_mask(F), brute_mask(F))


def test_run_record_round_trip(tmp_path):
    inst = make_instance("random", 12, 1, 2)
    rec = run_policy(inst, "hdaa", 5, SearchConfig(max_iterations=20, seed=4))
    back = load_run_record(save_run_record(rec, tmp_path / "r.run"))
    assert [(e.solution, e.objectives) for e in back.archive] == [(e.solution, e.objectives) for e in rec.archive]
    for key in ("instance", "policy", "capacity", "seed", "iterations", "evaluations", "stop_reason", "restarts"):
        assert getattr(back, key) == getattr(rec, key)
    assert back.params["init_count"] == "3"


def test_run_record_errors():
    with pytest.raises(ValueError, match="ARCHIVE"):
        parse_run_record("instance: x\n")
    buf = io.StringIO()
    inst = make_instance("random", 8, 1, 2)
    write_run_record(run_policy(inst, "ha", 4, SearchConfig(max_iterations=5, seed=0)), buf)
    broken = buf.getvalue().replace("size: ", "size: 9")
    with pytest.raises(ValueError, match="size"):
        parse_run_record(broken)
