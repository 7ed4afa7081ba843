"""
Tests for random-order greedy trajectories and the offline benchmark
"""

import networkx as nx
import pytest

from errors import NotBipartiteError, ParameterRangeError
from models import GraphInstance
from services.hardness_service import hardness_service
from services.instance_service import instance_service


def test_ode_solution():
    assert hardness_service.ode_solution(0.0) == 0.0
    assert hardness_service.ode_solution(1.0) == pytest.approx(0.5)
    with pytest.raises(ParameterRangeError):
        hardness_service.ode_solution(-1.0)


def test_checkpoint_grid():
    """Test evenly spaced checkpoints ending at the last arrival"""
    assert hardness_service.checkpoint_grid(100, 10) == list(range(10, 101, 10))
    assert hardness_service.checkpoint_grid(5, 10) == [1, 2, 3, 4, 5]
    assert hardness_service.checkpoint_grid(0, 10) == [0]
    with pytest.raises(ParameterRangeError):
        hardness_service.checkpoint_grid(10, 0)


@pytest.mark.parametrize("seed", range(8))
def test_hopcroft_karp_matches_networkx(seed):
    """Test maximum matching sizes against networkx"""
    graph = nx.bipartite.random_graph(12, 9, 0.2, seed=seed)
    left = [v for v, side in graph.nodes(data="bipartite") if side == 0]
    right = [v for v, side in graph.nodes(data="bipartite") if side == 1]
    right_ids = {v: i for i, v in enumerate(right)}
    adjacency = [[right_ids[w] for w in graph.neighbors(u)] for u in left]
    expected = len(nx.bipartite.maximum_matching(graph, top_nodes=left)) // 2
    assert hardness_service.hopcroft_karp(adjacency, len(right)) == expected


def test_hopcroft_karp_needs_augmenting_paths():
    """Test an instance where a greedy first choice must be undone"""
    adjacency = [[0, 1], [0], [1, 2], [2]]
    assert hardness_service.hopcroft_karp(adjacency, 3) == 3
    assert hardness_service.hopcroft_karp([[], []], 2) == 0


def test_max_matching_size():
    """Test maximum matchings of generated instances"""
    assert hardness_service.max_matching_size(instance_service.complete_bipartite(3)) == 3
    assert hardness_service.max_matching_size(instance_service.star_pair(3)) == 2
    assert hardness_service.max_matching_size(instance_service.three_path(0.1)) == 2
    triangle = GraphInstance(vertex_count=3, edges=[(0, 1, 0.3), (1, 2, 0.3), (0, 2, 0.3)])
    with pytest.raises(NotBipartiteError):
        hardness_service.max_matching_size(triangle)


def test_single_edge_greedy():
    """Test K_{1,1}, where the only edge is always active"""
    traj = hardness_service.simulate_greedy(1, 5, checkpoints=3, seed=0, workers=1)
    assert traj.edge_count == 1
    assert traj.checkpoints == [1]
    assert traj.final_fractions == [1.0] * 5


def test_greedy_trajectory_follows_ode():
    """Test the mean trajectory on K_{100,100} against z/(1+z)"""
    traj = hardness_service.simulate_greedy(100, 100, checkpoints=50, seed=3, workers=2)
    assert traj.edge_count == 10000
    assert len(traj.checkpoints) == 50 and traj.checkpoints[-1] == 10000
    assert len(traj.samples) == 100
    assert 0.45 <= traj.mean[-1] <= 0.56
    assert hardness_service.ode_deviation(traj) <= 0.05
    assert all(lo <= m <= hi for lo, m, hi in zip(traj.lower, traj.mean, traj.upper))
    assert all(b >= a for a, b in zip(traj.mean, traj.mean[1:]))
    report = hardness_service.check_increments(traj)
    assert report.property_id == "greedy-increments"
    assert report.passed, report.worst_violation


def test_greedy_is_reproducible():
    """Test that a seed fixes every sample"""
    first = hardness_service.simulate_greedy(20, 6, checkpoints=10, seed=9, workers=1)
    second = hardness_service.simulate_greedy(20, 6, checkpoints=10, seed=9, workers=3)
    assert first.samples == second.samples


def test_complete_graph_variant():
    """Test greedy on K_n with edges active w.p. 1/(n-1)"""
    traj = hardness_service.simulate_greedy(20, 10, checkpoints=5, seed=1, complete_graph=True, workers=1)
    assert traj.complete_graph
    assert traj.edge_count == 190
    assert all(0.0 <= f <= 1.0 for f in traj.final_fractions)
    with pytest.raises(ParameterRangeError):
        hardness_service.simulate_greedy(1, 10, complete_graph=True)
    with pytest.raises(ParameterRangeError):
        hardness_service.simulate_greedy(0, 10)


def test_offline_beats_greedy_on_the_same_realization():
    """Test the coupled greedy and offline fractions"""
    pairs = hardness_service.coupled_fractions(30, 20, seed=4, workers=1)
    assert len(pairs) == 20
    for greedy, offline in pairs:
        assert 0.0 <= greedy <= offline <= 1.0


def test_offline_fraction_range():
    """Test the offline benchmark at small n"""
    value = hardness_service.offline_fraction(40, 20, seed=2, workers=1)
    assert 0.45 <= value <= 0.7
    with pytest.raises(ParameterRangeError):
        hardness_service.offline_fraction(0, 5)


def test_greedy_final_fraction_at_n_200():
    """Test the mean final fraction on K_{200,200} over 200 trials"""
    traj = hardness_service.simulate_greedy(200, 200, seed=5, workers=2)
    assert 0.48 <= traj.mean[-1] <= 0.52


def test_greedy_tracks_ode_at_n_500():
    """Test the sup deviation from z/(1+z) on K_{500,500}"""
    traj = hardness_service.simulate_greedy(500, 50, seed=6, workers=2)
    assert hardness_service.ode_deviation(traj) <= 0.03


def test_offline_fraction_at_n_500():
    """Test the offline maximum matching fraction against 0.544"""
    value = hardness_service.offline_fraction(500, 50, seed=7, workers=2)
    assert value == pytest.approx(0.544, abs=0.02)
