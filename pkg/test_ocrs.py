"""
Tests for the adversarial-order scheme: exact DP, Monte-Carlo calibration, execution
"""

import numpy as np
import pytest

from errors import PlanMismatchError, VertexLimitError, ParameterRangeError
from models import PlanMode
from services.analysis_service import analysis_service
from services.instance_service import instance_service
from services.ocrs_service import ocrs_service
from services.stats import stream_rng, wilson_interval


def test_untouched_edges_get_alpha_c():
    """Test that edges with no earlier neighbor are never blocked"""
    g = instance_service.example_4cycle(0.01)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    assert plan.mode == PlanMode.EXACT
    assert plan.alphas[0] == pytest.approx(0.3)
    assert plan.alphas[1] == pytest.approx(0.3)
    assert plan.blockfree_probs[0] == 1.0


def test_exact_selection_equals_c_x():
    """Test P[e in M] = c x_e for every edge of the 4-cycle example at c = 0.3"""
    g = instance_service.example_4cycle(0.01)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    assert plan.all_valid
    probs = ocrs_service.selection_probs_exact(g, None, plan)
    for p, (_, _, x) in zip(probs, g.edges):
        assert abs(p - 0.3 * x) <= 1e-12


def test_subset_distribution_mass_and_marginals():
    """Test that the final law sums to one and matches the selection probabilities"""
    g = instance_service.example_4cycle(0.05)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    dist = ocrs_service.subset_distribution(g, plan.order, plan)
    assert dist.total_mass() == pytest.approx(1.0, abs=1e-12)
    # vertex 0 is matched through edges (0,1), (3,0) and (0,2)
    expected = sum(0.3 * x for u, v, x in g.edges if 0 in (u, v))
    assert dist.prob_matched(0) == pytest.approx(expected, abs=1e-12)

    start = ocrs_service.subset_distribution(g, plan.order, plan, t=0)
    assert start.probabilities == {0: 1.0}


def test_simulation_agrees_with_exact():
    """Test the vectorized executor against c x_e"""
    g = instance_service.example_4cycle(0.01)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    trials = 20000
    counts = ocrs_service.simulate_selection_counts(g, plan.order, plan, trials, stream_rng(11, 2, 0))
    for count, (_, _, x) in zip(counts, g.edges):
        lo, hi = wilson_interval(int(count), trials, 4.0)
        assert lo <= 0.3 * x <= hi


def test_run_ocrs_selects_a_matching():
    """Test that one execution respects activeness and the matching constraint"""
    g = instance_service.example_4cycle(0.2)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    rng = stream_rng(3, 8, 0)
    for _ in range(50):
        result = ocrs_service.run_ocrs(g, None, plan, None, rng)
        used = set()
        for e in result.selected:
            assert result.survival_states[e] and result.active_states[e]
            u, v, _ = g.edges[e]
            assert u not in used and v not in used
            used.update((u, v))


def test_run_ocrs_with_given_states():
    """Test that inactive edges are never selected"""
    g = instance_service.three_path(0.1)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    result = ocrs_service.run_ocrs(g, None, plan, [False, True, False], stream_rng(0, 8, 0))
    assert result.active_states == [False, True, False]
    assert set(result.selected) <= {1}
    with pytest.raises(ParameterRangeError):
        ocrs_service.run_ocrs(g, None, plan, [True], stream_rng(0, 8, 0))


def test_plan_mismatch():
    """Test that a plan is bound to its order and edge count"""
    g = instance_service.three_path(0.1)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    with pytest.raises(PlanMismatchError):
        ocrs_service.check_plan(g, [0, 1, 2], plan)
    with pytest.raises(PlanMismatchError):
        ocrs_service.check_plan(instance_service.example_4cycle(0.1), plan.order, plan)


def test_vertex_limit():
    """Test that the exact DP refuses oversized instances"""
    g = instance_service.complete_bipartite(12)
    with pytest.raises(VertexLimitError):
        ocrs_service.compute_alphas_exact(g, None, 0.3)
    with pytest.raises(VertexLimitError):
        ocrs_service.compute_alphas_exact(instance_service.three_path(0.1), None, 0.3, vertex_limit=3)


def test_invalid_plan_is_flagged():
    """Test that alphas above 1 are clamped and flagged"""
    g = instance_service.three_path(1e-4)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.45)
    assert not plan.valid[1]
    assert plan.alphas[1] == 1.0
    assert plan.valid[0] and plan.valid[2]


def test_max_valid_c_three_path():
    """Test the 3-path threshold (1 - c(1-eps))^2 = c"""
    g = instance_service.three_path(1e-4)
    value = ocrs_service.max_valid_c(g, None)
    assert value == pytest.approx(0.3820, abs=5e-4)
    assert value == pytest.approx(analysis_service.three_path_root(1e-4), abs=1e-6)


def test_max_valid_c_four_cycle():
    """Test the 4-cycle threshold"""
    g = instance_service.example_4cycle(1e-4)
    value = ocrs_service.max_valid_c(g, None)
    assert value == pytest.approx(0.3602, abs=5e-4)


def test_four_cycle_diagonals_fall_short_above_threshold():
    """Test that clamped diagonal edges are selected below c * x_e at c = 0.37"""
    g = instance_service.example_4cycle(1e-4)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.37)
    probs = ocrs_service.selection_probs_exact(g, None, plan)
    for e in (4, 5):
        assert not plan.valid[e]
        assert plan.alphas[e] == 1.0
        assert probs[e] / g.edges[e][2] < 0.37 - 1e-3
    for e in range(4):
        assert probs[e] == pytest.approx(0.37 * g.edges[e][2], abs=1e-12)


def test_negative_correlation_example():
    """Test that the final edge's endpoints are matched with negative covariance"""
    g = instance_service.neg_correlation()
    plan = ocrs_service.compute_alphas_exact(g, None, 0.3)
    u, v, _ = g.edges[5]
    joint = ocrs_service.joint_matched_probs(g, None, plan, u, v, 5)
    assert joint.prob_both < joint.prob_u * joint.prob_v
    assert joint.covariance < 0


def test_monte_carlo_plan_close_to_exact():
    """Test Monte-Carlo calibration against the exact plan"""
    g = instance_service.example_4cycle(0.01)
    exact = ocrs_service.compute_alphas_exact(g, None, 0.3)
    mc = ocrs_service.compute_alphas_mc(g, None, 0.3, samples=20000, seed=7)
    assert mc.mode == PlanMode.MONTE_CARLO
    assert mc.alphas[0] == 0.3 and mc.alphas[1] == 0.3
    assert np.allclose(mc.alphas, exact.alphas, atol=0.02)
    assert all(mc.valid)
    assert all(h >= 0 for h in mc.ci_halfwidth)


def test_monte_carlo_plan_is_deterministic():
    """Test that the same seed gives the same plan"""
    g = instance_service.example_4cycle(0.05)
    first = ocrs_service.compute_alphas_mc(g, None, 0.3, samples=2000, seed=1)
    second = ocrs_service.compute_alphas_mc(g, None, 0.3, samples=2000, seed=1)
    assert first.alphas == second.alphas


def test_zero_c():
    """Test that c = 0 selects nothing"""
    g = instance_service.example_4cycle(0.1)
    plan = ocrs_service.compute_alphas_exact(g, None, 0.0)
    assert plan.alphas == [0.0] * 6
    assert ocrs_service.selection_probs_exact(g, None, plan) == [0.0] * 6
