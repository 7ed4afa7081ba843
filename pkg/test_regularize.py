"""
Tests for the seven-cycle and biclique 1-regularizations
"""

import numpy as np
import pytest

from errors import NotBipartiteError, InfeasibleInstanceError
from models import GraphInstance, ReductionMethod, SchemeKind, SchemeSpec
from services.attenuation_service import attenuation_service
from services.estimator_service import estimator_service
from services.graph_service import graph_service
from services.instance_service import instance_service
from services.regularize_service import regularize_service


def assert_one_regular(g, tol=1e-9):
    loads = graph_service.vertex_loads(g)
    assert np.all(np.abs(loads - 1.0) <= tol), loads


def test_seven_cycle_three_path():
    """Test gadgets on the two slack endpoints of the 3-path"""
    g = instance_service.three_path(0.1)
    reduction = regularize_service.regularize_seven_cycle(g)
    assert reduction.method == ReductionMethod.SEVEN_CYCLE
    assert reduction.added_vertices == 12
    assert reduction.edge_map == [0, 1, 2]
    assert reduction.reduced.edges[:3] == g.edges
    assert reduction.reduced.arrival_order is None
    assert_one_regular(reduction.reduced)


def test_seven_cycle_single_edge_values():
    """Test gadget values (1 -+ x)/2 around a half-loaded vertex"""
    g = GraphInstance(vertex_count=2, edges=[(0, 1, 0.5)])
    reduction = regularize_service.regularize_seven_cycle(g)
    assert reduction.added_vertices == 12
    gadget = reduction.reduced.edges[1:8]
    assert [x for _, _, x in gadget] == pytest.approx([0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25])
    assert gadget[0][0] == 0 and gadget[-1][1] == 0
    assert_one_regular(reduction.reduced)


def test_seven_cycle_negative_skip_tol():
    """Test that a negative skip_tol attaches a gadget to every vertex"""
    g = instance_service.complete_bipartite(2)
    assert regularize_service.regularize_seven_cycle(g).added_vertices == 0
    reduction = regularize_service.regularize_seven_cycle(g, skip_tol=-1.0)
    assert reduction.added_vertices == 6 * 4
    assert_one_regular(reduction.reduced)


def test_seven_cycle_rejects_infeasible():
    """Test that infeasible input is refused"""
    g = GraphInstance(vertex_count=3, edges=[(0, 1, 0.7), (1, 2, 0.7)])
    with pytest.raises(InfeasibleInstanceError):
        regularize_service.regularize_seven_cycle(g)


def test_biclique_three_path():
    """Test the biclique gadget on a bipartite instance"""
    g = instance_service.three_path(0.1)
    reduction = regularize_service.regularize_biclique(g)
    reduced = reduction.reduced
    assert reduction.method == ReductionMethod.BICLIQUE
    assert reduced.edges[:3] == g.edges
    graph_service.check_structure(reduced)
    assert graph_service.bipartition_of(reduced) is not None
    assert_one_regular(reduced)


def test_biclique_needs_bipartite():
    """Test that a non-bipartite instance is refused"""
    triangle = GraphInstance(vertex_count=3, edges=[(0, 1, 0.3), (1, 2, 0.3), (0, 2, 0.3)])
    with pytest.raises(NotBipartiteError):
        regularize_service.regularize_biclique(triangle)


@pytest.mark.parametrize("seed", range(100))
def test_random_instances_become_one_regular(seed):
    """Test both reductions on random feasible instances"""
    general = instance_service.random_feasible(10, 14, 0.8, seed=seed)
    reduction = regularize_service.regularize(general, ReductionMethod.SEVEN_CYCLE)
    assert_one_regular(reduction.reduced)
    for idx in reduction.edge_map:
        assert reduction.reduced.edges[idx] == general.edges[idx]
    before = graph_service.short_odd_cycles(general)
    after = graph_service.short_odd_cycles(reduction.reduced)
    assert after == before

    bipartite = instance_service.random_feasible(10, 12, 0.8, seed=seed, bipartite=True)
    reduction = regularize_service.regularize(bipartite, ReductionMethod.BICLIQUE)
    assert_one_regular(reduction.reduced)
    for idx in reduction.edge_map:
        assert reduction.reduced.edges[idx] == bipartite.edges[idx]


def test_map_back_restricts_to_original_edges():
    """Test that map_back keeps exactly the original edges"""
    g = instance_service.three_path(0.2)
    reduction = regularize_service.regularize_seven_cycle(g)
    scheme = SchemeSpec(kind=SchemeKind.RCRS, attenuation=attenuation_service.A1)
    reduced_report = estimator_service.estimate_selectability(reduction.reduced, scheme, 2000, seed=5, workers=1)
    mapped = regularize_service.map_back(reduced_report, reduction, g)
    assert [e.edge for e in mapped.edges] == [0, 1, 2]
    for est in mapped.edges:
        assert est.ratio == reduced_report.edges[est.edge].ratio
    assert mapped.min_ratio == min(e.ratio for e in mapped.edges)


def test_reduction_of_one_regular_input_is_neutral():
    """Test that a 1-regular input measures the same through the reduction"""
    g = instance_service.complete_bipartite(3)
    reduction = regularize_service.regularize_seven_cycle(g)
    assert reduction.reduced.edges == g.edges
    scheme = SchemeSpec(kind=SchemeKind.RCRS, attenuation=attenuation_service.A1)
    direct = estimator_service.estimate_selectability(g, scheme, 3000, seed=1, pool=True, workers=1)
    reduced = estimator_service.estimate_selectability(reduction.reduced, scheme, 3000, seed=1, pool=True,
                                                       workers=1)
    mapped = regularize_service.map_back(reduced, reduction, g)
    assert mapped.pooled[0].ratio == direct.pooled[0].ratio


@pytest.mark.parametrize("seed", range(4))
def test_rcrs_ratios_survive_the_reduction_of_one_regular_inputs(seed):
    """Test that per-edge RCRS ratios measured through the reduction do not drop beyond 3 CI widths"""
    g = regularize_service.regularize_seven_cycle(instance_service.random_feasible(8, 10, 0.9, seed=seed)).reduced
    assert_one_regular(g)
    reduction = regularize_service.regularize_seven_cycle(g)
    assert_one_regular(reduction.reduced)
    scheme = SchemeSpec(kind=SchemeKind.RCRS, attenuation=attenuation_service.A1)

    direct = estimator_service.estimate_selectability(g, scheme, 4000, seed=1, workers=1)
    reduced = estimator_service.estimate_selectability(reduction.reduced, scheme, 4000, seed=2, workers=1)
    mapped = regularize_service.map_back(reduced, reduction, g)
    assert [e.edge for e in mapped.edges] == [e.edge for e in direct.edges]
    for before, after in zip(direct.edges, mapped.edges):
        width = (before.ci_hi - before.ci_lo) / 2.0 + (after.ci_hi - after.ci_lo) / 2.0
        assert after.ratio >= before.ratio - 3.0 * width
