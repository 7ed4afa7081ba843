"""
Tests for instance structure checks, polytope validation and structural queries
"""

import networkx as nx
import pytest

from errors import StructuralError, InfeasibleInstanceError, NotBipartiteError, NotOneRegularError
from models import GraphInstance
from services.graph_service import graph_service
from services.instance_service import instance_service


def make(n, edges, **kwargs):
    return GraphInstance(vertex_count=n, edges=edges, **kwargs)


def test_aliases_and_json_dict():
    """Test instance JSON keys and alias population"""
    g = GraphInstance.model_validate({"vertices": 2, "edges": [[0, 1, 0.5]], "order": [0]})
    assert g.vertex_count == 2
    assert g.arrival_order == [0]
    payload = g.to_json_dict()
    assert payload["vertices"] == 2
    assert payload["edges"] == [[0, 1, 0.5]]
    assert "bipartition" not in payload
    assert payload["schema_version"] == 1


@pytest.mark.parametrize("edges, kwargs", [
    ([(0, 5, 0.5)], {}),
    ([(1, 1, 0.5)], {}),
    ([(0, 1, 0.2), (1, 0, 0.2)], {}),
    ([(0, 1, 1.5)], {}),
    ([(0, 1, float("nan"))], {}),
    ([(0, 1, 0.5), (1, 2, 0.5)], {"arrival_order": [0, 0]}),
    ([(0, 1, 0.5)], {"bipartition": [0, 0, 1]}),
    ([(0, 1, 0.5)], {"bipartition": [0, 1]}),
    ([(0, 1, 0.5), (1, 2, 0.5)], {"symmetry_classes": [[0, 1], [1]]}),
    ([(0, 1, 0.5)], {"symmetry_classes": [[3]]}),
])
def test_structural_errors(edges, kwargs):
    """Test that malformed instances raise StructuralError"""
    with pytest.raises(StructuralError):
        graph_service.check_structure(make(3, edges, **kwargs))


def test_validate_feasible_and_infeasible():
    """Test per-vertex loads and violations"""
    triangle = make(3, [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)])
    report = graph_service.validate_instance(triangle)
    assert report.feasible
    assert report.per_vertex_load == pytest.approx([1.0, 1.0, 1.0])

    heavy = make(3, [(0, 1, 0.6), (1, 2, 0.6)])
    report = graph_service.validate_instance(heavy)
    assert not report.feasible
    assert report.violations[0][0] == 1
    assert report.violations[0][1] == pytest.approx(1.2)
    with pytest.raises(InfeasibleInstanceError):
        graph_service.require_feasible(heavy)


def test_validate_tolerance():
    """Test that loads within tol of 1 are accepted"""
    g = make(3, [(0, 1, 0.5), (1, 2, 0.5 + 5e-10)])
    assert graph_service.validate_instance(g, tol=1e-9).feasible
    assert not graph_service.validate_instance(g, tol=1e-12).feasible


def test_empty_instance():
    """Test an instance with no edges"""
    g = make(3, [])
    report = graph_service.validate_instance(g)
    assert report.feasible
    assert report.per_vertex_load == [0.0, 0.0, 0.0]
    assert not graph_service.is_one_regular(g)


def test_one_regular():
    """Test 1-regularity on K_{3,3} and a path"""
    assert graph_service.is_one_regular(instance_service.complete_bipartite(3))
    path = instance_service.three_path(0.1)
    assert not graph_service.is_one_regular(path)
    with pytest.raises(NotOneRegularError):
        graph_service.require_one_regular(path)
    slack = graph_service.one_regular_slack(path)
    assert slack[0] == pytest.approx(0.1)
    assert slack[1] == pytest.approx(0.0)


def test_short_odd_cycles():
    """Test triangle and 5-cycle detection"""
    triangle = make(3, [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)])
    assert graph_service.short_odd_cycles(triangle) == (True, False)

    pentagon = make(5, [(i, (i + 1) % 5, 0.5) for i in range(5)])
    assert graph_service.short_odd_cycles(pentagon) == (False, True)

    heptagon = make(7, [(i, (i + 1) % 7, 0.5) for i in range(7)])
    assert graph_service.short_odd_cycles(heptagon) == (False, False)

    assert graph_service.short_odd_cycles(instance_service.complete_bipartite(3)) == (False, False)


def test_bipartition_matches_networkx():
    """Test bipartiteness against networkx"""
    for g in (instance_service.complete_bipartite(3), instance_service.example_4cycle(0.1),
              instance_service.star_pair(3)):
        colors = graph_service.bipartition_of(g)
        assert (colors is not None) == nx.is_bipartite(graph_service.to_networkx(g))
        if colors is not None:
            assert all(colors[u] != colors[v] for u, v, _ in g.edges)

    with pytest.raises(NotBipartiteError):
        graph_service.require_bipartition(instance_service.example_4cycle(0.1))


def test_resolve_order():
    """Test explicit, instance and default arrival orders"""
    path = instance_service.three_path(0.1)
    assert graph_service.resolve_order(path) == [0, 2, 1]
    assert graph_service.resolve_order(path, [2, 1, 0]) == [2, 1, 0]
    assert graph_service.resolve_order(instance_service.complete_bipartite(2)) == [0, 1, 2, 3]
    with pytest.raises(StructuralError):
        graph_service.resolve_order(path, [0, 1])


def test_generators_are_feasible():
    """Test that every generator emits a well-formed feasible instance"""
    instances = [
        instance_service.example_4cycle(0.01),
        instance_service.three_path(0.01),
        instance_service.complete_bipartite(4),
        instance_service.neg_correlation(),
        instance_service.star_pair(5),
        instance_service.random_feasible(12, 30, 0.9, seed=3),
        instance_service.random_feasible(12, 20, 1.0, seed=4, bipartite=True),
    ]
    for g in instances:
        graph_service.check_structure(g)
        assert graph_service.validate_instance(g).feasible


def test_split_vertex_keeps_loads():
    """Test that splitting a vertex preserves the loads of its neighbors"""
    g = instance_service.complete_bipartite(3)
    split = instance_service.split_vertex(g, 0, 4)
    assert split.vertex_count == g.vertex_count + 3
    assert len(split.edges) == len(g.edges) + 3 * 3
    loads = graph_service.vertex_loads(split)
    for right in range(3, 6):
        assert loads[right] == pytest.approx(1.0)
    assert loads[0] == pytest.approx(0.25)
    # original edge indices keep their endpoints
    for idx, (u, v, _) in enumerate(g.edges):
        assert split.edges[idx][:2] == (u, v)
    graph_service.check_structure(split)
