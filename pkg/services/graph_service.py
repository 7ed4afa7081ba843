"""
Graph service - structure checks, matching-polytope validation and structural queries
"""

import logging
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config import settings
from errors import (
    StructuralError, InfeasibleInstanceError, NotOneRegularError,
    NotBipartiteError, ParameterRangeError, ShortOddCycleError
)
from models import GraphInstance, ValidationReport

logger = logging.getLogger(__name__)


class GraphService:
    """Queries on graphs carrying a fractional matching"""

    def check_structure(self, g: GraphInstance) -> None:
        """
        Raise StructuralError if the instance is malformed

        Checks endpoints, self-loops, duplicate edges, x range, arrival order,
        declared bipartition and symmetry classes.
        """
        n = g.vertex_count
        seen = set()
        for idx, (u, v, x) in enumerate(g.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise StructuralError(f"Edge {idx} ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise StructuralError(f"Edge {idx} is a self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise StructuralError(f"Edge {idx} duplicates edge ({key[0]}, {key[1]})")
            seen.add(key)
            if not (0.0 <= x <= 1.0) or x != x:
                raise StructuralError(f"Edge {idx} has x={x} outside [0, 1]")

        m = len(g.edges)
        if g.arrival_order is not None:
            if sorted(g.arrival_order) != list(range(m)):
                raise StructuralError("Arrival order is not a permutation of the edge indices")

        if g.bipartition is not None:
            if len(g.bipartition) != n or any(c not in (0, 1) for c in g.bipartition):
                raise StructuralError("Bipartition must give a 0/1 color for every vertex")
            for idx, (u, v, _) in enumerate(g.edges):
                if g.bipartition[u] == g.bipartition[v]:
                    raise StructuralError(f"Edge {idx} joins two vertices of the same declared side")

        if g.symmetry_classes is not None:
            members = [e for cls in g.symmetry_classes for e in cls]
            if any(not 0 <= e < m for e in members):
                raise StructuralError("Symmetry class refers to a missing edge")
            if len(members) != len(set(members)):
                raise StructuralError("Symmetry classes overlap")

    def vertex_loads(self, g: GraphInstance) -> np.ndarray:
        """Sum of x over the edges incident to each vertex"""
        if not g.edges:
            return np.zeros(g.vertex_count)
        u, v, x = self.edge_arrays(g)
        return (np.bincount(u, weights=x, minlength=g.vertex_count)
                + np.bincount(v, weights=x, minlength=g.vertex_count))

    def validate_instance(self, g: GraphInstance, tol: Optional[float] = None) -> ValidationReport:
        """
        Check that x lies in the matching polytope

        Args:
            g: Instance (must be structurally well formed)
            tol: Load tolerance, defaults to settings.FEASIBILITY_TOL

        Returns:
            ValidationReport
        """
        tol = settings.FEASIBILITY_TOL if tol is None else tol
        self.check_structure(g)
        loads = self.vertex_loads(g)
        violations = [(int(vtx), float(load)) for vtx, load in enumerate(loads) if load > 1.0 + tol]
        return ValidationReport(
            feasible=not violations,
            per_vertex_load=[float(l) for l in loads],
            violations=violations,
            tolerance=tol,
        )

    def require_feasible(self, g: GraphInstance, tol: Optional[float] = None) -> ValidationReport:
        report = self.validate_instance(g, tol)
        if not report.feasible:
            vertex, load = report.violations[0]
            raise InfeasibleInstanceError(
                f"Instance leaves the matching polytope: vertex {vertex} has load {load:.12g}"
                f" ({len(report.violations)} violation(s))"
            )
        return report

    def one_regular_slack(self, g: GraphInstance, tol: Optional[float] = None) -> List[float]:
        """1 - load(v) per vertex, clipped to [0, 1]; raises on infeasible input"""
        report = self.require_feasible(g, tol)
        return [float(min(1.0, max(0.0, 1.0 - load))) for load in report.per_vertex_load]

    def is_one_regular(self, g: GraphInstance, tol: Optional[float] = None) -> bool:
        tol = settings.FEASIBILITY_TOL if tol is None else tol
        loads = self.vertex_loads(g)
        return bool(np.all(np.abs(loads - 1.0) <= tol))

    def require_one_regular(self, g: GraphInstance, tol: Optional[float] = None) -> None:
        tol = settings.FEASIBILITY_TOL if tol is None else tol
        loads = self.vertex_loads(g)
        bad = np.flatnonzero(np.abs(loads - 1.0) > tol)
        if bad.size:
            vertex = int(bad[0])
            raise NotOneRegularError(
                f"Instance is not 1-regular: vertex {vertex} has load {loads[vertex]:.12g}"
            )

    def to_networkx(self, g: GraphInstance) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(g.vertex_count))
        for idx, (u, v, x) in enumerate(g.edges):
            graph.add_edge(u, v, index=idx, x=x)
        return graph

    def adjacency(self, g: GraphInstance) -> List[set]:
        adj = [set() for _ in range(g.vertex_count)]
        for u, v, _ in g.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def incident_edges(self, g: GraphInstance) -> List[List[int]]:
        """Edge indices incident to each vertex, ascending"""
        incident: List[List[int]] = [[] for _ in range(g.vertex_count)]
        for idx, (u, v, _) in enumerate(g.edges):
            incident[u].append(idx)
            incident[v].append(idx)
        return incident

    def edge_index(self, g: GraphInstance) -> dict:
        """Unordered endpoint pair -> edge index"""
        return {(min(u, v), max(u, v)): idx for idx, (u, v, _) in enumerate(g.edges)}

    def edge_arrays(self, g: GraphInstance) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Endpoint and value arrays in edge-index order"""
        if not g.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0)
        arr = np.asarray(g.edges, dtype=float)
        return arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2].copy()

    def short_odd_cycles(self, g: GraphInstance) -> Tuple[bool, bool]:
        """
        Exhaustive search for cycles of length 3 and 5

        Returns:
            (has_3_cycle, has_5_cycle)
        """
        graph = self.to_networkx(g)
        if nx.is_bipartite(graph):
            return False, False

        adj = self.adjacency(g)
        has3 = False
        for u, v, _ in g.edges:
            if adj[u] & adj[v]:
                has3 = True
                break

        # Simple 5-cycles rooted at their smallest vertex
        has5 = False
        for start in range(g.vertex_count):
            stack = [(start, (start,))]
            while stack and not has5:
                vertex, path = stack.pop()
                if len(path) == 5:
                    if start in adj[vertex]:
                        has5 = True
                    continue
                for nxt in adj[vertex]:
                    if nxt > start and nxt not in path:
                        stack.append((nxt, path + (nxt,)))
            if has5:
                break

        return has3, has5

    def require_no_short_odd_cycles(self, g: GraphInstance) -> None:
        has3, has5 = self.short_odd_cycles(g)
        if has3 or has5:
            lengths = [str(k) for k, flag in ((3, has3), (5, has5)) if flag]
            raise ShortOddCycleError(f"Instance has cycles of length {' and '.join(lengths)}")

    def bipartition_of(self, g: GraphInstance) -> Optional[List[int]]:
        """Two-coloring per connected component, or None if an odd cycle exists"""
        graph = self.to_networkx(g)
        try:
            coloring = nx.bipartite.color(graph)
        except nx.NetworkXError:
            return None
        return [int(coloring[vtx]) for vtx in range(g.vertex_count)]

    def require_bipartition(self, g: GraphInstance) -> List[int]:
        """Declared bipartition, or a computed one when the graph is bipartite"""
        if g.bipartition is not None:
            return list(g.bipartition)
        coloring = self.bipartition_of(g)
        if coloring is None:
            raise NotBipartiteError("Instance is not bipartite")
        return coloring

    def resolve_order(self, g: GraphInstance, order: Optional[Sequence[int]] = None) -> List[int]:
        """Explicit order, else the instance's, else edge-list order"""
        if order is not None:
            resolved = list(order)
        elif g.arrival_order is not None:
            resolved = list(g.arrival_order)
        else:
            logger.warning("⚠️ Instance has no arrival order - using edge-list order")
            resolved = list(range(len(g.edges)))
        if sorted(resolved) != list(range(len(g.edges))):
            raise StructuralError("Arrival order is not a permutation of the edge indices")
        return resolved

    def check_edge(self, g: GraphInstance, edge: int) -> None:
        if not 0 <= edge < len(g.edges):
            raise ParameterRangeError(f"Edge index {edge} out of range 0..{len(g.edges) - 1}")


# Global graph service instance
graph_service = GraphService()
