"""
Instance generators for the constructions used in the experiments
Every generator emits symmetry classes where an automorphism proves exchangeability
"""

import logging
from typing import List, Optional

import networkx as nx
import numpy as np

from errors import ParameterRangeError
from models import GraphInstance
from services.graph_service import graph_service

logger = logging.getLogger(__name__)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ParameterRangeError(f"eps must lie in (0, 1), got {eps}")


class InstanceService:
    """Builds GraphInstance objects"""

    def example_4cycle(self, eps: float) -> GraphInstance:
        """
        K4 with a heavy 4-cycle and light diagonals

        Cycle edges carry (1 - eps) / 2, diagonals eps. Edges are listed in
        arrival order: (1,2), (3,4), (2,3), (4,1), (1,3), (2,4) on vertices 1..4,
        stored 0-based.
        """
        _check_eps(eps)
        heavy = (1.0 - eps) / 2.0
        edges = [
            (0, 1, heavy), (2, 3, heavy),
            (1, 2, heavy), (3, 0, heavy),
            (0, 2, eps), (1, 3, eps),
        ]
        return GraphInstance(
            vertex_count=4,
            edges=edges,
            arrival_order=list(range(6)),
            symmetry_classes=[[0, 1], [2, 3], [4, 5]],
            name=f"example4cycle(eps={eps})",
        )

    def three_path(self, eps: float) -> GraphInstance:
        """Path (1,2),(2,3),(3,4) with values (1-eps, eps, 1-eps); the middle edge arrives last"""
        _check_eps(eps)
        return GraphInstance(
            vertex_count=4,
            edges=[(0, 1, 1.0 - eps), (1, 2, eps), (2, 3, 1.0 - eps)],
            arrival_order=[0, 2, 1],
            bipartition=[0, 1, 0, 1],
            symmetry_classes=[[0, 2], [1]],
            name=f"three_path(eps={eps})",
        )

    def complete_bipartite(self, n: int) -> GraphInstance:
        """K_{n,n} with x = 1/n; left vertex i, right vertex n + j, edge index i*n + j"""
        if n < 1:
            raise ParameterRangeError(f"n must be at least 1, got {n}")
        x = 1.0 / n
        edges = [(i, n + j, x) for i in range(n) for j in range(n)]
        return GraphInstance(
            vertex_count=2 * n,
            edges=edges,
            bipartition=[0] * n + [1] * n,
            symmetry_classes=[list(range(n * n))],
            name=f"complete_bipartite(n={n})",
        )

    def neg_correlation(self) -> GraphInstance:
        """
        Six-edge bipartite instance where matched events of the last edge's
        endpoints are negatively correlated

        u1, u2, u3 = 0, 1, 2 and v1, v2, v3 = 3, 4, 5; all x = 1/3; edges in
        arrival order (u3,v2), (u2,v3), (u2,v2), (u2,v1), (u1,v2), (u1,v1).
        """
        third = 1.0 / 3.0
        edges = [(2, 4, third), (1, 5, third), (1, 4, third), (1, 3, third), (0, 4, third), (0, 3, third)]
        return GraphInstance(
            vertex_count=6,
            edges=edges,
            arrival_order=list(range(6)),
            bipartition=[0, 0, 0, 1, 1, 1],
            name="neg_correlation",
        )

    def star_pair(self, n: int) -> GraphInstance:
        """Center edge (u0, v0) plus n pendant edges on each center; all x = 1/(n+1)"""
        if n < 1:
            raise ParameterRangeError(f"n must be at least 1, got {n}")
        x = 1.0 / (n + 1)
        edges = [(0, 1, x)]
        edges += [(0, 2 + i, x) for i in range(n)]
        edges += [(1, n + 2 + i, x) for i in range(n)]
        bipartition = [0, 1] + [1] * n + [0] * n
        return GraphInstance(
            vertex_count=2 * n + 2,
            edges=edges,
            bipartition=bipartition,
            symmetry_classes=[[0], list(range(1, 2 * n + 1))],
            name=f"star_pair(n={n})",
        )

    def split_vertex(self, g: GraphInstance, w: int, k: int) -> GraphInstance:
        """
        Replace vertex w by k copies, splitting each incident value evenly

        Args:
            g: Instance
            w: Vertex to split; copy 1 keeps the id w, copies 2..k get fresh ids
            k: Number of copies

        Returns:
            Instance in which original edges keep their indices
        """
        if not 0 <= w < g.vertex_count:
            raise ParameterRangeError(f"Vertex {w} out of range 0..{g.vertex_count - 1}")
        if k < 1:
            raise ParameterRangeError(f"k must be at least 1, got {k}")

        n = g.vertex_count
        copies = [w] + list(range(n, n + k - 1))
        edges = []
        appended = []
        for u, v, x in g.edges:
            if w in (u, v):
                other = v if u == w else u
                share = x / k
                edges.append((u, v, share))
                appended += [(copy, other, share) for copy in copies[1:]]
            else:
                edges.append((u, v, x))

        bipartition = None
        if g.bipartition is not None:
            bipartition = list(g.bipartition) + [g.bipartition[w]] * (k - 1)

        return GraphInstance(
            vertex_count=n + k - 1,
            edges=edges + appended,
            bipartition=bipartition,
            name=f"{g.name or 'instance'}+split(w={w},k={k})",
        )

    def random_feasible(self, n: int, m: int, density: float = 1.0, seed: int = 0,
                        bipartite: bool = False) -> GraphInstance:
        """
        Random graph whose x values are scaled so the largest load equals density

        Args:
            n: Vertices (split evenly between sides when bipartite)
            m: Edges requested (capped at the number of vertex pairs)
            density: Target maximum load in (0, 1]
            seed: Random seed
            bipartite: Draw a random bipartite graph instead

        Returns:
            Feasible GraphInstance
        """
        if n < 0 or m < 0:
            raise ParameterRangeError("n and m must be non-negative")
        if not 0.0 < density <= 1.0:
            raise ParameterRangeError(f"density must lie in (0, 1], got {density}")

        rng = np.random.default_rng(seed)
        bipartition: Optional[List[int]] = None
        if bipartite:
            left = n // 2
            right = n - left
            graph = nx.bipartite.gnmk_random_graph(left, right, min(m, left * right), seed=seed)
            bipartition = [0] * left + [1] * right
        else:
            graph = nx.gnm_random_graph(n, min(m, n * (n - 1) // 2), seed=seed)

        pairs = sorted((min(u, v), max(u, v)) for u, v in graph.edges())
        values = rng.uniform(0.0, 1.0, size=len(pairs))
        loads = np.zeros(n)
        for (u, v), x in zip(pairs, values):
            loads[u] += x
            loads[v] += x
        peak = loads.max() if n and len(pairs) else 0.0
        if peak > 0:
            values = np.minimum(values * (density / peak), 1.0)

        g = GraphInstance(
            vertex_count=n,
            edges=[(u, v, float(x)) for (u, v), x in zip(pairs, values)],
            bipartition=bipartition,
            name=f"random(n={n},m={m},density={density},seed={seed}{',bipartite' if bipartite else ''})",
        )
        report = graph_service.validate_instance(g)
        if not report.feasible:
            # rounding on the scaled loads; shrink once more
            values = values * (1.0 - 1e-12)
            g = g.model_copy(update={"edges": [(u, v, float(x)) for (u, v), x in zip(pairs, values)]})
        return g


# Global instance service instance
instance_service = InstanceService()
