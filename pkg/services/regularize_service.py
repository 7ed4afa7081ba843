"""
1-regularization reductions
Attach gadgets so every vertex load becomes 1 while original edges keep index and value
"""

import logging
from typing import List, Optional

from config import settings
from models import GraphInstance, Reduction, ReductionMethod, EstimateReport
from services.graph_service import graph_service
from services.estimator_service import estimator_service

logger = logging.getLogger(__name__)


class RegularizeService:
    """Seven-cycle and biclique gadget reductions"""

    def regularize_seven_cycle(self, g: GraphInstance, skip_tol: Optional[float] = None) -> Reduction:
        """
        Attach a 7-cycle v0..v6 to every vertex v0 with slack above skip_tol

        Cycle edge (v_i, v_{i+1}) carries (1 - x_v0)/2 for even i and (1 + x_v0)/2
        for odd i, where x_v0 is the load of v0. A negative skip_tol attaches a
        gadget to every vertex.

        Args:
            g: Feasible instance
            skip_tol: Slack threshold, defaults to settings.SKIP_TOL

        Returns:
            Reduction whose first |E| edges are the original edges
        """
        skip_tol = settings.SKIP_TOL if skip_tol is None else skip_tol
        report = graph_service.require_feasible(g)
        loads = report.per_vertex_load

        edges = list(g.edges)
        next_vertex = g.vertex_count
        gadgets = 0
        for v0, load in enumerate(loads):
            slack = 1.0 - load
            if skip_tol >= 0 and slack <= skip_tol:
                continue
            x_v0 = min(1.0, load)
            low = (1.0 - x_v0) / 2.0
            high = (1.0 + x_v0) / 2.0
            cycle = [v0] + list(range(next_vertex, next_vertex + 6)) + [v0]
            for i in range(7):
                edges.append((cycle[i], cycle[i + 1], low if i % 2 == 0 else high))
            next_vertex += 6
            gadgets += 1

        reduced = GraphInstance(
            vertex_count=next_vertex,
            edges=edges,
            symmetry_classes=g.symmetry_classes,
            name=f"{g.name or 'instance'}+seven-cycle",
        )
        logger.info(f"✅ Seven-cycle reduction: {gadgets} gadget(s), {next_vertex - g.vertex_count} vertices added")
        return Reduction(
            method=ReductionMethod.SEVEN_CYCLE,
            reduced=reduced,
            edge_map=list(range(len(g.edges))),
            added_vertices=next_vertex - g.vertex_count,
        )

    def regularize_biclique(self, g: GraphInstance, skip_tol: Optional[float] = None) -> Reduction:
        """
        Attach a dummy K_{n,n} across the two sides of a bipartite instance

        Sides are first padded to a common size n with isolated vertices. Every
        left vertex u joins each dummy right vertex with (1 - x_u)/n, every right
        vertex v joins each dummy left vertex with (1 - x_v)/n, and dummy pairs
        carry (sum of right loads)/n^2.

        Args:
            g: Feasible bipartite instance
            skip_tol: Slack threshold, defaults to settings.SKIP_TOL

        Returns:
            Bipartite Reduction whose first |E| edges are the original edges
        """
        skip_tol = settings.SKIP_TOL if skip_tol is None else skip_tol
        report = graph_service.require_feasible(g)
        coloring = graph_service.require_bipartition(g)
        loads = report.per_vertex_load

        def keep(value: float) -> bool:
            return skip_tol < 0 or value > skip_tol

        if not any(keep(1.0 - load) for load in loads):
            logger.info("✅ Biclique reduction: instance already 1-regular, nothing attached")
            return Reduction(
                method=ReductionMethod.BICLIQUE,
                reduced=g.model_copy(update={"arrival_order": None, "bipartition": coloring}),
                edge_map=list(range(len(g.edges))),
                added_vertices=0,
            )

        left = [vtx for vtx in range(g.vertex_count) if coloring[vtx] == 0]
        right = [vtx for vtx in range(g.vertex_count) if coloring[vtx] == 1]
        n = max(len(left), len(right), 1)

        next_vertex = g.vertex_count
        bipartition = list(coloring)
        pad_left = list(range(next_vertex, next_vertex + n - len(left)))
        next_vertex += len(pad_left)
        pad_right = list(range(next_vertex, next_vertex + n - len(right)))
        next_vertex += len(pad_right)
        bipartition += [0] * len(pad_left) + [1] * len(pad_right)

        dummy_left = list(range(next_vertex, next_vertex + n))
        next_vertex += n
        dummy_right = list(range(next_vertex, next_vertex + n))
        next_vertex += n
        bipartition += [0] * n + [1] * n

        load_of = {vtx: loads[vtx] for vtx in range(g.vertex_count)}
        edges = list(g.edges)
        for u in left + pad_left:
            value = (1.0 - min(1.0, load_of.get(u, 0.0))) / n
            if keep(value):
                edges += [(u, d, value) for d in dummy_right]
        for v in right + pad_right:
            value = (1.0 - min(1.0, load_of.get(v, 0.0))) / n
            if keep(value):
                edges += [(d, v, value) for d in dummy_left]

        dummy_value = sum(load_of[v] for v in right) / (n * n)
        if keep(dummy_value):
            edges += [(a, b, dummy_value) for a in dummy_left for b in dummy_right]

        reduced = GraphInstance(
            vertex_count=next_vertex,
            edges=edges,
            bipartition=bipartition,
            symmetry_classes=g.symmetry_classes,
            name=f"{g.name or 'instance'}+biclique",
        )
        logger.info(f"✅ Biclique reduction: n={n}, {next_vertex - g.vertex_count} vertices added")
        return Reduction(
            method=ReductionMethod.BICLIQUE,
            reduced=reduced,
            edge_map=list(range(len(g.edges))),
            added_vertices=next_vertex - g.vertex_count,
        )

    def regularize(self, g: GraphInstance, method: ReductionMethod,
                   skip_tol: Optional[float] = None) -> Reduction:
        if method == ReductionMethod.SEVEN_CYCLE:
            return self.regularize_seven_cycle(g, skip_tol)
        return self.regularize_biclique(g, skip_tol)

    def map_back(self, report: EstimateReport, reduction: Reduction,
                 original: Optional[GraphInstance] = None) -> EstimateReport:
        """
        Restrict a reduced-instance report to the original edges

        Args:
            report: Estimate computed on reduction.reduced
            reduction: The reduction
            original: Original instance, for re-reading its symmetry classes

        Returns:
            EstimateReport indexed by original edge ids
        """
        inverse = {reduced_idx: orig_idx for orig_idx, reduced_idx in enumerate(reduction.edge_map)}
        edges = []
        for est in report.edges:
            if est.edge in inverse:
                edges.append(est.model_copy(update={"edge": inverse[est.edge]}))
        edges.sort(key=lambda est: est.edge)

        pooled = None
        if report.pooled is not None:
            pooled = []
            for cls in report.pooled:
                if all(e in inverse for e in cls.edges):
                    pooled.append(cls.model_copy(update={"edges": [inverse[e] for e in cls.edges]}))
            if original is not None and original.symmetry_classes is None:
                pooled = None

        return estimator_service.summarize(
            scheme=report.scheme, trials=report.trials, seed=report.seed, z=report.z,
            edges=edges, pooled=pooled,
        )


# Global regularize service instance
regularize_service = RegularizeService()
