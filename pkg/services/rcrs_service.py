"""
Random-order contention resolution with attenuation a(x_e)
Edges arrive at uniform times Y_e; surviving unblocked edges are selected greedily
"""

import logging
from typing import Dict, List, Optional

import numpy as np
from scipy import integrate

from config import settings
from errors import InvariantViolation, ParameterRangeError
from models import (
    AttenuationFn, GraphInstance, RcrsRunRecord, BlockerDiagnostic, ProbabilityEstimate
)
from services.attenuation_service import attenuation_service
from services.graph_service import graph_service
from services.stats import stream_rng, wilson_interval, run_blocks, STREAM_NO_RELEVANT

logger = logging.getLogger(__name__)


class RcrsService:
    """Execution, batch simulation and relevant-edge statistics of the random-order scheme"""

    def run_rcrs(self, g: GraphInstance, fn: AttenuationFn, rng: np.random.Generator,
                 diagnostics: bool = False) -> RcrsRunRecord:
        """
        One execution of the scheme

        Args:
            g: Instance
            fn: Attenuation function
            rng: Source of Y, A and X (drawn in that order, one value per edge each)
            diagnostics: Also compute |R_e| and simple-blockers, and assert the
                blocker invariants

        Returns:
            RcrsRunRecord
        """
        m = len(g.edges)
        us, vs, xs = graph_service.edge_arrays(g)
        arrival = rng.random(m)
        attenuate = rng.random(m) < attenuation_service.evaluate(fn, xs) if m else np.zeros(0, dtype=bool)
        active = rng.random(m) < xs
        survive = active & attenuate

        # ties broken by edge index
        order = np.lexsort((np.arange(m), arrival))
        rank = np.empty(m, dtype=np.int64)
        rank[order] = np.arange(m)

        matched = np.zeros(g.vertex_count, dtype=bool)
        in_matching = np.zeros(m, dtype=bool)
        for e in order:
            if not survive[e]:
                continue
            u, v = us[e], vs[e]
            if matched[u] or matched[v]:
                continue
            matched[u] = matched[v] = True
            in_matching[e] = True

        record = RcrsRunRecord(
            arrival_times=[float(y) for y in arrival],
            active_states=[bool(b) for b in active],
            survival_states=[bool(b) for b in survive],
            matching=[int(e) for e in np.flatnonzero(in_matching)],
        )
        if diagnostics:
            counts, blockers = self._diagnose(g, survive, rank, in_matching)
            record = record.model_copy(update={"relevant_counts": counts, "blockers": blockers})
        return record

    def _diagnose(self, g: GraphInstance, survive: np.ndarray, rank: np.ndarray,
                  in_matching: np.ndarray):
        """Relevant-edge counts and simple-blockers, asserting the blocker invariants"""
        incident = graph_service.incident_edges(g)

        def neighbors(e: int) -> set:
            u, v, _ = g.edges[e]
            return (set(incident[u]) | set(incident[v])) - {e}

        def relevant_for(f: int, e: int) -> bool:
            return bool(survive[f]) and rank[f] < rank[e]

        counts: List[int] = []
        blockers: Dict[int, List[BlockerDiagnostic]] = {}
        for e, (u, v, _) in enumerate(g.edges):
            around_e = neighbors(e)
            relevant = sorted(f for f in around_e if relevant_for(f, e))
            counts.append(len(relevant))
            if not survive[e]:
                continue

            entries = []
            for f in relevant:
                fu, fv, _ = g.edges[f]
                w = fv if fu in (u, v) else fu
                excluded = {idx for idx in incident[w] if set(g.edges[idx][:2]) in ({u, w}, {v, w})}
                found = []
                for h in incident[w]:
                    if h in excluded or not survive[h] or rank[h] >= rank[f]:
                        continue
                    if all(not relevant_for(h2, h) for h2 in neighbors(h) - around_e):
                        found.append(h)
                if len(found) > 1:
                    raise InvariantViolation(f"Edge {f} has {len(found)} simple-blockers {found}")
                entries.append(BlockerDiagnostic(relevant_edge=f, simple_blocker=found[0] if found else None))
            blockers[e] = entries

            if not relevant and not in_matching[e]:
                raise InvariantViolation(f"Surviving edge {e} has no relevant edge but was not matched")
            if len(relevant) <= 1 and all(d.simple_blocker is not None for d in entries) and not in_matching[e]:
                raise InvariantViolation(f"Surviving edge {e} has simple-blocked relevant edges but was not matched")
        return counts, blockers

    def simulate_selection_counts(self, g: GraphInstance, fn: AttenuationFn, trials: int,
                                  rng: np.random.Generator) -> np.ndarray:
        """Selection count per edge over `trials` vectorized executions (same law as run_rcrs)"""
        m = len(g.edges)
        counts = np.zeros(m, dtype=np.int64)
        if m == 0:
            return counts
        us, vs, xs = graph_service.edge_arrays(g)
        arrival = rng.random((trials, m))
        survive = (rng.random((trials, m)) < attenuation_service.evaluate(fn, xs)) & (rng.random((trials, m)) < xs)

        # non-survivors sort after every survivor
        keyed = np.where(survive, arrival, 2.0)
        order = np.argsort(keyed, axis=1, kind="stable")
        depth = int(survive.sum(axis=1).max())
        matched = np.zeros((trials, g.vertex_count), dtype=bool)
        rows = np.arange(trials)
        for j in range(depth):
            e = order[:, j]
            u, v = us[e], vs[e]
            take = survive[rows, e] & ~matched[rows, u] & ~matched[rows, v]
            counts += np.bincount(e[take], minlength=m)
            matched[rows[take], u[take]] = True
            matched[rows[take], v[take]] = True
        return counts

    def estimate_no_relevant_prob(self, g: GraphInstance, fn: AttenuationFn, edge: int,
                                  trials: int, seed: int, z: Optional[float] = None) -> ProbabilityEstimate:
        """
        Frequency of R_e being empty given that e survives

        The survival bit of e is fixed to 1; all other bits are independent of it.

        Args:
            g: Instance
            fn: Attenuation function
            edge: Edge index
            trials: Number of trials
            seed: Seed (one stream per trial block)
            z: Critical value for the Wilson interval

        Returns:
            ProbabilityEstimate
        """
        graph_service.check_edge(g, edge)
        if trials <= 0:
            raise ParameterRangeError("trials must be positive")

        u, v, _ = g.edges[edge]
        incident = graph_service.incident_edges(g)
        around = np.array(sorted((set(incident[u]) | set(incident[v])) - {edge}), dtype=np.int64)
        _, _, xs = graph_service.edge_arrays(g)
        x_around = xs[around] if around.size else np.zeros(0)
        s_around = attenuation_service.survival(fn, x_around) if around.size else np.zeros(0)
        earlier_on_tie = around < edge

        def block(index: int, size: int) -> int:
            rng = stream_rng(seed, STREAM_NO_RELEVANT, index)
            y_e = rng.random(size)
            if not around.size:
                return size
            y_f = rng.random((size, around.size))
            surv = rng.random((size, around.size)) < s_around
            before = (y_f < y_e[:, None]) | ((y_f == y_e[:, None]) & earlier_on_tie)
            return int(np.count_nonzero(~(surv & before).any(axis=1)))

        hits = sum(run_blocks(block, trials))
        lo, hi = wilson_interval(hits, trials, z)
        logger.info(f"📊 P[no relevant edge | edge {edge} survives] ~ {hits / trials:.6f} [{lo:.6f}, {hi:.6f}]")
        return ProbabilityEstimate(successes=hits, trials=trials, value=hits / trials, ci_lo=lo, ci_hi=hi)

    def exact_no_relevant_prob(self, g: GraphInstance, fn: AttenuationFn, edge: int) -> float:
        """Integral over y of prod over f adjacent to e of (1 - y s(x_f))"""
        graph_service.check_edge(g, edge)
        u, v, _ = g.edges[edge]
        incident = graph_service.incident_edges(g)
        around = sorted((set(incident[u]) | set(incident[v])) - {edge})
        if not around:
            return 1.0
        s = np.asarray(attenuation_service.survival(fn, np.array([g.edges[f][2] for f in around])))
        value, _ = integrate.quad(lambda y: float(np.prod(1.0 - y * s)), 0.0, 1.0,
                                  epsabs=settings.QUAD_TOL, epsrel=settings.QUAD_TOL, limit=200)
        return float(value)


# Global RCRS service instance
rcrs_service = RcrsService()
