"""
Adversarial-order OCRS with calibrated attenuation alpha_e = c / P[e not blocked]
Exact subset DP over matched-vertex sets, Monte-Carlo calibration, execution
"""

import logging
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from errors import (
    ParameterRangeError, VertexLimitError, PlanMismatchError, InvariantViolation
)
from models import (
    GraphInstance, OcrsPlan, PlanMode, SubsetDistribution, MatchingResult, JointMatchedProbs
)
from services.graph_service import graph_service
from services.stats import stream_rng, wilson_interval, STREAM_OCRS_PLAN

logger = logging.getLogger(__name__)

VALID_SLACK = 1e-12
MASS_TOL = 1e-9


class _SweepStep:
    """State of the DP just before one arrival"""
    __slots__ = ("position", "edge", "masks", "probs", "blockfree", "alpha", "alpha_raw")

    def __init__(self, position, edge, masks, probs, blockfree, alpha, alpha_raw):
        self.position = position
        self.edge = edge
        self.masks = masks
        self.probs = probs
        self.blockfree = blockfree
        self.alpha = alpha
        self.alpha_raw = alpha_raw


class OcrsService:
    """Algorithm state and queries for the adversarial-order scheme"""

    def _check_c(self, c: float) -> None:
        if not 0.0 <= c <= 1.0:
            raise ParameterRangeError(f"c must lie in [0, 1], got {c}")

    def _check_vertex_limit(self, g: GraphInstance, vertex_limit: Optional[int]) -> None:
        limit = settings.VERTEX_LIMIT if vertex_limit is None else vertex_limit
        if g.vertex_count > limit:
            raise VertexLimitError(
                f"Exact DP supports at most {limit} vertices, instance has {g.vertex_count}"
            )

    def check_plan(self, g: GraphInstance, order: Sequence[int], plan: OcrsPlan) -> None:
        """Raise PlanMismatchError unless the plan was computed for this instance and order"""
        if len(plan.alphas) != len(g.edges):
            raise PlanMismatchError(f"Plan has {len(plan.alphas)} edges, instance has {len(g.edges)}")
        if list(plan.order) != list(order):
            raise PlanMismatchError("Plan was computed for another arrival order")

    def _sweep(self, g: GraphInstance, order: Sequence[int], c: Optional[float] = None,
               alphas: Optional[Sequence[float]] = None) -> Iterator[_SweepStep]:
        """
        Walk the arrivals keeping the exact law of the matched-vertex set

        Alphas are calibrated from c when `alphas` is None, otherwise taken as given.
        The final yielded step (edge=None) carries the distribution after all arrivals.
        """
        masks = np.zeros(1, dtype=np.int64)
        probs = np.ones(1)

        for position, e in enumerate(order):
            u, v, x = g.edges[e]
            bits = (1 << u) | (1 << v)
            free = (masks & bits) == 0
            blockfree = float(probs[free].sum())

            if alphas is None:
                if c == 0.0:
                    alpha_raw = 0.0
                elif blockfree <= 0.0:
                    alpha_raw = float("inf")
                else:
                    alpha_raw = c / blockfree
                alpha = min(1.0, alpha_raw)
            else:
                alpha = float(alphas[e])
                alpha_raw = alpha

            yield _SweepStep(position, e, masks, probs, blockfree, alpha, alpha_raw)

            q = x * alpha
            if q <= 0.0 or not free.any():
                continue
            moved_masks = masks[free] | bits
            moved_probs = probs[free] * q
            kept = probs.copy()
            kept[free] *= (1.0 - q)
            all_masks = np.concatenate([masks, moved_masks])
            all_probs = np.concatenate([kept, moved_probs])
            masks, inverse = np.unique(all_masks, return_inverse=True)
            probs = np.bincount(inverse.ravel(), weights=all_probs)
            support = probs > 0.0
            masks, probs = masks[support], probs[support]

            mass = probs.sum()
            if abs(mass - 1.0) > MASS_TOL:
                raise InvariantViolation(f"Subset distribution mass drifted to {mass!r} at arrival {position}")

        yield _SweepStep(len(order), None, masks, probs, 1.0, 0.0, 0.0)

    def _calibrate(self, g: GraphInstance, order: Sequence[int], c: float) -> Tuple[List[float], List[float], List[bool]]:
        m = len(g.edges)
        alphas = [0.0] * m
        blockfree = [1.0] * m
        valid = [True] * m
        for step in self._sweep(g, order, c=c):
            if step.edge is None:
                break
            alphas[step.edge] = step.alpha
            blockfree[step.edge] = step.blockfree
            valid[step.edge] = step.alpha_raw <= 1.0 + VALID_SLACK
        return alphas, blockfree, valid

    def compute_alphas_exact(self, g: GraphInstance, order: Optional[Sequence[int]], c: float,
                             vertex_limit: Optional[int] = None) -> OcrsPlan:
        """
        Calibrate alpha_e exactly through the subset DP

        Args:
            g: Feasible instance
            order: Arrival order (instance order when None)
            c: Target selectability in [0, 1]
            vertex_limit: Maximum vertex count, defaults to settings.VERTEX_LIMIT

        Returns:
            Exact-mode OcrsPlan; alpha > 1 is clamped and flagged invalid
        """
        self._check_c(c)
        graph_service.require_feasible(g)
        self._check_vertex_limit(g, vertex_limit)
        order = graph_service.resolve_order(g, order)

        m = len(g.edges)
        alphas, blockfree, valid = self._calibrate(g, order, c)

        invalid = m - sum(valid)
        if invalid:
            logger.warning(f"⚠️ Exact plan at c={c}: {invalid} edge(s) need alpha > 1 (clamped)")
        else:
            logger.info(f"✅ Exact plan at c={c}: all {m} alphas valid")

        return OcrsPlan(c=c, order=order, alphas=alphas, blockfree_probs=blockfree,
                        valid=valid, mode=PlanMode.EXACT)

    def subset_distribution(self, g: GraphInstance, order: Sequence[int], plan: OcrsPlan,
                            t: Optional[int] = None) -> SubsetDistribution:
        """Exact law of the matched-vertex set just before arrival t (after all arrivals when None)"""
        self.check_plan(g, order, plan)
        target = len(order) if t is None else t
        if not 0 <= target <= len(order):
            raise ParameterRangeError(f"Arrival index {t} out of range 0..{len(order)}")
        for step in self._sweep(g, order, alphas=plan.alphas):
            if step.position == target:
                return SubsetDistribution(
                    vertex_count=g.vertex_count,
                    probabilities={int(mk): float(p) for mk, p in zip(step.masks, step.probs)},
                )
        raise ParameterRangeError(f"Arrival index {t} out of range")

    def selection_probs_exact(self, g: GraphInstance, order: Optional[Sequence[int]],
                              plan: OcrsPlan) -> List[float]:
        """P[e in M] = x_e * alpha_e * P[e not blocked] for every edge"""
        order = graph_service.resolve_order(g, order if order is not None else plan.order)
        self.check_plan(g, order, plan)
        self._check_vertex_limit(g, None)
        probs = [0.0] * len(g.edges)
        for step in self._sweep(g, order, alphas=plan.alphas):
            if step.edge is None:
                break
            probs[step.edge] = g.edges[step.edge][2] * step.alpha * step.blockfree
        return probs

    def joint_matched_probs(self, g: GraphInstance, order: Optional[Sequence[int]], plan: OcrsPlan,
                            u: int, v: int, t: int) -> JointMatchedProbs:
        """
        Matched probabilities of u, v and both, just before arrival t

        Args:
            g: Instance
            order: Arrival order of the plan
            plan: Exact-mode plan
            u, v: Vertices
            t: Arrival index in 0..|E|

        Returns:
            JointMatchedProbs
        """
        for vertex in (u, v):
            if not 0 <= vertex < g.vertex_count:
                raise ParameterRangeError(f"Vertex {vertex} out of range")
        order = graph_service.resolve_order(g, order if order is not None else plan.order)
        dist = self.subset_distribution(g, order, plan, t)
        return JointMatchedProbs(
            prob_u=dist.prob_matched(u),
            prob_v=dist.prob_matched(v),
            prob_both=dist.prob_all_matched(u, v),
        )

    def compute_alphas_mc(self, g: GraphInstance, order: Optional[Sequence[int]], c: float,
                          samples: int, seed: int, floor: Optional[float] = None) -> OcrsPlan:
        """
        Calibrate alpha_e by forward simulation of each prefix

        Args:
            g: Feasible instance
            order: Arrival order (instance order when None)
            c: Target selectability
            samples: Prefix simulations per edge
            seed: Seed; edge at position t draws from stream (seed, plan, t)
            floor: Lower clamp for estimated block-free probabilities

        Returns:
            Monte-Carlo OcrsPlan with alpha half-widths
        """
        self._check_c(c)
        if samples <= 0:
            raise ParameterRangeError("samples must be positive")
        floor = settings.MC_FLOOR if floor is None else floor
        graph_service.require_feasible(g)
        order = graph_service.resolve_order(g, order)

        m = len(g.edges)
        us, vs, xs = graph_service.edge_arrays(g)
        alphas = np.zeros(m)
        blockfree = np.ones(m)
        valid = [True] * m
        halfwidth = [0.0] * m
        touched = np.zeros(g.vertex_count, dtype=bool)

        logger.info(f"🚀 Monte-Carlo plan: c={c}, {m} edges, {samples} samples per edge")
        for position, e in enumerate(order):
            u, v = us[e], vs[e]
            if not (touched[u] or touched[v]):
                # no earlier edge shares an endpoint
                alphas[e] = c
                touched[u] = touched[v] = True
                continue

            rng = stream_rng(seed, STREAM_OCRS_PLAN, position)
            matched = np.zeros((samples, g.vertex_count), dtype=bool)
            for f in order[:position]:
                fu, fv = us[f], vs[f]
                survive = rng.random(samples) < xs[f] * alphas[f]
                take = survive & ~matched[:, fu] & ~matched[:, fv]
                matched[take, fu] = True
                matched[take, fv] = True
            hits = int(np.count_nonzero(~matched[:, u] & ~matched[:, v]))
            touched[u] = touched[v] = True

            p_hat = hits / samples
            lo, hi = wilson_interval(hits, samples)
            blockfree[e] = p_hat
            alphas[e] = min(1.0, c / max(p_hat, floor)) if c > 0 else 0.0
            alpha_hi = min(1.0, c / max(lo, floor)) if c > 0 else 0.0
            alpha_lo = min(1.0, c / max(hi, floor)) if c > 0 else 0.0
            halfwidth[e] = (alpha_hi - alpha_lo) / 2.0
            valid[e] = not (p_hat < c - 3.0 * (hi - lo) / 2.0)

        invalid = m - sum(valid)
        if invalid:
            logger.warning(f"⚠️ Monte-Carlo plan at c={c}: {invalid} edge(s) flagged invalid")
        logger.info("✅ Monte-Carlo plan complete")

        return OcrsPlan(c=c, order=order, alphas=[float(a) for a in alphas],
                        blockfree_probs=[float(b) for b in blockfree], valid=valid,
                        mode=PlanMode.MONTE_CARLO, samples=samples, seed=seed,
                        ci_halfwidth=halfwidth)

    def run_ocrs(self, g: GraphInstance, order: Optional[Sequence[int]], plan: OcrsPlan,
                 states: Optional[Sequence[bool]], rng: np.random.Generator) -> MatchingResult:
        """
        One execution: select active, surviving, unblocked edges greedily in order

        Args:
            g: Instance
            order: Arrival order of the plan
            plan: OcrsPlan for (g, order)
            states: Activeness bits X_e; drawn from rng when None
            rng: Source of the attenuation bits A_e

        Returns:
            MatchingResult
        """
        order = graph_service.resolve_order(g, order if order is not None else plan.order)
        self.check_plan(g, order, plan)
        m = len(g.edges)
        _, _, xs = graph_service.edge_arrays(g)
        if states is None:
            active = rng.random(m) < xs
        else:
            if len(states) != m:
                raise ParameterRangeError(f"Expected {m} activeness bits, got {len(states)}")
            active = np.asarray(states, dtype=bool)
        attenuate = rng.random(m) < np.asarray(plan.alphas)
        survive = active & attenuate

        matched = np.zeros(g.vertex_count, dtype=bool)
        selected = []
        for e in order:
            if not survive[e]:
                continue
            u, v, _ = g.edges[e]
            if matched[u] or matched[v]:
                continue
            matched[u] = matched[v] = True
            selected.append(e)

        result = MatchingResult(
            selected=sorted(selected),
            active_states=[bool(b) for b in active],
            survival_states=[bool(b) for b in survive],
        )
        self._assert_matching(g, result)
        return result

    def _assert_matching(self, g: GraphInstance, result: MatchingResult) -> None:
        used = set()
        for e in result.selected:
            if not result.active_states[e]:
                raise InvariantViolation(f"Selected edge {e} is not active")
            u, v, _ = g.edges[e]
            if u in used or v in used:
                raise InvariantViolation(f"Selected edge {e} shares an endpoint with another selected edge")
            used.update((u, v))

    def simulate_selection_counts(self, g: GraphInstance, order: Sequence[int], plan: OcrsPlan,
                                  trials: int, rng: np.random.Generator) -> np.ndarray:
        """Selection count per edge over `trials` vectorized executions (same law as run_ocrs)"""
        self.check_plan(g, order, plan)
        m = len(g.edges)
        counts = np.zeros(m, dtype=np.int64)
        if m == 0:
            return counts
        us, vs, xs = graph_service.edge_arrays(g)
        active = rng.random((trials, m)) < xs
        survive = active & (rng.random((trials, m)) < np.asarray(plan.alphas))
        matched = np.zeros((trials, g.vertex_count), dtype=bool)
        for e in order:
            u, v = us[e], vs[e]
            take = survive[:, e] & ~matched[:, u] & ~matched[:, v]
            counts[e] = int(np.count_nonzero(take))
            matched[take, u] = True
            matched[take, v] = True
        return counts

    def max_valid_c(self, g: GraphInstance, order: Optional[Sequence[int]], lo: float = 0.0,
                    hi: float = 1.0, tol: float = 1e-7, vertex_limit: Optional[int] = None) -> float:
        """
        Bisection for the largest c whose exact plan needs no clamping

        Returns:
            A valid c within tol of the supremum (hi itself when hi is valid)
        """
        self._check_c(lo)
        self._check_c(hi)
        graph_service.require_feasible(g)
        self._check_vertex_limit(g, vertex_limit)
        order = graph_service.resolve_order(g, order)

        def all_valid(c: float) -> bool:
            return all(self._calibrate(g, order, c)[2])

        if all_valid(hi):
            logger.info(f"📊 max valid c = {hi:.6f} (upper end of the bracket)")
            return hi
        if not all_valid(lo):
            logger.warning(f"⚠️ No valid c in [{lo}, {hi}]")
            return lo
        while hi - lo > tol:
            mid = (lo + hi) / 2.0
            if all_valid(mid):
                lo = mid
            else:
                hi = mid
        logger.info(f"📊 max valid c = {lo:.6f}")
        return lo


# Global OCRS service instance
ocrs_service = OcrsService()
