"""
Estimator service - turns scheme executions into selectability estimates
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from config import settings
from errors import ParameterRangeError
from models import (
    GraphInstance, SchemeSpec, SchemeKind, EstimateReport, EdgeEstimate, ClassEstimate
)
from services import stats
from services.graph_service import graph_service
from services.ocrs_service import ocrs_service
from services.rcrs_service import rcrs_service

logger = logging.getLogger(__name__)


class EstimatorService:
    """Trial harness with Wilson intervals and symmetry pooling"""

    def wilson_interval(self, successes: int, trials: int, z: Optional[float] = None) -> Tuple[float, float]:
        return stats.wilson_interval(successes, trials, z)

    def bonferroni_z(self, z: float, comparisons: int) -> float:
        return stats.bonferroni_z(z, comparisons)

    def selection_counts(self, g: GraphInstance, scheme: SchemeSpec, trials: int, seed: int,
                         workers: Optional[int] = None) -> np.ndarray:
        """
        Per-edge selection counts over `trials` executions

        Trials are cut into fixed blocks, each with its own random stream, so the
        counts depend on (seed, block size) and not on the worker count.
        """
        if trials <= 0:
            raise ParameterRangeError("trials must be positive")

        if scheme.kind == SchemeKind.OCRS:
            if scheme.plan is None:
                raise ParameterRangeError("OCRS estimation needs a plan")
            plan = scheme.plan
            ocrs_service.check_plan(g, plan.order, plan)

            def work(index: int, size: int) -> np.ndarray:
                rng = stats.stream_rng(seed, stats.STREAM_OCRS_TRIALS, index)
                return ocrs_service.simulate_selection_counts(g, plan.order, plan, size, rng)
        else:
            if scheme.attenuation is None:
                raise ParameterRangeError("RCRS estimation needs an attenuation function")
            fn = scheme.attenuation

            def work(index: int, size: int) -> np.ndarray:
                rng = stats.stream_rng(seed, stats.STREAM_RCRS_TRIALS, index)
                return rcrs_service.simulate_selection_counts(g, fn, size, rng)

        blocks = stats.run_blocks(work, trials, workers)
        total = np.zeros(len(g.edges), dtype=np.int64)
        for counts in blocks:
            total += counts
        return total

    def estimate_selectability(self, g: GraphInstance, scheme: SchemeSpec, trials: int, seed: int,
                               pool: bool = False, z: Optional[float] = None,
                               workers: Optional[int] = None) -> EstimateReport:
        """
        Empirical P[e in M] / x_e with Wilson intervals

        Args:
            g: Instance
            scheme: OCRS plan or RCRS attenuation
            trials: Number of executions
            seed: Master seed
            pool: Pool declared symmetry classes
            z: Critical value, defaults to settings.Z_SCORE
            workers: Worker threads, defaults to settings.WORKERS

        Returns:
            EstimateReport (edges with x = 0 are left out)
        """
        z = settings.Z_SCORE if z is None else z
        graph_service.require_feasible(g)
        if pool and not g.symmetry_classes:
            raise ParameterRangeError("Pooling requested but the instance declares no symmetry classes")

        logger.info(f"🚀 Estimating {scheme.descriptor} on {len(g.edges)} edges, {trials} trials, seed {seed}")
        counts = self.selection_counts(g, scheme, trials, seed, workers)

        edges = []
        for e, (_, _, x) in enumerate(g.edges):
            if x <= 0.0:
                continue
            selected = int(counts[e])
            lo, hi = stats.wilson_interval(selected, trials, z)
            edges.append(EdgeEstimate(edge=e, x=x, trials=trials, selected=selected,
                                      ratio=selected / (trials * x), ci_lo=lo / x, ci_hi=hi / x))

        pooled = None
        if pool:
            pooled = []
            for index, members in enumerate(g.symmetry_classes):
                positive = [e for e in members if g.edges[e][2] > 0.0]
                if not positive:
                    continue
                x_mean = float(np.mean([g.edges[e][2] for e in positive]))
                selected = int(sum(int(counts[e]) for e in positive))
                pool_trials = trials * len(positive)
                lo, hi = stats.wilson_interval(selected, pool_trials, z)
                pooled.append(ClassEstimate(class_index=index, edges=positive, x=x_mean,
                                            trials=pool_trials, selected=selected,
                                            ratio=selected / (pool_trials * x_mean),
                                            ci_lo=lo / x_mean, ci_hi=hi / x_mean))

        report = self.summarize(scheme.descriptor, trials, seed, z, edges, pooled)
        if report.min_ratio is not None:
            logger.info(f"📊 min ratio {report.min_ratio:.6f} "
                        f"[{report.min_ratio_ci[0]:.6f}, {report.min_ratio_ci[1]:.6f}] (Bonferroni z={report.bonferroni_z:.3f})")
        return report

    def summarize(self, scheme: str, trials: int, seed: int, z: float, edges: List[EdgeEstimate],
                  pooled: Optional[List[ClassEstimate]] = None) -> EstimateReport:
        """Assemble a report, locating the minimum ratio with a Bonferroni-adjusted interval"""
        candidates = pooled if pooled else edges
        min_ratio = None
        min_ci = None
        adjusted = None
        if candidates:
            adjusted = stats.bonferroni_z(z, len(candidates))
            worst = min(candidates, key=lambda est: est.ratio)
            lo, hi = stats.wilson_interval(worst.selected, worst.trials, adjusted)
            min_ratio = worst.ratio
            min_ci = (lo / worst.x, hi / worst.x)
        return EstimateReport(scheme=scheme, trials=trials, seed=seed, z=z, edges=edges,
                              pooled=pooled, min_ratio=min_ratio, min_ratio_ci=min_ci,
                              bonferroni_z=adjusted)


# Global estimator service instance
estimator_service = EstimatorService()
