"""
Adversary minimization for the general-graph OCRS bound
Objective evaluation, the truncated auxiliary form, and a multi-start heuristic search
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from errors import ParameterRangeError
from models import AdvMinPoint
from services.stats import stream_rng, STREAM_ADVMIN

logger = logging.getLogger(__name__)

# Log-weight standing in for an exactly empty coordinate
EMPTY_WEIGHT = -700.0
HYBRID_RADIUS = 0.05


def _weighted_terms(b: float, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-index terms w_i(1 - b + b w_i)/(1 + b w_i) and prefix products of 1/(1 + b w_i)"""
    term = w * (1.0 - b + b * w) / (1.0 + b * w)
    prefix = np.concatenate([[1.0], np.cumprod(1.0 / (1.0 + b * w))[:-1]])
    return term, prefix


def _capped_simplex(weights: np.ndarray, cap: float) -> np.ndarray:
    """
    min(cap, lam * w) summing to 1 for non-negative weights

    The map is monotone in w, so a descending input stays descending.
    """
    k = weights.size
    if cap * k < 1.0 - 1e-15:
        raise ParameterRangeError(f"cap {cap} too small for {k} coordinates")
    total = weights.sum()
    if total <= 0.0:
        return np.full(k, 1.0 / k)
    order = np.argsort(-weights, kind="stable")
    sorted_w = weights[order]
    out_sorted = sorted_w / total
    for capped in range(k):
        rest = sorted_w[capped:].sum()
        if rest <= 0.0:
            # underflowed tail takes the leftover mass evenly
            share = (1.0 - capped * cap) / (k - capped)
            out_sorted = np.concatenate([np.full(capped, cap), np.full(k - capped, share)])
            break
        lam = (1.0 - capped * cap) / rest
        if lam * sorted_w[capped] <= cap + 1e-15:
            out_sorted = np.concatenate([np.full(capped, cap), lam * sorted_w[capped:]])
            break
    out = np.empty(k)
    out[order] = out_sorted
    return out


class AdvMinService:
    """AdvMin / AdvMinAux evaluation and search"""

    def advmin_objective(self, b: float, y: Sequence[float], z: Sequence[float]) -> float:
        """
        b^2 (sum_i Y_i)(sum_i Z_i) - b^2 sum_i Y_i Z_i-terms with joint prefix products

        Feasibility is not enforced; see residuals().
        """
        if b < 0:
            raise ParameterRangeError(f"b must be non-negative, got {b}")
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        if y.shape != z.shape:
            raise ParameterRangeError(f"y and z differ in length ({y.size} vs {z.size})")
        ty, py = _weighted_terms(b, y)
        tz, pz = _weighted_terms(b, z)
        sum_y = float(np.dot(ty, py))
        sum_z = float(np.dot(tz, pz))
        diagonal = float(np.sum(ty * tz * py * pz))
        return b * b * (sum_y * sum_z - diagonal)

    def advminaux_objective(self, b: float, K: int, y: Sequence[float], z: Sequence[float]) -> float:
        """
        Truncated relaxation over the first K coordinates

        Each factor is sum_i b w_i (1 - b/(1 + b w_i)) prod 1/(1 + b w_i') plus the
        tail (1 - b) prod_i (1 - b w_i)(1 - exp(-b(1 - sum_i w_i))); the diagonal
        carries the same per-index terms and -b^2(1-b)^2/(K-2) closes the bound.
        """
        if K <= 2:
            raise ParameterRangeError(f"K must exceed 2, got {K}")
        y = np.asarray(y, dtype=float)[:K]
        z = np.asarray(z, dtype=float)[:K]
        if y.size != K or z.size != K:
            raise ParameterRangeError(f"Need at least K={K} coordinates")

        def factor(w: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
            term = b * w * (1.0 - b / (1.0 + b * w))
            prefix = np.concatenate([[1.0], np.cumprod(1.0 / (1.0 + b * w))[:-1]])
            tail = (1.0 - b) * float(np.prod(1.0 - b * w)) * (-math.expm1(-b * (1.0 - float(w.sum()))))
            return float(np.dot(term, prefix)) + tail, term, prefix

        fy, ty, py = factor(y)
        fz, tz, pz = factor(z)
        diagonal = float(np.sum(ty * tz * py * pz))
        return fy * fz - diagonal - b * b * (1.0 - b) ** 2 / (K - 2)

    def advmin_hybrid_limit(self, b: float) -> float:
        """Objective of y1 = z1 = 1/2 with the other half spread over k -> infinity coordinates"""
        head = 0.5 * (1.0 - b + b / 2.0) / (1.0 + b / 2.0)
        if b == 0.0:
            return 0.0
        tail = (1.0 - b) * (-math.expm1(-b / 2.0)) / (b * (1.0 + b / 2.0))
        total = head + tail
        return b * b * (total * total - head * head)

    def hybrid_point(self, k: int) -> np.ndarray:
        """y1 = 1/2 and 1/(2(k-1)) elsewhere"""
        if k < 2:
            raise ParameterRangeError(f"k must be at least 2, got {k}")
        w = np.full(k, 0.5 / (k - 1))
        w[0] = 0.5
        return w

    def residuals(self, y: Sequence[float], z: Sequence[float]) -> dict:
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        return {
            "sum_y": abs(float(y.sum()) - 1.0),
            "sum_z": abs(float(z.sum()) - 1.0),
            "pair_excess": float(max(0.0, (y + z - 1.0).max())),
            "order_y": float(max(0.0, np.diff(y).max())) if y.size > 1 else 0.0,
            "order_z": float(max(0.0, np.diff(z).max())) if z.size > 1 else 0.0,
            "negative": float(max(0.0, -min(y.min(), z.min()))),
        }

    def decode(self, params: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Map 2k unconstrained parameters to a feasible (y, z)

        Softmax weights are sorted descending, y is capped at 1 - 1/k and z at
        1 - y_1; only the first pair can violate y_i + z_i <= 1 for sorted
        vectors summing to 1.
        """
        def weights(theta: np.ndarray) -> np.ndarray:
            shifted = np.exp(theta - theta.max())
            return -np.sort(-shifted)

        y = _capped_simplex(weights(params[:k]), 1.0 - 1.0 / k)
        z = _capped_simplex(weights(params[k:]), max(1.0 - y[0], 1.0 / k))
        return y, z

    def encode(self, y: Sequence[float], z: Sequence[float], k: int) -> np.ndarray:
        """Parameters decoding to (y, z) padded with empty coordinates to length k"""
        def logs(w: Sequence[float]) -> np.ndarray:
            w = np.asarray(w, dtype=float)
            out = np.full(k, EMPTY_WEIGHT)
            positive = w[:k] > 0
            out[:min(k, w.size)][positive] = np.log(w[:k][positive])
            return out

        return np.concatenate([logs(y), logs(z)])

    def _local(self, b: float, k: int, start: np.ndarray, maxiter: int) -> Tuple[float, np.ndarray]:
        def objective(params: np.ndarray) -> float:
            y, z = self.decode(params, k)
            return self.advmin_objective(b, y, z)

        result = optimize.minimize(
            objective, start, method="Nelder-Mead",
            options={"maxiter": maxiter, "maxfev": maxiter, "xatol": 1e-9, "fatol": 1e-13, "adaptive": True},
        )
        return float(result.fun), np.asarray(result.x)

    def advmin_search(self, b: float, k: int, restarts: int = 16, seed: int = 0,
                      warm_starts: Optional[List[Tuple[Sequence[float], Sequence[float]]]] = None,
                      maxiter: Optional[int] = None) -> AdvMinPoint:
        """
        Multi-start projected Nelder-Mead over the AdvMin_k feasible set

        Starts: the hybrid point, the uniform point, any warm starts, then seeded
        Dirichlet draws until `restarts` starts have run. The best value found is
        an upper bound on the infimum, not a certificate.

        Args:
            b: Objective parameter c/(1-c)
            k: Number of coordinates per side
            restarts: Total local searches
            seed: Seed for the random starts
            warm_starts: (y, z) pairs, shorter ones padded with empty coordinates
            maxiter: Function evaluations per local search

        Returns:
            AdvMinPoint
        """
        if k < 2:
            raise ParameterRangeError(f"k must be at least 2, got {k}")
        if restarts < 1:
            raise ParameterRangeError("restarts must be positive")
        maxiter = maxiter or min(40000, 400 * 2 * k)

        hybrid = self.hybrid_point(k)
        starts = [self.encode(hybrid, hybrid, k), np.zeros(2 * k)]
        for wy, wz in warm_starts or []:
            starts.append(self.encode(wy, wz, k))
        draw = 0
        while len(starts) < restarts:
            rng = stream_rng(seed, STREAM_ADVMIN, draw)
            starts.append(np.log(np.concatenate([rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))]) + 1e-300))
            draw += 1
        starts = starts[:max(restarts, 2)]

        logger.info(f"🚀 AdvMin search: b={b:.6f}, k={k}, {len(starts)} starts")
        best_value = math.inf
        best_params = starts[0]
        hybrid_reproduced = False
        for index, start in enumerate(starts):
            value, params = self._local(b, k, start, maxiter)
            y, z = self.decode(params, k)
            if index == 0:
                hybrid_reproduced = abs(y[0] - 0.5) <= HYBRID_RADIUS and abs(z[0] - 0.5) <= HYBRID_RADIUS
            if value < best_value:
                best_value, best_params = value, params

        y, z = self.decode(best_params, k)
        hybrid_value = self.advmin_objective(b, hybrid, hybrid)
        logger.info(f"📊 AdvMin best {best_value:.8f} (hybrid start {hybrid_value:.8f}, "
                    f"hybrid reproduced: {hybrid_reproduced})")
        return AdvMinPoint(
            b=b, k=k, y=[float(v) for v in y], z=[float(v) for v in z],
            objective=float(best_value), residuals=self.residuals(y, z), form="advmin",
            restarts=len(starts), hybrid_objective=float(hybrid_value),
            hybrid_reproduced=bool(hybrid_reproduced),
        )


# Global AdvMin service instance
advmin_service = AdvMinService()
