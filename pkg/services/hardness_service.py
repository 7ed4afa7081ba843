"""
Random-order matching on K_{n,n}: greedy trajectories and the offline benchmark
"""

import logging
from collections import deque
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from errors import InvariantViolation, ParameterRangeError
from models import GraphInstance, PropertyCheckReport, Trajectory
from services.graph_service import graph_service
from services.stats import stream_rng, run_blocks, STREAM_GREEDY, STREAM_OFFLINE

logger = logging.getLogger(__name__)

DEFAULT_CHECKPOINTS = 100


class _Realization:
    """Edge endpoints, arrival permutation and activeness of one trial"""
    __slots__ = ("left", "right", "perm", "active", "vertices")

    def __init__(self, left: np.ndarray, right: np.ndarray, perm: np.ndarray,
                 active: np.ndarray, vertices: int):
        self.left = left
        self.right = right
        self.perm = perm
        self.active = active
        self.vertices = vertices


def _edge_endpoints(n: int, complete_graph: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Endpoints of K_{n,n} (right side shifted by n) or of K_n"""
    if complete_graph:
        left, right = np.triu_indices(n, k=1)
        return left.astype(np.int64), right.astype(np.int64)
    index = np.arange(n * n, dtype=np.int64)
    return index // n, n + index % n


def _realize_trial(n: int, rng: np.random.Generator, complete_graph: bool = False) -> _Realization:
    """Permutation first, then activeness; each edge is active with probability 1/degree"""
    left, right = _edge_endpoints(n, complete_graph)
    m = left.size
    degree = n - 1 if complete_graph else n
    perm = rng.permutation(m)
    active = rng.random(m) < (1.0 / degree if degree else 0.0)
    return _Realization(left, right, perm, active, n if complete_graph else 2 * n)


def _greedy_times(real: _Realization) -> np.ndarray:
    """Arrival counts t (1-based) at which greedy grows its matching"""
    arriving = real.perm[real.active[real.perm]]
    positions = np.flatnonzero(real.active[real.perm]) + 1
    matched = np.zeros(real.vertices, dtype=bool)
    times: List[int] = []
    for e, t in zip(arriving, positions):
        u, v = real.left[e], real.right[e]
        if matched[u] or matched[v]:
            continue
        matched[u] = matched[v] = True
        times.append(int(t))

    # maximal in the active graph
    actives = np.flatnonzero(real.active)
    if actives.size and not np.all(matched[real.left[actives]] | matched[real.right[actives]]):
        raise InvariantViolation("Greedy matching is not maximal in the active graph")
    return np.asarray(times, dtype=np.int64)


class HardnessService:
    """Greedy vs offline matching under random-order arrivals"""

    def ode_solution(self, z: float) -> float:
        """w(z) = z/(1+z), the solution of w' = (1 - w)^2 with w(0) = 0"""
        if z < 0:
            raise ParameterRangeError(f"z must be non-negative, got {z}")
        return z / (1.0 + z)

    def checkpoint_grid(self, edge_count: int, checkpoints: int = DEFAULT_CHECKPOINTS) -> List[int]:
        """Evenly spaced arrival counts ending at edge_count"""
        if checkpoints < 1:
            raise ParameterRangeError("checkpoints must be positive")
        if edge_count == 0:
            return [0]
        grid = np.linspace(edge_count / checkpoints, edge_count, checkpoints)
        return [int(t) for t in np.unique(np.maximum(1, np.rint(grid)).astype(np.int64))]

    def simulate_greedy(self, n: int, trials: int, checkpoints: int = DEFAULT_CHECKPOINTS,
                        seed: int = 0, complete_graph: bool = False,
                        workers: Optional[int] = None) -> Trajectory:
        """
        Greedy matching size over time

        Args:
            n: Side size of K_{n,n} (vertex count of K_n with complete_graph)
            trials: Independent realizations
            checkpoints: Number of sampled arrival counts
            seed: Seed; trial i uses its own stream
            complete_graph: Run on K_n with edges active w.p. 1/(n-1)
            workers: Worker threads

        Returns:
            Trajectory with matched-vertex fractions per checkpoint
        """
        if n < 1 or (complete_graph and n < 2):
            raise ParameterRangeError(f"n={n} too small")
        if trials < 1:
            raise ParameterRangeError("trials must be positive")

        edge_count = n * (n - 1) // 2 if complete_graph else n * n
        grid = np.asarray(self.checkpoint_grid(edge_count, checkpoints), dtype=np.int64)
        block_size = settings.TRIAL_BLOCK_SIZE
        logger.info(f"🚀 Greedy on {'K_' + str(n) if complete_graph else f'K_{{{n},{n}}}'}: "
                    f"{trials} trials, {grid.size} checkpoints")

        def block(index: int, size: int) -> List[List[float]]:
            rows = []
            for offset in range(size):
                rng = stream_rng(seed, STREAM_GREEDY, index * block_size + offset)
                times = _greedy_times(_realize_trial(n, rng, complete_graph))
                sizes = np.searchsorted(times, grid, side="right")
                scale = 2.0 / n if complete_graph else 1.0 / n
                rows.append([float(s * scale) for s in sizes])
            return rows

        samples = [row for rows in run_blocks(block, trials, workers, block_size) for row in rows]
        table = np.asarray(samples)
        mean = table.mean(axis=0)
        lower = np.quantile(table, 0.025, axis=0)
        upper = np.quantile(table, 0.975, axis=0)
        logger.info(f"📊 Mean final fraction {mean[-1]:.6f}")
        return Trajectory(n=n, edge_count=edge_count, complete_graph=complete_graph,
                          checkpoints=[int(t) for t in grid], samples=samples,
                          mean=[float(v) for v in mean], lower=[float(v) for v in lower],
                          upper=[float(v) for v in upper])

    def ode_deviation(self, traj: Trajectory) -> float:
        """sup over checkpoints of |mean fraction - w(t / edge_count)|"""
        if not traj.checkpoints or traj.edge_count == 0:
            return 0.0
        z = np.asarray(traj.checkpoints, dtype=float) / traj.edge_count
        return float(np.max(np.abs(np.asarray(traj.mean) - z / (1.0 + z))))

    def check_increments(self, traj: Trajectory, slack: float = 0.01) -> PropertyCheckReport:
        """Increments of the mean between checkpoints must not grow by more than `slack`"""
        t = np.asarray(traj.checkpoints, dtype=float)
        mean = np.asarray(traj.mean)
        if t.size < 3:
            return PropertyCheckReport(property_id="greedy-increments", grid={"checkpoints": int(t.size)},
                                       worst_violation=0.0, tolerance=slack, passed=True)
        growth = np.diff(np.diff(mean))
        worst = int(np.argmax(growth))
        violation = float(max(0.0, growth[worst]))
        return PropertyCheckReport(
            property_id="greedy-increments",
            grid={"checkpoints": int(t.size)},
            worst_location={"t": float(t[worst + 1])},
            worst_violation=violation,
            tolerance=slack,
            passed=violation <= slack,
        )

    def hopcroft_karp(self, adjacency: Sequence[Sequence[int]], right_count: int) -> int:
        """
        Maximum matching size of a bipartite graph

        Args:
            adjacency: Right-vertex neighbors of each left vertex
            right_count: Number of right vertices

        Returns:
            Size of a maximum matching
        """
        left_count = len(adjacency)
        match_left = [-1] * left_count
        match_right = [-1] * right_count
        unreachable = left_count + right_count + 1
        size = 0

        while True:
            # layer the free left vertices
            dist = [unreachable] * left_count
            queue = deque()
            for u in range(left_count):
                if match_left[u] == -1:
                    dist[u] = 0
                    queue.append(u)
            shortest = unreachable
            while queue:
                u = queue.popleft()
                if dist[u] >= shortest:
                    continue
                for v in adjacency[u]:
                    w = match_right[v]
                    if w == -1:
                        shortest = min(shortest, dist[u] + 1)
                    elif dist[w] == unreachable:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            if shortest == unreachable:
                break

            # vertex-disjoint shortest augmenting paths
            pointer = [0] * left_count
            for root in range(left_count):
                if match_left[root] != -1:
                    continue
                stack = [root]
                chosen: List[int] = []
                while stack:
                    u = stack[-1]
                    if pointer[u] == len(adjacency[u]):
                        dist[u] = unreachable
                        stack.pop()
                        if chosen:
                            chosen.pop()
                        continue
                    v = adjacency[u][pointer[u]]
                    pointer[u] += 1
                    w = match_right[v]
                    if w == -1:
                        if dist[u] + 1 == shortest:
                            chosen.append(v)
                            for left, right in zip(stack, chosen):
                                match_left[left] = right
                                match_right[right] = left
                            size += 1
                            break
                    elif dist[w] == dist[u] + 1:
                        stack.append(w)
                        chosen.append(v)
        return size

    def max_matching_size(self, g: GraphInstance) -> int:
        """Maximum matching of a bipartite instance (raises NotBipartiteError otherwise)"""
        colors = graph_service.require_bipartition(g)
        left_ids = {v: i for i, v in enumerate(v for v in range(g.vertex_count) if colors[v] == 0)}
        right_ids = {v: i for i, v in enumerate(v for v in range(g.vertex_count) if colors[v] == 1)}
        adjacency: List[List[int]] = [[] for _ in left_ids]
        for u, v, _ in g.edges:
            if colors[u] == 1:
                u, v = v, u
            adjacency[left_ids[u]].append(right_ids[v])
        return self.hopcroft_karp(adjacency, len(right_ids))

    def _offline_size(self, real: _Realization, n: int) -> int:
        actives = np.flatnonzero(real.active)
        adjacency: List[List[int]] = [[] for _ in range(n)]
        for e in actives:
            adjacency[int(real.left[e])].append(int(real.right[e]) - n)
        return self.hopcroft_karp(adjacency, n)

    def offline_fraction(self, n: int, trials: int, seed: int = 0,
                         workers: Optional[int] = None) -> float:
        """
        Mean maximum-matching fraction of the active subgraph of K_{n,n}

        Args:
            n: Side size
            trials: Independent realizations
            seed: Seed
            workers: Worker threads

        Returns:
            Mean of (max matching size) / n
        """
        if n < 1 or trials < 1:
            raise ParameterRangeError("n and trials must be positive")
        block_size = settings.TRIAL_BLOCK_SIZE

        def block(index: int, size: int) -> List[float]:
            out = []
            for offset in range(size):
                rng = stream_rng(seed, STREAM_OFFLINE, index * block_size + offset)
                out.append(self._offline_size(_realize_trial(n, rng), n) / n)
            return out

        fractions = [f for rows in run_blocks(block, trials, workers, block_size) for f in rows]
        value = float(np.mean(fractions))
        logger.info(f"📊 Offline fraction on K_{{{n},{n}}}: {value:.6f} over {trials} trials")
        return value

    def coupled_fractions(self, n: int, trials: int, seed: int = 0,
                          workers: Optional[int] = None) -> List[Tuple[float, float]]:
        """(greedy, offline) final fractions on the same realizations"""
        if n < 1 or trials < 1:
            raise ParameterRangeError("n and trials must be positive")
        block_size = settings.TRIAL_BLOCK_SIZE

        def block(index: int, size: int) -> List[Tuple[float, float]]:
            out = []
            for offset in range(size):
                rng = stream_rng(seed, STREAM_GREEDY, index * block_size + offset)
                real = _realize_trial(n, rng)
                greedy = _greedy_times(real).size / n
                offline = self._offline_size(real, n) / n
                if offline < greedy:
                    raise InvariantViolation(f"Offline {offline} below greedy {greedy}")
                out.append((greedy, offline))
            return out

        return [pair for rows in run_blocks(block, trials, workers, block_size) for pair in rows]


# Global hardness service instance
hardness_service = HardnessService()
