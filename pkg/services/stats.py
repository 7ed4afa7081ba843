"""
Shared statistics and random-stream helpers for the trial harness
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple, TypeVar

import numpy as np
from scipy.stats import norm

from config import settings
from errors import ParameterRangeError

T = TypeVar("T")

# Stream ids keep independent consumers of one seed apart
STREAM_OCRS_PLAN = 1
STREAM_OCRS_TRIALS = 2
STREAM_RCRS_TRIALS = 3
STREAM_NO_RELEVANT = 4
STREAM_GREEDY = 5
STREAM_OFFLINE = 6
STREAM_ADVMIN = 7
STREAM_SINGLE_RUN = 8


def stream_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Generator for (seed, stream, index); independent of how work is scheduled"""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index))))


def wilson_interval(successes: int, trials: int, z: Optional[float] = None) -> Tuple[float, float]:
    """
    Wilson score interval for a binomial proportion

    Args:
        successes: Number of successes
        trials: Number of trials
        z: Critical value, defaults to settings.Z_SCORE

    Returns:
        (lo, hi) clamped to [0, 1]
    """
    z = settings.Z_SCORE if z is None else z
    if trials <= 0:
        raise ParameterRangeError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ParameterRangeError(f"successes={successes} must lie in 0..{trials}")

    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z / denom * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def bonferroni_z(z: float, comparisons: int) -> float:
    """Two-sided critical value keeping family-wise coverage over `comparisons` intervals"""
    if comparisons <= 1:
        return z
    alpha = 2.0 * norm.sf(z)
    return float(norm.isf(alpha / (2.0 * comparisons)))


def trial_blocks(trials: int, block_size: Optional[int] = None) -> List[Tuple[int, int]]:
    """Split trials into (block index, size) pairs of a fixed block size"""
    block_size = settings.TRIAL_BLOCK_SIZE if block_size is None else block_size
    if trials <= 0:
        raise ParameterRangeError("trials must be positive")
    blocks = []
    index = 0
    remaining = trials
    while remaining > 0:
        size = min(block_size, remaining)
        blocks.append((index, size))
        remaining -= size
        index += 1
    return blocks


def run_blocks(work: Callable[[int, int], T], trials: int, workers: Optional[int] = None,
               block_size: Optional[int] = None) -> List[T]:
    """
    Run work(block_index, block_trials) over all blocks

    Results come back in block order whatever the worker count.
    """
    blocks = trial_blocks(trials, block_size)
    workers = settings.WORKERS if workers is None else workers
    if workers <= 1 or len(blocks) == 1:
        return [work(index, size) for index, size in blocks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda blk: work(*blk), blocks))
