"""
Wall-clock comparison of the exact and the fast stroboscopic engines.
"""

import logging
import statistics
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ensemble import random_state
from .fast_strobe import fast_apply_sequence
from .joint_svd import JointSVD
from .strobe import OutcomeSequence, apply_sequence

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (2, 5, 10, 20, 30)


@dataclass(frozen=True)
class BenchRow:
    n: int
    rounds: int
    naive_ms: float
    fast_ms: float

    @property
    def speedup(self) -> float:
        return self.naive_ms / self.fast_ms if self.fast_ms > 0 else float("inf")


def median_ms(call: Callable[[], object], repetitions: int) -> float:
    samples = []
    for _ in range(repetitions):
        started = time.perf_counter()
        call()
        samples.append((time.perf_counter() - started) * 1000.0)
    return statistics.median(samples)


def run_benchmark(sizes, rounds: int, loader: Callable[[int], JointSVD],
                  repetitions: int = 5, seed: int = 0) -> list[BenchRow]:
    """
    Time one all-zero sequence of 2L+1 projections per N. The fast timing
    includes the change into V coordinates and the conversion back to z.
    """
    rng = np.random.default_rng(seed)
    sequence = OutcomeSequence.odd_rounds(rounds)
    rows = []
    for n in sizes:
        jsvd = loader(n)
        state = random_state(n, rng)
        naive = median_ms(lambda: apply_sequence(state, sequence), repetitions)
        fast = median_ms(lambda: jsvd.to_z(fast_apply_sequence(state, sequence, jsvd)), repetitions)
        row = BenchRow(n, rounds, naive, fast)
        logger.info("N=%d L=%d naive %.2f ms, fast %.2f ms (x%.1f)", n, rounds, naive, fast, row.speedup)
        rows.append(row)
    return rows
