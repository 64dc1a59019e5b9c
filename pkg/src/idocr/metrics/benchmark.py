"""
Per-character classification latency.
"""

import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, Sequence

import numpy as np

from ..errors import InsufficientSamplesError
from ..imaging import GrayImage

if TYPE_CHECKING:
    from ..classify.model import Model

MIN_SAMPLES = 100
WARMUP_CALLS = 10


@dataclass(frozen=True)
class LatencyStats:
    """Wall-clock milliseconds per forward call."""

    count: int
    mean_ms: float
    p95_ms: float
    min_ms: float
    max_ms: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "mean_ms": self.mean_ms,
            "p95_ms": self.p95_ms,
            "min_ms": self.min_ms,
            "max_ms": self.max_ms,
        }

    @classmethod
    def from_timings(cls, timings_ms: Sequence[float]) -> "LatencyStats":
        values = np.asarray(timings_ms, dtype=np.float64)
        return cls(
            count=len(values),
            mean_ms=float(values.mean()),
            p95_ms=float(np.percentile(values, 95)),
            min_ms=float(values.min()),
            max_ms=float(values.max()),
        )


def benchmark_latency(model: "Model", patches: Sequence[GrayImage], n: int = 1000) -> LatencyStats:
    """
    Time n single-patch forward calls on the calling thread, after 10 warmup calls.

    Patches are cycled if fewer than n are given.

    Raises:
        InsufficientSamplesError: n < 100
    """
    if n < MIN_SAMPLES:
        raise InsufficientSamplesError(n, MIN_SAMPLES)
    if not patches:
        raise InsufficientSamplesError(0, 1)
    for i in range(WARMUP_CALLS):
        model.forward(patches[i % len(patches)])

    timings = []
    for i in range(n):
        patch = patches[i % len(patches)]
        start = time.perf_counter()
        model.forward(patch)
        timings.append((time.perf_counter() - start) * 1000.0)
    return LatencyStats.from_timings(timings)
