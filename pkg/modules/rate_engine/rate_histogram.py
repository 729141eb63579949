"""
Transfer-rate bucket histogram.

Bucket n counts rates in ``[n * 10 kbps, (n + 1) * 10 kbps)`` for n below 10000; bucket 10000
counts every rate of 100 Mbps or more.
"""

import math
from typing import NamedTuple, Optional, Tuple

import numpy as np


BUCKET_WIDTH_BPS = 10_000
OVERFLOW_BUCKET = 10_000
BUCKET_COUNT = OVERFLOW_BUCKET + 1
RATE_CAP_BPS = 100_000_000


class RateStats(NamedTuple):
    """
    Transfer-rate summary in bits per second.
    """

    max_bps: float
    min_bps: float
    avg_bps: float
    median_bps: float
    flow_count: int


def bucket_index(rate_bps: float) -> int:
    """
    Histogram bucket of a non-negative rate.
    """
    return min(math.floor(rate_bps / BUCKET_WIDTH_BPS), OVERFLOW_BUCKET)


def bucket_indices(rates_bps: np.ndarray) -> np.ndarray:
    """
    Vectorized ``bucket_index``.
    """
    return np.minimum(np.floor(rates_bps / BUCKET_WIDTH_BPS), OVERFLOW_BUCKET).astype(np.int64)


def bucket_median_bps(bucket: int) -> float:
    """
    Representative rate of a bucket: its midpoint, or the cap for the overflow bucket.
    """
    if bucket >= OVERFLOW_BUCKET:
        return float(RATE_CAP_BPS)

    return float(bucket * BUCKET_WIDTH_BPS + BUCKET_WIDTH_BPS // 2)


class RateHistogram:
    """
    Bucket counts plus min, max, sum and count of the rates added.

    Rates are summed as integer bits per second (each rate rounded to the nearest bps), which
    keeps ``merge`` associative and commutative.
    """

    def __init__(self, buckets: Optional[np.ndarray] = None) -> None:
        """
        Empty histogram, or one over existing bucket counts with unknown min, max and sum.
        """
        if buckets is None:
            buckets = np.zeros(BUCKET_COUNT, dtype=np.int64)

        assert len(buckets) == BUCKET_COUNT

        self.buckets = buckets.astype(np.int64)
        self.count = int(self.buckets.sum())
        self.sum_bps = 0
        self.min_bps = math.inf
        self.max_bps = -math.inf

    def add(self, rate_bps: float) -> None:
        """
        Count one rate.
        """
        self.buckets[bucket_index(rate_bps)] += 1
        self.count += 1
        self.sum_bps += round(rate_bps)
        self.min_bps = min(self.min_bps, rate_bps)
        self.max_bps = max(self.max_bps, rate_bps)

    def add_many(self, rates_bps: np.ndarray) -> None:
        """
        Count every rate in an array.
        """
        if len(rates_bps) == 0:
            return

        self.buckets += np.bincount(bucket_indices(rates_bps), minlength=BUCKET_COUNT)
        self.count += len(rates_bps)
        self.sum_bps += int(np.rint(rates_bps).astype(np.int64).sum())
        self.min_bps = min(self.min_bps, float(rates_bps.min()))
        self.max_bps = max(self.max_bps, float(rates_bps.max()))

    def merge(self, other: "RateHistogram") -> None:
        """
        Element-wise bucket addition plus min, max and sum combination.
        """
        self.buckets += other.buckets
        self.count += other.count
        self.sum_bps += other.sum_bps
        self.min_bps = min(self.min_bps, other.min_bps)
        self.max_bps = max(self.max_bps, other.max_bps)

    def stats(self) -> Tuple[bool, Optional[RateStats]]:
        """
        Summary statistics.

        Returns
        -------
        Tuple[bool, Optional[RateStats]]
            Success status and stats; fails on an empty histogram.
        """
        result, median = median_from_histogram(self)
        if not result:
            return False, None

        # Get Pylance to stop complaining
        assert median is not None

        return True, RateStats(
            max_bps=self.max_bps,
            min_bps=self.min_bps,
            avg_bps=self.sum_bps / self.count,
            median_bps=median,
            flow_count=self.count,
        )


def median_from_histogram(histogram: RateHistogram) -> Tuple[bool, Optional[float]]:
    """
    Lower median of the counted rates, at the midpoint of the bucket that holds it.

    Parameters
    ----------
    histogram : RateHistogram
        Histogram with at least one rate.

    Returns
    -------
    Tuple[bool, Optional[float]]
        Success status and the median in bps; fails on an empty histogram.
    """
    count = int(histogram.buckets.sum())
    if count == 0:
        return False, None

    target = (count + 1) // 2
    cumulative = np.cumsum(histogram.buckets)
    bucket = int(np.searchsorted(cumulative, target, side="left"))
    return True, bucket_median_bps(bucket)
