"""
Rate histogram tests.
"""

import numpy as np
import pytest

from modules.rate_engine import rate_histogram


class TestBuckets:
    """
    Bucket boundaries and representative rates.
    """

    @pytest.mark.parametrize(
        "rate_bps, expected",
        [
            (0.0, 0),
            (9_999.9, 0),
            (10_000.0, 1),
            (1_000_000.0, 100),
            (99_999_999.0, 9_999),
            (100_000_000.0, 10_000),
            (5e9, 10_000),
        ],
    )
    def test_bucket_index(self, rate_bps: float, expected: int) -> None:
        """
        10 kbps buckets, everything from 100 Mbps in the overflow bucket.
        """
        assert rate_histogram.bucket_index(rate_bps) == expected
        assert rate_histogram.bucket_indices(np.array([rate_bps])).tolist() == [expected]

    def test_bucket_median(self) -> None:
        """
        Midpoint, or the cap for the overflow bucket.
        """
        assert rate_histogram.bucket_median_bps(0) == 5_000.0
        assert rate_histogram.bucket_median_bps(200) == 2_005_000.0
        assert rate_histogram.bucket_median_bps(10_000) == 100_000_000.0


class TestRateHistogram:
    """
    Counting, merging and statistics.
    """

    def test_empty_has_no_stats(self) -> None:
        """
        Nothing counted, no stats.
        """
        histogram = rate_histogram.RateHistogram()

        result, stats = histogram.stats()

        assert not result
        assert stats is None

    def test_odd_count_median(self) -> None:
        """
        Median of three rates is the middle one's bucket midpoint.
        """
        histogram = rate_histogram.RateHistogram()
        for rate in [300_000.0, 100_000.0, 200_000.0]:
            histogram.add(rate)

        result, stats = histogram.stats()

        assert result
        assert stats is not None
        assert stats.median_bps == 205_000.0
        assert stats.min_bps == 100_000.0
        assert stats.max_bps == 300_000.0
        assert stats.avg_bps == 200_000.0
        assert stats.flow_count == 3

    def test_even_count_takes_lower_median(self) -> None:
        """
        With four rates the second smallest is the median.
        """
        histogram = rate_histogram.RateHistogram()
        histogram.add_many(np.array([400_000.0, 100_000.0, 300_000.0, 200_000.0]))

        _, median = rate_histogram.median_from_histogram(histogram)

        assert median == 205_000.0

    def test_overflow_median(self) -> None:
        """
        A median in the overflow bucket reports the cap.
        """
        histogram = rate_histogram.RateHistogram()
        histogram.add_many(np.array([2e8, 3e8, 1e6]))

        _, median = rate_histogram.median_from_histogram(histogram)

        assert median == 100_000_000.0

    def test_random_medians_close_to_exact(self) -> None:
        """
        Over a thousand random rate sets the histogram median stays within one bucket width of
        the exact lower median of the capped rates, and within half a bucket below the cap.
        """
        rng = np.random.default_rng(23)

        for _ in range(1_000):
            size = int(rng.integers(1, 10_000, endpoint=True))
            top = 10 ** rng.uniform(4, np.log10(1.2e8))
            rates = rng.uniform(0, top, size)

            histogram = rate_histogram.RateHistogram()
            histogram.add_many(rates)
            result, median = rate_histogram.median_from_histogram(histogram)

            exact = float(np.sort(rates)[(size + 1) // 2 - 1])
            capped = min(exact, float(rate_histogram.RATE_CAP_BPS))
            assert result
            assert median is not None
            assert abs(median - capped) <= rate_histogram.BUCKET_WIDTH_BPS
            if exact < rate_histogram.RATE_CAP_BPS:
                assert abs(median - exact) <= rate_histogram.BUCKET_WIDTH_BPS / 2

    def test_average_uses_rounded_rates(self) -> None:
        """
        Each rate is rounded to the nearest bps before summing.
        """
        histogram = rate_histogram.RateHistogram()
        histogram.add(1_000.4)
        histogram.add(2_000.6)

        assert histogram.sum_bps == 3_001
        _, stats = histogram.stats()
        assert stats is not None
        assert stats.avg_bps == 1_500.5

    def test_add_and_add_many_agree(self) -> None:
        """
        Scalar and vector counting give the same histogram.
        """
        rates = np.random.default_rng(1).lognormal(14.0, 2.0, size=500)
        one_by_one = rate_histogram.RateHistogram()
        for rate in rates.tolist():
            one_by_one.add(rate)

        bulk = rate_histogram.RateHistogram()
        bulk.add_many(rates)

        assert np.array_equal(one_by_one.buckets, bulk.buckets)
        assert one_by_one.sum_bps == bulk.sum_bps
        assert one_by_one.stats() == bulk.stats()

    def test_merge(self) -> None:
        """
        Merged histogram equals the histogram of all rates.
        """
        rates = np.random.default_rng(2).uniform(0, 2e8, size=300)
        first = rate_histogram.RateHistogram()
        first.add_many(rates[:100])
        second = rate_histogram.RateHistogram()
        second.add_many(rates[100:])
        combined = rate_histogram.RateHistogram()
        combined.add_many(rates)

        first.merge(second)

        assert np.array_equal(first.buckets, combined.buckets)
        assert first.stats() == combined.stats()

    def test_merge_with_empty(self) -> None:
        """
        Merging an empty histogram changes nothing.
        """
        histogram = rate_histogram.RateHistogram()
        histogram.add(1e6)

        histogram.merge(rate_histogram.RateHistogram())

        result, stats = histogram.stats()
        assert result
        assert stats == rate_histogram.RateStats(1e6, 1e6, 1e6, 1_005_000.0, 1)
