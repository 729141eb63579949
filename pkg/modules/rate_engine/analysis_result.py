"""
Per-site and per-host transfer-rate statistics for one analysis window.
"""

import enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import filter_params
from . import rate_histogram


class FlowClass(enum.Enum):
    """
    Classification of a flow record; only FORWARD flows contribute to statistics.
    """

    FORWARD = 0
    PURE_ACK = 1
    ADMINISTRATIVE = 2
    UNMATCHED = 3


HostKey = Tuple[int, int]  # (site id, host address)


class AnalysisResult:
    """
    Statistics of every site and host that had forward flows in the window.

    Per-host bucket counts are kept sparse as (host, bucket, count) triples; per-site bucket
    counts are dense 10001-element arrays.
    """

    def __init__(
        self,
        window: Tuple[int, int],
        tallies: Dict[FlowClass, int],
        params: filter_params.FilterParams,
        site_stats: Dict[int, rate_histogram.RateStats],
        host_stats: Dict[HostKey, rate_histogram.RateStats],
        site_buckets: Dict[int, np.ndarray],
        host_bucket_triples: np.ndarray,
        site_sums: Dict[int, int],
        host_sums: Dict[HostKey, int],
    ) -> None:
        """
        Assemble a result; built by ``rate_engine.aggregate``.

        Parameters
        ----------
        window : Tuple[int, int]
            ``[start_ms, end_ms)`` analyzed.
        tallies : Dict[FlowClass, int]
            Records per class.
        params : filter_params.FilterParams
            Thresholds used.
        site_stats : Dict[int, rate_histogram.RateStats]
            Stats per site id.
        host_stats : Dict[HostKey, rate_histogram.RateStats]
            Stats per (site id, host address).
        site_buckets : Dict[int, np.ndarray]
            Dense bucket counts per site id.
        host_bucket_triples : np.ndarray
            int64 array of shape (n, 4): site id, host address, bucket, count; sorted.
        site_sums : Dict[int, int]
            Integer-bps rate sum per site id.
        host_sums : Dict[HostKey, int]
            Integer-bps rate sum per host.
        """
        self.window = window
        self.tallies = tallies
        self.params = params
        self.site_stats = site_stats
        self.host_stats = host_stats
        self.__site_buckets = site_buckets
        self.__host_bucket_triples = host_bucket_triples
        self.__site_sums = site_sums
        self.__host_sums = host_sums

    @property
    def records_analyzed(self) -> int:
        """
        Records in the view, whatever their class.
        """
        return sum(self.tallies.values())

    def hosts_of_site(self, site_id: int) -> List[HostKey]:
        """
        Host keys of a site in address order.
        """
        return sorted(key for key in self.host_stats if key[0] == site_id)

    def site_histogram(self, site_id: int) -> Optional[rate_histogram.RateHistogram]:
        """
        Merged histogram of a site, None if the site had no forward flows.
        """
        buckets = self.__site_buckets.get(site_id)
        if buckets is None:
            return None

        return self.__histogram_with_stats(
            buckets, self.site_stats[site_id], self.__site_sums[site_id]
        )

    def host_histogram(self, key: HostKey) -> Optional[rate_histogram.RateHistogram]:
        """
        Histogram of one host, None if the host had no forward flows.
        """
        if key not in self.host_stats:
            return None

        triples = self.__host_bucket_triples
        selected = triples[(triples[:, 0] == key[0]) & (triples[:, 1] == key[1])]
        buckets = np.zeros(rate_histogram.BUCKET_COUNT, dtype=np.int64)
        buckets[selected[:, 2]] = selected[:, 3]
        return self.__histogram_with_stats(buckets, self.host_stats[key], self.__host_sums[key])

    @staticmethod
    def __histogram_with_stats(
        buckets: np.ndarray, stats: rate_histogram.RateStats, sum_bps: int
    ) -> rate_histogram.RateHistogram:
        histogram = rate_histogram.RateHistogram(buckets.copy())
        histogram.min_bps = stats.min_bps
        histogram.max_bps = stats.max_bps
        histogram.sum_bps = sum_bps
        return histogram

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnalysisResult):
            return NotImplemented

        return (
            self.window == other.window
            and self.tallies == other.tallies
            and self.params == other.params
            and self.site_stats == other.site_stats
            and self.host_stats == other.host_stats
            and self.__site_buckets.keys() == other.__site_buckets.keys()
            and all(
                np.array_equal(buckets, other.__site_buckets[site_id])
                for site_id, buckets in self.__site_buckets.items()
            )
            and np.array_equal(self.__host_bucket_triples, other.__host_bucket_triples)
            and self.__site_sums == other.__site_sums
            and self.__host_sums == other.__host_sums
        )

    def __str__(self) -> str:
        return (
            f"{self.__class__.__name__}: window: {self.window}, sites: {len(self.site_stats)}, "
            f"hosts: {len(self.host_stats)}, tallies: "
            f"{ {flow_class.name: count for flow_class, count in self.tallies.items()} }"
        )

    def __repr__(self) -> str:
        return str(self)
