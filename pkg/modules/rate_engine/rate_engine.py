"""
Flow classification, transfer rates and the parallel reduction of a snapshot into per-site and
per-host statistics.

Each worker reduces a disjoint slice of the view into a private partial (sparse bucket counts,
min, max, integer sum and count per host). Partials are merged by sorting on a 64-bit key and
segment-reducing, so the result is identical for every worker count and partitioning.
"""

import concurrent.futures
import enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..flow_store import flow_store
from ..netflow import netflow_codec
from ..site_catalog import site_catalog
from . import analysis_result
from . import filter_params
from . import rate_histogram


FlowClass = analysis_result.FlowClass

# Sort key layout: site id (16 bits) | host address (32 bits) | rate bucket (14 bits)
HOST_SHIFT = 14
SITE_SHIFT = 46
BUCKET_MASK = (1 << HOST_SHIFT) - 1
ADDRESS_MASK = 0xFFFFFFFF

RATE_NUMERATOR = 8000.0  # bits per byte times milliseconds per second

RADIX_BITS = 16
RADIX_DIGIT_MASK = (1 << RADIX_BITS) - 1


class LookupVariant(enum.Enum):
    """
    Catalog search used to attribute flows.

    Attributes
    ----------
    HASH : str
        /24 hash table.
    SEQUENTIAL : str
        Linear scan of the /24 entries.
    """

    HASH = "hash"
    SEQUENTIAL = "sequential"


class _Partial(NamedTuple):
    """
    Reduction state of one slice, or of several merged slices.

    ``host_keys`` are ``(site << 32) | host`` ascending; ``pair_keys`` are full sort keys
    (host key and bucket) ascending.
    """

    tallies: np.ndarray
    host_keys: np.ndarray
    counts: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray
    sums: np.ndarray
    pair_keys: np.ndarray
    pair_counts: np.ndarray


def classify(
    record: netflow_codec.FlowRecord,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
) -> FlowClass:
    """
    Classify one flow record.

    Checks run in a fixed order: pure ACK (small average packet size), then administrative
    (few packets or short duration), then attribution to a registered site.

    Parameters
    ----------
    record : netflow_codec.FlowRecord
        Resolved record.
    catalog : site_catalog.SiteCatalog
        Registered sites.
    params : filter_params.FilterParams
        Thresholds.

    Returns
    -------
    FlowClass
        Exactly one class.
    """
    if record.d_pkts > 0 and record.d_octets / record.d_pkts <= params.ack_avg_size_max:
        return FlowClass.PURE_ACK

    if (
        record.d_pkts == 0
        or record.d_pkts < params.min_packets
        or record.duration_ms < params.min_duration_ms
        or record.duration_ms <= 0
    ):
        return FlowClass.ADMINISTRATIVE

    if attribute(record, catalog) is None:
        return FlowClass.UNMATCHED

    return FlowClass.FORWARD


def flow_rate(record: netflow_codec.FlowRecord) -> Tuple[bool, Optional[float]]:
    """
    Transfer rate of a flow, ``8 * bytes / seconds``.

    Parameters
    ----------
    record : netflow_codec.FlowRecord
        Resolved record.

    Returns
    -------
    Tuple[bool, Optional[float]]
        Success status and the rate in bps; fails when the duration is not positive.
    """
    if record.duration_ms <= 0:
        return False, None

    return True, RATE_NUMERATOR * record.d_octets / record.duration_ms


def attribute(
    record: netflow_codec.FlowRecord, catalog: site_catalog.SiteCatalog
) -> Optional[analysis_result.HostKey]:
    """
    Site and host of a flow: the source if it is registered, otherwise the destination.

    Parameters
    ----------
    record : netflow_codec.FlowRecord
        Resolved record.
    catalog : site_catalog.SiteCatalog
        Registered sites.

    Returns
    -------
    Optional[analysis_result.HostKey]
        (site id, host address), or None if neither endpoint is registered.
    """
    site = catalog.lookup(record.src_addr)
    if site is not None:
        return site, record.src_addr

    site = catalog.lookup(record.dst_addr)
    if site is not None:
        return site, record.dst_addr

    return None


class _Classified(NamedTuple):
    """
    Classification of a slice: forward rows carry the catalog entry rank and address of the
    attributed endpoint.
    """

    classes: np.ndarray
    forward: np.ndarray
    ranks: np.ndarray
    hosts: np.ndarray
    octets: np.ndarray
    duration: np.ndarray


def _classify_slice(
    rows: np.ndarray,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
    variant: LookupVariant,
) -> _Classified:
    pkts = rows["d_pkts"].astype(np.int64)
    octets = rows["d_octets"].astype(np.int64)
    duration = rows["end_ms"].astype(np.int64) - rows["start_ms"].astype(np.int64)

    pure_ack = (pkts > 0) & (octets / np.maximum(pkts, 1) <= params.ack_avg_size_max)
    administrative = ~pure_ack & (
        (pkts == 0)
        | (pkts < params.min_packets)
        | (duration < params.min_duration_ms)
        | (duration <= 0)
    )
    candidates = np.flatnonzero(~(pure_ack | administrative))

    if variant == LookupVariant.HASH:
        locate = catalog.locate_many
    else:
        locate = catalog.sequential_locate_many

    hosts = rows["src_addr"][candidates].astype(np.uint32)
    ranks = locate(hosts)
    src_unmatched = np.flatnonzero(ranks < 0)
    if len(src_unmatched) > 0:
        destinations = rows["dst_addr"][candidates[src_unmatched]].astype(np.uint32)
        ranks[src_unmatched] = locate(destinations)
        hosts[src_unmatched] = destinations

    matched = ranks >= 0
    forward = candidates[matched]

    classes = np.full(len(rows), FlowClass.UNMATCHED.value, dtype=np.int8)
    classes[pure_ack] = FlowClass.PURE_ACK.value
    classes[administrative] = FlowClass.ADMINISTRATIVE.value
    classes[forward] = FlowClass.FORWARD.value

    return _Classified(classes, forward, ranks[matched], hosts[matched], octets, duration)


def classify_rows(
    rows: np.ndarray,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
    variant: LookupVariant = LookupVariant.HASH,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized ``classify`` and ``attribute``.

    Parameters
    ----------
    rows : np.ndarray
        Flow rows.
    catalog : site_catalog.SiteCatalog
        Published catalog.
    params : filter_params.FilterParams
        Thresholds.
    variant : LookupVariant, optional
        Catalog search, by default HASH.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
        Class value per row (int8), indices of forward rows, and their site ids and hosts.
    """
    classified = _classify_slice(rows, catalog, params, variant)
    _, ranked_sites = catalog.ranked_entries()
    sites = ranked_sites[classified.ranks].astype(np.int32)

    return classified.classes, classified.forward, sites, classified.hosts


def _segment_starts(sorted_keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(0, dtype=np.int64)

    return np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])


def _segment_lengths(starts: np.ndarray, total: int) -> np.ndarray:
    return np.diff(np.r_[starts, total]).astype(np.int64)


def _empty_partial(tallies: np.ndarray) -> _Partial:
    empty_int = np.zeros(0, dtype=np.int64)
    empty_float = np.zeros(0, dtype=np.float64)
    return _Partial(
        tallies, empty_int, empty_int, empty_float, empty_float, empty_int, empty_int, empty_int
    )


def _grouping_order(host_slots: np.ndarray, buckets: np.ndarray) -> np.ndarray:
    """
    Permutation sorting by (host slot, bucket), from stable passes over 16-bit digits.
    """
    order = np.argsort(buckets.astype(np.uint16), kind="stable")
    top = int(host_slots.max())
    shift = 0
    while True:
        digits = ((host_slots[order] >> shift) & RADIX_DIGIT_MASK).astype(np.uint16)
        order = order[np.argsort(digits, kind="stable")]
        shift += RADIX_BITS
        if top >> shift == 0:
            return order


def _reduce_slice(
    rows: np.ndarray,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
    variant: LookupVariant,
) -> _Partial:
    """
    Reduce one slice of the view into a private partial.
    """
    classified = _classify_slice(rows, catalog, params, variant)
    tallies = np.bincount(classified.classes, minlength=len(FlowClass)).astype(np.int64)
    forward = classified.forward
    if len(forward) == 0:
        return _empty_partial(tallies)

    rates = RATE_NUMERATOR * classified.octets[forward] / classified.duration[forward]
    buckets = rate_histogram.bucket_indices(rates)

    # Ranks follow (site, /24 key), so rank and host byte order hosts like (site, address)
    host_slots = (classified.ranks.astype(np.int64) << 8) | (classified.hosts & 0xFF).astype(
        np.int64
    )
    order = _grouping_order(host_slots, buckets)
    host_slots = host_slots[order]
    buckets = buckets[order]
    rates = rates[order]
    rounded = np.rint(rates).astype(np.int64)

    pair_slots = host_slots * rate_histogram.BUCKET_COUNT + buckets
    host_starts = _segment_starts(host_slots)
    pair_starts = _segment_starts(pair_slots)

    ranked_keys, ranked_sites = catalog.ranked_entries()

    def host_keys(slots: np.ndarray) -> np.ndarray:
        ranks = slots >> 8
        addresses = ranked_keys[ranks].astype(np.int64) | (slots & 0xFF)
        return (ranked_sites[ranks].astype(np.int64) << 32) | addresses

    return _Partial(
        tallies=tallies,
        host_keys=host_keys(host_slots[host_starts]),
        counts=_segment_lengths(host_starts, len(host_slots)),
        mins=np.minimum.reduceat(rates, host_starts),
        maxs=np.maximum.reduceat(rates, host_starts),
        sums=np.add.reduceat(rounded, host_starts),
        pair_keys=(host_keys(host_slots[pair_starts]) << HOST_SHIFT) | buckets[pair_starts],
        pair_counts=_segment_lengths(pair_starts, len(host_slots)),
    )


def _merge_partials(partials: List[_Partial]) -> _Partial:
    """
    Combine partials: counters add, minima and maxima combine, integer sums add.
    """
    tallies = np.sum([partial.tallies for partial in partials], axis=0).astype(np.int64)

    host_keys = np.concatenate([partial.host_keys for partial in partials])
    if len(host_keys) == 0:
        return _empty_partial(tallies)

    order = np.argsort(host_keys)
    host_keys = host_keys[order]
    starts = _segment_starts(host_keys)

    def reduce_hosts(ufunc: np.ufunc, field: str) -> np.ndarray:
        values = np.concatenate([getattr(partial, field) for partial in partials])[order]
        return ufunc.reduceat(values, starts)

    pair_keys = np.concatenate([partial.pair_keys for partial in partials])
    pair_counts = np.concatenate([partial.pair_counts for partial in partials])
    pair_order = np.argsort(pair_keys)
    pair_keys = pair_keys[pair_order]
    pair_starts = _segment_starts(pair_keys)

    return _Partial(
        tallies=tallies,
        host_keys=host_keys[starts],
        counts=reduce_hosts(np.add, "counts"),
        mins=reduce_hosts(np.minimum, "mins"),
        maxs=reduce_hosts(np.maximum, "maxs"),
        sums=reduce_hosts(np.add, "sums"),
        pair_keys=pair_keys[pair_starts],
        pair_counts=np.add.reduceat(pair_counts[pair_order], pair_starts),
    )


def _median_pairs(
    counts: np.ndarray, pair_hosts: np.ndarray, pair_counts: np.ndarray
) -> np.ndarray:
    """
    Index of the pair holding the lower median of each host, from sorted sparse bucket counts.
    """
    starts = _segment_starts(pair_hosts)
    lengths = _segment_lengths(starts, len(pair_hosts))
    cumulative = np.cumsum(pair_counts)
    before_host = np.r_[0, cumulative[starts[1:] - 1]]
    within_host = cumulative - np.repeat(before_host, lengths)
    targets = np.repeat((counts + 1) // 2, lengths)

    reached = np.flatnonzero(within_host >= targets)
    # Every host reaches its target by its last pair; keep the first pair reaching it
    return reached[_segment_starts(pair_hosts[reached])]


def _finalize(
    partial: _Partial,
    window: Tuple[int, int],
    params: filter_params.FilterParams,
) -> analysis_result.AnalysisResult:
    """
    Turn a fully merged partial into per-host and per-site statistics.
    """
    tallies = {flow_class: int(partial.tallies[flow_class.value]) for flow_class in FlowClass}

    host_keys = partial.host_keys
    pair_hosts = partial.pair_keys >> HOST_SHIFT
    pair_buckets = partial.pair_keys & BUCKET_MASK

    host_stats: Dict[analysis_result.HostKey, rate_histogram.RateStats] = {}
    host_sums: Dict[analysis_result.HostKey, int] = {}
    site_stats: Dict[int, rate_histogram.RateStats] = {}
    site_sums: Dict[int, int] = {}
    site_buckets: Dict[int, np.ndarray] = {}

    if len(host_keys) > 0:
        median_pairs = _median_pairs(partial.counts, pair_hosts, partial.pair_counts)
        host_median_buckets = pair_buckets[median_pairs]

        for index, host_key in enumerate(host_keys.tolist()):
            key = (host_key >> 32, host_key & ADDRESS_MASK)
            count = int(partial.counts[index])
            total = int(partial.sums[index])
            host_sums[key] = total
            host_stats[key] = rate_histogram.RateStats(
                max_bps=float(partial.maxs[index]),
                min_bps=float(partial.mins[index]),
                avg_bps=total / count,
                median_bps=rate_histogram.bucket_median_bps(int(host_median_buckets[index])),
                flow_count=count,
            )

        host_sites = host_keys >> 32
        site_starts = _segment_starts(host_sites)
        site_ids = host_sites[site_starts]
        site_counts = np.add.reduceat(partial.counts, site_starts)
        site_mins = np.minimum.reduceat(partial.mins, site_starts)
        site_maxs = np.maximum.reduceat(partial.maxs, site_starts)
        site_totals = np.add.reduceat(partial.sums, site_starts)

        site_of_pair = np.searchsorted(site_ids, pair_hosts >> 32)
        dense = np.bincount(
            site_of_pair * rate_histogram.BUCKET_COUNT + pair_buckets,
            weights=partial.pair_counts,
            minlength=len(site_ids) * rate_histogram.BUCKET_COUNT,
        )
        dense = np.rint(dense).astype(np.int64).reshape(len(site_ids), rate_histogram.BUCKET_COUNT)

        for index, site_id in enumerate(site_ids.tolist()):
            histogram = rate_histogram.RateHistogram(dense[index])
            _, median = rate_histogram.median_from_histogram(histogram)
            count = int(site_counts[index])
            total = int(site_totals[index])
            site_buckets[site_id] = histogram.buckets
            site_sums[site_id] = total
            site_stats[site_id] = rate_histogram.RateStats(
                max_bps=float(site_maxs[index]),
                min_bps=float(site_mins[index]),
                avg_bps=total / count,
                median_bps=float(median),
                flow_count=count,
            )

    triples = np.stack(
        [pair_hosts >> 32, pair_hosts & ADDRESS_MASK, pair_buckets, partial.pair_counts], axis=1
    ).astype(np.int64)

    return analysis_result.AnalysisResult(
        window=window,
        tallies=tallies,
        params=params,
        site_stats=site_stats,
        host_stats=host_stats,
        site_buckets=site_buckets,
        host_bucket_triples=triples,
        site_sums=site_sums,
        host_sums=host_sums,
    )


def _slice_bounds(
    total: int, workers: int, partition_bounds: Optional[Sequence[int]]
) -> List[Tuple[int, int]]:
    if partition_bounds is None:
        edges = np.linspace(0, total, max(workers, 1) + 1).astype(np.int64).tolist()
    else:
        edges = [0] + sorted(min(max(int(bound), 0), total) for bound in partition_bounds) + [total]

    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def aggregate(
    view: flow_store.FlowView,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
    workers: int = 1,
    variant: LookupVariant = LookupVariant.HASH,
    partition_bounds: Optional[Sequence[int]] = None,
) -> analysis_result.AnalysisResult:
    """
    Reduce a snapshot into per-site and per-host statistics, in parallel.

    Parameters
    ----------
    view : flow_store.FlowView
        Snapshot to analyze.
    catalog : site_catalog.SiteCatalog
        Registered sites; must not change during the call.
    params : filter_params.FilterParams
        Thresholds.
    workers : int, optional
        Number of worker threads, by default 1.
    variant : LookupVariant, optional
        Catalog search, by default HASH.
    partition_bounds : Optional[Sequence[int]], optional
        Explicit split indices into the view; by default the view is split evenly across workers.

    Returns
    -------
    analysis_result.AnalysisResult
        Identical for every worker count, partitioning and lookup variant.
    """
    catalog.publish()
    rows = view.rows
    slices = [rows[begin:end] for begin, end in _slice_bounds(len(rows), workers, partition_bounds)]

    if workers <= 1:
        partials = [_reduce_slice(part, catalog, params, variant) for part in slices]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            partials = list(
                executor.map(lambda part: _reduce_slice(part, catalog, params, variant), slices)
            )

    # A lone partial is already in merged form
    merged = partials[0] if len(partials) == 1 else _merge_partials(partials)
    return _finalize(merged, (view.start_ms, view.end_ms), params)


def reference_aggregate(
    view: flow_store.FlowView,
    catalog: site_catalog.SiteCatalog,
    params: filter_params.FilterParams,
) -> analysis_result.AnalysisResult:
    """
    Record-at-a-time reduction with ``classify``, ``flow_rate`` and ``RateHistogram``.

    Slow; the oracle that ``aggregate`` must reproduce exactly.
    """
    tallies = np.zeros(len(FlowClass), dtype=np.int64)
    histograms: Dict[int, rate_histogram.RateHistogram] = {}

    for record in view.to_records():
        flow_class = classify(record, catalog, params)
        tallies[flow_class.value] += 1
        if flow_class != FlowClass.FORWARD:
            continue

        attribution = attribute(record, catalog)
        _, rate = flow_rate(record)

        # Get Pylance to stop complaining
        assert attribution is not None
        assert rate is not None

        site, host = attribution
        host_key = (site << 32) | host
        if host_key not in histograms:
            histograms[host_key] = rate_histogram.RateHistogram()
        histograms[host_key].add(rate)

    if len(histograms) == 0:
        return _finalize(_empty_partial(tallies), (view.start_ms, view.end_ms), params)

    host_keys = sorted(histograms)
    pair_keys = []
    pair_counts = []
    for host_key in host_keys:
        buckets = histograms[host_key].buckets
        for bucket in np.flatnonzero(buckets).tolist():
            pair_keys.append((host_key << HOST_SHIFT) | bucket)
            pair_counts.append(int(buckets[bucket]))

    partial = _Partial(
        tallies=tallies,
        host_keys=np.array(host_keys, dtype=np.int64),
        counts=np.array([histograms[key].count for key in host_keys], dtype=np.int64),
        mins=np.array([histograms[key].min_bps for key in host_keys], dtype=np.float64),
        maxs=np.array([histograms[key].max_bps for key in host_keys], dtype=np.float64),
        sums=np.array([histograms[key].sum_bps for key in host_keys], dtype=np.int64),
        pair_keys=np.array(pair_keys, dtype=np.int64),
        pair_counts=np.array(pair_counts, dtype=np.int64),
    )
    return _finalize(partial, (view.start_ms, view.end_ms), params)
