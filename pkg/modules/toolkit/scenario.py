"""
Synthetic flow scenarios: per-site rate distributions, traffic mix and per-hour dips.
"""

import ipaddress
import math
import pathlib
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ..netflow import flow_array
from ..netflow import netflow_codec
from ..read_yaml import read_yaml
from ..site_catalog import site_catalog


HOUR_MS = 3_600_000
DEFAULT_START_MS = 1_704_067_200_000  # 2024-01-01T00:00:00Z
PEER_NETWORK = ipaddress.IPv4Network("198.51.100.0/24")
BOOT_LEAD_MS = 60_000  # exporter boot time before the scenario start

MIN_RATE_BPS = 1_000.0
MAX_RATE_BPS = 10_000_000_000.0
MAX_OCTETS = netflow_codec.UINT32_MASK
FORWARD_MIN_OCTETS = 2_000  # 20 packets of 100 bytes
FORWARD_DURATION_MS = (1_000, 60_000)
ACK_PACKET_BYTES = 40
ADMIN_PACKET_BYTES = 200
TCP = 6


class RateSpec(NamedTuple):
    """
    Rate distribution of a site's forward flows.

    Attributes
    ----------
    kind : str
        ``lognormal`` (``bps`` is the median, ``sigma`` the log-space deviation) or ``fixed``.
    bps : float
    sigma : float
    """

    kind: str = "lognormal"
    bps: float = 10_000_000.0
    sigma: float = 1.0

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """
        ``count`` rates in bps.
        """
        if self.kind == "fixed":
            return np.full(count, self.bps, dtype=np.float64)

        return rng.lognormal(mean=math.log(self.bps), sigma=self.sigma, size=count)


class SiteSpec(NamedTuple):
    """
    One synthetic site.

    Attributes
    ----------
    dips : Dict[int, RateSpec]
        Rate distribution replacing ``rate`` in the given hours, numbered from 1.
    """

    name: str
    cidr: str
    hosts: int = 8
    flows_per_hour: int = 1000
    rate: RateSpec = RateSpec()
    ack_fraction: float = 0.0
    admin_fraction: float = 0.0
    dips: Dict[int, RateSpec] = {}

    def rate_in_hour(self, hour: int) -> RateSpec:
        """
        Distribution in force during an hour (numbered from 1).
        """
        return self.dips.get(hour, self.rate)


class ScenarioSpec(NamedTuple):
    """
    Whole scenario. Identical specs generate identical rows.
    """

    sites: List[SiteSpec]
    duration_hours: int = 1
    seed: int = 0
    start_ms: int = DEFAULT_START_MS


def validate_scenario(spec: ScenarioSpec) -> Tuple[bool, str]:
    """
    Check ranges and that every site's CIDR can be registered.

    Returns
    -------
    Tuple[bool, str]
        Whether the spec is valid, and what is wrong if not.
    """
    if spec.duration_hours < 1:
        return False, "duration_hours must be at least 1"

    if spec.start_ms % HOUR_MS != 0:
        return False, "start must be on an hour boundary"

    if len(spec.sites) == 0:
        return False, "at least one site is required"

    result, _ = scenario_catalog(spec)
    if not result:
        return False, "site CIDRs cannot be registered (invalid, overlapping or duplicate names)"

    for site in spec.sites:
        network = ipaddress.IPv4Network(site.cidr, strict=False)
        if network.overlaps(PEER_NETWORK):
            return False, f"{site.name}: {site.cidr} overlaps the peer network {PEER_NETWORK}"

        if not 1 <= site.hosts <= max(network.num_addresses - 2, 1):
            return False, f"{site.name}: hosts must be between 1 and the usable addresses"

        if site.flows_per_hour < 0:
            return False, f"{site.name}: flows_per_hour must be non-negative"

        if not (0 <= site.ack_fraction <= 1 and 0 <= site.admin_fraction <= 1):
            return False, f"{site.name}: fractions must be in [0, 1]"

        if site.ack_fraction + site.admin_fraction > 1:
            return False, f"{site.name}: ack_fraction + admin_fraction exceeds 1"

        for rate in [site.rate, *site.dips.values()]:
            if rate.kind not in ("lognormal", "fixed"):
                return False, f"{site.name}: unknown rate kind {rate.kind}"

            if not MIN_RATE_BPS <= rate.bps <= MAX_RATE_BPS or rate.sigma < 0:
                return False, f"{site.name}: rate out of range"

    return True, ""


def scenario_catalog(spec: ScenarioSpec) -> Tuple[bool, Optional[site_catalog.SiteCatalog]]:
    """
    Catalog registering every scenario site, in order.
    """
    result, catalog = site_catalog.SiteCatalog.create()
    if not result:
        return False, None

    # Get Pylance to stop complaining
    assert catalog is not None

    for site in spec.sites:
        status, _ = catalog.register_site(site.name, [site.cidr])
        if status != site_catalog.RegisterStatus.OK:
            return False, None

    return True, catalog


def _rate_from_dict(values: Any) -> RateSpec:
    if not isinstance(values, dict):
        raise TypeError(f"rate must be a mapping, got {values!r}")

    default = RateSpec()
    return RateSpec(
        kind=str(values.get("kind", default.kind)),
        bps=float(values.get("bps", default.bps)),
        sigma=float(values.get("sigma", default.sigma)),
    )


def scenario_from_dict(values: Dict[str, Any]) -> Tuple[bool, Optional[ScenarioSpec]]:
    """
    Build and validate a scenario from its YAML mapping.

    Returns
    -------
    Tuple[bool, Optional[ScenarioSpec]]
        Success status and the scenario; fails on an invalid spec.
    """
    try:
        sites = [
            SiteSpec(
                name=str(site["name"]),
                cidr=str(site["cidr"]),
                hosts=int(site.get("hosts", 8)),
                flows_per_hour=int(site.get("flows_per_hour", 1000)),
                rate=_rate_from_dict(site.get("rate", {})),
                ack_fraction=float(site.get("ack_fraction", 0.0)),
                admin_fraction=float(site.get("admin_fraction", 0.0)),
                dips={
                    int(hour): _rate_from_dict(rate)
                    for hour, rate in (site.get("dips") or {}).items()
                },
            )
            for site in values["sites"]
        ]
        spec = ScenarioSpec(
            sites=sites,
            duration_hours=int(values.get("duration_hours", 1)),
            seed=int(values.get("seed", 0)),
            start_ms=int(values.get("start_ms", DEFAULT_START_MS)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exception:
        print(f"ERROR: Invalid scenario: {exception}")
        return False, None

    result, message = validate_scenario(spec)
    if not result:
        print(f"ERROR: Invalid scenario: {message}")
        return False, None

    return True, spec


def load_scenario(file_path: pathlib.Path) -> Tuple[bool, Optional[ScenarioSpec]]:
    """
    Read a scenario YAML file.
    """
    result, values = read_yaml.open_config(file_path)
    if not result:
        return False, None

    # Get Pylance to stop complaining
    assert values is not None

    return scenario_from_dict(values)


def _forward_volumes(
    rng: np.random.Generator, rates: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Durations, octets and packets realizing each rate; octets are rounded up so that the
    computed rate never falls below the drawn one.
    """
    rates = np.clip(rates, MIN_RATE_BPS, MAX_RATE_BPS)
    drawn = rng.integers(*FORWARD_DURATION_MS, size=len(rates), endpoint=True)
    shortest = np.ceil(FORWARD_MIN_OCTETS * 8000.0 / rates)
    longest = np.floor((MAX_OCTETS - 1) * 8000.0 / rates)
    duration = np.minimum(np.maximum(drawn, shortest), longest).astype(np.int64)

    octets = np.ceil(rates * duration / 8000.0).astype(np.int64)
    packet_size = rng.integers(500, 1500, size=len(rates), endpoint=True)
    packets = np.minimum(np.maximum(octets // packet_size, 20), octets // 100)
    return duration, octets, packets


def generate_site_hour(
    rng: np.random.Generator, site: SiteSpec, hour: int, hour_start_ms: int, boot_ms: int
) -> np.ndarray:
    """
    Rows of one site in one hour (numbered from 1), every flow ending inside the hour.
    """
    count = site.flows_per_hour
    ack_count = int(round(count * site.ack_fraction))
    admin_count = min(int(round(count * site.admin_fraction)), count - ack_count)
    forward_count = count - ack_count - admin_count

    duration = np.zeros(count, dtype=np.int64)
    octets = np.zeros(count, dtype=np.int64)
    packets = np.zeros(count, dtype=np.int64)

    rates = site.rate_in_hour(hour).draw(rng, forward_count)
    forward = slice(0, forward_count)
    duration[forward], octets[forward], packets[forward] = _forward_volumes(rng, rates)

    acks = slice(forward_count, forward_count + ack_count)
    packets[acks] = rng.integers(20, 200, size=ack_count, endpoint=True)
    octets[acks] = packets[acks] * ACK_PACKET_BYTES
    duration[acks] = rng.integers(100, 10_000, size=ack_count, endpoint=True)

    admin = slice(forward_count + ack_count, count)
    packets[admin] = rng.integers(1, 5, size=admin_count, endpoint=True)
    octets[admin] = packets[admin] * ADMIN_PACKET_BYTES
    duration[admin] = rng.integers(0, 50, size=admin_count, endpoint=True)

    order = rng.permutation(count)
    duration, octets, packets = duration[order], octets[order], packets[order]

    network = ipaddress.IPv4Network(site.cidr, strict=False)
    hosts = int(network.network_address) + 1 + rng.integers(0, site.hosts, size=count)
    peers = int(PEER_NETWORK.network_address) + rng.integers(1, 255, size=count)
    outbound = rng.random(count) < 0.5

    rows = flow_array.empty_rows(count)
    rows["src_addr"] = np.where(outbound, hosts, peers)
    rows["dst_addr"] = np.where(outbound, peers, hosts)
    rows["d_pkts"] = packets
    rows["d_octets"] = octets
    rows["src_port"] = rng.integers(1024, 65535, size=count, endpoint=True)
    rows["dst_port"] = np.where(outbound, 2811, 50000)
    rows["tcp_flags"] = 0x1B
    rows["protocol"] = TCP
    rows["src_mask"] = 24
    rows["dst_mask"] = 24

    end_ms = hour_start_ms + rng.integers(0, HOUR_MS, size=count)
    start_ms = end_ms - duration
    rows["end_ms"] = end_ms
    rows["start_ms"] = start_ms
    rows["first"] = (start_ms - boot_ms) & netflow_codec.UINT32_MASK
    rows["last"] = (end_ms - boot_ms) & netflow_codec.UINT32_MASK
    return rows


def generate(spec: ScenarioSpec) -> np.ndarray:
    """
    Every row of a scenario, ordered by end time.

    Parameters
    ----------
    spec : ScenarioSpec
        Valid scenario.

    Returns
    -------
    np.ndarray
        Rows in ``flow_array.FLOW_ROW_DTYPE``; the same spec always yields the same rows.
    """
    rng = np.random.default_rng(spec.seed)
    boot_ms = spec.start_ms - BOOT_LEAD_MS
    parts = [flow_array.empty_rows(0)]
    for hour in range(1, spec.duration_hours + 1):
        hour_start_ms = spec.start_ms + (hour - 1) * HOUR_MS
        for site in spec.sites:
            parts.append(generate_site_hour(rng, site, hour, hour_start_ms, boot_ms))

    rows = np.concatenate(parts)
    return rows[np.argsort(rows["end_ms"], kind="stable")]
