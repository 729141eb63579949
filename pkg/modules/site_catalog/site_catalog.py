"""
Registry of collaboration sites and their /24 subnets.
"""

import enum
import ipaddress
import threading
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from . import subnet_hash_table


PREFIX_MASK = 0xFFFFFF00
SUBNET_PREFIX_LENGTH = 24
MAX_SITES = 2**16  # site ids share a 64-bit sort key with host address and rate bucket


class RegisterStatus(enum.Enum):
    """
    Outcome of a site registration.

    Attributes
    ----------
    OK : int
        Site registered.
    OVERLAP : int
        A /24 produced by the CIDRs already belongs to another site.
    INVALID_CIDR : int
        A CIDR is not a valid IPv4 network.
    INVALID_NAME : int
        Name is empty, contains whitespace, or is already registered.
    CATALOG_FULL : int
        No site ids left.
    """

    OK = 0
    OVERLAP = 1
    INVALID_CIDR = 2
    INVALID_NAME = 3
    CATALOG_FULL = 4


class Site(NamedTuple):
    """
    A registered site.
    """

    site_id: int
    name: str
    cidrs: Tuple[str, ...]


def subnet_key(ip: int) -> int:
    """
    /24 network address of an IPv4 address.
    """
    return ip & PREFIX_MASK


def expand_cidr(cidr: str) -> Optional[List[int]]:
    """
    Expand a CIDR into the /24 keys that tile it.

    Networks longer than /24 are rounded up to their enclosing /24.

    Parameters
    ----------
    cidr : str
        IPv4 network, host bits allowed.

    Returns
    -------
    Optional[List[int]]
        ``2^(24 - length)`` keys in ascending order, or None if the CIDR is invalid.
    """
    try:
        network = ipaddress.IPv4Network(cidr.strip(), strict=False)
    except ValueError:
        return None

    if network.prefixlen > SUBNET_PREFIX_LENGTH:
        network = network.supernet(new_prefix=SUBNET_PREFIX_LENGTH)

    first = int(network.network_address) >> 8
    last = int(network.broadcast_address) >> 8
    return [block << 8 for block in range(first, last + 1)]


class _Published(NamedTuple):
    """
    Lookup structures built by one publish().
    """

    table: subnet_hash_table.SubnetHashTable
    sequence_keys: np.ndarray
    sequence_ranks: np.ndarray
    ranked_keys: np.ndarray
    ranked_sites: np.ndarray


class SiteCatalog:
    """
    Sites plus the /24 hash table used to attribute addresses to them.

    Registration is single-writer. The hash table is rebuilt from scratch on the first lookup
    after any registration and is immutable once built, so any number of readers may share it.
    """

    __create_key = object()

    @classmethod
    def create(cls) -> Tuple[bool, Optional["SiteCatalog"]]:
        """
        Create an empty catalog.

        Returns
        -------
        Tuple[bool, Optional[SiteCatalog]]
            Success status and the catalog.
        """
        return True, SiteCatalog(cls.__create_key)

    def __init__(self, class_private_create_key: object) -> None:
        """
        Private constructor, use create() method.
        """
        assert class_private_create_key is SiteCatalog.__create_key, "Use create() method."

        self.__sites: List[Site] = []
        self.__entries: Dict[int, int] = {}
        # Registration order, the list searched by sequential_lookup
        self.__sequence: List[Tuple[int, int]] = []
        self.__published: Optional[_Published] = None
        self.__build_lock = threading.Lock()

    def register_site(self, name: str, cidrs: List[str]) -> Tuple[RegisterStatus, Optional[int]]:
        """
        Register a site and every /24 its CIDRs cover.

        Nothing is registered unless every CIDR is valid and no produced /24 belongs to another
        site.

        Parameters
        ----------
        name : str
            Display name, no whitespace.
        cidrs : List[str]
            IPv4 networks owned by the site.

        Returns
        -------
        Tuple[RegisterStatus, Optional[int]]
            Status and the new site id (None unless OK).
        """
        if name == "" or any(character.isspace() for character in name):
            return RegisterStatus.INVALID_NAME, None

        if any(site.name == name for site in self.__sites):
            return RegisterStatus.INVALID_NAME, None

        if len(self.__sites) >= MAX_SITES:
            return RegisterStatus.CATALOG_FULL, None

        keys: List[int] = []
        seen = set()
        for cidr in cidrs:
            expanded = expand_cidr(cidr)
            if expanded is None:
                return RegisterStatus.INVALID_CIDR, None

            for key in expanded:
                if key in self.__entries:
                    return RegisterStatus.OVERLAP, None
                if key not in seen:
                    seen.add(key)
                    keys.append(key)

        if len(cidrs) == 0:
            return RegisterStatus.INVALID_CIDR, None

        site_id = len(self.__sites)
        self.__sites.append(Site(site_id, name, tuple(cidr.strip() for cidr in cidrs)))
        for key in keys:
            self.__entries[key] = site_id
            self.__sequence.append((key, site_id))

        # Next lookup rebuilds from scratch
        self.__published = None

        return RegisterStatus.OK, site_id

    def publish(self) -> None:
        """
        Build the hash table now if a registration invalidated it.
        """
        with self.__build_lock:
            if self.__published is not None:
                return

            sequence_keys = np.array([key for key, _ in self.__sequence], dtype=np.uint32)
            sequence_sites = np.array([site for _, site in self.__sequence], dtype=np.int32)

            # Entries ranked by (site, key): a rank times 256 plus a host byte sorts like
            # (site, address)
            order = np.lexsort((sequence_keys, sequence_sites))
            sequence_ranks = np.empty(len(order), dtype=np.int32)
            sequence_ranks[order] = np.arange(len(order), dtype=np.int32)
            ranked_keys = sequence_keys[order]
            ranked_sites = sequence_sites[order]
            for array in (sequence_keys, sequence_ranks, ranked_keys, ranked_sites):
                array.setflags(write=False)

            self.__published = _Published(
                subnet_hash_table.SubnetHashTable(
                    ranked_keys, np.arange(len(order), dtype=np.int32)
                ),
                sequence_keys,
                sequence_ranks,
                ranked_keys,
                ranked_sites,
            )

    def __snapshot(self) -> "_Published":
        published = self.__published
        if published is None:
            self.publish()
            published = self.__published

        # Get Pylance to stop complaining
        assert published is not None

        return published

    def lookup(self, ip: int) -> Optional[int]:
        """
        Site owning the /24 of an address, through the hash table.

        Parameters
        ----------
        ip : int
            IPv4 address as an unsigned 32-bit integer.

        Returns
        -------
        Optional[int]
            Site id, or None if no registered /24 covers the address.
        """
        published = self.__snapshot()
        rank = published.table.get(subnet_key(ip))
        if rank == subnet_hash_table.NO_SITE:
            return None

        return int(published.ranked_sites[rank])

    def sequential_lookup(self, ip: int) -> Optional[int]:
        """
        Same answer as ``lookup``, by scanning the /24 entries one by one in registration order.
        """
        key = subnet_key(ip)
        for entry_key, site in self.__sequence:
            if entry_key == key:
                return site

        return None

    def locate_many(self, ips: np.ndarray) -> np.ndarray:
        """
        Entry rank of the /24 of each address, through the hash table.

        Ranks index ``ranked_entries``.

        Parameters
        ----------
        ips : np.ndarray
            IPv4 addresses (any unsigned integer dtype).

        Returns
        -------
        np.ndarray
            int32 entry ranks, -1 where no entry matches.
        """
        keys = np.asarray(ips, dtype=np.uint32) & np.uint32(PREFIX_MASK)
        return self.__snapshot().table.get_many(keys)

    def sequential_locate_many(self, ips: np.ndarray) -> np.ndarray:
        """
        Same answer as ``locate_many``, by a first-match scan: the entries are tried in
        registration order and an address stops being compared once one matches.
        """
        published = self.__snapshot()
        keys = np.asarray(ips, dtype=np.uint32) & np.uint32(PREFIX_MASK)
        result = np.full(len(keys), subnet_hash_table.NO_SITE, dtype=np.int32)

        pending = np.arange(len(keys))
        pending_keys = keys
        for entry_key, rank in zip(
            published.sequence_keys.tolist(), published.sequence_ranks.tolist()
        ):
            if len(pending) == 0:
                break
            hit = pending_keys == entry_key
            result[pending[hit]] = rank
            pending = pending[~hit]
            pending_keys = pending_keys[~hit]

        return result

    def lookup_many(self, ips: np.ndarray) -> np.ndarray:
        """
        Vectorized ``lookup``.

        Parameters
        ----------
        ips : np.ndarray
            IPv4 addresses (any unsigned integer dtype).

        Returns
        -------
        np.ndarray
            int32 site ids, -1 where no site matches.
        """
        return self.__sites_of(self.locate_many(ips))

    def sequential_lookup_many(self, ips: np.ndarray) -> np.ndarray:
        """
        Vectorized ``sequential_lookup``.
        """
        return self.__sites_of(self.sequential_locate_many(ips))

    def __sites_of(self, ranks: np.ndarray) -> np.ndarray:
        ranked_sites = self.__snapshot().ranked_sites
        if len(ranked_sites) == 0:
            return ranks.astype(np.int32)

        sites = np.where(ranks >= 0, ranked_sites[np.maximum(ranks, 0)], subnet_hash_table.NO_SITE)
        return sites.astype(np.int32)

    def ranked_entries(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        /24 keys (uint32) and their site ids (int32) ordered by site id, then key.
        """
        published = self.__snapshot()
        return published.ranked_keys, published.ranked_sites

    def sites(self) -> List[Site]:
        """
        Registered sites in id order.
        """
        return list(self.__sites)

    def site_name(self, site_id: int) -> Optional[str]:
        """
        Name of a site id, or None if unknown.
        """
        if 0 <= site_id < len(self.__sites):
            return self.__sites[site_id].name

        return None

    def site_id(self, name: str) -> Optional[int]:
        """
        Id of a site name, or None if unknown.
        """
        for site in self.__sites:
            if site.name == name:
                return site.site_id

        return None

    def entry_count(self) -> int:
        """
        Number of /24 entries.
        """
        return len(self.__entries)

    def entry_keys(self) -> List[int]:
        """
        /24 keys in registration order.
        """
        return [key for key, _ in self.__sequence]

    def __len__(self) -> int:
        return len(self.__sites)
