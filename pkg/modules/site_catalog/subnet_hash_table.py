"""
Open-addressing hash table from /24 prefixes to int32 values, stored in numpy arrays.
"""

import numpy as np


EMPTY_KEY = np.uint32(0xFFFFFFFF)  # never a valid /24 key: low byte of a key is always zero
NO_SITE = -1
MIN_SLOTS = 16
FIBONACCI_MULTIPLIER = 2654435761  # Knuth multiplicative hash, floor(2^32 / golden ratio)


class SubnetHashTable:
    """
    Immutable hash table with linear probing and a load factor of at most one half.
    """

    def __init__(self, keys: np.ndarray, sites: np.ndarray) -> None:
        """
        Build the table.

        Parameters
        ----------
        keys : np.ndarray
            Distinct /24 keys (uint32, low byte zero).
        sites : np.ndarray
            Value stored for each key.
        """
        slot_count = MIN_SLOTS
        while slot_count < 2 * len(keys):
            slot_count *= 2

        self.__bits = slot_count.bit_length() - 1
        self.__mask = slot_count - 1
        self.__slot_keys = np.full(slot_count, EMPTY_KEY, dtype=np.uint32)
        self.__slot_sites = np.full(slot_count, NO_SITE, dtype=np.int32)

        for key, site in zip(keys.tolist(), sites.tolist()):
            slot = self.__home_slot(key)
            while self.__slot_keys[slot] != EMPTY_KEY:
                slot = (slot + 1) & self.__mask
            self.__slot_keys[slot] = key
            self.__slot_sites[slot] = site

        self.__slot_keys.setflags(write=False)
        self.__slot_sites.setflags(write=False)

    def __home_slot(self, key: int) -> int:
        return (((key >> 8) * FIBONACCI_MULTIPLIER) & 0xFFFFFFFF) >> (32 - self.__bits)

    def __home_slots(self, keys: np.ndarray) -> np.ndarray:
        hashed = ((keys.astype(np.uint64) >> np.uint64(8)) * np.uint64(FIBONACCI_MULTIPLIER)) & (
            np.uint64(0xFFFFFFFF)
        )
        return (hashed >> np.uint64(32 - self.__bits)).astype(np.int64)

    @property
    def slot_count(self) -> int:
        """
        Number of slots.
        """
        return len(self.__slot_keys)

    def get(self, key: int) -> int:
        """
        Value stored for a /24 key, or NO_SITE.
        """
        slot = self.__home_slot(key)
        while True:
            slot_key = int(self.__slot_keys[slot])
            if slot_key == key:
                return int(self.__slot_sites[slot])
            if slot_key == EMPTY_KEY:
                return NO_SITE
            slot = (slot + 1) & self.__mask

    def get_many(self, keys: np.ndarray) -> np.ndarray:
        """
        Vectorized ``get``: every still-unresolved key advances one slot per round.

        Parameters
        ----------
        keys : np.ndarray
            /24 keys (uint32).

        Returns
        -------
        np.ndarray
            int32 values, NO_SITE where absent.
        """
        keys = np.asarray(keys, dtype=np.uint32)
        result = np.full(len(keys), NO_SITE, dtype=np.int32)
        slots = self.__home_slots(keys)
        pending = np.arange(len(keys))

        while len(pending) > 0:
            current = slots[pending]
            found_keys = self.__slot_keys[current]
            hit = found_keys == keys[pending]
            result[pending[hit]] = self.__slot_sites[current[hit]]

            unresolved = ~hit & (found_keys != EMPTY_KEY)
            pending = pending[unresolved]
            slots[pending] = (slots[pending] + 1) & self.__mask

        return result
