"""
Per-exporter flow_sequence tracking for loss estimation.
"""

from typing import Dict, Hashable, Tuple

from ..netflow import netflow_codec


EngineKey = Tuple[Hashable, int]  # (exporter address, engine_id)


class SequenceTracker:
    """
    Expects each exporter engine's next flow_sequence to be the previous one plus its count.
    """

    def __init__(self) -> None:
        self.__expected: Dict[EngineKey, int] = {}

    def track(self, key: EngineKey, header: netflow_codec.ExportHeader) -> int:
        """
        Record a header and estimate the records lost since the previous one.

        Parameters
        ----------
        key : EngineKey
            Exporter address and engine id.
        header : netflow_codec.ExportHeader
            Header just received.

        Returns
        -------
        int
            Records skipped by the sequence, modulo 2^32; 0 for the first header of an engine and
            for late (reordered or duplicate) headers, which leave the expectation unchanged.
        """
        expected = self.__expected.get(key)
        next_expected = (header.flow_sequence + header.count) & netflow_codec.UINT32_MASK
        if expected is None:
            self.__expected[key] = next_expected
            return 0

        gap = (header.flow_sequence - expected) & netflow_codec.UINT32_MASK
        if gap > netflow_codec.HALF_RANGE:
            return 0

        self.__expected[key] = next_expected
        return gap

    def engines(self) -> int:
        """
        Number of engines seen.
        """
        return len(self.__expected)
