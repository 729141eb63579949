"""
Per-site consecutive-bad-hour streaks and the two-consecutive-hour warning rule.
"""

from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from ..rate_engine import analysis_result


DEFAULT_THRESHOLD_BPS = 1_000_000
WARNING_STREAK = 2


class SiteStreak(NamedTuple):
    """
    Streak of one site.

    Attributes
    ----------
    consecutive_bad_hours : int
        Evaluated hours in a row whose median was below the threshold.
    last_evaluated_window : Optional[Tuple[int, int]]
        Last window in which the site had forward flows.
    """

    consecutive_bad_hours: int = 0
    last_evaluated_window: Optional[Tuple[int, int]] = None


class SiteWarning(NamedTuple):
    """
    Performance warning for one site in one window.
    """

    site_id: int
    window: Tuple[int, int]
    consecutive_bad_hours: int
    median_bps: float

    def to_dict(self) -> Dict[str, Any]:
        """
        Plain dictionary for reports.
        """
        return {
            "site_id": self.site_id,
            "window": list(self.window),
            "consecutive_bad_hours": self.consecutive_bad_hours,
            "median_bps": self.median_bps,
        }

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "SiteWarning":
        """
        Inverse of ``to_dict``.
        """
        start_ms, end_ms = values["window"]
        return cls(
            int(values["site_id"]),
            (int(start_ms), int(end_ms)),
            int(values["consecutive_bad_hours"]),
            float(values["median_bps"]),
        )


class WarningState:
    """
    Streaks of every site seen so far, keyed by site id.
    """

    def __init__(self, streaks: Optional[Dict[int, SiteStreak]] = None) -> None:
        self.__streaks: Dict[int, SiteStreak] = dict(streaks) if streaks is not None else {}

    def streak(self, site_id: int) -> SiteStreak:
        """
        Streak of a site; a site never evaluated has an empty streak.
        """
        return self.__streaks.get(site_id, SiteStreak())

    def observe(
        self,
        site_id: int,
        window: Tuple[int, int],
        median_bps: float,
        flow_count: int,
        threshold_bps: float,
    ) -> Optional[SiteWarning]:
        """
        Apply one hour of a site to its streak.

        Parameters
        ----------
        site_id : int
            Site evaluated.
        window : Tuple[int, int]
            Window of the hour.
        median_bps : float
            Site median in the window.
        flow_count : int
            Forward flows of the site in the window; 0 leaves the streak unchanged.
        threshold_bps : float
            Medians strictly below this are bad.

        Returns
        -------
        Optional[SiteWarning]
            Warning if the streak has reached two bad hours, otherwise None.
        """
        if flow_count <= 0:
            return None

        previous = self.streak(site_id)
        if median_bps < threshold_bps:
            bad_hours = previous.consecutive_bad_hours + 1
        else:
            bad_hours = 0

        self.__streaks[site_id] = SiteStreak(bad_hours, window)

        if bad_hours < WARNING_STREAK:
            return None

        return SiteWarning(site_id, window, bad_hours, median_bps)

    def copy(self) -> "WarningState":
        """
        Independent copy; the monitor evaluates on a copy and commits it after the report is saved.
        """
        return WarningState(self.__streaks)

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON-compatible form.
        """
        return {
            str(site_id): {
                "consecutive_bad_hours": streak.consecutive_bad_hours,
                "last_evaluated_window": (
                    list(streak.last_evaluated_window)
                    if streak.last_evaluated_window is not None
                    else None
                ),
            }
            for site_id, streak in sorted(self.__streaks.items())
        }

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> Tuple[bool, Optional["WarningState"]]:
        """
        Rebuild from ``to_dict`` output.

        Returns
        -------
        Tuple[bool, Optional[WarningState]]
            Success status and the state; fails on malformed entries.
        """
        streaks = {}
        try:
            for site_id, entry in values.items():
                window = entry["last_evaluated_window"]
                streaks[int(site_id)] = SiteStreak(
                    int(entry["consecutive_bad_hours"]),
                    (int(window[0]), int(window[1])) if window is not None else None,
                )
        except (KeyError, TypeError, ValueError, IndexError) as exception:
            print(f"ERROR: Malformed warning state: {exception}")
            return False, None

        return True, WarningState(streaks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WarningState):
            return NotImplemented

        return self.__streaks == other.__streaks

    def __str__(self) -> str:
        return f"{self.__class__.__name__}: {self.to_dict()}"


def evaluate_warnings(
    result: analysis_result.AnalysisResult,
    state: WarningState,
    threshold_bps: float = DEFAULT_THRESHOLD_BPS,
) -> List[SiteWarning]:
    """
    Update the streak of every site with forward flows in the result and collect warnings.

    Sites absent from the result keep their streak.

    Parameters
    ----------
    result : analysis_result.AnalysisResult
        Analysis of one window.
    state : WarningState
        Streaks, updated in place.
    threshold_bps : float, optional
        Warning threshold, by default 1 Mbps.

    Returns
    -------
    List[SiteWarning]
        Warnings in site id order.
    """
    assert threshold_bps > 0

    warnings = []
    for site_id in sorted(result.site_stats):
        stats = result.site_stats[site_id]
        warning = state.observe(
            site_id, result.window, stats.median_bps, stats.flow_count, threshold_bps
        )
        if warning is not None:
            warnings.append(warning)

    return warnings
