"""
Synthetic scenario tests.
"""

import pathlib

import numpy as np
import pytest

from modules.flow_store import flow_store
from modules.rate_engine import filter_params
from modules.rate_engine import rate_engine
from modules.toolkit import scenario


SCENARIO_PATH = pathlib.Path("scenarios", "two_hour_dip.yaml")
OVERFULL_MIX = scenario.SiteSpec("A", "10.0.0.0/24", ack_fraction=0.6, admin_fraction=0.6)


def small_spec(**fields: object) -> scenario.ScenarioSpec:
    """
    Two-site, two-hour scenario with optional field overrides.
    """
    spec = scenario.ScenarioSpec(
        sites=[
            scenario.SiteSpec(
                "SiteA", "192.0.2.0/24", flows_per_hour=300, ack_fraction=0.2, admin_fraction=0.1
            ),
            scenario.SiteSpec(
                "SiteB",
                "203.0.113.0/24",
                flows_per_hour=100,
                rate=scenario.RateSpec("fixed", 2e6),
                dips={2: scenario.RateSpec("fixed", 3e5)},
            ),
        ],
        duration_hours=2,
        seed=5,
    )
    return spec._replace(**fields)


class TestValidate:
    """
    Scenario validation.
    """

    def test_valid(self) -> None:
        """
        The small scenario is valid.
        """
        assert scenario.validate_scenario(small_spec()) == (True, "")

    @pytest.mark.parametrize(
        "fields",
        [
            {"duration_hours": 0},
            {"start_ms": scenario.DEFAULT_START_MS + 1},
            {"sites": []},
            {"sites": [scenario.SiteSpec("Peer", "198.51.100.0/25")]},
            {
                "sites": [
                    scenario.SiteSpec("A", "10.0.0.0/24"),
                    scenario.SiteSpec("B", "10.0.0.0/23"),
                ]
            },
            {"sites": [scenario.SiteSpec("A", "10.0.0.0/24", hosts=0)]},
            {"sites": [scenario.SiteSpec("A", "10.0.0.0/24", rate=scenario.RateSpec("pareto"))]},
            {"sites": [scenario.SiteSpec("A", "10.0.0.0/24", rate=scenario.RateSpec(bps=10.0))]},
            {"sites": [OVERFULL_MIX]},
            {"sites": [scenario.SiteSpec("A", "10.0.0.0/24", admin_fraction=-0.1)]},
        ],
    )
    def test_invalid(self, fields: dict) -> None:
        """
        Out-of-range values, overlaps and the peer network are rejected.
        """
        result, message = scenario.validate_scenario(small_spec(**fields))

        assert not result
        assert message != ""


class TestLoad:
    """
    YAML scenarios.
    """

    def test_repository_scenario(self) -> None:
        """
        The shipped scenario loads with its dips.
        """
        result, spec = scenario.load_scenario(SCENARIO_PATH)

        assert result
        assert spec is not None
        assert spec.duration_hours == 4
        assert [site.name for site in spec.sites] == ["SiteA", "SiteB", "SiteC"]
        site_b = spec.sites[1]
        assert site_b.rate_in_hour(1) == scenario.RateSpec("lognormal", 1e7, 0.8)
        assert site_b.rate_in_hour(2) == scenario.RateSpec("fixed", 5e5, 1.0)

    def test_missing_name(self) -> None:
        """
        Every site needs a name and a CIDR.
        """
        result, spec = scenario.scenario_from_dict({"sites": [{"cidr": "10.0.0.0/24"}]})

        assert not result
        assert spec is None

    def test_rate_not_mapping(self) -> None:
        """
        Rates are mappings.
        """
        result, _ = scenario.scenario_from_dict(
            {"sites": [{"name": "A", "cidr": "10.0.0.0/24", "rate": 5}]}
        )

        assert not result


class TestGenerate:
    """
    Row generation.
    """

    def test_deterministic(self) -> None:
        """
        Same spec, same rows; another seed, other rows.
        """
        first = scenario.generate(small_spec())

        assert np.array_equal(first, scenario.generate(small_spec()))
        assert not np.array_equal(first, scenario.generate(small_spec(seed=6)))

    def test_counts_and_order(self) -> None:
        """
        Every site's flows for every hour, ordered by end time, inside the scenario.
        """
        rows = scenario.generate(small_spec())

        assert len(rows) == 2 * (300 + 100)
        assert (np.diff(rows["end_ms"]) >= 0).all()
        assert rows["end_ms"].min() >= scenario.DEFAULT_START_MS
        assert rows["end_ms"].max() < scenario.DEFAULT_START_MS + 2 * scenario.HOUR_MS
        assert (rows["start_ms"] <= rows["end_ms"]).all()

    def test_traffic_mix(self) -> None:
        """
        ACK and administrative fractions are realized exactly; the rest is forward.
        """
        spec = small_spec(duration_hours=1)
        _, catalog = scenario.scenario_catalog(spec)
        assert catalog is not None
        rows = scenario.generate(spec)

        result = rate_engine.aggregate(
            flow_store.FlowView.from_rows(rows, spec.start_ms, spec.start_ms + scenario.HOUR_MS),
            catalog,
            filter_params.FilterParams(),
        )

        assert result.tallies == {
            rate_engine.FlowClass.FORWARD: 210 + 100,
            rate_engine.FlowClass.PURE_ACK: 60,
            rate_engine.FlowClass.ADMINISTRATIVE: 30,
            rate_engine.FlowClass.UNMATCHED: 0,
        }

    def test_forward_rates_at_least_drawn(self) -> None:
        """
        A fixed-rate site's flows all land in the bucket of that rate.
        """
        spec = small_spec(duration_hours=1)
        _, catalog = scenario.scenario_catalog(spec)
        assert catalog is not None
        rows = scenario.generate(spec)

        result = rate_engine.aggregate(
            flow_store.FlowView.from_rows(rows, spec.start_ms, spec.start_ms + scenario.HOUR_MS),
            catalog,
            filter_params.FilterParams(),
        )

        stats = result.site_stats[1]
        assert stats.min_bps >= 2e6
        assert stats.max_bps < 2e6 + 10_000
        assert stats.median_bps == 2_005_000.0

    def test_dip_hour(self) -> None:
        """
        The dip replaces the site's rate in its hour only.
        """
        spec = small_spec()
        _, catalog = scenario.scenario_catalog(spec)
        assert catalog is not None
        rows = scenario.generate(spec)

        second_hour = flow_store.FlowView.from_rows(
            rows, spec.start_ms + scenario.HOUR_MS, spec.start_ms + 2 * scenario.HOUR_MS
        )
        result = rate_engine.aggregate(second_hour, catalog, filter_params.FilterParams())

        assert result.site_stats[1].median_bps == 305_000.0

    def test_uptime_fields_consistent(self) -> None:
        """
        Uptime stamps differ by exactly each flow's duration.
        """
        rows = scenario.generate(small_spec())

        durations = (rows["last"].astype(np.int64) - rows["first"].astype(np.int64)) % 2**32
        assert np.array_equal(durations, rows["end_ms"] - rows["start_ms"])
