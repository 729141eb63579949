"""
Catalog file tests.
"""

import pathlib

from modules.site_catalog import catalog_file
from modules.site_catalog import site_catalog


def test_load_in_file_order(tmp_path: pathlib.Path) -> None:
    """
    Site ids follow line order; comments and blank lines are skipped.
    """
    file_path = pathlib.Path(tmp_path, "sites.txt")
    file_path.write_text(
        "# comment\n\nSiteB 203.0.113.0/24  # trailing\nSiteA 192.0.2.0/24, 10.1.0.0/23\n",
        encoding="utf8",
    )

    result, catalog = catalog_file.load_catalog_file(file_path)

    assert result
    assert catalog is not None
    assert [site.name for site in catalog.sites()] == ["SiteB", "SiteA"]
    assert catalog.entry_count() == 4
    assert catalog.sites()[1].cidrs == ("192.0.2.0/24", "10.1.0.0/23")


def test_save_then_load(tmp_path: pathlib.Path) -> None:
    """
    A saved catalog loads with the same sites and ids.
    """
    _, catalog = site_catalog.SiteCatalog.create()
    assert catalog is not None
    catalog.register_site("SiteA", ["192.0.2.0/24"])
    catalog.register_site("SiteC", ["198.18.0.0/22", "198.19.4.0/24"])
    file_path = pathlib.Path(tmp_path, "nested", "sites.txt")

    assert catalog_file.save_catalog_file(catalog, file_path)
    result, loaded = catalog_file.load_catalog_file(file_path)

    assert result
    assert loaded is not None
    assert loaded.sites() == catalog.sites()
    assert loaded.entry_keys() == catalog.entry_keys()


def test_repository_example_loads() -> None:
    """
    The example catalog shipped at the repository root is valid.
    """
    result, catalog = catalog_file.load_catalog_file(pathlib.Path("sites.txt"))

    assert result
    assert catalog is not None
    assert catalog.site_id("SiteC") == 2


def test_line_without_cidr(tmp_path: pathlib.Path) -> None:
    """
    Every line needs a name and a CIDR list.
    """
    file_path = pathlib.Path(tmp_path, "sites.txt")
    file_path.write_text("SiteA\n", encoding="utf8")

    result, catalog = catalog_file.load_catalog_file(file_path)

    assert not result
    assert catalog is None


def test_overlapping_lines(tmp_path: pathlib.Path) -> None:
    """
    A line overlapping an earlier one fails the load.
    """
    file_path = pathlib.Path(tmp_path, "sites.txt")
    file_path.write_text("SiteA 10.0.0.0/16\nSiteB 10.0.5.0/24\n", encoding="utf8")

    result, _ = catalog_file.load_catalog_file(file_path)

    assert not result


def test_missing_file(tmp_path: pathlib.Path) -> None:
    """
    Missing file fails.
    """
    result, _ = catalog_file.load_catalog_file(pathlib.Path(tmp_path, "absent.txt"))

    assert not result


def test_append_keeps_existing_text(tmp_path: pathlib.Path) -> None:
    """
    Appending adds one line after the last one, even when the file lacks a final newline.
    """
    file_path = pathlib.Path(tmp_path, "sites.txt")
    original = "# lab sites\nSiteA 192.0.2.0/24  # rack 4"
    file_path.write_text(original, encoding="utf8")
    site = site_catalog.Site(1, "SiteB", ("203.0.113.0/24", "10.1.0.0/23"))

    assert catalog_file.append_site_line(site, file_path)

    assert file_path.read_text(encoding="utf8") == (
        original + "\nSiteB 203.0.113.0/24,10.1.0.0/23\n"
    )
    result, catalog = catalog_file.load_catalog_file(file_path)
    assert result
    assert catalog is not None
    assert catalog.site_id("SiteB") == 1


def test_append_creates_file(tmp_path: pathlib.Path) -> None:
    """
    A missing catalog starts with the header comment.
    """
    file_path = pathlib.Path(tmp_path, "new", "sites.txt")

    site = site_catalog.Site(0, "SiteA", ("192.0.2.0/24",))

    assert catalog_file.append_site_line(site, file_path)

    assert file_path.read_text(encoding="utf8") == (
        catalog_file.CATALOG_HEADER + "SiteA 192.0.2.0/24\n"
    )
