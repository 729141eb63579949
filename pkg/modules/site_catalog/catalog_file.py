"""
Plain-text site catalog file.

One site per line: ``<name> <cidr>[,<cidr>...]``. Text after ``#`` is a comment.
"""

import pathlib
from typing import Optional, Tuple

from . import site_catalog


CATALOG_HEADER = "# flowmon site catalog: <name> <cidr>[,<cidr>...]\n"


def load_catalog_file(
    file_path: pathlib.Path,
) -> Tuple[bool, Optional[site_catalog.SiteCatalog]]:
    """
    Build a catalog from a catalog file.

    Parameters
    ----------
    file_path : pathlib.Path
        Catalog file.

    Returns
    -------
    Tuple[bool, Optional[site_catalog.SiteCatalog]]
        Success status and the catalog, None on any unreadable or invalid line.
    """
    result, catalog = site_catalog.SiteCatalog.create()
    if not result:
        return False, None

    # Get Pylance to stop complaining
    assert catalog is not None

    try:
        with file_path.open("r", encoding="utf8") as file:
            lines = file.readlines()
    except OSError as exception:
        print(f"ERROR: Could not read catalog file: {exception}")
        return False, None

    for line_number, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0].strip()
        if content == "":
            continue

        parts = content.split(None, 1)
        if len(parts) != 2:
            print(f"ERROR: {file_path}:{line_number}: expected '<name> <cidr>[,<cidr>...]'")
            return False, None

        name, cidr_list = parts
        cidrs = [cidr.strip() for cidr in cidr_list.split(",") if cidr.strip() != ""]
        status, _ = catalog.register_site(name, cidrs)
        if status != site_catalog.RegisterStatus.OK:
            print(f"ERROR: {file_path}:{line_number}: {name}: {status.name}")
            return False, None

    return True, catalog


def save_catalog_file(catalog: site_catalog.SiteCatalog, file_path: pathlib.Path) -> bool:
    """
    Write a catalog in catalog file format.

    Parameters
    ----------
    catalog : site_catalog.SiteCatalog
        Catalog to save.
    file_path : pathlib.Path
        Destination, overwritten.

    Returns
    -------
    bool
        True if the file was written.
    """
    lines = [CATALOG_HEADER]
    lines.extend(f"{site.name} {','.join(site.cidrs)}\n" for site in catalog.sites())

    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with file_path.open("w", encoding="utf8") as file:
            file.writelines(lines)
    except OSError as exception:
        print(f"ERROR: Could not write catalog file: {exception}")
        return False

    return True


def append_site_line(site: site_catalog.Site, file_path: pathlib.Path) -> bool:
    """
    Add one site line to the end of a catalog file, leaving existing lines untouched.

    A missing file is created with a header comment.

    Parameters
    ----------
    site : site_catalog.Site
        Newly registered site.
    file_path : pathlib.Path
        Catalog file.

    Returns
    -------
    bool
        True if the line was written.
    """
    line = f"{site.name} {','.join(site.cidrs)}\n"

    try:
        if not file_path.exists():
            file_path.parent.mkdir(parents=True, exist_ok=True)
            line = CATALOG_HEADER + line
        elif file_path.stat().st_size > 0 and not file_path.read_bytes().endswith(b"\n"):
            line = "\n" + line

        with file_path.open("a", encoding="utf8") as file:
            file.write(line)
    except OSError as exception:
        print(f"ERROR: Could not append to catalog file: {exception}")
        return False

    return True
