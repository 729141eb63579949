"""
Site catalog module exports.
"""

from .site_catalog import RegisterStatus, Site, SiteCatalog, expand_cidr, subnet_key
from .catalog_file import append_site_line, load_catalog_file, save_catalog_file

__all__ = [
    "RegisterStatus",
    "Site",
    "SiteCatalog",
    "expand_cidr",
    "subnet_key",
    "append_site_line",
    "load_catalog_file",
    "save_catalog_file",
]
