"""Desk-scale toolkit for language-resource metadata.

Qualified metadata records with controlled vocabularies, an XML
interchange format, an HTTP publishing protocol with incremental
harvesting, and a searchable union catalog over many providers.

The submodules are the real API surface; this package root re-exports
the handful of names most sessions start from.
"""

from olac.catalog import Catalog, CatalogEntry, Clause, Query
from olac.errors import OlacError
from olac.harvester import Harvester
from olac.model import (
    MetadataElement,
    MetadataRecord,
    render_view,
    validate_record,
)
from olac.repository import Repository
from olac.vocab import Registry, default_registry
from olac.xmlio import parse_record, serialize_record

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CatalogEntry",
    "Clause",
    "Harvester",
    "MetadataElement",
    "MetadataRecord",
    "OlacError",
    "Query",
    "Registry",
    "Repository",
    "default_registry",
    "parse_record",
    "render_view",
    "serialize_record",
    "validate_record",
    "__version__",
]
