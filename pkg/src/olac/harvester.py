"""Pulls archive holdings into the union catalog.

A provider is registered once (its Identify answer is remembered in
the catalog store), then harvested in full or incrementally. A
harvest's success moment is recorded as the moment the harvest
*started*, so anything modified while pages were being fetched is
picked up again next time; re-fetching a few records beats silently
missing one.

Failures never propagate out of a harvest: the report says failed,
records applied before the failure stay (each one lands atomically),
and last_success stays put so the next incremental run covers the
gap.
"""

from __future__ import annotations

import threading
import time
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional
from urllib.parse import urlencode

from olac.catalog import Catalog, CatalogEntry, CatalogError
from olac.errors import OlacError
from olac.model import InvalidRecord
from olac.protocol import (
    NO_RECORDS_MATCH,
    OaiError,
    ProtocolError,
    parse_identify,
    parse_list_records,
)
from olac.repository import EPOCH, RepositoryInfo, format_datestamp, utc_now

DEFAULT_RETRIES = 3
DEFAULT_BACKOFF = 0.5
DEFAULT_PARALLELISM = 4
DEFAULT_TIMEOUT = 30.0

MODES = ("full", "incremental")

_STATE_KEY = "providers"


class HarvesterError(OlacError):
    pass


class Unreachable(HarvesterError):
    """The endpoint did not answer at the transport level."""


class BadIdentify(HarvesterError):
    """The endpoint answered, but not with a usable Identify."""


class DuplicateArchive(HarvesterError):
    def __init__(self, archive_id: str):
        super().__init__(f"archive {archive_id!r} is already registered")
        self.archive_id = archive_id


class UnknownProvider(HarvesterError):
    def __init__(self, provider_id: str):
        super().__init__(f"no registered provider {provider_id!r}")
        self.provider_id = provider_id


class NoProviders(HarvesterError):
    def __init__(self):
        super().__init__("no providers are registered")


class PartialPageFailure(HarvesterError):
    """A page kept failing after every allowed retry."""


def http_fetch(url: str, timeout: float = DEFAULT_TIMEOUT) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as response:
            return response.read()
    except OSError as exc:  # covers URLError, HTTPError, socket timeouts
        raise Unreachable(f"{url}: {exc}") from exc


@dataclass(frozen=True)
class HarvestState:
    """What we know about one registered provider."""

    provider: RepositoryInfo
    last_success: Optional[str] = None
    items_held: int = 0
    last_error: Optional[str] = None


@dataclass(frozen=True)
class HarvestReport:
    provider_id: str
    started_at: str
    finished_at: str
    added: int = 0
    updated: int = 0
    deleted: int = 0
    pages: int = 0
    outcome: str = "complete"
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.outcome != "complete"


def provider_states(catalog: Catalog) -> list[HarvestState]:
    """Registered providers with their harvest state, in registration
    order. Readable without a Harvester (the catalog API serves it)."""
    counts = catalog.provider_counts()
    states = []
    for row in catalog.read_meta(_STATE_KEY, []):
        info = RepositoryInfo(archive_id=row["archive_id"],
                              name=row.get("name", ""),
                              base_url=row["base_url"],
                              earliest_datestamp=row.get("earliest", EPOCH))
        states.append(HarvestState(
            provider=info, last_success=row.get("last_success"),
            items_held=counts.get(row["archive_id"], 0),
            last_error=row.get("last_error")))
    return states


def _identify_url(base_url: str) -> str:
    separator = "&" if "?" in base_url else "?"
    return base_url + separator + "verb=Identify"


def _page_url(base_url: str, params: dict[str, str]) -> str:
    separator = "&" if "?" in base_url else "?"
    return base_url + separator + urlencode(params)


class Harvester:
    """Registry of providers plus the machinery to drain them.

    ``fetch`` is any callable url -> bytes; tests inject flaky ones.
    Provider states live in the catalog's metadata channel, so a
    restarted process resumes incremental harvesting where it left
    off.
    """

    def __init__(self, catalog: Catalog,
                 fetch: Optional[Callable[[str], bytes]] = None,
                 clock: Callable = utc_now,
                 retries: int = DEFAULT_RETRIES,
                 backoff: float = DEFAULT_BACKOFF,
                 parallelism: int = DEFAULT_PARALLELISM,
                 timeout: float = DEFAULT_TIMEOUT,
                 sleep: Callable[[float], None] = time.sleep):
        if retries < 1:
            raise ValueError("retries must be at least 1")
        self.catalog = catalog
        self.fetch = fetch or (lambda url: http_fetch(url, timeout=timeout))
        self.clock = clock
        self.retries = retries
        self.backoff = backoff
        self.parallelism = max(1, parallelism)
        self.sleep = sleep
        # serializes read-modify-write cycles on the provider table
        self._lock = threading.Lock()

    # -- provider registry --------------------------------------------

    def _rows(self) -> list[dict]:
        return list(self.catalog.read_meta(_STATE_KEY, []))

    def _row_for(self, provider_id: str) -> dict:
        for row in self._rows():
            if row["archive_id"] == provider_id:
                return row
        raise UnknownProvider(provider_id)

    def _update_row(self, provider_id: str, **changes) -> None:
        with self._lock:
            rows = self._rows()
            for row in rows:
                if row["archive_id"] == provider_id:
                    row.update(changes)
                    break
            else:
                raise UnknownProvider(provider_id)
            self.catalog.write_meta(_STATE_KEY, rows)

    def register_provider(self, base_url: str) -> RepositoryInfo:
        """Identify the endpoint and remember it for harvesting."""
        data = self.fetch(_identify_url(base_url))
        try:
            identity = parse_identify(data)
        except (ProtocolError, OaiError) as exc:
            raise BadIdentify(f"{base_url}: {exc}") from exc
        with self._lock:
            rows = self._rows()
            if any(row["archive_id"] == identity.archive_id for row in rows):
                raise DuplicateArchive(identity.archive_id)
            rows.append({"archive_id": identity.archive_id,
                         "name": identity.name,
                         "base_url": base_url,
                         "earliest": identity.earliest_datestamp,
                         "last_success": None,
                         "last_error": None})
            self.catalog.write_meta(_STATE_KEY, rows)
        return RepositoryInfo(archive_id=identity.archive_id,
                              name=identity.name, base_url=base_url,
                              earliest_datestamp=identity.earliest_datestamp)

    def provider_ids(self) -> list[str]:
        """Registered archive ids, oldest registration first."""
        return [row["archive_id"] for row in self._rows()]

    def states(self) -> list[HarvestState]:
        return provider_states(self.catalog)

    # -- harvesting ------------------------------------------------------

    def _fetch_page(self, url: str) -> bytes:
        failure: Optional[Unreachable] = None
        for attempt in range(self.retries):
            try:
                return self.fetch(url)
            except Unreachable as exc:
                failure = exc
                if attempt + 1 < self.retries:
                    self.sleep(self.backoff)
        raise PartialPageFailure(
            f"page failed after {self.retries} attempts: {failure}")

    def harvest(self, provider_id: str, mode: str = "full") -> HarvestReport:
        """Drain one provider. Never raises for provider-side trouble;
        the report carries the outcome."""
        if mode not in MODES:
            raise ValueError(f"mode {mode!r} is not one of {', '.join(MODES)}")
        row = self._row_for(provider_id)
        started_at = format_datestamp(self.clock())
        params = {"verb": "ListRecords", "metadataPrefix": "olac"}
        if mode == "incremental" and row.get("last_success"):
            params["from"] = row["last_success"]
        url = _page_url(row["base_url"], params)
        added = updated = deleted = pages = 0
        try:
            while True:
                data = self._fetch_page(url)
                try:
                    records, token = parse_list_records(data)
                except OaiError as exc:
                    if exc.code == NO_RECORDS_MATCH:
                        pages += 1
                        break
                    raise ProtocolError(
                        f"provider answered {exc.code}: {exc.oai_message}"
                    ) from exc
                pages += 1
                for item in records:
                    if item.deleted:
                        if self.catalog.delete(item.identifier):
                            deleted += 1
                        continue
                    entry = CatalogEntry(item.identifier, provider_id,
                                         item.datestamp, item.record)
                    if self.catalog.upsert(entry) == "added":
                        added += 1
                    else:
                        updated += 1
                if token is None:
                    break
                url = _page_url(row["base_url"],
                                {"verb": "ListRecords",
                                 "resumptionToken": token})
        except (PartialPageFailure, ProtocolError, InvalidRecord,
                CatalogError) as exc:
            self._update_row(provider_id, last_error=str(exc))
            return HarvestReport(provider_id, started_at,
                                 format_datestamp(self.clock()),
                                 added, updated, deleted, pages,
                                 outcome="failed", error=str(exc))
        self._update_row(provider_id, last_success=started_at,
                         last_error=None)
        return HarvestReport(provider_id, started_at,
                             format_datestamp(self.clock()),
                             added, updated, deleted, pages)

    def harvest_all(self, mode: str = "full") -> list[HarvestReport]:
        """Harvest every provider; failures stay per-provider. Reports
        come back in registration order."""
        ids = self.provider_ids()
        if not ids:
            raise NoProviders()
        workers = min(self.parallelism, len(ids))
        if workers == 1:
            return [self.harvest(provider_id, mode) for provider_id in ids]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda pid: self.harvest(pid, mode), ids))
