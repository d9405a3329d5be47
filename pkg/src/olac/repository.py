"""Provider-side item store.

An archive holds items: an identifier like ``oai:ldc:LDC94T5``, a
last-modified datestamp, and one metadata record. Deleted items stay
behind as tombstones so harvesters learn about the deletion. The store
can live purely in memory (tests) or under a directory with one XML
file per record plus a TSV index (operation).

Datestamps are UTC strings ``YYYY-MM-DDTHH:MM:SSZ``; zero-padded UTC
sorts correctly as text, so they are stored and compared as strings.
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import quote

from olac import model, xmlio
from olac.errors import OlacError
from olac.model import MetadataRecord

DATESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"
# Earliest-datestamp sentinel reported by an empty repository.
EPOCH = "1970-01-01T00:00:00Z"

IDENTIFIER_RE = re.compile(r"^oai:([a-z0-9]+):([^\s:]+)$")
ARCHIVE_ID_RE = re.compile(r"^[a-z0-9]+$")


class RepositoryError(OlacError):
    pass


class BadIdentifier(RepositoryError):
    def __init__(self, identifier: str, why: str = ""):
        detail = f" ({why})" if why else ""
        super().__init__(
            f"identifier {identifier!r} is not of the form "
            f"oai:<archive>:<local>{detail}")
        self.identifier = identifier


class ForeignIdentifier(RepositoryError):
    def __init__(self, identifier: str, archive_id: str):
        super().__init__(f"identifier {identifier!r} does not belong to "
                         f"archive {archive_id!r}")


class UnknownItem(RepositoryError):
    def __init__(self, identifier: str):
        super().__init__(f"no item {identifier!r} in this repository")
        self.identifier = identifier


class BadDatestamp(RepositoryError):
    def __init__(self, value: str):
        super().__init__(f"datestamp {value!r} is not of the form "
                         f"YYYY-MM-DDTHH:MM:SSZ")
        self.value = value


class DatestampRegression(RepositoryError):
    def __init__(self, identifier: str, old: str, new: str):
        super().__init__(f"datestamp for {identifier!r} would move backward "
                         f"({old} -> {new})")


class RepositoryStoreError(RepositoryError):
    """The on-disk store is unreadable or inconsistent."""


def format_datestamp(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).strftime(DATESTAMP_FORMAT)


def parse_datestamp(value: str) -> datetime:
    try:
        return datetime.strptime(value, DATESTAMP_FORMAT).replace(tzinfo=timezone.utc)
    except ValueError:
        raise BadDatestamp(value) from None


def check_datestamp(value: str) -> str:
    parse_datestamp(value)
    return value


def split_identifier(identifier: str) -> tuple[str, str]:
    match = IDENTIFIER_RE.match(identifier)
    if not match:
        raise BadIdentifier(identifier)
    return match.group(1), match.group(2)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class ArchiveItem:
    """One holding: identifier, last change moment, record. Tombstones
    keep identifier and datestamp but no record."""

    identifier: str
    datestamp: str
    record: Optional[MetadataRecord] = None
    deleted: bool = False


@dataclass(frozen=True)
class RepositoryInfo:
    archive_id: str
    name: str
    base_url: str = ""
    earliest_datestamp: str = EPOCH


class Repository:
    """Mutable, thread-safe item store for one archive.

    ``version`` bumps on every mutation; resumption tokens embed it so
    paging never silently spans a mutation. When ``directory`` is set,
    every mutation is written through before it returns.
    """

    def __init__(self, archive_id: str, name: str = "",
                 directory: Optional[Path] = None,
                 clock: Callable[[], datetime] = utc_now):
        if not ARCHIVE_ID_RE.match(archive_id):
            raise RepositoryError(
                f"archive id {archive_id!r} must be lowercase alphanumeric")
        self.archive_id = archive_id
        self.name = name or archive_id
        self.clock = clock
        self._directory = Path(directory) if directory else None
        self._items: dict[str, ArchiveItem] = {}
        self._version = 0
        self._lock = threading.RLock()
        if self._directory:
            self._directory.mkdir(parents=True, exist_ok=True)
            (self._directory / "records").mkdir(exist_ok=True)

    # -- reading ----------------------------------------------------

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def info(self, base_url: str = "") -> RepositoryInfo:
        return RepositoryInfo(self.archive_id, self.name, base_url,
                              self.earliest_datestamp())

    def earliest_datestamp(self) -> str:
        with self._lock:
            if not self._items:
                return EPOCH
            return min(item.datestamp for item in self._items.values())

    def get(self, identifier: str) -> ArchiveItem:
        with self._lock:
            try:
                return self._items[identifier]
            except KeyError:
                raise UnknownItem(identifier) from None

    def __contains__(self, identifier: str) -> bool:
        with self._lock:
            return identifier in self._items

    def items(self) -> list[ArchiveItem]:
        with self._lock:
            return list(self._items.values())

    def count_live(self) -> int:
        with self._lock:
            return sum(1 for item in self._items.values() if not item.deleted)

    def select(self, from_: Optional[str] = None,
               until: Optional[str] = None) -> list[ArchiveItem]:
        """Items with from <= datestamp <= until, both bounds
        inclusive, sorted by (datestamp, identifier)."""
        with self._lock:
            picked = [item for item in self._items.values()
                      if (from_ is None or item.datestamp >= from_)
                      and (until is None or item.datestamp <= until)]
        return sorted(picked, key=lambda item: (item.datestamp, item.identifier))

    # -- writing ----------------------------------------------------

    def _own_identifier(self, identifier: str) -> None:
        archive, _ = split_identifier(identifier)
        if archive != self.archive_id:
            raise ForeignIdentifier(identifier, self.archive_id)

    def _next_datestamp(self, identifier: str, datestamp: Optional[str]) -> str:
        if datestamp is None:
            datestamp = format_datestamp(self.clock())
        else:
            check_datestamp(datestamp)
        old = self._items.get(identifier)
        if old is not None and datestamp < old.datestamp:
            raise DatestampRegression(identifier, old.datestamp, datestamp)
        return datestamp

    def put(self, identifier: str, record: MetadataRecord,
            datestamp: Optional[str] = None, registry=None) -> ArchiveItem:
        """Add or update an item. The record must validate cleanly."""
        self._own_identifier(identifier)
        model.require_valid(record, registry)
        with self._lock:
            stamp = self._next_datestamp(identifier, datestamp)
            item = ArchiveItem(identifier, stamp, record, deleted=False)
            self._items[identifier] = item
            self._version += 1
            self._persist_record(item)
            self._persist_index()
        return item

    def delete(self, identifier: str, datestamp: Optional[str] = None) -> ArchiveItem:
        """Replace an item with a tombstone."""
        with self._lock:
            if identifier not in self._items:
                raise UnknownItem(identifier)
            stamp = self._next_datestamp(identifier, datestamp)
            item = ArchiveItem(identifier, stamp, record=None, deleted=True)
            self._items[identifier] = item
            self._version += 1
            self._remove_record_file(identifier)
            self._persist_index()
        return item

    # -- persistence ------------------------------------------------

    def _record_path(self, identifier: str) -> Path:
        return self._directory / "records" / (quote(identifier, safe="") + ".xml")

    def _persist_record(self, item: ArchiveItem) -> None:
        if not self._directory:
            return
        path = self._record_path(item.identifier)
        _atomic_write(path, xmlio.serialize_record(item.record))

    def _remove_record_file(self, identifier: str) -> None:
        if not self._directory:
            return
        path = self._record_path(identifier)
        if path.exists():
            path.unlink()

    def _persist_index(self) -> None:
        if not self._directory:
            return
        lines = [f"archive_id={self.archive_id}\n", f"name={self.name}\n"]
        _atomic_write(self._directory / "repository.conf",
                      "".join(lines).encode("utf-8"))
        rows = []
        for item in sorted(self._items.values(), key=lambda i: i.identifier):
            rows.append("\t".join([item.identifier, item.datestamp,
                                   "1" if item.deleted else "0"]) + "\n")
        _atomic_write(self._directory / "items.tsv", "".join(rows).encode("utf-8"))


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def load_repository(directory, clock: Callable[[], datetime] = utc_now) -> Repository:
    """Rebuild a repository from its directory."""
    directory = Path(directory)
    conf_path = directory / "repository.conf"
    if not conf_path.exists():
        raise RepositoryStoreError(f"{conf_path} is missing")
    conf = {}
    for line in conf_path.read_text(encoding="utf-8").splitlines():
        if line.strip() and "=" in line:
            key, value = line.split("=", 1)
            conf[key.strip()] = value.strip()
    if "archive_id" not in conf:
        raise RepositoryStoreError(f"{conf_path} lacks archive_id")
    repo = Repository(conf["archive_id"], conf.get("name", ""),
                      directory=directory, clock=clock)
    index_path = directory / "items.tsv"
    if not index_path.exists():
        return repo
    for lineno, line in enumerate(index_path.read_text(encoding="utf-8").splitlines(),
                                  start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise RepositoryStoreError(f"{index_path}:{lineno}: expected 3 fields")
        identifier, datestamp, deleted = fields
        check_datestamp(datestamp)
        if deleted == "1":
            item = ArchiveItem(identifier, datestamp, None, deleted=True)
        else:
            record_path = repo._record_path(identifier)
            if not record_path.exists():
                raise RepositoryStoreError(f"{record_path} is missing")
            outcome = xmlio.parse_record(record_path.read_bytes())
            if not outcome.ok:
                raise RepositoryStoreError(
                    f"{record_path}: {outcome.diagnostics[0].message}")
            item = ArchiveItem(identifier, datestamp, outcome.record)
        with repo._lock:
            repo._items[identifier] = item
    return repo
