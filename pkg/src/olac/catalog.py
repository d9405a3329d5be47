"""Union catalog: the harvested holdings of many archives, searchable
in one place.

Search is conjunctive clauses over elements: code clauses resolve
through the vocabulary registry and match exact codes or family
prefixes ("Unix" finds "Unix/Solaris"); text clauses are
case-insensitive substring scans; "any" takes either. Language codes
are indexed under their canonical ISO form, so either member of a
dual pair finds the same entries. Joins pair entries that share a
resolved code on a chosen element.

Persistence is an append-only JSONL log next to a compacted snapshot;
replaying snapshot+log rebuilds the exact state, and a torn final log
line (crash mid-append) is tolerated.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from olac import model
from olac.errors import OlacError
from olac.model import (
    MetadataElement,
    MetadataRecord,
    UnknownElement,
    descriptor_for,
    effective_lang,
)
from olac.repository import check_datestamp, split_identifier
from olac.vocab import LANGUAGE_VOCABULARY, Registry, default_registry

CLAUSE_KINDS = ("code", "text", "any")
WILDCARD_ELEMENT = "any"


class CatalogError(OlacError):
    pass


class NotFound(CatalogError):
    def __init__(self, identifier: str):
        super().__init__(f"no catalog entry {identifier!r}")
        self.identifier = identifier


class IdentifierMismatch(CatalogError):
    def __init__(self, identifier: str, provider_id: str):
        super().__init__(f"identifier {identifier!r} does not belong to "
                         f"provider {provider_id!r}")


class NotCodedElement(CatalogError):
    def __init__(self, name: str, what: str):
        super().__init__(f"{name} admits no code attribute; {what} needs "
                         "a coded element")
        self.name = name


class BadQuery(CatalogError):
    pass


class CatalogStoreError(CatalogError):
    """The on-disk catalog store is unreadable."""


@dataclass(frozen=True)
class Clause:
    """One search condition: element (or "any"), match kind, value."""

    element: str
    kind: str
    value: str

    def __post_init__(self):
        if self.kind not in CLAUSE_KINDS:
            raise BadQuery(f"clause kind {self.kind!r} is not one of "
                           f"{', '.join(CLAUSE_KINDS)}")
        if not self.value:
            raise BadQuery("clause value is empty")
        if self.element.lower() == WILDCARD_ELEMENT:
            object.__setattr__(self, "element", WILDCARD_ELEMENT)
        else:
            # Raises UnknownElement for names outside the table.
            object.__setattr__(self, "element",
                               model.canonical_element_name(self.element))


@dataclass(frozen=True)
class Query:
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if not self.clauses:
            raise BadQuery("a query needs at least one clause")


def clause_from_text(text: str) -> Clause:
    """Parse the element:kind:value form used by the CLI and the API.
    Only the first two colons split; values keep theirs."""
    parts = text.split(":", 2)
    if len(parts) != 3:
        raise BadQuery(f"clause {text!r} is not element:kind:value")
    element, kind, value = (part.strip() for part in parts)
    return Clause(element, kind, value)


@dataclass(frozen=True)
class CatalogEntry:
    identifier: str
    provider_id: str
    datestamp: str
    record: MetadataRecord


@dataclass(frozen=True)
class RenderedElement:
    """One display row: labels resolved, raw code kept for hover."""

    name: str
    refine: Optional[str]
    refine_label: Optional[str]
    code: Optional[str]
    code_label: Optional[str]
    content: str
    lang: str


@dataclass(frozen=True)
class RenderedEntry:
    identifier: str
    provider_id: str
    datestamp: str
    alternatives: tuple[str, ...]
    elements: tuple[RenderedElement, ...]


def _record_to_json(record: MetadataRecord) -> dict:
    return {
        "alternatives": list(record.alternatives),
        "elements": [
            {"name": e.name, "refine": e.refine, "code": e.code,
             "lang": e.lang, "content": e.content}
            for e in record.elements
        ],
    }


def _record_from_json(data: dict) -> MetadataRecord:
    return MetadataRecord(
        alternatives=tuple(data["alternatives"]),
        elements=tuple(
            MetadataElement(name=e["name"], refine=e.get("refine"),
                            code=e.get("code"), lang=e.get("lang"),
                            content=e.get("content", ""))
            for e in data["elements"]),
    )


class Catalog:
    """Searchable store of harvested entries.

    One lock serializes everything; queries see consistent snapshots
    and desk-scale corpora keep contention irrelevant.
    """

    def __init__(self, directory: Optional[Path] = None,
                 registry: Optional[Registry] = None):
        self.registry = registry or default_registry()
        self._entries: dict[str, CatalogEntry] = {}
        # element name -> canonical code -> identifiers
        self._index: dict[str, dict[str, set[str]]] = {}
        # identifier -> element name -> canonical codes (for joins)
        self._codes: dict[str, dict[str, frozenset[str]]] = {}
        self._meta: dict[str, object] = {}
        self._lock = threading.RLock()
        self._directory = Path(directory) if directory else None
        self._log_handle = None
        if self._directory:
            self._directory.mkdir(parents=True, exist_ok=True)
            self._load()
            self._log_handle = open(self._log_path, "a", encoding="utf-8")

    # -- code canonicalization ---------------------------------------

    def _canonical_code(self, vocabulary_id: str, code: str) -> str:
        if vocabulary_id == LANGUAGE_VOCABULARY:
            return self.registry.canonical_language_code(code)
        return self.registry.resolve(vocabulary_id, code).code

    def _codes_of(self, record: MetadataRecord) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {}
        for element in record.elements:
            if element.code is None:
                continue
            vocabulary_id = descriptor_for(element.name).code_vocabulary
            if vocabulary_id is None:
                continue
            canonical = self._canonical_code(vocabulary_id, element.code)
            out.setdefault(element.name, set()).add(canonical)
        return {name: frozenset(codes) for name, codes in out.items()}

    # -- mutation -----------------------------------------------------

    def upsert(self, entry: CatalogEntry) -> str:
        """Insert or replace by identifier. Returns "added" or
        "updated"."""
        archive, _ = split_identifier(entry.identifier)
        if archive != entry.provider_id:
            raise IdentifierMismatch(entry.identifier, entry.provider_id)
        check_datestamp(entry.datestamp)
        model.require_valid(entry.record, self.registry)
        codes = self._codes_of(entry.record)
        with self._lock:
            outcome = "updated" if entry.identifier in self._entries else "added"
            self._unindex(entry.identifier)
            self._entries[entry.identifier] = entry
            self._codes[entry.identifier] = codes
            for name, code_set in codes.items():
                per_element = self._index.setdefault(name, {})
                for code in code_set:
                    per_element.setdefault(code, set()).add(entry.identifier)
            self._append_log({"op": "upsert", "identifier": entry.identifier,
                              "provider": entry.provider_id,
                              "datestamp": entry.datestamp,
                              "record": _record_to_json(entry.record)})
        return outcome

    def delete(self, identifier: str) -> bool:
        """Remove an entry. Returns False when it was never present
        (tombstones may arrive for items never harvested)."""
        with self._lock:
            if identifier not in self._entries:
                return False
            self._unindex(identifier)
            del self._entries[identifier]
            self._codes.pop(identifier, None)
            self._append_log({"op": "delete", "identifier": identifier})
        return True

    def _unindex(self, identifier: str) -> None:
        old = self._codes.get(identifier)
        if not old:
            return
        for name, code_set in old.items():
            per_element = self._index.get(name, {})
            for code in code_set:
                ids = per_element.get(code)
                if ids:
                    ids.discard(identifier)
                    if not ids:
                        del per_element[code]

    # -- metadata side-channel (harvest states live here) -------------

    def read_meta(self, key: str, default=None):
        with self._lock:
            return self._meta.get(key, default)

    def write_meta(self, key: str, value) -> None:
        with self._lock:
            self._meta[key] = value
            self._append_log({"op": "meta", "key": key, "value": value})

    # -- reading -------------------------------------------------------

    def get(self, identifier: str) -> CatalogEntry:
        with self._lock:
            try:
                return self._entries[identifier]
            except KeyError:
                raise NotFound(identifier) from None

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def identifiers(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def entries(self) -> list[CatalogEntry]:
        with self._lock:
            return [self._entries[i] for i in sorted(self._entries)]

    def provider_counts(self) -> dict[str, int]:
        with self._lock:
            counts: dict[str, int] = {}
            for entry in self._entries.values():
                counts[entry.provider_id] = counts.get(entry.provider_id, 0) + 1
            return counts

    # -- search --------------------------------------------------------

    def _index_lookup(self, element: str, canonical: str) -> set[str]:
        """Identifiers holding the code or any of its descendants."""
        per_element = self._index.get(element, {})
        found: set[str] = set()
        prefix = canonical + "/"
        for code, ids in per_element.items():
            if code == canonical or code.startswith(prefix):
                found |= ids
        return found

    def _code_clause_ids(self, clause: Clause) -> set[str]:
        from olac.vocab import CodeAmbiguous, CodeUnknown

        if clause.element == WILDCARD_ELEMENT:
            found: set[str] = set()
            for name in model.ELEMENT_NAMES:
                vocabulary_id = descriptor_for(name).code_vocabulary
                if vocabulary_id is None:
                    continue
                try:
                    canonical = self._canonical_code(vocabulary_id, clause.value)
                except CodeAmbiguous:
                    raise
                except CodeUnknown:
                    continue
                found |= self._index_lookup(name, canonical)
            return found
        vocabulary_id = descriptor_for(clause.element).code_vocabulary
        if vocabulary_id is None:
            raise NotCodedElement(clause.element, "a code clause")
        canonical = self._canonical_code(vocabulary_id, clause.value)
        return self._index_lookup(clause.element, canonical)

    def _text_clause_ids(self, clause: Clause) -> set[str]:
        needle = clause.value.casefold()
        found = set()
        for identifier, entry in self._entries.items():
            for element in entry.record.elements:
                if clause.element != WILDCARD_ELEMENT and element.name != clause.element:
                    continue
                if needle in element.content.casefold():
                    found.add(identifier)
                    break
        return found

    def _any_clause_ids(self, clause: Clause) -> set[str]:
        from olac.vocab import CodeAmbiguous, CodeUnknown

        found = self._text_clause_ids(clause)
        try:
            found |= self._code_clause_ids(clause)
        except CodeAmbiguous:
            raise
        except (CodeUnknown, NotCodedElement):
            pass
        return found

    def _clause_ids(self, clause: Clause) -> set[str]:
        if clause.kind == "code":
            return self._code_clause_ids(clause)
        if clause.kind == "text":
            return self._text_clause_ids(clause)
        return self._any_clause_ids(clause)

    def search(self, query: Query) -> list[CatalogEntry]:
        """Entries matching every clause, ordered by identifier."""
        with self._lock:
            matched: Optional[set[str]] = None
            for clause in query.clauses:
                ids = self._clause_ids(clause)
                matched = ids if matched is None else matched & ids
                if not matched:
                    return []
            return [self._entries[i] for i in sorted(matched)]

    def entry_codes(self, identifier: str) -> dict[str, list[str]]:
        """Canonical codes the entry carries, keyed by element name."""
        with self._lock:
            if identifier not in self._entries:
                raise NotFound(identifier)
            held = self._codes.get(identifier, {})
            return {name: sorted(codes) for name, codes in sorted(held.items())}

    def codes_matching(self, identifier: str, query: Query) -> list[tuple[str, str]]:
        """Canonical (element, code) pairs on the entry that satisfy
        the query's code-capable clauses; the search API uses this to
        say why an entry matched."""
        from olac.vocab import CodeAmbiguous, CodeUnknown

        with self._lock:
            held = self._codes.get(identifier)
            if held is None:
                raise NotFound(identifier)
            found: set[tuple[str, str]] = set()
            for clause in query.clauses:
                if clause.kind == "text":
                    continue
                if clause.element == WILDCARD_ELEMENT:
                    names = [name for name in model.ELEMENT_NAMES
                             if descriptor_for(name).code_vocabulary]
                else:
                    names = [clause.element]
                for name in names:
                    vocabulary_id = descriptor_for(name).code_vocabulary
                    if vocabulary_id is None:
                        continue
                    try:
                        wanted = self._canonical_code(vocabulary_id, clause.value)
                    except CodeAmbiguous:
                        raise
                    except CodeUnknown:
                        continue
                    for code in held.get(name, ()):
                        if code == wanted or code.startswith(wanted + "/"):
                            found.add((name, code))
            return sorted(found)

    def join_query(self, left: Query, right: Query,
                   join_on: str) -> list[tuple[CatalogEntry, CatalogEntry]]:
        """Pairs (L, R) matching left and right that share a resolved
        code on join_on. Self-pairs are excluded."""
        join_on = model.canonical_element_name(join_on)
        if descriptor_for(join_on).code_vocabulary is None:
            raise NotCodedElement(join_on, "a join")
        with self._lock:
            lefts = self.search(left)
            rights = self.search(right)
            pairs = []
            for l_entry in lefts:
                l_codes = self._codes.get(l_entry.identifier, {}).get(join_on)
                if not l_codes:
                    continue
                for r_entry in rights:
                    if r_entry.identifier == l_entry.identifier:
                        continue
                    r_codes = self._codes.get(r_entry.identifier, {}).get(join_on)
                    if r_codes and l_codes & r_codes:
                        pairs.append((l_entry, r_entry))
            pairs.sort(key=lambda pair: (pair[0].identifier, pair[1].identifier))
            return pairs

    def facet_counts(self, element: str) -> dict[str, int]:
        """How many entries carry each code of a coded element."""
        element = model.canonical_element_name(element)
        if descriptor_for(element).code_vocabulary is None:
            raise NotCodedElement(element, "a facet listing")
        with self._lock:
            per_element = self._index.get(element, {})
            return {code: len(ids) for code, ids in sorted(per_element.items())}

    def render_entry(self, identifier: str, selected: Optional[str] = None,
                     display_lang: str = "en") -> RenderedEntry:
        """Displayable view of one entry: the selected-language slice
        of the record with every code joined by its label."""
        entry = self.get(identifier)
        alternatives = entry.record.alternatives
        if selected is None and len(alternatives) > 1:
            selected = alternatives[0]  # first listed reading is the default
        shown = model.render_view(entry.record, selected=selected)
        rows = []
        for element in shown:
            descriptor = descriptor_for(element.name)
            refine_label = None
            if element.refine is not None:
                if descriptor.refine_vocabulary is not None:
                    refine_label = self.registry.label(
                        descriptor.refine_vocabulary, element.refine, display_lang)
                else:
                    refine_label = element.refine
            code_label = None
            if element.code is not None and descriptor.code_vocabulary is not None:
                code_label = self.registry.label(
                    descriptor.code_vocabulary, element.code, display_lang)
            rows.append(RenderedElement(
                name=element.name, refine=element.refine,
                refine_label=refine_label, code=element.code,
                code_label=code_label, content=element.content,
                lang=effective_lang(element)))
        return RenderedEntry(entry.identifier, entry.provider_id,
                             entry.datestamp, entry.record.alternatives,
                             tuple(rows))

    # -- persistence ----------------------------------------------------

    @property
    def _log_path(self) -> Path:
        return self._directory / "log.jsonl"

    @property
    def _snapshot_path(self) -> Path:
        return self._directory / "snapshot.jsonl"

    def _append_log(self, row: dict) -> None:
        if self._log_handle is None:
            return
        self._log_handle.write(json.dumps(row, separators=(",", ":"),
                                          ensure_ascii=False) + "\n")
        self._log_handle.flush()

    def _apply_row(self, row: dict) -> None:
        op = row.get("op")
        if op == "upsert":
            entry = CatalogEntry(row["identifier"], row["provider"],
                                 row["datestamp"],
                                 _record_from_json(row["record"]))
            codes = self._codes_of(entry.record)
            self._unindex(entry.identifier)
            self._entries[entry.identifier] = entry
            self._codes[entry.identifier] = codes
            for name, code_set in codes.items():
                per_element = self._index.setdefault(name, {})
                for code in code_set:
                    per_element.setdefault(code, set()).add(entry.identifier)
        elif op == "delete":
            identifier = row["identifier"]
            if identifier in self._entries:
                self._unindex(identifier)
                del self._entries[identifier]
                self._codes.pop(identifier, None)
        elif op == "meta":
            self._meta[row["key"]] = row["value"]
        else:
            raise CatalogStoreError(f"unknown row op {op!r}")

    def _read_rows(self, path: Path, tolerate_torn_tail: bool) -> None:
        if not path.exists():
            return
        lines = path.read_text(encoding="utf-8").splitlines()
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                if tolerate_torn_tail and lineno == len(lines):
                    return  # crash mid-append left a torn final line
                raise CatalogStoreError(
                    f"{path}:{lineno}: undecodable row") from None
            try:
                self._apply_row(row)
            except (KeyError, TypeError) as exc:
                raise CatalogStoreError(f"{path}:{lineno}: {exc}") from None

    def _load(self) -> None:
        self._read_rows(self._snapshot_path, tolerate_torn_tail=False)
        self._read_rows(self._log_path, tolerate_torn_tail=True)

    def compact(self) -> None:
        """Fold the log into a fresh snapshot and truncate the log."""
        if not self._directory:
            return
        with self._lock:
            rows = []
            for identifier in sorted(self._entries):
                entry = self._entries[identifier]
                rows.append({"op": "upsert", "identifier": entry.identifier,
                             "provider": entry.provider_id,
                             "datestamp": entry.datestamp,
                             "record": _record_to_json(entry.record)})
            for key in sorted(self._meta):
                rows.append({"op": "meta", "key": key, "value": self._meta[key]})
            tmp = self._snapshot_path.with_name("snapshot.jsonl.tmp")
            with open(tmp, "w", encoding="utf-8") as handle:
                for row in rows:
                    handle.write(json.dumps(row, separators=(",", ":"),
                                            ensure_ascii=False) + "\n")
            os.replace(tmp, self._snapshot_path)
            self._log_handle.close()
            self._log_handle = open(self._log_path, "w", encoding="utf-8")

    def close(self) -> None:
        if self._log_handle is not None:
            self._log_handle.close()
            self._log_handle = None
