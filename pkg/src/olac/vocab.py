"""Controlled vocabularies and language-code resolution.

A vocabulary is an enumeration of legal values for a coded metadata
element.  Codes may be hierarchical ("Unix/Solaris" belongs to the
"Unix" family) and every term carries human-readable labels keyed by
display language.  Language identification combines two-letter ISO
639-1 codes with an extension form built from three-letter Ethnologue
codes ("x-sil-BAN"); the two may be paired one-to-one so that either
member identifies the same language.

Vocabularies are loaded from line-oriented data files rather than
hardcoded, so the shipped sample lists can be replaced or extended
without code changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from olac.errors import OlacError

#: Identifiers of the vocabularies a complete registry must contain.
VOCABULARY_IDS = (
    "OLAC-Language",
    "OLAC-Data",
    "OLAC-Role",
    "OLAC-CPU",
    "OLAC-Encoding",
    "OLAC-Format",
    "OLAC-Functionality",
    "OLAC-Markup",
    "OLAC-OS",
    "OLAC-Rights",
    "OLAC-Software-Rights",
    "OLAC-Sourcecode",
    "DC-Type",
    "DCQ-Date",
    "DCQ-Relation",
)

LANGUAGE_VOCABULARY = "OLAC-Language"

_EXTENSION_RE = re.compile(r"^x-sil-[A-Z]{3}$")
_ETHNOLOGUE_RE = re.compile(r"^[A-Za-z]{3}$")
# Markup codes are archive identifiers of the shape oai:<archive>:<local>.
_OAI_ID_RE = re.compile(r"^oai:[a-z0-9]+:[^:\s]+$")
_HEADER_RE = re.compile(r"^vocabulary:\s*(\S+)\s+open:\s*(true|false)\s*$")


class VocabularyError(OlacError):
    """Base class for vocabulary-layer errors."""


class UnknownVocabulary(VocabularyError):
    def __init__(self, vocabulary_id: str):
        super().__init__(f"no vocabulary registered under id {vocabulary_id!r}")
        self.vocabulary_id = vocabulary_id


class CodeUnknown(VocabularyError):
    """The code is not a legal value of a closed vocabulary."""

    def __init__(self, vocabulary_id: str, code: str, detail: str = ""):
        message = f"code {code!r} is not a member of {vocabulary_id}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.vocabulary_id = vocabulary_id
        self.code = code


class CodeAmbiguous(VocabularyError):
    """The code names a group of languages, not one language.

    Collective identifiers are never returned as terms: a precise
    extension code must be used instead.
    """

    def __init__(self, vocabulary_id: str, code: str, label: str):
        super().__init__(
            f"code {code!r} is a collective identifier for {label!r}; "
            "use a precise extension code instead"
        )
        self.vocabulary_id = vocabulary_id
        self.code = code
        self.label = label


class MalformedEthnologueCode(VocabularyError):
    def __init__(self, value: str):
        super().__init__(f"expected a three-letter code, got {value!r}")
        self.value = value


class VocabFileError(VocabularyError):
    """A vocabulary data file could not be parsed."""

    def __init__(self, message: str, path: str = "", line: int = 0):
        where = f"{path}:{line}: " if path or line else ""
        super().__init__(where + message)
        self.path = path
        self.line = line


class DuplicateCode(VocabFileError):
    pass


@dataclass(frozen=True)
class VocabTerm:
    """One legal value of a vocabulary.

    ``code`` is the canonical spelling; lookups are case-insensitive
    and resolve to it.  ``labels`` maps display-language codes to
    human-readable names and always contains an "en" entry.  Terms
    flagged ``ambiguous`` are collective language identifiers and never
    resolve successfully.  ``listed`` is False only for synthetic terms
    minted by open vocabularies for codes outside their enumeration.
    """

    code: str
    labels: dict[str, str] = field(default_factory=dict)
    ambiguous: bool = False
    note: Optional[str] = None
    listed: bool = True

    def label(self, display_lang: str = "en") -> str:
        return self.labels.get(display_lang.lower(), self.labels["en"])

    def family(self) -> Optional[str]:
        """Parent prefix of a hierarchical code, or None."""
        if "/" in self.code:
            return self.code.rsplit("/", 1)[0]
        return None


class Vocabulary:
    """An enumerated code list with case-insensitive lookup."""

    def __init__(self, vocabulary_id: str, open: bool = False,
                 terms: Iterable[VocabTerm] = ()):
        self.id = vocabulary_id
        self.open = open
        self._by_key: dict[str, VocabTerm] = {}
        for term in terms:
            self.add(term)

    def add(self, term: VocabTerm) -> None:
        key = term.code.lower()
        if key in self._by_key:
            raise DuplicateCode(f"duplicate code {term.code!r} in {self.id}")
        if "en" not in term.labels:
            raise VocabFileError(f"term {term.code!r} in {self.id} has no en label")
        self._by_key[key] = term

    @property
    def terms(self) -> tuple[VocabTerm, ...]:
        return tuple(self._by_key.values())

    def __len__(self) -> int:
        return len(self._by_key)

    def __contains__(self, code: str) -> bool:
        return code.lower() in self._by_key

    def resolve(self, code: str) -> VocabTerm:
        """Look up a code, case-insensitively.

        Hierarchical values resolve both in full ("Unix/Solaris") and
        as a bare family ("Unix") wherever the family itself is a term.
        Open vocabularies mint an unlisted synthetic term for codes
        outside their enumeration instead of failing; callers downgrade
        that to a warning.  Collective identifiers raise CodeAmbiguous.
        """
        key = code.strip().lower()
        term = self._by_key.get(key)
        if term is None:
            if self.open:
                return self._synthesize(code.strip())
            raise CodeUnknown(self.id, code)
        if term.ambiguous:
            raise CodeAmbiguous(self.id, code, term.labels["en"])
        return term

    def _synthesize(self, code: str) -> VocabTerm:
        if not code:
            raise CodeUnknown(self.id, code)
        if self.id == "OLAC-Markup" and not _OAI_ID_RE.match(code):
            raise CodeUnknown(self.id, code,
                              "markup codes must look like oai:<archive>:<id>")
        return VocabTerm(code=code, labels={"en": code}, listed=False)

    def label(self, code: str, display_lang: str = "en") -> str:
        return self.resolve(code).label(display_lang)


@dataclass(frozen=True)
class LanguageRegistry:
    """Partitioned view over the language vocabulary.

    ``iso_terms`` holds the two-letter codes, ``extension_terms`` the
    x-sil forms, and ``ambiguous_terms`` the collective identifiers
    that are rejected at resolution time.
    """

    iso_terms: tuple[VocabTerm, ...]
    extension_terms: tuple[VocabTerm, ...]
    ambiguous_terms: tuple[VocabTerm, ...]


class Registry:
    """All vocabularies plus the ISO/Ethnologue pairing table.

    Built once at startup and treated as read-only afterwards; sharing
    one registry between threads needs no coordination.
    """

    def __init__(self):
        self._vocabularies: dict[str, Vocabulary] = {}
        self._iso_to_ext: dict[str, str] = {}
        self._ext_to_iso: dict[str, str] = {}

    def add_vocabulary(self, vocabulary: Vocabulary) -> None:
        if vocabulary.id in self._vocabularies:
            raise VocabFileError(f"vocabulary {vocabulary.id} registered twice")
        self._vocabularies[vocabulary.id] = vocabulary

    def vocabulary(self, vocabulary_id: str) -> Vocabulary:
        try:
            return self._vocabularies[vocabulary_id]
        except KeyError:
            raise UnknownVocabulary(vocabulary_id) from None

    @property
    def vocabulary_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._vocabularies))

    def resolve(self, vocabulary_id: str, code: str) -> VocabTerm:
        return self.vocabulary(vocabulary_id).resolve(code)

    def label(self, vocabulary_id: str, code: str, display_lang: str = "en") -> str:
        """Label of a code in the requested display language, falling back to en."""
        return self.vocabulary(vocabulary_id).label(code, display_lang)

    def register_language_pair(self, iso_code: str, ethnologue_code: str) -> None:
        """Pair an ISO code with its Ethnologue twin.

        The twin term is added to the language vocabulary with the ISO
        term's labels unless the data files already define it.
        """
        vocab = self.vocabulary(LANGUAGE_VOCABULARY)
        iso_term = vocab.resolve(iso_code)
        ext_code = build_extension_code(ethnologue_code)
        if iso_term.code in self._iso_to_ext:
            raise VocabFileError(
                f"language {iso_term.code!r} already paired with "
                f"{self._iso_to_ext[iso_term.code]!r}")
        if ext_code not in vocab:
            vocab.add(VocabTerm(code=ext_code, labels=dict(iso_term.labels)))
        self._iso_to_ext[iso_term.code] = ext_code
        self._ext_to_iso[ext_code.lower()] = iso_term.code

    def dual_codes(self, code: str) -> frozenset[str]:
        """The set of codes identifying a language: the ISO code plus
        its paired extension code when one is registered.  Either
        member of a pair may be given."""
        canonical = self.canonical_language_code(code)
        ext = self._iso_to_ext.get(canonical)
        if ext is None:
            return frozenset({canonical})
        return frozenset({canonical, ext})

    def canonical_language_code(self, code: str) -> str:
        """Canonical spelling of a language code, preferring the ISO
        member of a dual pair."""
        term = self.resolve(LANGUAGE_VOCABULARY, code)
        return self._ext_to_iso.get(term.code.lower(), term.code)

    def language_registry(self) -> LanguageRegistry:
        iso, ext, ambiguous = [], [], []
        for term in self.vocabulary(LANGUAGE_VOCABULARY).terms:
            if term.ambiguous:
                ambiguous.append(term)
            elif _EXTENSION_RE.match(term.code):
                ext.append(term)
            else:
                iso.append(term)
        return LanguageRegistry(tuple(iso), tuple(ext), tuple(ambiguous))

    def check_complete(self) -> None:
        """Require exactly the expected vocabulary ids."""
        have = set(self._vocabularies)
        want = set(VOCABULARY_IDS)
        if have != want:
            missing = ", ".join(sorted(want - have)) or "none"
            extra = ", ".join(sorted(have - want)) or "none"
            raise VocabFileError(
                f"registry incomplete: missing [{missing}], unexpected [{extra}]")


def build_extension_code(ethnologue_code: str) -> str:
    """Language identifier built from a three-letter Ethnologue code."""
    if not _ETHNOLOGUE_RE.match(ethnologue_code):
        raise MalformedEthnologueCode(ethnologue_code)
    return "x-sil-" + ethnologue_code.upper()


def _parse_term_line(line: str, path: str, lineno: int) -> VocabTerm:
    fields = line.split("\t")
    if len(fields) < 2 or not fields[0].strip() or not fields[1].strip():
        raise VocabFileError("expected code<TAB>label", path, lineno)
    code = fields[0].strip()
    labels = {"en": fields[1].strip()}
    ambiguous = False
    note = None
    for extra in fields[2:]:
        if not extra.strip():
            continue
        if "=" not in extra:
            raise VocabFileError(f"expected key=value, got {extra!r}", path, lineno)
        key, value = extra.split("=", 1)
        key = key.strip()
        if key == "ambiguous":
            ambiguous = value.strip().lower() == "true"
        elif key == "note":
            note = value
        elif key.startswith("label."):
            labels[key[len("label."):].lower()] = value
        else:
            raise VocabFileError(f"unknown key {key!r}", path, lineno)
    return VocabTerm(code=code, labels=labels, ambiguous=ambiguous, note=note)


def load_vocabulary_file(path) -> Vocabulary:
    """Parse one vocabulary data file.

    Format: a header line ``vocabulary: <id> open: <true|false>``
    followed by term lines ``code<TAB>en-label[<TAB>key=value...]``.
    Blank lines and lines starting with ``#`` are skipped.
    """
    name = getattr(path, "name", str(path))
    with open(path, encoding="utf-8") if isinstance(path, (str, Path)) else path.open(encoding="utf-8") as handle:
        vocabulary = None
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if vocabulary is None:
                match = _HEADER_RE.match(line)
                if not match:
                    raise VocabFileError("missing 'vocabulary: <id> open: <bool>' header",
                                         name, lineno)
                vocabulary = Vocabulary(match.group(1), open=match.group(2) == "true")
                continue
            try:
                vocabulary.add(_parse_term_line(line, name, lineno))
            except DuplicateCode as exc:
                raise DuplicateCode(str(exc), name, lineno) from None
    if vocabulary is None:
        raise VocabFileError("missing 'vocabulary: <id> open: <bool>' header", name, 1)
    return vocabulary


def load_language_map(path) -> list[tuple[str, str]]:
    """Parse the ISO/Ethnologue pairing file: lines ``iso<TAB>ethnologue``."""
    name = getattr(path, "name", str(path))
    pairs = []
    with open(path, encoding="utf-8") if isinstance(path, (str, Path)) else path.open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise VocabFileError("expected iso<TAB>ethnologue", name, lineno)
            pairs.append((fields[0].strip(), fields[1].strip()))
    return pairs


def load_registry(vocab_dir) -> Registry:
    """Build a registry from a directory of ``*.vocab`` files plus an
    optional ``language-map.tsv`` pairing table."""
    registry = Registry()
    entries = sorted(vocab_dir.iterdir(), key=lambda p: p.name)
    for entry in entries:
        if entry.name.endswith(".vocab"):
            registry.add_vocabulary(load_vocabulary_file(entry))
    registry.check_complete()
    for entry in entries:
        if entry.name == "language-map.tsv":
            for iso, eth in load_language_map(entry):
                registry.register_language_pair(iso, eth)
    return registry


@lru_cache(maxsize=1)
def default_registry() -> Registry:
    """Registry built from the data files shipped with the package."""
    return load_registry(resources.files("olac").joinpath("data/vocab"))
