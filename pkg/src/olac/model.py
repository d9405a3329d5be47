"""Qualified metadata records and their validation.

A record is an ordered, repeatable list of elements drawn from a
closed 23-name set.  Each element may carry a refinement token, a code
from the element's controlled vocabulary, and a language tag for its
free-text content.  The descriptor table below says which attributes
each element admits; validation walks a record against that table and
returns diagnostics instead of raising, so callers can distinguish
blocking errors from advisory warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from olac.errors import OlacError
from olac.vocab import (
    LANGUAGE_VOCABULARY,
    CodeAmbiguous,
    CodeUnknown,
    Registry,
    default_registry,
)

DEFAULT_LANG = "en"

ERROR = "error"
WARNING = "warning"

# Rule identifiers carried by diagnostics. Tests assert on these, not
# on message prose.
UNKNOWN_ELEMENT = "UNKNOWN_ELEMENT"
REFINE_NOT_ALLOWED = "REFINE_NOT_ALLOWED"
REFINE_UNKNOWN = "REFINE_UNKNOWN"
CODE_NOT_ALLOWED = "CODE_NOT_ALLOWED"
CODE_UNKNOWN = "CODE_UNKNOWN"
CODE_AMBIGUOUS = "CODE_AMBIGUOUS"
CODE_UNLISTED = "CODE_UNLISTED"
NO_CODE = "NO_CODE"
EMPTY_ELEMENT = "EMPTY_ELEMENT"
LANG_UNKNOWN = "LANG_UNKNOWN"
LANG_AMBIGUOUS = "LANG_AMBIGUOUS"
ALTERNATIVES_INVALID = "ALTERNATIVES_INVALID"
ALTERNATIVES_DUPLICATE = "ALTERNATIVES_DUPLICATE"


class UnknownElement(OlacError):
    def __init__(self, name: str):
        super().__init__(f"{name!r} is not a metadata element name")
        self.name = name


class SelectedNotAlternative(OlacError):
    def __init__(self, selected, alternatives):
        super().__init__(
            f"display language {selected!r} is not one of the record's "
            f"alternatives {list(alternatives)}")
        self.selected = selected
        self.alternatives = tuple(alternatives)


class InvalidRecord(OlacError):
    """Raised by operations that require a record with zero errors."""

    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        errors = [d for d in diagnostics if d.severity == ERROR]
        lines = "; ".join(f"{d.rule}: {d.message}" for d in errors[:5])
        more = f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""
        super().__init__(f"record is invalid: {lines}{more}")
        self.diagnostics = tuple(diagnostics)


def _clean(value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    value = value.strip()
    return value or None


@dataclass(frozen=True)
class MetadataElement:
    """One element instance: name, optional attributes, free text.

    Construction normalizes surface noise so equal content compares
    equal: attributes are stripped (empty becomes absent), an explicit
    default language tag is dropped, and runs of whitespace in the
    content collapse to single spaces.
    """

    name: str
    refine: Optional[str] = None
    code: Optional[str] = None
    lang: Optional[str] = None
    content: str = ""

    def __post_init__(self):
        name = self.name.strip()
        # Known names snap to canonical casing so equal elements stay
        # equal across a serialize/parse cycle.
        name = _CANONICAL_NAMES.get(name.lower(), name)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "refine", _clean(self.refine))
        object.__setattr__(self, "code", _clean(self.code))
        lang = _clean(self.lang)
        if lang == DEFAULT_LANG:
            lang = None
        object.__setattr__(self, "lang", lang)
        object.__setattr__(self, "content", " ".join(self.content.split()))


@dataclass(frozen=True)
class MetadataRecord:
    """An ordered bundle of elements plus the languages the record is
    meant to be read in.  Element order is preserved through every
    transformation even though it carries no meaning."""

    alternatives: tuple[str, ...] = (DEFAULT_LANG,)
    elements: tuple[MetadataElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alternatives",
                           tuple(a.strip() for a in self.alternatives))
        object.__setattr__(self, "elements", tuple(self.elements))


@dataclass(frozen=True)
class ElementDescriptor:
    """What one element name admits: a refine vocabulary (or a single
    fixed refine token), a code vocabulary, and a definition."""

    name: str
    definition: str
    refine_vocabulary: Optional[str] = None
    refine_fixed: Optional[str] = None
    code_vocabulary: Optional[str] = None


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. element_index is None for record-level
    findings. A record is valid iff no diagnostic has severity error."""

    severity: str
    rule: str
    message: str
    element_index: Optional[int] = None


_DESCRIPTORS = {d.name: d for d in (
    ElementDescriptor("Contributor", "Entity that contributed to the content of the resource.",
                      refine_vocabulary="OLAC-Role"),
    ElementDescriptor("Coverage", "Spatial or temporal scope of the content of the resource."),
    ElementDescriptor("Creator", "Entity primarily responsible for creating the resource.",
                      refine_vocabulary="OLAC-Role"),
    ElementDescriptor("Date", "Date of an event in the life cycle of the resource.",
                      refine_vocabulary="DCQ-Date"),
    ElementDescriptor("Description", "Free-text account of the resource."),
    ElementDescriptor("Format", "File format of the resource.",
                      code_vocabulary="OLAC-Format"),
    ElementDescriptor("Format.cpu", "Processor architecture the resource requires.",
                      code_vocabulary="OLAC-CPU"),
    ElementDescriptor("Format.encoding", "Character encoding used by the resource.",
                      code_vocabulary="OLAC-Encoding"),
    ElementDescriptor("Format.markup", "Markup scheme of the resource, named by the archive item that defines it.",
                      code_vocabulary="OLAC-Markup"),
    ElementDescriptor("Format.os", "Operating system the resource requires.",
                      code_vocabulary="OLAC-OS"),
    ElementDescriptor("Format.sourcecode", "Programming language of a resource distributed in source form.",
                      code_vocabulary="OLAC-Sourcecode"),
    ElementDescriptor("Identifier", "Unambiguous reference that identifies the resource."),
    ElementDescriptor("Language", "Language in which the content of the resource is expressed.",
                      refine_fixed="OLAC", code_vocabulary=LANGUAGE_VOCABULARY),
    ElementDescriptor("Publisher", "Entity responsible for making the resource available."),
    ElementDescriptor("Relation", "Reference to a related resource.",
                      refine_vocabulary="DCQ-Relation"),
    ElementDescriptor("Rights", "Terms of use for the resource.",
                      code_vocabulary="OLAC-Rights"),
    ElementDescriptor("Rights.software", "Terms of use for a software resource.",
                      code_vocabulary="OLAC-Software-Rights"),
    ElementDescriptor("Source", "Resource from which the present resource is derived."),
    ElementDescriptor("Subject", "Topic of the content of the resource."),
    ElementDescriptor("Subject.language", "Language that the content of the resource is about.",
                      refine_fixed="OLAC", code_vocabulary=LANGUAGE_VOCABULARY),
    ElementDescriptor("Title", "Name given to the resource."),
    ElementDescriptor("Type", "Genre of the content of the resource.",
                      code_vocabulary="DC-Type"),
    ElementDescriptor("Type.data", "Kind of language data the resource contains.",
                      code_vocabulary="OLAC-Data"),
    ElementDescriptor("Type.functionality", "Function a software resource performs.",
                      code_vocabulary="OLAC-Functionality"),
)}

_CANONICAL_NAMES = {name.lower(): name for name in _DESCRIPTORS}

ELEMENT_NAMES = tuple(sorted(_DESCRIPTORS))

# Elements whose vocabulary is deliberately unsettled: free text with
# no code draws no warning here.
_NO_CODE_EXEMPT = frozenset({"Type.functionality"})


def canonical_element_name(name: str) -> str:
    """Canonical spelling of an element name, matched case-insensitively."""
    try:
        return _CANONICAL_NAMES[name.strip().lower()]
    except KeyError:
        raise UnknownElement(name) from None


def descriptor_for(name: str) -> ElementDescriptor:
    return _DESCRIPTORS[canonical_element_name(name)]


def effective_lang(element: MetadataElement) -> str:
    """The language of an element's content, defaulted when untagged."""
    return element.lang or DEFAULT_LANG


def _check_language_tag(registry: Registry, value: str, index: Optional[int],
                        unknown_rule: str, ambiguous_rule: str,
                        what: str) -> list[Diagnostic]:
    try:
        registry.resolve(LANGUAGE_VOCABULARY, value)
    except CodeAmbiguous as exc:
        return [Diagnostic(ERROR, ambiguous_rule, f"{what}: {exc}", index)]
    except CodeUnknown as exc:
        return [Diagnostic(ERROR, unknown_rule, f"{what}: {exc}", index)]
    return []


def _validate_refine(descriptor: ElementDescriptor, element: MetadataElement,
                     registry: Registry, index: int) -> list[Diagnostic]:
    if element.refine is None:
        return []
    if descriptor.refine_fixed is not None:
        if element.refine.lower() == descriptor.refine_fixed.lower():
            return []
        return [Diagnostic(ERROR, REFINE_UNKNOWN,
                           f"{element.name} only admits refine="
                           f"{descriptor.refine_fixed!r}, got {element.refine!r}",
                           index)]
    if descriptor.refine_vocabulary is None:
        return [Diagnostic(ERROR, REFINE_NOT_ALLOWED,
                           f"{element.name} does not admit a refine attribute",
                           index)]
    try:
        registry.resolve(descriptor.refine_vocabulary, element.refine)
    except (CodeUnknown, CodeAmbiguous) as exc:
        return [Diagnostic(ERROR, REFINE_UNKNOWN, str(exc), index)]
    return []


def _validate_code(descriptor: ElementDescriptor, element: MetadataElement,
                   registry: Registry, index: int) -> list[Diagnostic]:
    name = descriptor.name
    if descriptor.code_vocabulary is None:
        if element.code is not None:
            return [Diagnostic(ERROR, CODE_NOT_ALLOWED,
                               f"{name} does not admit a code attribute", index)]
        return []
    if element.code is None:
        if not element.content:
            return [Diagnostic(WARNING, EMPTY_ELEMENT,
                               f"{name} carries neither code nor content", index)]
        if name not in _NO_CODE_EXEMPT:
            return [Diagnostic(WARNING, NO_CODE,
                               f"{name} carries free text but no code", index)]
        return []
    try:
        term = registry.resolve(descriptor.code_vocabulary, element.code)
    except CodeAmbiguous as exc:
        return [Diagnostic(ERROR, CODE_AMBIGUOUS, str(exc), index)]
    except CodeUnknown as exc:
        return [Diagnostic(ERROR, CODE_UNKNOWN, str(exc), index)]
    if not term.listed:
        return [Diagnostic(WARNING, CODE_UNLISTED,
                           f"code {element.code!r} is not in the "
                           f"{descriptor.code_vocabulary} enumeration", index)]
    return []


def validate_record(record: MetadataRecord,
                    registry: Optional[Registry] = None) -> list[Diagnostic]:
    """All findings for a record, element-level then record-level.

    Never raises: unknown names, bad codes, and bad language tags all
    come back as diagnostics.
    """
    registry = registry or default_registry()
    diagnostics: list[Diagnostic] = []
    for index, element in enumerate(record.elements):
        try:
            descriptor = descriptor_for(element.name)
        except UnknownElement as exc:
            diagnostics.append(Diagnostic(ERROR, UNKNOWN_ELEMENT, str(exc), index))
            continue
        diagnostics.extend(_validate_refine(descriptor, element, registry, index))
        diagnostics.extend(_validate_code(descriptor, element, registry, index))
        if element.lang is not None:
            diagnostics.extend(_check_language_tag(
                registry, element.lang, index, LANG_UNKNOWN, LANG_AMBIGUOUS,
                f"lang attribute of {element.name}"))
    if not record.alternatives:
        diagnostics.append(Diagnostic(ERROR, ALTERNATIVES_INVALID,
                                      "alternatives list is empty"))
    seen: set[str] = set()
    for alt in record.alternatives:
        if not alt:
            diagnostics.append(Diagnostic(ERROR, ALTERNATIVES_INVALID,
                                          "alternatives entry is blank"))
            continue
        diagnostics.extend(_check_language_tag(
            registry, alt, None, ALTERNATIVES_INVALID, ALTERNATIVES_INVALID,
            "alternatives entry"))
        key = alt.lower()
        if key in seen:
            diagnostics.append(Diagnostic(ERROR, ALTERNATIVES_DUPLICATE,
                                          f"alternatives entry {alt!r} repeats"))
        seen.add(key)
    return diagnostics


def is_valid(record: MetadataRecord, registry: Optional[Registry] = None) -> bool:
    return not any(d.severity == ERROR for d in validate_record(record, registry))


def require_valid(record: MetadataRecord,
                  registry: Optional[Registry] = None) -> list[Diagnostic]:
    """Validate and raise InvalidRecord on any error; returns the
    diagnostics (warnings included) otherwise."""
    diagnostics = validate_record(record, registry)
    if any(d.severity == ERROR for d in diagnostics):
        raise InvalidRecord(diagnostics)
    return diagnostics


def render_view(record: MetadataRecord, selected: Optional[str] = None,
                suppressed: Iterable[str] = ()) -> list[MetadataElement]:
    """Elements to display for one reading of the record.

    With a single alternative, everything shows except elements whose
    effective language the reader suppressed.  With several, only the
    selected alternative shows, plus any element in a language outside
    the alternatives list entirely (a vernacular title, say), which
    shows under every selection.
    """
    alternatives = record.alternatives
    if len(alternatives) <= 1:
        suppressed = frozenset(suppressed)
        return [e for e in record.elements
                if effective_lang(e) not in suppressed]
    if selected is None or selected not in alternatives:
        raise SelectedNotAlternative(selected, alternatives)
    return [e for e in record.elements
            if effective_lang(e) == selected
            or effective_lang(e) not in alternatives]
