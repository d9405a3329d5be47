"""Down-conversion to plain Dublin Core.

Harvesting clients that know nothing about qualified elements or code
attributes still get usable records: qualifiers fold into their base
element, codes become English labels in the content, and attributes
disappear. The result uses only the 15 unqualified DC names. Lossy by
design; the qualified form remains the source of truth.
"""

from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

from olac import model
from olac.errors import OlacError
from olac.model import MetadataElement, MetadataRecord, descriptor_for
from olac.vocab import Registry, default_registry

DC_NAMES = (
    "Title", "Creator", "Subject", "Description", "Publisher", "Contributor",
    "Date", "Type", "Format", "Identifier", "Source", "Language", "Relation",
    "Coverage", "Rights",
)

# Refine tokens fold into content only for agent elements, where the
# role is the useful residue ("Bateman, John (Author)").
_FOLD_REFINE = frozenset({"Creator", "Contributor"})


class NotDublinCore(OlacError):
    def __init__(self, name: str):
        super().__init__(f"{name!r} is not an unqualified DC element name")
        self.name = name


def dc_crosswalk(record: MetadataRecord,
                 registry: Optional[Registry] = None) -> MetadataRecord:
    """Map a valid record onto the 15 unqualified DC element names.

    Each element maps to exactly one output element, in order: the
    count is preserved. Codes expand to their English label, with any
    free text appended after "; ".
    """
    registry = registry or default_registry()
    model.require_valid(record, registry)
    elements = []
    for element in record.elements:
        descriptor = descriptor_for(element.name)
        base = element.name.split(".")[0]
        content = element.content
        if element.code is not None and descriptor.code_vocabulary is not None:
            label = registry.label(descriptor.code_vocabulary, element.code)
            content = f"{label}; {content}" if content else label
        if (element.refine is not None and base in _FOLD_REFINE
                and descriptor.refine_vocabulary is not None):
            role = registry.label(descriptor.refine_vocabulary, element.refine)
            content = f"{content} ({role})" if content else f"({role})"
        elements.append(MetadataElement(name=base, content=content))
    return MetadataRecord(alternatives=("en",), elements=tuple(elements))


def serialize_dc(record: MetadataRecord) -> bytes:
    """Write a crosswalked record as a bare `dc` document: no
    namespace, no attributes, one child per element."""
    for element in record.elements:
        if element.name not in DC_NAMES:
            raise NotDublinCore(element.name)
        if element.refine or element.code or element.lang:
            raise NotDublinCore(element.name)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    if not record.elements:
        lines.append("<dc/>")
    else:
        lines.append("<dc>")
        for element in record.elements:
            if element.content:
                lines.append(f"  <{element.name}>{escape(element.content)}"
                             f"</{element.name}>")
            else:
                lines.append(f"  <{element.name}/>")
        lines.append("</dc>")
    return ("\n".join(lines) + "\n").encode("utf-8")
