"""Interchange XML for metadata records.

Documents have an `olac` root in the 0.3 namespace; the root's `lang`
attribute is a space-delimited alternatives list. Children are element
instances with refine/code/lang attributes and text content.

Parsing never raises: structural findings come back as diagnostics on
a ParseOutcome, and anything worse than a warning leaves the record
slot empty. Semantic checks (names, codes, languages) stay in the
model module; this one only cares about markup shape.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape

from olac import model
from olac.model import Diagnostic, MetadataElement, MetadataRecord

NAMESPACE = "http://www.language-archives.org/OLAC/0.3/"
ROOT_NAME = "olac"

MALFORMED_DOCUMENT = "MALFORMED_DOCUMENT"
WRONG_ROOT_OR_NAMESPACE = "WRONG_ROOT_OR_NAMESPACE"
UNKNOWN_ATTRIBUTE = "UNKNOWN_ATTRIBUTE"
ELEMENT_NAME_CASE = "ELEMENT_NAME_CASE"
END_TAG_CASE = "END_TAG_CASE"
FOREIGN_NAMESPACE = "FOREIGN_NAMESPACE"
STRAY_TEXT = "STRAY_TEXT"
UNEXPECTED_CHILD = "UNEXPECTED_CHILD"

_XSI = "http://www.w3.org/2001/XMLSchema-instance"
# Root attributes that are accepted and ignored.
_IGNORED_ROOT_ATTRS = {
    "{%s}schemaLocation" % _XSI,
    "{%s}noNamespaceSchemaLocation" % _XSI,
}
_CHILD_ATTRS = ("refine", "code", "lang")


@dataclass(frozen=True)
class ParseOutcome:
    record: Optional[MetadataRecord]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.record is not None


def _split_tag(tag: str) -> tuple[Optional[str], str]:
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        return ns, local
    return None, tag


# Matches any markup tag, tolerating quoted attribute values that
# contain ">".
_TAG_RE = re.compile(r"<(/?)([^\s/>!?][^\s/>]*)((?:[^>\"']|\"[^\"]*\"|'[^']*')*?)(/?)>",
                     re.DOTALL)


def _repair_end_tag_case(text: str) -> tuple[str, list[str]]:
    """Rewrite end tags that differ from their start tag only by case.

    Returns the repaired text and the list of end-tag names fixed.
    Gives up silently on anything it cannot track; the strict parser
    then reports the document as malformed.
    """
    out: list[str] = []
    fixed: list[str] = []
    stack: list[str] = []
    pos = 0
    while True:
        lt = text.find("<", pos)
        if lt < 0:
            out.append(text[pos:])
            break
        out.append(text[pos:lt])
        if text.startswith("<!--", lt):
            end = text.find("-->", lt)
            end = len(text) if end < 0 else end + 3
        elif text.startswith("<![CDATA[", lt):
            end = text.find("]]>", lt)
            end = len(text) if end < 0 else end + 3
        elif text.startswith("<?", lt):
            end = text.find("?>", lt)
            end = len(text) if end < 0 else end + 2
        elif text.startswith("<!", lt):
            end = text.find(">", lt)
            end = len(text) if end < 0 else end + 1
        else:
            match = _TAG_RE.match(text, lt)
            if not match:
                out.append(text[lt:])
                break
            closing, name, attrs, selfclose = match.groups()
            if closing:
                if stack and stack[-1] != name and stack[-1].lower() == name.lower():
                    fixed.append(name)
                    name = stack[-1]
                if stack and stack[-1] == name:
                    stack.pop()
                out.append(f"</{name}>")
                pos = match.end()
                continue
            if not selfclose:
                stack.append(name)
            out.append(match.group(0))
            pos = match.end()
            continue
        out.append(text[lt:end])
        pos = end
    return "".join(out), fixed


def _parse_tree(data: bytes) -> tuple[Optional[ET.Element], list[Diagnostic]]:
    try:
        return ET.fromstring(data), []
    except ET.ParseError as first_error:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            return None, [Diagnostic(model.ERROR, MALFORMED_DOCUMENT,
                                     f"not well-formed: {first_error}")]
        repaired, fixed = _repair_end_tag_case(text)
        if fixed:
            try:
                root = ET.fromstring(repaired)
            except ET.ParseError:
                root = None
            if root is not None:
                return root, [
                    Diagnostic(model.WARNING, END_TAG_CASE,
                               f"end tag </{name}> repaired to match its "
                               "start tag's case")
                    for name in fixed]
        return None, [Diagnostic(model.ERROR, MALFORMED_DOCUMENT,
                                 f"not well-formed: {first_error}")]


def parse_record(data) -> ParseOutcome:
    """Read one record document. Never raises."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root, diagnostics = _parse_tree(data)
    except Exception as exc:  # ET can throw ValueError on odd input
        root, diagnostics = None, [Diagnostic(model.ERROR, MALFORMED_DOCUMENT,
                                              f"not well-formed: {exc}")]
    if root is None:
        return ParseOutcome(None, tuple(diagnostics))

    ns, local = _split_tag(root.tag)
    if local.lower() != ROOT_NAME or ns != NAMESPACE:
        found = f"{local!r} in namespace {ns!r}" if ns else f"{local!r} with no namespace"
        diagnostics.append(Diagnostic(
            model.ERROR, WRONG_ROOT_OR_NAMESPACE,
            f"expected root {ROOT_NAME!r} in namespace {NAMESPACE!r}, found {found}"))
        return ParseOutcome(None, tuple(diagnostics))

    alternatives: tuple[str, ...] = (model.DEFAULT_LANG,)
    for attr, value in root.attrib.items():
        if attr == "lang":
            parts = tuple(value.split())
            # A blank list means the attribute said nothing; keep the default.
            alternatives = parts or (model.DEFAULT_LANG,)
        elif attr not in _IGNORED_ROOT_ATTRS:
            diagnostics.append(Diagnostic(
                model.WARNING, UNKNOWN_ATTRIBUTE,
                f"root attribute {attr!r} dropped"))

    if root.text and root.text.strip():
        diagnostics.append(Diagnostic(model.WARNING, STRAY_TEXT,
                                      "text directly under the root ignored"))

    elements: list[MetadataElement] = []
    for index, child in enumerate(root):
        child_ns, child_local = _split_tag(child.tag)
        if child_ns not in (None, NAMESPACE):
            diagnostics.append(Diagnostic(
                model.WARNING, FOREIGN_NAMESPACE,
                f"element {child_local!r} in foreign namespace {child_ns!r} skipped",
                index))
            continue
        try:
            canonical = model.canonical_element_name(child_local)
        except model.UnknownElement:
            canonical = child_local
        else:
            if canonical != child_local:
                diagnostics.append(Diagnostic(
                    model.WARNING, ELEMENT_NAME_CASE,
                    f"element name {child_local!r} read as {canonical!r}", index))
        attrs = {}
        for attr, value in child.attrib.items():
            if attr in _CHILD_ATTRS:
                attrs[attr] = value
            else:
                diagnostics.append(Diagnostic(
                    model.WARNING, UNKNOWN_ATTRIBUTE,
                    f"attribute {attr!r} on {child_local!r} dropped", index))
        if len(child):
            diagnostics.append(Diagnostic(
                model.WARNING, UNEXPECTED_CHILD,
                f"nested markup inside {child_local!r} flattened to text", index))
        if child.tail and child.tail.strip():
            diagnostics.append(Diagnostic(
                model.WARNING, STRAY_TEXT,
                f"text after {child_local!r} ignored", index))
        content = "".join(child.itertext())
        elements.append(MetadataElement(
            name=canonical, refine=attrs.get("refine"), code=attrs.get("code"),
            lang=attrs.get("lang"), content=content))

    record = MetadataRecord(alternatives=alternatives, elements=tuple(elements))
    return ParseOutcome(record, tuple(diagnostics))


def _attr(value: str) -> str:
    return escape(value, {'"': "&quot;", "\n": "&#10;", "\t": "&#9;"})


def serialize_record(record: MetadataRecord, registry=None) -> bytes:
    """Write a record as interchange XML.

    The record must validate without errors. Output is deterministic:
    fixed attribute order (refine, code, lang), two-space indent,
    default values omitted, empty elements self-closed.
    """
    model.require_valid(record, registry)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    root_attrs = f' xmlns="{NAMESPACE}"'
    if record.alternatives != (model.DEFAULT_LANG,):
        root_attrs += f' lang="{_attr(" ".join(record.alternatives))}"'
    if not record.elements:
        lines.append(f"<{ROOT_NAME}{root_attrs}/>")
        return ("\n".join(lines) + "\n").encode("utf-8")
    lines.append(f"<{ROOT_NAME}{root_attrs}>")
    for element in record.elements:
        attrs = ""
        if element.refine is not None:
            attrs += f' refine="{_attr(element.refine)}"'
        if element.code is not None:
            attrs += f' code="{_attr(element.code)}"'
        if element.lang is not None:
            attrs += f' lang="{_attr(element.lang)}"'
        if element.content:
            lines.append(f"  <{element.name}{attrs}>"
                         f"{escape(element.content)}</{element.name}>")
        else:
            lines.append(f"  <{element.name}{attrs}/>")
    lines.append(f"</{ROOT_NAME}>")
    return ("\n".join(lines) + "\n").encode("utf-8")
