"""Wire protocol between providers and harvesters.

HTTP GET with query parameters (verb, metadataPrefix, from, until,
identifier, resumptionToken) answered by a UTF-8 XML envelope: root
`repository-response` with a responseDate, an echo of the request, and
either a verb body or an `error` element. Protocol version string
"olac-desk-1". Records travel inside `metadata` as a full olac
document or its flattened `dc` form, selected by metadataPrefix.

Server side: handle_request maps a parameter dict to response bytes
and never raises on bad input (errors go in-band, as the protocol
demands). Client side: the parse_* helpers raise OaiError for in-band
errors and ProtocolError for responses that are not even envelopes.
"""

from __future__ import annotations

import base64
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape

from olac import crosswalk, xmlio
from olac.errors import OlacError
from olac.model import MetadataRecord
from olac.repository import (
    BadDatestamp,
    BadIdentifier,
    Repository,
    UnknownItem,
    check_datestamp,
    format_datestamp,
    split_identifier,
)

PROTOCOL_VERSION = "olac-desk-1"
RESPONSE_ROOT = "repository-response"
DEFAULT_PAGE_SIZE = 100

METADATA_PREFIXES = ("olac", "oai_dc")
VERBS = ("Identify", "ListRecords", "GetRecord", "ListIdentifiers")

BAD_VERB = "badVerb"
BAD_ARGUMENT = "badArgument"
BAD_RESUMPTION_TOKEN = "badResumptionToken"
ID_DOES_NOT_EXIST = "idDoesNotExist"
NO_RECORDS_MATCH = "noRecordsMatch"

_DATE_ONLY_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class OaiError(OlacError):
    """An in-band protocol error (both raised client-side and rendered
    server-side)."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.oai_message = message


class ProtocolError(OlacError):
    """The response is not a well-formed protocol envelope."""


@dataclass(frozen=True)
class IdentifyInfo:
    archive_id: str
    name: str
    base_url: str
    earliest_datestamp: str
    protocol_version: str


@dataclass(frozen=True)
class HarvestedRecord:
    """One record as seen by a harvesting client."""

    identifier: str
    datestamp: str
    deleted: bool = False
    record: Optional[MetadataRecord] = None


# -- resumption tokens ---------------------------------------------

def encode_token(prefix: str, from_: Optional[str], until: Optional[str],
                 offset: int, version: int) -> str:
    payload = {"p": prefix, "f": from_, "u": until, "o": offset, "v": version}
    raw = json.dumps(payload, separators=(",", ":")).encode("utf-8")
    return base64.urlsafe_b64encode(raw).decode("ascii").rstrip("=")


def decode_token(token: str) -> dict:
    try:
        padded = token + "=" * (-len(token) % 4)
        payload = json.loads(base64.urlsafe_b64decode(padded.encode("ascii")))
        if set(payload) != {"p", "f", "u", "o", "v"}:
            raise ValueError("wrong fields")
        if not isinstance(payload["o"], int) or not isinstance(payload["v"], int):
            raise ValueError("wrong types")
        return payload
    except Exception:
        raise OaiError(BAD_RESUMPTION_TOKEN,
                       "resumption token is not decodable") from None


# -- server side ----------------------------------------------------

def _xml_attr(value: str) -> str:
    return escape(value, {'"': "&quot;"})


def _request_echo(base_url: str, params: dict[str, str]) -> str:
    attrs = "".join(f' {key}="{_xml_attr(value)}"'
                    for key, value in sorted(params.items()))
    return f"  <request{attrs}>{escape(base_url)}</request>"


def _envelope(base_url: str, params: dict[str, str], body_lines: list[str],
              response_date: str) -> bytes:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f"<{RESPONSE_ROOT}>",
             f"  <responseDate>{response_date}</responseDate>",
             _request_echo(base_url, params)]
    lines.extend(body_lines)
    lines.append(f"</{RESPONSE_ROOT}>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _error_body(error: OaiError) -> list[str]:
    return [f'  <error code="{_xml_attr(error.code)}">'
            f"{escape(error.oai_message)}</error>"]


def _require_args(params: dict[str, str], required: set[str],
                  optional: set[str]) -> None:
    given = set(params) - {"verb"}
    missing = required - given
    if missing:
        raise OaiError(BAD_ARGUMENT,
                       f"missing argument(s): {', '.join(sorted(missing))}")
    extra = given - required - optional
    if extra:
        raise OaiError(BAD_ARGUMENT,
                       f"illegal argument(s): {', '.join(sorted(extra))}")


def _parse_bound(value: str, end_of_day: bool) -> str:
    if _DATE_ONLY_RE.match(value):
        return value + ("T23:59:59Z" if end_of_day else "T00:00:00Z")
    try:
        return check_datestamp(value)
    except BadDatestamp:
        raise OaiError(BAD_ARGUMENT,
                       f"date {value!r} is neither YYYY-MM-DD nor "
                       "YYYY-MM-DDTHH:MM:SSZ") from None


def _check_prefix(prefix: str) -> str:
    if prefix not in METADATA_PREFIXES:
        raise OaiError(BAD_ARGUMENT,
                       f"metadataPrefix {prefix!r} is not one of "
                       f"{', '.join(METADATA_PREFIXES)}")
    return prefix


def _serialize_payload(record: MetadataRecord, prefix: str, registry) -> str:
    if prefix == "olac":
        payload = xmlio.serialize_record(record, registry)
    else:
        payload = crosswalk.serialize_dc(crosswalk.dc_crosswalk(record, registry))
    text = payload.decode("utf-8")
    # Drop the declaration line; the envelope already has one.
    return text.split("\n", 1)[1].rstrip("\n")


def _header_lines(item, indent: str) -> list[str]:
    status = ' status="deleted"' if item.deleted else ""
    return [f"{indent}<header{status}>",
            f"{indent}  <identifier>{escape(item.identifier)}</identifier>",
            f"{indent}  <datestamp>{item.datestamp}</datestamp>",
            f"{indent}</header>"]


def _record_lines(item, prefix: str, registry) -> list[str]:
    lines = ["    <record>"]
    lines.extend(_header_lines(item, "      "))
    if not item.deleted:
        lines.append("      <metadata>")
        lines.append(_serialize_payload(item.record, prefix, registry))
        lines.append("      </metadata>")
    lines.append("    </record>")
    return lines


def _resolve_selection(repo: Repository,
                       params: dict[str, str]) -> tuple[str, Optional[str], Optional[str], int]:
    """Work out (prefix, from, until, offset) for a list verb, from
    either explicit arguments or a resumption token."""
    if "resumptionToken" in params:
        _require_args(params, {"resumptionToken"}, set())
        payload = decode_token(params["resumptionToken"])
        if payload["v"] != repo.version:
            raise OaiError(BAD_RESUMPTION_TOKEN,
                           "repository changed; restart the harvest")
        prefix = _check_prefix(payload["p"])
        return prefix, payload["f"], payload["u"], payload["o"]
    _require_args(params, {"metadataPrefix"}, {"from", "until"})
    prefix = _check_prefix(params["metadataPrefix"])
    from_ = _parse_bound(params["from"], False) if "from" in params else None
    until = _parse_bound(params["until"], True) if "until" in params else None
    if from_ is not None and until is not None and from_ > until:
        raise OaiError(BAD_ARGUMENT, "from is later than until")
    return prefix, from_, until, 0


def _list_body(repo: Repository, params: dict[str, str], verb: str,
               page_size: int, registry) -> list[str]:
    prefix, from_, until, offset = _resolve_selection(repo, params)
    selection = repo.select(from_, until)
    if not selection:
        raise OaiError(NO_RECORDS_MATCH,
                       "no items have datestamps within the requested range")
    if offset >= len(selection):
        raise OaiError(BAD_RESUMPTION_TOKEN, "token offset is out of range")
    page = selection[offset:offset + page_size]
    lines = [f"  <{verb}>"]
    for item in page:
        if verb == "ListRecords":
            lines.extend(_record_lines(item, prefix, registry))
        else:
            lines.extend(_header_lines(item, "    "))
    if offset + page_size < len(selection):
        token = encode_token(prefix, from_, until, offset + page_size,
                             repo.version)
        lines.append(f"    <resumptionToken>{token}</resumptionToken>")
    lines.append(f"  </{verb}>")
    return lines


def _identify_body(repo: Repository, params: dict[str, str],
                   base_url: str) -> list[str]:
    _require_args(params, set(), set())
    return [
        "  <Identify>",
        f"    <archiveId>{escape(repo.archive_id)}</archiveId>",
        f"    <name>{escape(repo.name)}</name>",
        f"    <baseURL>{escape(base_url)}</baseURL>",
        f"    <earliestDatestamp>{repo.earliest_datestamp()}</earliestDatestamp>",
        f"    <protocolVersion>{PROTOCOL_VERSION}</protocolVersion>",
        "  </Identify>",
    ]


def _get_record_body(repo: Repository, params: dict[str, str],
                     registry) -> list[str]:
    _require_args(params, {"identifier", "metadataPrefix"}, set())
    prefix = _check_prefix(params["metadataPrefix"])
    identifier = params["identifier"]
    try:
        split_identifier(identifier)
    except BadIdentifier as exc:
        raise OaiError(BAD_ARGUMENT, str(exc)) from None
    try:
        item = repo.get(identifier)
    except UnknownItem:
        raise OaiError(ID_DOES_NOT_EXIST,
                       f"no item {identifier!r} in this repository") from None
    return ["  <GetRecord>"] + _record_lines(item, prefix, registry) + ["  </GetRecord>"]


def handle_request(repo: Repository, base_url: str, params: dict[str, str],
                   page_size: int = DEFAULT_PAGE_SIZE, registry=None) -> bytes:
    """Answer one protocol request. Always returns a full envelope;
    all failures travel as in-band error elements."""
    response_date = format_datestamp(repo.clock())
    try:
        verb = params.get("verb")
        if verb is None:
            raise OaiError(BAD_VERB, "request has no verb argument")
        if verb == "Identify":
            body = _identify_body(repo, params, base_url)
        elif verb == "GetRecord":
            body = _get_record_body(repo, params, registry)
        elif verb in ("ListRecords", "ListIdentifiers"):
            body = _list_body(repo, params, verb, page_size, registry)
        else:
            raise OaiError(BAD_VERB, f"verb {verb!r} is not one of "
                                     f"{', '.join(VERBS)}")
    except OaiError as error:
        body = _error_body(error)
    return _envelope(base_url, params, body, response_date)


def error_response(repo: Repository, base_url: str, params: dict[str, str],
                   code: str, message: str) -> bytes:
    """A full envelope carrying one error, for faults detected before
    handle_request can run (e.g. an unparseable query string)."""
    response_date = format_datestamp(repo.clock())
    return _envelope(base_url, params, _error_body(OaiError(code, message)),
                     response_date)


# -- client side ----------------------------------------------------

def _client_root(data: bytes) -> ET.Element:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ProtocolError(f"response is not well-formed XML: {exc}") from None
    if root.tag != RESPONSE_ROOT:
        raise ProtocolError(f"response root is {root.tag!r}, "
                            f"expected {RESPONSE_ROOT!r}")
    error = root.find("error")
    if error is not None:
        raise OaiError(error.get("code", "unknown"), (error.text or "").strip())
    return root


def _required_child(parent: ET.Element, tag: str) -> ET.Element:
    child = parent.find(tag)
    if child is None:
        raise ProtocolError(f"response lacks a {tag!r} element")
    return child


def _child_text(parent: ET.Element, tag: str) -> str:
    return (_required_child(parent, tag).text or "").strip()


def parse_identify(data: bytes) -> IdentifyInfo:
    body = _required_child(_client_root(data), "Identify")
    return IdentifyInfo(
        archive_id=_child_text(body, "archiveId"),
        name=_child_text(body, "name"),
        base_url=_child_text(body, "baseURL"),
        earliest_datestamp=_child_text(body, "earliestDatestamp"),
        protocol_version=_child_text(body, "protocolVersion"),
    )


def _parse_header(header: ET.Element) -> tuple[str, str, bool]:
    identifier = _child_text(header, "identifier")
    datestamp = _child_text(header, "datestamp")
    if not identifier or not datestamp:
        raise ProtocolError("record header lacks identifier or datestamp")
    return identifier, datestamp, header.get("status") == "deleted"


def _parse_record_element(element: ET.Element) -> HarvestedRecord:
    identifier, datestamp, deleted = _parse_header(
        _required_child(element, "header"))
    if deleted:
        return HarvestedRecord(identifier, datestamp, deleted=True)
    metadata = _required_child(element, "metadata")
    payload = list(metadata)
    if len(payload) != 1:
        raise ProtocolError(f"metadata of {identifier!r} does not hold "
                            "exactly one document")
    outcome = xmlio.parse_record(ET.tostring(payload[0], encoding="utf-8"))
    if not outcome.ok:
        raise ProtocolError(
            f"record {identifier!r} payload unreadable: "
            f"{outcome.diagnostics[0].message}")
    return HarvestedRecord(identifier, datestamp, record=outcome.record)


def parse_list_records(data: bytes) -> tuple[list[HarvestedRecord], Optional[str]]:
    body = _required_child(_client_root(data), "ListRecords")
    records = [_parse_record_element(e) for e in body.findall("record")]
    token_element = body.find("resumptionToken")
    token = (token_element.text or "").strip() if token_element is not None else None
    return records, token or None


def parse_list_identifiers(data: bytes) -> tuple[list[HarvestedRecord], Optional[str]]:
    body = _required_child(_client_root(data), "ListIdentifiers")
    headers = []
    for element in body.findall("header"):
        identifier, datestamp, deleted = _parse_header(element)
        headers.append(HarvestedRecord(identifier, datestamp, deleted=deleted))
    token_element = body.find("resumptionToken")
    token = (token_element.text or "").strip() if token_element is not None else None
    return headers, token or None


def parse_get_record(data: bytes) -> HarvestedRecord:
    body = _required_child(_client_root(data), "GetRecord")
    return _parse_record_element(_required_child(body, "record"))
