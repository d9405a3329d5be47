import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, strategies as st

from olac import protocol
from olac.model import MetadataElement, MetadataRecord
from olac.protocol import (
    OaiError,
    ProtocolError,
    decode_token,
    encode_token,
    handle_request,
    parse_get_record,
    parse_identify,
    parse_list_identifiers,
    parse_list_records,
)
from olac.repository import Repository
from support import FakeClock

BASE = "http://localhost:8080/"


def record(title):
    return MetadataRecord(elements=(MetadataElement("Title", content=title),))


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def repo(clock, kpml_record):
    repo = Repository("dfki", name="DFKI Archive", clock=clock)
    repo.put("oai:dfki:KPML", kpml_record, datestamp="2026-01-01T00:00:00Z")
    repo.put("oai:dfki:A", record("Alpha"), datestamp="2026-01-02T00:00:00Z")
    repo.put("oai:dfki:B", record("Beta"), datestamp="2026-01-03T00:00:00Z")
    return repo


def ask(repo, **params):
    return handle_request(repo, BASE, params, page_size=100)


def error_code(data):
    root = ET.fromstring(data)
    error = root.find("error")
    assert error is not None, data.decode()
    return error.get("code")


class TestEnvelope:
    def test_response_date_and_request_echo(self, repo):
        data = ask(repo, verb="Identify")
        root = ET.fromstring(data)
        assert root.tag == "repository-response"
        assert root.find("responseDate").text == "2026-01-01T00:00:00Z"
        request = root.find("request")
        assert request.get("verb") == "Identify"
        assert request.text == BASE

    def test_no_verb(self, repo):
        assert error_code(handle_request(repo, BASE, {})) == "badVerb"

    def test_unknown_verb(self, repo):
        assert error_code(ask(repo, verb="Destroy")) == "badVerb"


class TestIdentify:
    def test_fields(self, repo):
        info = parse_identify(ask(repo, verb="Identify"))
        assert info.archive_id == "dfki"
        assert info.name == "DFKI Archive"
        assert info.base_url == BASE
        assert info.earliest_datestamp == "2026-01-01T00:00:00Z"
        assert info.protocol_version == "olac-desk-1"

    def test_empty_repository_sentinel(self, clock):
        empty = Repository("x", clock=clock)
        info = parse_identify(ask(empty, verb="Identify"))
        assert info.earliest_datestamp == "1970-01-01T00:00:00Z"

    def test_extra_argument_rejected(self, repo):
        assert error_code(ask(repo, verb="Identify", x="1")) == "badArgument"


class TestListRecords:
    def test_all_records(self, repo, kpml_record):
        records, token = parse_list_records(
            ask(repo, verb="ListRecords", metadataPrefix="olac"))
        assert token is None
        assert [r.identifier for r in records] == [
            "oai:dfki:KPML", "oai:dfki:A", "oai:dfki:B"]
        assert records[0].record == kpml_record

    def test_missing_prefix(self, repo):
        assert error_code(ask(repo, verb="ListRecords")) == "badArgument"

    def test_unknown_prefix(self, repo):
        assert error_code(ask(repo, verb="ListRecords",
                              metadataPrefix="marc")) == "badArgument"

    def test_unknown_argument(self, repo):
        assert error_code(ask(repo, verb="ListRecords", metadataPrefix="olac",
                              set="x")) == "badArgument"

    def test_date_window_inclusive(self, repo):
        records, _ = parse_list_records(
            ask(repo, verb="ListRecords", metadataPrefix="olac",
                **{"from": "2026-01-02T00:00:00Z", "until": "2026-01-03T00:00:00Z"}))
        assert [r.identifier for r in records] == ["oai:dfki:A", "oai:dfki:B"]

    def test_date_only_bounds_cover_whole_days(self, repo):
        records, _ = parse_list_records(
            ask(repo, verb="ListRecords", metadataPrefix="olac",
                **{"from": "2026-01-02", "until": "2026-01-02"}))
        assert [r.identifier for r in records] == ["oai:dfki:A"]

    def test_bad_date(self, repo):
        assert error_code(ask(repo, verb="ListRecords", metadataPrefix="olac",
                              **{"from": "yesterday"})) == "badArgument"

    def test_from_after_until(self, repo):
        assert error_code(ask(
            repo, verb="ListRecords", metadataPrefix="olac",
            **{"from": "2026-01-03T00:00:00Z",
               "until": "2026-01-02T00:00:00Z"})) == "badArgument"

    def test_no_records_match(self, repo):
        with pytest.raises(OaiError) as exc_info:
            parse_list_records(ask(repo, verb="ListRecords", metadataPrefix="olac",
                                   **{"from": "2027-01-01T00:00:00Z"}))
        assert exc_info.value.code == "noRecordsMatch"

    def test_tombstones_appear_with_status(self, repo):
        repo.delete("oai:dfki:A", datestamp="2026-01-04T00:00:00Z")
        records, _ = parse_list_records(
            ask(repo, verb="ListRecords", metadataPrefix="olac"))
        by_id = {r.identifier: r for r in records}
        assert by_id["oai:dfki:A"].deleted
        assert by_id["oai:dfki:A"].record is None
        assert not by_id["oai:dfki:B"].deleted

    def test_sort_is_datestamp_then_identifier(self, clock):
        repo = Repository("x", clock=clock)
        repo.put("oai:x:b", record("B"), datestamp="2026-01-01T00:00:00Z")
        repo.put("oai:x:a", record("A"), datestamp="2026-01-01T00:00:00Z")
        repo.put("oai:x:c", record("C"), datestamp="2025-01-01T00:00:00Z")
        records, _ = parse_list_records(
            ask(repo, verb="ListRecords", metadataPrefix="olac"))
        assert [r.identifier for r in records] == ["oai:x:c", "oai:x:a", "oai:x:b"]

    def test_dc_payload(self, repo):
        data = ask(repo, verb="ListRecords", metadataPrefix="oai_dc")
        root = ET.fromstring(data)
        first = root.find("ListRecords/record/metadata/dc")
        assert first is not None
        names = {child.tag for child in first}
        assert names <= {"Title", "Creator", "Subject", "Description", "Publisher",
                         "Contributor", "Date", "Type", "Format", "Identifier",
                         "Source", "Language", "Relation", "Coverage", "Rights"}


class TestPaging:
    def test_two_pages(self, repo):
        first = handle_request(repo, BASE, {"verb": "ListRecords",
                                            "metadataPrefix": "olac"}, page_size=2)
        records, token = parse_list_records(first)
        assert len(records) == 2 and token
        second = handle_request(repo, BASE, {"verb": "ListRecords",
                                             "resumptionToken": token}, page_size=2)
        more, token2 = parse_list_records(second)
        assert [r.identifier for r in more] == ["oai:dfki:B"]
        assert token2 is None

    @pytest.mark.parametrize("page_size", [1, 2, 3, 100])
    def test_concatenated_pages_equal_unpaged(self, repo, page_size):
        unpaged, _ = parse_list_records(ask(repo, verb="ListRecords",
                                            metadataPrefix="olac"))
        harvested = []
        params = {"verb": "ListRecords", "metadataPrefix": "olac"}
        while True:
            records, token = parse_list_records(
                handle_request(repo, BASE, params, page_size=page_size))
            harvested.extend(records)
            if not token:
                break
            params = {"verb": "ListRecords", "resumptionToken": token}
        assert harvested == unpaged

    def test_token_with_other_arguments_rejected(self, repo):
        first = handle_request(repo, BASE, {"verb": "ListRecords",
                                            "metadataPrefix": "olac"}, page_size=2)
        _, token = parse_list_records(first)
        data = ask(repo, verb="ListRecords", resumptionToken=token,
                   metadataPrefix="olac")
        assert error_code(data) == "badArgument"

    def test_garbage_token_rejected(self, repo):
        data = ask(repo, verb="ListRecords", resumptionToken="!!not-base64!!")
        assert error_code(data) == "badResumptionToken"

    def test_token_expires_on_mutation(self, repo, clock):
        first = handle_request(repo, BASE, {"verb": "ListRecords",
                                            "metadataPrefix": "olac"}, page_size=2)
        _, token = parse_list_records(first)
        clock.tick()
        repo.put("oai:dfki:C", record("Gamma"))
        data = ask(repo, verb="ListRecords", resumptionToken=token)
        assert error_code(data) == "badResumptionToken"

    def test_token_round_trip(self):
        token = encode_token("olac", "2026-01-01T00:00:00Z", None, 7, 3)
        assert decode_token(token) == {"p": "olac", "f": "2026-01-01T00:00:00Z",
                                       "u": None, "o": 7, "v": 3}

    @given(st.text(max_size=40))
    def test_decode_never_crashes(self, token):
        try:
            decode_token(token)
        except OaiError as exc:
            assert exc.code == "badResumptionToken"


class TestGetRecord:
    def test_found(self, repo, kpml_record):
        got = parse_get_record(ask(repo, verb="GetRecord",
                                   identifier="oai:dfki:KPML",
                                   metadataPrefix="olac"))
        assert got.identifier == "oai:dfki:KPML"
        assert got.record == kpml_record

    def test_dc_variant_contains_language_labels(self, repo):
        data = ask(repo, verb="GetRecord", identifier="oai:dfki:KPML",
                   metadataPrefix="oai_dc")
        root = ET.fromstring(data)
        subjects = [e.text for e in root.findall("GetRecord/record/metadata/dc/Subject")]
        assert "Bulgarian" in subjects

    def test_missing_item(self, repo):
        data = ask(repo, verb="GetRecord", identifier="oai:dfki:NOPE",
                   metadataPrefix="olac")
        assert error_code(data) == "idDoesNotExist"

    def test_malformed_identifier(self, repo):
        data = ask(repo, verb="GetRecord", identifier="NOPE",
                   metadataPrefix="olac")
        assert error_code(data) == "badArgument"

    def test_missing_arguments(self, repo):
        assert error_code(ask(repo, verb="GetRecord")) == "badArgument"

    def test_deleted_item_returns_tombstone(self, repo):
        repo.delete("oai:dfki:A", datestamp="2026-01-04T00:00:00Z")
        got = parse_get_record(ask(repo, verb="GetRecord",
                                   identifier="oai:dfki:A",
                                   metadataPrefix="olac"))
        assert got.deleted and got.record is None


class TestListIdentifiers:
    def test_headers_match_list_records(self, repo):
        repo.delete("oai:dfki:B", datestamp="2026-01-04T00:00:00Z")
        records, _ = parse_list_records(ask(repo, verb="ListRecords",
                                            metadataPrefix="olac"))
        headers, _ = parse_list_identifiers(ask(repo, verb="ListIdentifiers",
                                                metadataPrefix="olac"))
        assert [(h.identifier, h.datestamp, h.deleted) for h in headers] == \
               [(r.identifier, r.datestamp, r.deleted) for r in records]

    def test_date_filtering_consistent(self, repo):
        window = {"from": "2026-01-02T00:00:00Z", "until": "2026-01-03T00:00:00Z"}
        records, _ = parse_list_records(ask(repo, verb="ListRecords",
                                            metadataPrefix="olac", **window))
        headers, _ = parse_list_identifiers(ask(repo, verb="ListIdentifiers",
                                                metadataPrefix="olac", **window))
        assert {h.identifier for h in headers} == {r.identifier for r in records}


class TestClientRobustness:
    def test_malformed_envelope(self):
        with pytest.raises(ProtocolError):
            parse_list_records(b"<not-xml")

    def test_wrong_root(self):
        with pytest.raises(ProtocolError):
            parse_identify(b"<something/>")

    def test_missing_body(self):
        with pytest.raises(ProtocolError):
            parse_list_records(b"<repository-response/>")

    def test_error_element_raised(self):
        data = (b'<repository-response><error code="badVerb">nope</error>'
                b"</repository-response>")
        with pytest.raises(OaiError) as exc_info:
            parse_identify(data)
        assert exc_info.value.code == "badVerb"
        assert exc_info.value.oai_message == "nope"
