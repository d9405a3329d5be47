import pytest
from hypothesis import given, strategies as st

from olac import model
from olac.model import (
    Diagnostic,
    MetadataElement,
    MetadataRecord,
    SelectedNotAlternative,
    UnknownElement,
    canonical_element_name,
    descriptor_for,
    effective_lang,
    render_view,
    validate_record,
)
from support import valid_elements, valid_records


def errors(diags):
    return [d for d in diags if d.severity == model.ERROR]


def rules(diags):
    return {d.rule for d in diags}


class TestDescriptorTable:
    def test_exactly_24_names(self):
        assert len(model.ELEMENT_NAMES) == 24

    def test_expected_names(self):
        assert model.ELEMENT_NAMES == (
            "Contributor", "Coverage", "Creator", "Date", "Description",
            "Format", "Format.cpu", "Format.encoding", "Format.markup",
            "Format.os", "Format.sourcecode", "Identifier", "Language",
            "Publisher", "Relation", "Rights", "Rights.software", "Source",
            "Subject", "Subject.language", "Title", "Type", "Type.data",
            "Type.functionality")

    def test_refine_vocabulary_assignments(self):
        assert descriptor_for("Contributor").refine_vocabulary == "OLAC-Role"
        assert descriptor_for("Creator").refine_vocabulary == "OLAC-Role"
        assert descriptor_for("Date").refine_vocabulary == "DCQ-Date"
        assert descriptor_for("Relation").refine_vocabulary == "DCQ-Relation"
        assert descriptor_for("Language").refine_fixed == "OLAC"
        assert descriptor_for("Subject.language").refine_fixed == "OLAC"
        for name in model.ELEMENT_NAMES:
            d = descriptor_for(name)
            if name not in {"Contributor", "Creator", "Date", "Relation",
                            "Language", "Subject.language"}:
                assert d.refine_vocabulary is None and d.refine_fixed is None

    def test_code_vocabulary_assignments(self):
        expected = {
            "Format": "OLAC-Format", "Format.cpu": "OLAC-CPU",
            "Format.encoding": "OLAC-Encoding", "Format.markup": "OLAC-Markup",
            "Format.os": "OLAC-OS", "Format.sourcecode": "OLAC-Sourcecode",
            "Language": "OLAC-Language", "Subject.language": "OLAC-Language",
            "Rights": "OLAC-Rights", "Rights.software": "OLAC-Software-Rights",
            "Type": "DC-Type", "Type.data": "OLAC-Data",
            "Type.functionality": "OLAC-Functionality",
        }
        for name in model.ELEMENT_NAMES:
            assert descriptor_for(name).code_vocabulary == expected.get(name)

    def test_creator_has_no_code_vocabulary(self):
        assert descriptor_for("Creator").code_vocabulary is None

    def test_unknown_name(self):
        with pytest.raises(UnknownElement):
            descriptor_for("Banana")

    def test_case_insensitive_canonicalization(self):
        assert canonical_element_name("subject.LANGUAGE") == "Subject.language"
        assert canonical_element_name("title") == "Title"

    def test_definitions_are_single_sentences(self):
        for name in model.ELEMENT_NAMES:
            definition = descriptor_for(name).definition
            assert definition.endswith(".") and definition.count(".") == 1


class TestElementNormalization:
    def test_default_lang_dropped(self):
        assert MetadataElement("Title", lang="en").lang is None

    def test_other_lang_kept(self):
        assert MetadataElement("Title", lang="fr").lang == "fr"

    def test_blank_attributes_become_absent(self):
        e = MetadataElement("Title", refine="  ", code="", lang=" ")
        assert e.refine is None and e.code is None and e.lang is None

    def test_content_whitespace_collapsed(self):
        e = MetadataElement("Description", content="  a\n  b\tc  ")
        assert e.content == "a b c"

    def test_effective_lang(self):
        assert effective_lang(MetadataElement("Title", lang="fr")) == "fr"
        assert effective_lang(MetadataElement("Title")) == "en"
        assert effective_lang(MetadataElement("Title", lang="x-sil-BAN")) == "x-sil-BAN"


class TestValidation:
    def test_plain_title_is_clean(self):
        record = MetadataRecord(elements=(MetadataElement("Title", content="KPML"),))
        assert validate_record(record) == []

    def test_unknown_element_name(self):
        record = MetadataRecord(elements=(MetadataElement("Banana", content="x"),))
        diags = validate_record(record)
        assert [d.rule for d in errors(diags)] == [model.UNKNOWN_ELEMENT]
        assert diags[0].element_index == 0

    def test_code_unknown(self):
        record = MetadataRecord(elements=(
            MetadataElement("Subject.language", code="zz-zz"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.CODE_UNKNOWN]

    def test_code_ambiguous_names_the_group(self):
        record = MetadataRecord(elements=(
            MetadataElement("Subject.language", code="mhk"),))
        diags = errors(validate_record(record))
        assert [d.rule for d in diags] == [model.CODE_AMBIGUOUS]
        assert "other Mon Khmer languages" in diags[0].message

    def test_code_not_allowed(self):
        record = MetadataRecord(elements=(
            MetadataElement("Title", code="en", content="x"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.CODE_NOT_ALLOWED]

    def test_refine_not_allowed(self):
        record = MetadataRecord(elements=(
            MetadataElement("Title", refine="author", content="x"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.REFINE_NOT_ALLOWED]

    def test_refine_unknown(self):
        record = MetadataRecord(elements=(
            MetadataElement("Creator", refine="Banana", content="x"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.REFINE_UNKNOWN]

    def test_refine_resolves_case_insensitively(self):
        record = MetadataRecord(elements=(
            MetadataElement("Creator", refine="Author", content="Bateman, John"),))
        assert validate_record(record) == []

    def test_fixed_refine_accepted(self):
        record = MetadataRecord(elements=(
            MetadataElement("Subject.language", refine="OLAC", code="bg"),))
        assert validate_record(record) == []

    def test_fixed_refine_wrong_value(self):
        record = MetadataRecord(elements=(
            MetadataElement("Subject.language", refine="author", code="bg"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.REFINE_UNKNOWN]

    def test_unlisted_code_in_open_vocabulary_warns(self):
        record = MetadataRecord(elements=(
            MetadataElement("Format.markup", code="oai:example:my-dtd"),))
        diags = validate_record(record)
        assert errors(diags) == []
        assert rules(diags) == {model.CODE_UNLISTED}

    def test_markup_code_of_wrong_shape_is_an_error(self):
        record = MetadataRecord(elements=(
            MetadataElement("Format.markup", code="plain-name"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.CODE_UNKNOWN]

    def test_empty_coded_element_warns(self):
        record = MetadataRecord(elements=(MetadataElement("Format.os"),))
        diags = validate_record(record)
        assert errors(diags) == []
        assert rules(diags) == {model.EMPTY_ELEMENT}

    def test_text_without_code_warns(self):
        record = MetadataRecord(elements=(
            MetadataElement("Format.os", content="some odd platform"),))
        diags = validate_record(record)
        assert errors(diags) == []
        assert rules(diags) == {model.NO_CODE}

    def test_functionality_free_text_draws_no_warning(self):
        record = MetadataRecord(elements=(
            MetadataElement("Type.functionality", content="Annotation Tools"),))
        assert validate_record(record) == []

    def test_lang_unknown(self):
        record = MetadataRecord(elements=(
            MetadataElement("Title", lang="zz-zz", content="x"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.LANG_UNKNOWN]

    def test_lang_ambiguous(self):
        record = MetadataRecord(elements=(
            MetadataElement("Title", lang="mhk", content="x"),))
        assert [d.rule for d in errors(validate_record(record))] == [model.LANG_AMBIGUOUS]

    def test_alternatives_must_not_be_empty(self):
        record = MetadataRecord(alternatives=())
        assert [d.rule for d in errors(validate_record(record))] == [model.ALTERNATIVES_INVALID]

    def test_alternatives_entries_must_resolve(self):
        record = MetadataRecord(alternatives=("en", "zz-zz"))
        diags = errors(validate_record(record))
        assert [d.rule for d in diags] == [model.ALTERNATIVES_INVALID]
        assert diags[0].element_index is None

    def test_alternatives_ambiguous_entry_rejected(self):
        record = MetadataRecord(alternatives=("en", "mhk"))
        assert [d.rule for d in errors(validate_record(record))] == [model.ALTERNATIVES_INVALID]

    def test_alternatives_duplicates_rejected(self):
        record = MetadataRecord(alternatives=("en", "fr", "EN"))
        assert [d.rule for d in errors(validate_record(record))] == [model.ALTERNATIVES_DUPLICATE]

    def test_require_valid_raises_with_diagnostics(self):
        record = MetadataRecord(elements=(
            MetadataElement("Subject.language", code="zz-zz"),))
        with pytest.raises(model.InvalidRecord) as exc_info:
            model.require_valid(record)
        assert any(d.rule == model.CODE_UNKNOWN for d in exc_info.value.diagnostics)

    @given(valid_records())
    def test_generated_records_have_no_errors(self, record):
        assert errors(validate_record(record)) == []

    @given(valid_records(), st.data())
    def test_repeating_an_element_never_adds_an_error(self, record, data):
        extra = data.draw(valid_elements())
        bigger = MetadataRecord(record.alternatives, record.elements + (extra, extra))
        assert errors(validate_record(bigger)) == []

    @given(valid_records(max_elements=5), st.randoms())
    def test_diagnostics_invariant_under_element_order(self, record, rng):
        shuffled = list(record.elements)
        rng.shuffle(shuffled)
        permuted = MetadataRecord(record.alternatives, tuple(shuffled))
        def multiset(diags):
            return sorted((d.severity, d.rule, d.message) for d in diags)
        assert multiset(validate_record(record)) == multiset(validate_record(permuted))


class TestRenderView:
    title_en = MetadataElement("Title", content="The grammar", lang="en")
    title_fr = MetadataElement("Title", content="La grammaire", lang="fr")
    title_ban = MetadataElement("Title", content="(vernacular)", lang="x-sil-BAN")

    def test_multi_alternative_selection(self):
        record = MetadataRecord(("en", "fr"),
                                (self.title_en, self.title_fr, self.title_ban))
        assert render_view(record, selected="en") == [self.title_en, self.title_ban]
        assert render_view(record, selected="fr") == [self.title_fr, self.title_ban]

    def test_selected_must_be_an_alternative(self):
        record = MetadataRecord(("en", "fr"), (self.title_en,))
        with pytest.raises(SelectedNotAlternative):
            render_view(record, selected="de")
        with pytest.raises(SelectedNotAlternative):
            render_view(record)

    def test_single_alternative_shows_everything(self):
        record = MetadataRecord(("en",),
                                (self.title_en, self.title_fr, self.title_ban))
        assert render_view(record) == [self.title_en, self.title_fr, self.title_ban]

    def test_single_alternative_suppression(self):
        record = MetadataRecord(("en",),
                                (self.title_en, self.title_fr, self.title_ban))
        assert render_view(record, suppressed={"fr"}) == [self.title_en, self.title_ban]

    def test_untagged_elements_count_as_english(self):
        untagged = MetadataElement("Description", content="plain")
        record = MetadataRecord(("en", "fr"), (untagged, self.title_fr))
        assert render_view(record, selected="en") == [untagged]
        assert render_view(record, selected="fr") == [self.title_fr]

    @given(valid_records())
    def test_view_is_a_subsequence(self, record):
        if len(record.alternatives) > 1:
            view = render_view(record, selected=record.alternatives[0])
        else:
            view = render_view(record)
        it = iter(record.elements)
        assert all(any(shown == e for e in it) for shown in view)

    @given(valid_records(), st.data())
    def test_selection_rule(self, record, data):
        if len(record.alternatives) <= 1:
            return
        selected = data.draw(st.sampled_from(record.alternatives))
        for element in render_view(record, selected=selected):
            lang = effective_lang(element)
            assert lang == selected or lang not in record.alternatives
        shown = render_view(record, selected=selected)
        for element in record.elements:
            lang = effective_lang(element)
            if lang == selected or lang not in record.alternatives:
                assert element in shown
