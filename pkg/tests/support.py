"""Shared test helpers: hypothesis strategies and a fake clock."""

from datetime import datetime, timezone

from hypothesis import strategies as st

from olac import model
from olac.repository import parse_datestamp
from olac.vocab import default_registry

REGISTRY = default_registry()


class FakeClock:
    """Settable time source for deterministic datestamps."""

    def __init__(self, start="2026-01-01T00:00:00Z"):
        self.moment = parse_datestamp(start)

    def tick(self, seconds=1):
        self.moment = datetime.fromtimestamp(
            self.moment.timestamp() + seconds, tz=timezone.utc)

    def __call__(self):
        return self.moment

LANG_CODES = sorted(
    term.code
    for term in REGISTRY.vocabulary("OLAC-Language").terms
    if not term.ambiguous
)

# Characters legal both in element content and in XML 1.0 documents.
_XML_CHARS = st.characters(
    min_codepoint=0x20,
    max_codepoint=0x2FFF,
    blacklist_categories=("Cs", "Co", "Cn"),
)


def language_codes():
    return st.sampled_from(LANG_CODES)


def xml_texts(max_size=40):
    return st.text(alphabet=_XML_CHARS, max_size=max_size)


@st.composite
def valid_elements(draw):
    name = draw(st.sampled_from(model.ELEMENT_NAMES))
    descriptor = model.descriptor_for(name)
    refine = None
    if descriptor.refine_fixed is not None and draw(st.booleans()):
        refine = descriptor.refine_fixed
    elif descriptor.refine_vocabulary is not None and draw(st.booleans()):
        refine = draw(st.sampled_from(
            [t.code for t in REGISTRY.vocabulary(descriptor.refine_vocabulary).terms]))
    code = None
    if descriptor.code_vocabulary is not None and draw(st.booleans()):
        code = draw(st.sampled_from(
            [t.code for t in REGISTRY.vocabulary(descriptor.code_vocabulary).terms
             if not t.ambiguous]))
    lang = draw(st.one_of(st.none(), language_codes()))
    content = draw(xml_texts())
    return model.MetadataElement(name=name, refine=refine, code=code,
                                 lang=lang, content=content)


@st.composite
def valid_records(draw, max_elements=8):
    alternatives = draw(st.lists(language_codes(), min_size=1, max_size=4,
                                 unique=True))
    elements = draw(st.lists(valid_elements(), max_size=max_elements))
    return model.MetadataRecord(alternatives=tuple(alternatives),
                                elements=tuple(elements))


# A tool and a data set that share a markup code: the canonical join
# fixture (lexicon software paired with a Hungarian lexicon it reads).
def lexicon_tool_record():
    return model.MetadataRecord(elements=(
        model.MetadataElement("Title", content="Lexicon workbench"),
        model.MetadataElement("Type.functionality", content="Lexica"),
        model.MetadataElement("Format.markup", code="oai:ex:sf"),
    ))


def hungarian_data_record():
    return model.MetadataRecord(elements=(
        model.MetadataElement("Title", content="Hungarian lexicon"),
        model.MetadataElement("Subject.language", code="hu"),
        model.MetadataElement("Format.markup", code="oai:ex:sf"),
        model.MetadataElement("Type.data", code="lexicon"),
    ))
